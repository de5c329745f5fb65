"""Shared helpers for the test suite."""

import math
import random

from ddelta.exppoly import EP_ONE, EP_SIGMA, EP_Z, ExpPoly
from ddelta.hring import HElement
from ddelta.polys import poly_from
from ddelta.scalars import gr


def bisect_root(f, lo, hi, steps=200):
    """Bisection oracle for a sign change; independent of library numerics."""
    flo = f(lo)
    assert flo * f(hi) < 0
    for _ in range(steps):
        mid = (lo + hi) / 2
        if flo * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
            flo = f(lo)
    return (lo + hi) / 2


def omega_constant():
    """Real root of x*e^x = 1."""
    return bisect_root(lambda x: x * math.exp(x) - 1, 0.0, 1.0)


def _atom(rng: random.Random) -> HElement:
    """One factor from a family closed under exact Bezout resolution.

    Shift atoms sigma - c (constant c) pair with each other at constant
    resultant, and with z-power atoms through Taylor conditions at 0; both
    routes admit exact witnesses over Q(i).
    """
    kind = rng.randrange(4)
    if kind == 0:
        return HElement.make(EP_Z)
    if kind == 1:
        return HElement.make(EP_SIGMA - EP_ONE)
    if kind == 2:
        c = gr(rng.choice([-2, -1, 2, 3]), rng.choice([0, 0, 1]))
        return HElement.make(ExpPoly({1: poly_from([1]), 0: poly_from([-c])}))
    return HElement.make(ExpPoly({rng.choice([-1, 1]): poly_from([rng.choice([1, 2])])}))


def solvable_bezout_pairs(rng: random.Random, count: int):
    """Random H pairs with sigma-degree <= 3 and coefficient degree <= 3
    whose Bezout identities exist over Q(i) (atom products by construction)."""
    out = []
    while len(out) < count:
        a = HElement.make(EP_ONE)
        b = HElement.make(EP_ONE)
        for _ in range(rng.randint(1, 3)):
            a = a * _atom(rng)
        for _ in range(rng.randint(1, 3)):
            b = b * _atom(rng)
        if a.num.sigma_span > 3 or b.num.sigma_span > 3:
            continue
        if a.num.max_coeff_degree() > 3 or b.num.max_coeff_degree() > 3:
            continue
        if rng.random() < 0.3:
            scale = gr(rng.choice([-2, -1, 1, 2]), rng.choice([0, 1]))
            a = a * scale
        out.append((a, b))
    return out
