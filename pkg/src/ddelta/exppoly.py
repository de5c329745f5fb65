"""Exponential polynomials: Laurent polynomials in the shift sigma over Q(i)[z].

An ExpPoly stores Sum_j p_j(z) sigma^j as a sparse map from integer sigma
exponent to a nonzero Poly. Substituting sigma -> e^z gives the entire
characteristic function a*(z) = Sum_j p_j(z) e^{jz}; `eval` computes it
numerically, `taylor_at_zero` exactly.

RatExpPoly is the same shape over the fraction field Q(i)(z); it is the
natural home of Euclidean division (`laurent_divmod`).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Mapping

import numpy as np

from .errors import DivisionByZeroError, EvalOverflowError
from .polys import (
    POLY_ONE,
    POLY_ZERO,
    RAT_ONE as RAT_ONE_,
    Poly,
    RatFunc,
    poly_from,
    poly_gcd,
    poly_lcm,
)
from .scalars import GR_ONE, GR_ZERO, GaussianRational

_EXP_ARG_LIMIT = 700.0  # exp overflow threshold for float64


class ExpPoly:
    """Sparse Laurent polynomial in sigma with Poly coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, Poly] = ()):
        clean: Dict[int, Poly] = {}
        for j, p in dict(terms).items():
            if not isinstance(p, Poly):
                p = poly_from(p)
            if not p.is_zero():
                clean[int(j)] = p
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def __setattr__(self, name, value):
        raise AttributeError("ExpPoly is immutable")

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    @property
    def sigma_degree(self) -> int:
        """Highest sigma exponent (raises on zero)."""
        if not self.terms:
            raise ValueError("zero exponential polynomial")
        return max(self.terms)

    @property
    def sigma_valuation(self) -> int:
        if not self.terms:
            raise ValueError("zero exponential polynomial")
        return min(self.terms)

    @property
    def sigma_span(self) -> int:
        """sigma_degree - sigma_valuation (0 for monomials in sigma)."""
        return self.sigma_degree - self.sigma_valuation

    def coeff(self, j: int) -> Poly:
        return self.terms.get(j, POLY_ZERO)

    def max_coeff_degree(self) -> int:
        return max((p.degree for p in self.terms.values()), default=-1)

    def ode_order(self) -> int:
        """Sum_j (deg p_j + 1): a* solves a constant-coefficient ODE of
        this order, so a nonzero a* cannot vanish to this order anywhere."""
        return sum(p.degree + 1 for p in self.terms.values())

    def __eq__(self, other):
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __repr__(self):
        return f"ExpPoly({self.terms!r})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for j, p in self.terms.items():
            if j == 0:
                parts.append(f"({p})")
            elif j == 1:
                parts.append(f"({p})*s")
            else:
                parts.append(f"({p})*s^{j}")
        return " + ".join(parts)

    # -- ring operations -----------------------------------------------------

    def __add__(self, other):
        other = _as_ep(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for j, p in other.terms.items():
            out[j] = out.get(j, POLY_ZERO) + p
        return ExpPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return ExpPoly({j: -p for j, p in self.terms.items()})

    def __sub__(self, other):
        other = _as_ep(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _as_ep(other) - self

    def __mul__(self, other):
        if isinstance(other, ExpPoly):
            out: Dict[int, Poly] = {}
            for j1, p1 in self.terms.items():
                for j2, p2 in other.terms.items():
                    k = j1 + j2
                    prod = p1 * p2
                    out[k] = out.get(k, POLY_ZERO) + prod
            return ExpPoly(out)
        if isinstance(other, (Poly, GaussianRational, int)):
            return ExpPoly({j: p * other for j, p in self.terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative ExpPoly power; use sigma_shift for units")
        out = EP_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def sigma_shift(self, k: int) -> "ExpPoly":
        """Multiply by sigma^k."""
        if k == 0 or not self.terms:
            return self
        return ExpPoly({j + k: p for j, p in self.terms.items()})

    def scale(self, c: GaussianRational) -> "ExpPoly":
        return ExpPoly({j: p * c for j, p in self.terms.items()})

    # -- calculus -------------------------------------------------------------

    def derivative(self) -> "ExpPoly":
        """d/dz on the characteristic side: sigma^j picks up a factor j."""
        out: Dict[int, Poly] = {}
        for j, p in self.terms.items():
            out[j] = p.derivative() + p * j
        return ExpPoly(out)

    def content(self) -> Poly:
        """Monic gcd of the coefficient polynomials (0 for the zero element)."""
        g = POLY_ZERO
        for p in self.terms.values():
            g = poly_gcd(g, p)
            if g.is_one():
                break
        return g

    def exact_poly_div(self, d: Poly) -> "ExpPoly":
        return ExpPoly({j: p.exact_div(d) for j, p in self.terms.items()})

    # -- evaluation -------------------------------------------------------------

    def eval(self, z: complex) -> complex:
        """a*(z) = Sum_j p_j(z) e^{jz} in floating point."""
        z = complex(z)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ValueError("non-finite evaluation point")
        if self.terms:
            worst = max(abs(j) for j in self.terms) * abs(z.real)
            if worst > _EXP_ARG_LIMIT:
                raise EvalOverflowError(
                    f"|Re z| * max|sigma exponent| = {worst:.3g} exceeds float range"
                )
        out = 0j
        for j, p in self.terms.items():
            out += p.eval_complex(z) * np.exp(1j * z.imag * j) * math.exp(j * z.real)
        return out

    def eval_grid(self, Z: np.ndarray) -> np.ndarray:
        """Vectorized a* over an ndarray of complex points."""
        if not self.terms:
            return np.zeros_like(Z, dtype=complex)
        worst = max(abs(j) for j in self.terms) * float(np.max(np.abs(Z.real)))
        if worst > _EXP_ARG_LIMIT:
            raise EvalOverflowError(
                f"|Re z| * max|sigma exponent| = {worst:.3g} exceeds float range"
            )
        out = np.zeros_like(Z, dtype=complex)
        for j, p in self.terms.items():
            out += p.eval(Z) * np.exp(j * Z)
        return out

    def taylor_at_zero(self, order: int):
        """First `order` exact Taylor coefficients of a* at 0.

        Coefficient of z^N is Sum_j Sum_{t<=N} p_j[t] * j^{N-t} / (N-t)!.
        """
        out = []
        for n in range(order):
            acc = GR_ZERO
            for j, p in self.terms.items():
                for t in range(min(n, p.degree) + 1):
                    c = p[t]
                    if not c:
                        continue
                    k = n - t
                    acc = acc + c * Fraction(j**k, math.factorial(k))
            out.append(acc)
        return out

    def vanishing_order_at_zero(self) -> int:
        """ord_0 a*, exact. Bounded by ode_order()."""
        if not self.terms:
            raise ValueError("zero exponential polynomial")
        bound = self.ode_order()
        coeffs = self.taylor_at_zero(bound)
        for n, c in enumerate(coeffs):
            if c:
                return n
        raise AssertionError("nonzero ExpPoly with identically zero series")


def _as_ep(x):
    if isinstance(x, ExpPoly):
        return x
    if isinstance(x, Poly):
        return ExpPoly({0: x})
    if isinstance(x, (int, GaussianRational)):
        p = poly_from([x]) if x else POLY_ZERO
        return ExpPoly({0: p}) if p else EP_ZERO
    return NotImplemented


EP_ZERO = ExpPoly()
EP_ONE = ExpPoly({0: POLY_ONE})
EP_SIGMA = ExpPoly({1: POLY_ONE})
EP_Z = ExpPoly({0: poly_from([0, 1])})


def ep_from_poly(p: Poly) -> ExpPoly:
    return ExpPoly({0: p})


def ep_sigma(k: int = 1) -> ExpPoly:
    return ExpPoly({k: POLY_ONE})


# -- the rational-coefficient layer ----------------------------------------


class RatExpPoly:
    """Laurent polynomial in sigma over the field Q(i)(z)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, RatFunc] = ()):
        clean: Dict[int, RatFunc] = {}
        for j, r in dict(terms).items():
            if isinstance(r, Poly):
                r = RatFunc(r)
            if not r.is_zero():
                clean[int(j)] = r
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def __setattr__(self, name, value):
        raise AttributeError("RatExpPoly is immutable")

    @classmethod
    def from_exp(cls, a: ExpPoly) -> "RatExpPoly":
        return cls({j: RatFunc(p) for j, p in a.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    @property
    def sigma_degree(self) -> int:
        if not self.terms:
            raise ValueError("zero element")
        return max(self.terms)

    @property
    def sigma_valuation(self) -> int:
        if not self.terms:
            raise ValueError("zero element")
        return min(self.terms)

    def coeff(self, j: int) -> RatFunc:
        from .polys import RAT_ZERO

        return self.terms.get(j, RAT_ZERO)

    def __eq__(self, other):
        if not isinstance(other, RatExpPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __repr__(self):
        return f"RatExpPoly({self.terms!r})"

    def __add__(self, other):
        if not isinstance(other, RatExpPoly):
            other = RatExpPoly.from_exp(_as_ep(other))
        out = dict(self.terms)
        for j, r in other.terms.items():
            cur = out.get(j)
            out[j] = r if cur is None else cur + r
        return RatExpPoly(out)

    def __neg__(self):
        return RatExpPoly({j: -r for j, r in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, RatExpPoly):
            other = RatExpPoly.from_exp(_as_ep(other))
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (RatFunc, Poly, GaussianRational, int)):
            return RatExpPoly({j: r * other for j, r in self.terms.items()})
        if not isinstance(other, RatExpPoly):
            other = RatExpPoly.from_exp(_as_ep(other))
        out: Dict[int, RatFunc] = {}
        for j1, r1 in self.terms.items():
            for j2, r2 in other.terms.items():
                k = j1 + j2
                prod = r1 * r2
                cur = out.get(k)
                out[k] = prod if cur is None else cur + prod
        return RatExpPoly(out)

    __rmul__ = __mul__

    def sigma_shift(self, k: int) -> "RatExpPoly":
        if k == 0 or not self.terms:
            return self
        return RatExpPoly({j + k: r for j, r in self.terms.items()})

    def clear_denominators(self):
        """(num: ExpPoly, den: Poly) with self = num / den, den monic."""
        den = POLY_ONE
        for r in self.terms.values():
            den = poly_lcm(den, r.den)
        num_terms: Dict[int, Poly] = {}
        for j, r in self.terms.items():
            num_terms[j] = r.num * den.exact_div(r.den)
        return ExpPoly(num_terms), den

    def primitive_clear(self):
        """(num, den) as above with gcd(content(num), den) cancelled."""
        num, den = self.clear_denominators()
        if num.is_zero():
            return num, POLY_ONE
        g = poly_gcd(num.content(), den)
        if g.degree > 0:
            num = num.exact_poly_div(g)
            den = den.exact_div(g)
        return num, den


def rep_divmod(a: RatExpPoly, b: RatExpPoly):
    """Euclidean division over Q(i)(z): a = q*b + r.

    The divisor is read at sigma-valuation 0 (a unit shift), and leading
    terms of `a` are cancelled until deg_sigma r < deg_sigma of the
    normalized divisor. Exact identity over Q(i)(z).
    """
    if b.is_zero():
        raise DivisionByZeroError("division by zero element")
    if a.is_zero():
        return RatExpPoly(), RatExpPoly()
    vb = b.sigma_valuation
    B = b.sigma_shift(-vb)
    degB = B.sigma_degree
    leadB = B.coeff(degB)
    q = RatExpPoly()
    r = a
    while r and r.sigma_degree >= degB:
        d = r.sigma_degree
        c = r.coeff(d) / leadB
        mono = RatExpPoly({d - degB: c})
        q = q + mono
        r = r - mono * B
    return q.sigma_shift(-vb), r


def laurent_divmod(a: ExpPoly, b: ExpPoly):
    """Euclidean division a = q*b + r in Q(i)(z)[sigma^{+-}].

    Returns (q, r) as RatExpPoly with deg_sigma r < deg_sigma b after the
    divisor's sigma-valuation is normalized away. Exact over Q(i)(z).
    """
    if b.is_zero():
        raise DivisionByZeroError("laurent_divmod by zero")
    return rep_divmod(RatExpPoly.from_exp(a), RatExpPoly.from_exp(b))


def rat_divexact(a: RatExpPoly, b: RatExpPoly) -> RatExpPoly:
    """a / b when the sigma-division is exact; raises ValueError otherwise."""
    q, r = rep_divmod(a, b)
    if r:
        raise ValueError("inexact sigma-division")
    return q


def rep_gcd(a: RatExpPoly, b: RatExpPoly) -> RatExpPoly:
    """Euclidean gcd in Q(i)(z)[sigma^{+-}], normalized to sigma-valuation 0
    with leading coefficient 1 (zero if both inputs are zero).

    Remainders are shifted back to valuation 0 after each step (associates),
    so the working degrees strictly decrease and the loop terminates.
    """
    if a:
        a = a.sigma_shift(-a.sigma_valuation)
    if b:
        b = b.sigma_shift(-b.sigma_valuation)
    while b:
        r = rep_divmod(a, b)[1]
        if r:
            r = r.sigma_shift(-r.sigma_valuation)
        a, b = b, r
    if not a:
        return a
    lead = a.coeff(a.sigma_degree)
    return a * (RAT_ONE_ / lead)


def rep_xgcd(a: RatExpPoly, b: RatExpPoly):
    """(g, u, v) with u*a + v*b = g, g normalized as in rep_gcd."""
    va = a.sigma_valuation if a else 0
    vb = b.sigma_valuation if b else 0
    r0 = a.sigma_shift(-va) if a else a
    r1 = b.sigma_shift(-vb) if b else b
    u0, u1 = RatExpPoly({-va: RAT_ONE_}), RatExpPoly()
    v0, v1 = RatExpPoly(), RatExpPoly({-vb: RAT_ONE_})
    while r1:
        q, r = rep_divmod(r0, r1)
        if r:
            s = r.sigma_valuation
            r = r.sigma_shift(-s)
            nu = (u0 - q * u1).sigma_shift(-s)
            nv = (v0 - q * v1).sigma_shift(-s)
        else:
            nu = u0 - q * u1
            nv = v0 - q * v1
        r0, r1 = r1, r
        u0, u1 = u1, nu
        v0, v1 = v1, nv
    if not r0:
        return r0, u0, v0
    lead = r0.coeff(r0.sigma_degree)
    inv = RAT_ONE_ / lead
    return r0 * inv, u0 * inv, v0 * inv
