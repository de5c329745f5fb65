"""Ideal membership with explicit cofactors and growth certificates.

Membership is decided through the gcd (finitely generated ideals collapse
onto their gcd whenever the Bezout chain resolves); positive answers come
with cofactors that replay exactly. The Hermite interpolation and Taylor
truncation helpers realize the jet-matching step of the division argument
at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .currents import GrowthCert, _local_model, pw_growth_fit
from .errors import DuplicateNodeError
from .hefer import _sample_grid, growth_bounds
from .hring import HElement, Refusal, _gauss_solve, h_bezout, h_divides
from .polys import POLY_ONE, POLY_Z, Poly
from .scalars import GR_ONE, GR_ZERO, GaussianRational

Node = Union[GaussianRational, complex]


@dataclass(frozen=True)
class JetSpec:
    """Nodes with prescribed derivative values c_0..c_{m-1} (plain
    derivatives, not Taylor coefficients)."""

    entries: Tuple[Tuple[Node, Tuple[object, ...]], ...]

    def __post_init__(self):
        seen = []
        for node, _ in self.entries:
            for other in seen:
                if _nodes_equal(node, other):
                    raise DuplicateNodeError(f"duplicate interpolation node {node}")
            seen.append(node)

    @property
    def total_conditions(self) -> int:
        return sum(len(jet) for _, jet in self.entries)


def _nodes_equal(a: Node, b: Node) -> bool:
    if isinstance(a, GaussianRational) and isinstance(b, GaussianRational):
        return a == b
    return abs(complex(a) - complex(b)) < 1e-14


def _all_exact(spec: JetSpec) -> bool:
    for node, jet in spec.entries:
        if not isinstance(node, GaussianRational):
            return False
        for v in jet:
            if not isinstance(v, (int, GaussianRational)):
                return False
    return True


def hermite_interpolate(spec: JetSpec):
    """Unique polynomial of degree < sum(m_i) matching all jets.

    Exact over Q(i) when every node and value is Gaussian rational;
    floating point (returned as a complex ndarray of ascending
    coefficients) otherwise.
    """
    n = spec.total_conditions
    if n == 0:
        return Poly()
    if _all_exact(spec):
        rows: List[List[GaussianRational]] = []
        rhs: List[GaussianRational] = []
        for node, jet in spec.entries:
            for k, value in enumerate(jet):
                row = []
                for t in range(n):
                    if t < k:
                        row.append(GR_ZERO)
                    else:
                        row.append(node ** (t - k) * math.perm(t, k))
                rows.append(row)
                rhs.append(value * GR_ONE)
        sol = _gauss_solve(rows, rhs, n)
        if sol is None:  # pragma: no cover - confluent Vandermonde is regular
            raise AssertionError("interpolation system unexpectedly singular")
        return Poly(sol)
    A = np.zeros((n, n), dtype=complex)
    b = np.zeros(n, dtype=complex)
    i = 0
    for node, jet in spec.entries:
        x = complex(node)
        for k, value in enumerate(jet):
            for t in range(k, n):
                A[i, t] = math.perm(t, k) * x ** (t - k)
            b[i] = complex(value)
            i += 1
    return np.linalg.solve(A, b)


# --------------------------------------------------------------------------
# Membership.
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    cofactors: Tuple[HElement, ...]
    growth: Tuple[GrowthCert, ...]
    gcd: HElement
    refusal: Optional[Refusal] = None

    def replay(self, h: HElement, gens: Sequence[HElement]) -> bool:
        """Exact identity re-check: sum cofactor_j * gen_j = h."""
        if not self.member:
            return True
        from .hring import H_ZERO

        acc = H_ZERO
        for c, g in zip(self.cofactors, gens):
            acc = acc + c * g
        return acc == h


def ideal_member(h: HElement, gens: Sequence[HElement], allow_jets: bool = True) -> MembershipResult:
    """Is h in the ideal generated by gens, with explicit witnesses.

    The generator list collapses onto its iterated gcd through Bezout
    expansions; membership reduces to divisibility by the gcd. Cofactors
    re-verify exactly before being returned.
    """
    gens = list(gens)
    if not gens or all(g.is_zero() for g in gens):
        raise ValueError("generators must not all be zero")
    from .hring import H_ZERO, H_ONE

    g = gens[0]
    coeffs: List[HElement] = [H_ONE] + [H_ZERO] * (len(gens) - 1)
    for idx in range(1, len(gens)):
        nxt = gens[idx]
        if nxt.is_zero():
            continue
        if g.is_zero():
            g = nxt
            coeffs = [H_ZERO] * len(gens)
            coeffs[idx] = H_ONE
            continue
        gg, u, v = h_bezout(g, nxt, allow_jets=allow_jets)
        coeffs = [u * c for c in coeffs]
        coeffs[idx] = coeffs[idx] + v
        g = gg
    q = h_divides(g, h)
    if isinstance(q, Refusal):
        return MembershipResult(
            member=False, cofactors=(), growth=(), gcd=g, refusal=q
        )
    cofactors = tuple(c * q for c in coeffs)
    certs = []
    for c in cofactors:
        if c.is_zero():
            certs.append(
                GrowthCert(C=0.0, M=0, N=0, denom_witness=POLY_ONE, sample_count=0,
                           max_abs_point=0.0, dominated=True)
            )
            continue
        M, N = growth_bounds(c)
        Z = _sample_grid()
        certs.append(pw_growth_fit(Z, np.abs(c.eval_grid(Z)), fixed=(M, N)))
    result = MembershipResult(member=True, cofactors=cofactors, growth=tuple(certs), gcd=g)
    if not result.replay(h, gens):  # pragma: no cover - internal check
        raise AssertionError("membership cofactors failed exact replay")
    return result


# --------------------------------------------------------------------------
# Truncation.
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TailWitness:
    order: int
    radius: float
    verified: bool


def truncation_split(P: HElement, alpha: Node, mu: int):
    """Taylor polynomial of P* at alpha to degree < mu, plus a witness that
    the remainder vanishes to order >= mu.

    Exact rational coefficients at alpha = 0; floats elsewhere.
    """
    if mu < 1:
        raise ValueError("truncation order must be >= 1")
    exact_zero = isinstance(alpha, GaussianRational) and alpha.is_zero() or alpha == 0
    if exact_zero:
        trunc = _exact_series_at_zero(P, mu)
        witness = _verify_tail(P, 0j, trunc, mu)
        return trunc, witness
    a = complex(alpha)
    model = _local_model(P, a, 0, 0.1)
    coeffs = np.asarray(model.h_coeffs[:mu], dtype=complex)
    witness = _verify_tail(P, a, coeffs, mu)
    return coeffs, witness


def _exact_series_at_zero(P: HElement, mu: int) -> Poly:
    """Exact Taylor coefficients of P* at 0 (denominators are z-powers up
    to factors not vanishing at 0)."""
    den = P.den
    k = 0
    while den.constant().is_zero():
        den = den.exact_div(POLY_Z)
        k += 1
    num_series = P.num.taylor_at_zero(mu + k + den.degree + 1)
    # drop the z^k cancelled part (entirety guarantees leading zeros)
    shifted = num_series[k:]
    # divide by the remaining denominator series
    inv_len = len(shifted)
    den_taylor = [den[i] for i in range(inv_len)]
    out = []
    c0 = den_taylor[0]
    for i in range(min(mu, inv_len)):
        acc = shifted[i]
        for j in range(1, i + 1):
            acc = acc - den_taylor[j] * out[i - j]
        out.append(acc / c0)
    unit_scale = P.unit_c
    # fold in unit c * e^{k z}: multiply series by exp(unit_k z)
    if P.unit_k:
        import fractions

        expo = [
            GaussianRational(fractions.Fraction(P.unit_k**j, math.factorial(j)))
            for j in range(mu)
        ]
        folded = []
        for i in range(len(out)):
            acc = GR_ZERO
            for j in range(i + 1):
                acc = acc + out[j] * expo[i - j]
            folded.append(acc)
        out = folded
    return Poly([c * unit_scale for c in out])


def _verify_tail(P: HElement, a: complex, trunc, mu: int) -> TailWitness:
    """Winding (argument variation) of P* - trunc on a small circle: the
    remainder must vanish to order exactly >= mu at a."""
    if isinstance(trunc, Poly):
        tc = np.array([complex(c) for c in trunc.coeffs], dtype=complex)
    else:
        tc = np.asarray(trunc, dtype=complex)

    def diff(zs):
        w = zs - a
        tv = np.zeros_like(zs, dtype=complex)
        for c in tc[::-1]:
            tv = tv * w + c
        return P.eval_grid(zs) - tv

    for radius in (3e-2, 1e-1, 3e-3):
        ts = np.linspace(0.0, 1.0, 4096, endpoint=False)
        circle = a + radius * np.exp(2j * math.pi * ts)
        vals = diff(circle)
        if np.min(np.abs(vals)) < 1e-12 * max(1.0, float(np.max(np.abs(vals)))):
            continue
        args = np.angle(vals)
        jumps = np.diff(np.concatenate([args, args[:1]]))
        jumps = (jumps + math.pi) % (2 * math.pi) - math.pi
        winding = int(round(float(np.sum(jumps)) / (2 * math.pi)))
        return TailWitness(order=winding, radius=radius, verified=winding >= mu)
    return TailWitness(order=-1, radius=0.0, verified=False)
