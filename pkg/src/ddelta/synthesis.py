"""Exponential-polynomial solutions and their oracles.

The exact operator action lives on finite mode lists P(x)e^{alpha x}; the
method-of-steps integrator is an independent time-domain check of the same
solution theory, and the duality pairing realizes the formal-series adjoint
identities.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Sequence, Tuple

import numpy as np

from .charzeros import Rect, find_zeros
from .errors import (
    NotRetardedError,
    ResonantDenominatorError,
    TruncationTooShortError,
)
from .hring import HElement
from .matsmith import HMatrix, smith
from .polys import Poly
from .scalars import GR_ZERO, GaussianRational

_MODE_TOL = 1e-12


def _trim(coeffs: Sequence[complex]) -> Tuple[complex, ...]:
    cs = list(coeffs)
    while cs and abs(cs[-1]) < _MODE_TOL:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class ExpSolution:
    """f(x) = sum over modes of P(x) e^{alpha x}; distinct alphas."""

    modes: Tuple[Tuple[complex, Tuple[complex, ...]], ...]

    @classmethod
    def make(cls, modes) -> "ExpSolution":
        merged = {}
        for alpha, coeffs in modes:
            alpha = complex(alpha)
            cs = _trim(coeffs)
            if not cs:
                continue
            for known in merged:
                if abs(known - alpha) < _MODE_TOL:
                    alpha = known
                    break
            if alpha in merged:
                old = list(merged[alpha])
                new = list(cs)
                n = max(len(old), len(new))
                old += [0j] * (n - len(old))
                new += [0j] * (n - len(new))
                merged[alpha] = _trim([a + b for a, b in zip(old, new)])
            else:
                merged[alpha] = cs
        clean = tuple(
            (a, cs) for a, cs in sorted(merged.items(), key=lambda kv: (kv[0].real, kv[0].imag))
            if cs
        )
        return cls(modes=clean)

    @classmethod
    def monomial(cls, alpha: complex, degree: int = 0) -> "ExpSolution":
        return cls.make([(alpha, (0j,) * degree + (1 + 0j,))])

    @classmethod
    def polynomial(cls, coeffs: Sequence[complex]) -> "ExpSolution":
        return cls.make([(0j, tuple(complex(c) for c in coeffs))])

    def is_zero(self) -> bool:
        return not self.modes

    def eval(self, x) -> complex:
        if isinstance(x, np.ndarray):
            out = np.zeros_like(x, dtype=complex)
            for alpha, coeffs in self.modes:
                p = np.zeros_like(x, dtype=complex)
                for c in reversed(coeffs):
                    p = p * x + c
                out = out + p * np.exp(alpha * x)
            return out
        out = 0j
        for alpha, coeffs in self.modes:
            p = 0j
            for c in reversed(coeffs):
                p = p * x + c
            out += p * cmath.exp(alpha * x)
        return out

    def derivative(self) -> "ExpSolution":
        out = []
        for alpha, coeffs in self.modes:
            d = [coeffs[k] * k for k in range(1, len(coeffs))]
            s = [alpha * c for c in coeffs]
            n = max(len(d), len(s))
            d += [0j] * (n - len(d))
            s += [0j] * (n - len(s))
            out.append((alpha, tuple(a + b for a, b in zip(d, s))))
        return ExpSolution.make(out)

    def shift(self, h: float = 1.0) -> "ExpSolution":
        """x -> x + h: P(x) e^{alpha x} -> P(x+h) e^{alpha h} e^{alpha x}."""
        out = []
        for alpha, coeffs in self.modes:
            n = len(coeffs)
            shifted = [0j] * n
            for k, c in enumerate(coeffs):
                # c (x+h)^k
                for m in range(k + 1):
                    shifted[m] += c * math.comb(k, m) * h ** (k - m)
            scale = cmath.exp(alpha * h)
            out.append((alpha, tuple(scale * c for c in shifted)))
        return ExpSolution.make(out)

    def scaled(self, c: complex) -> "ExpSolution":
        return ExpSolution.make([(a, tuple(c * x for x in cs)) for a, cs in self.modes])

    def __add__(self, other: "ExpSolution") -> "ExpSolution":
        return ExpSolution.make(list(self.modes) + list(other.modes))

    def sup_norm(self, lo=0.0, hi=1.0, samples=128) -> float:
        xs = np.linspace(lo, hi, samples)
        return float(np.max(np.abs(self.eval(xs)))) if self.modes else 0.0


@dataclass(frozen=True)
class Trajectory:
    grid: np.ndarray
    values: np.ndarray
    step: float

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")


@dataclass(frozen=True)
class FormalSeries:
    """Truncated power series with exact Gaussian-rational coefficients."""

    coefficients: Tuple[GaussianRational, ...]

    @property
    def truncation(self) -> int:
        return len(self.coefficients)

    def coeff(self, n: int) -> GaussianRational:
        if n < len(self.coefficients):
            return self.coefficients[n]
        return GR_ZERO

    def times_z(self) -> "FormalSeries":
        # every known coefficient stays known: truncation grows by one
        return FormalSeries((GR_ZERO,) + self.coefficients)

    def times_exp(self) -> "FormalSeries":
        """Multiply by e^z, truncated at the same order (exact rationals)."""
        n = len(self.coefficients)
        out = []
        for m in range(n):
            acc = GR_ZERO
            for k in range(m + 1):
                c = self.coefficients[k]
                if c:
                    acc = acc + c * Fraction(1, math.factorial(m - k))
            out.append(acc)
        return FormalSeries(tuple(out))


# --------------------------------------------------------------------------
# Operator action.
# --------------------------------------------------------------------------


def _apply_poly_in_d(poly_coeffs: List[complex], u: ExpSolution) -> ExpSolution:
    """phi(d/dx) u for a complex-coefficient polynomial phi."""
    out = ExpSolution.make([])
    term = u
    for k, c in enumerate(poly_coeffs):
        if k:
            term = term.derivative()
        if c:
            out = out + term.scaled(c)
    return out


def _solve_poly_in_d(phi, u: ExpSolution) -> ExpSolution:
    """g with phi(d/dx) g = u, mode by mode (phi(alpha) != 0 required)."""
    out = []
    for alpha, coeffs in u.modes:
        # phi(alpha + D) = sum_m tau_m D^m with tau_m = phi^{(m)}(alpha)/m!
        taus = []
        p = phi
        fact = 1
        m = 0
        while not p.is_zero():
            if m:
                fact *= m
            taus.append(p.eval_complex(alpha) / fact)
            p = p.derivative()
            m += 1
        if abs(taus[0]) < 1e-14:
            raise ResonantDenominatorError(
                f"denominator vanishes at mode alpha={alpha:.6g}"
            )
        n = len(coeffs)
        g = [0j] * n
        # triangular solve from the top degree down:
        # tau_0 g_k = u_k - sum_{m>=1} tau_m * (D^m g)_k
        for k in range(n - 1, -1, -1):
            acc = coeffs[k]
            for m in range(1, len(taus)):
                # coefficient of x^k in D^m g: (k+m)!/k! * g_{k+m}
                if k + m < n:
                    acc -= taus[m] * g[k + m] * math.perm(k + m, m)
            g[k] = acc / taus[0]
        out.append((alpha, tuple(g)))
    return ExpSolution.make(out)


def apply_op(q: HElement, u: ExpSolution) -> ExpSolution:
    """Exact closed-form action of q on a mode list.

    z acts as d/dx, sigma as the unit forward shift, and the denominator
    solves phi(d/dx) g = f within the same mode space (well posed mode by
    mode when phi(alpha) != 0).
    """
    if u.is_zero():
        return u
    if not q.den.is_one():
        for alpha, _ in u.modes:
            if abs(q.den.eval_complex(alpha)) < 1e-14:
                raise ResonantDenominatorError(
                    f"denominator vanishes at mode alpha={alpha:.6g}"
                )
    acted = ExpSolution.make([])
    unit_c = complex(q.unit_c)
    for j, p in q.num.terms.items():
        shifted = u.shift(j + q.unit_k)
        term = _apply_poly_in_d([complex(c) for c in p.coeffs], shifted)
        acted = acted + term.scaled(unit_c)
    if q.den.is_one():
        return acted
    return _solve_poly_in_d(q.den, acted)


# --------------------------------------------------------------------------
# Solution bases.
# --------------------------------------------------------------------------

_RESIDUAL_TOL = 1e-6


def solution_basis_single(
    q: HElement, rect: Rect, tol: float = 1e-9
) -> List[ExpSolution]:
    """x^j e^{alpha x} for each zero (alpha, m) of q* in rect and j < m."""
    basis: List[ExpSolution] = []
    for cluster in find_zeros(q, rect, tol):
        for j in range(cluster.multiplicity):
            sol = ExpSolution.monomial(cluster.center, j)
            residual = apply_op(q, sol).sup_norm()
            if residual >= _RESIDUAL_TOL:
                raise AssertionError(
                    f"basis candidate x^{j} e^({cluster.center:.6g} x) has "
                    f"residual {residual:.3g}"
                )
            basis.append(sol)
    return basis


@dataclass(frozen=True)
class VectorSolution:
    components: Tuple[ExpSolution, ...]
    unconstrained: Tuple[int, ...] = ()

    def eval(self, x):
        return [c.eval(x) for c in self.components]


def solution_basis_system(P: HMatrix, rect: Rect, tol: float = 1e-9) -> List[VectorSolution]:
    """Kernel basis of P via the Smith form: scalar bases on the diagonal,
    transported by W; zero columns are genuinely free and flagged."""
    dec = smith(P)
    cols = P.cols
    out: List[VectorSolution] = []
    zero = ExpSolution.make([])

    def transport(y: List[ExpSolution], free=()):
        comps = []
        for i in range(cols):
            acc = ExpSolution.make([])
            for k in range(cols):
                if y[k].is_zero():
                    continue
                acc = acc + _apply_matrix_entry(dec.W[i, k], y[k])
            comps.append(acc)
        return VectorSolution(components=tuple(comps), unconstrained=free)

    for idx in range(dec.rank):
        d = dec.D[idx, idx]
        if d.is_unit():
            continue
        for sol in solution_basis_single(d, rect, tol):
            y = [zero] * cols
            y[idx] = sol
            out.append(transport(y))
    for idx in range(dec.rank, cols):
        y = [zero] * cols
        y[idx] = ExpSolution.polynomial([1.0])
        out.append(transport(y, free=(idx,)))
    # verify: P applied entrywise gives a small residual
    for vs in out:
        if vs.unconstrained:
            continue
        for i in range(P.rows):
            acc = ExpSolution.make([])
            for k in range(cols):
                if vs.components[k].is_zero():
                    continue
                acc = acc + _apply_matrix_entry(P[i, k], vs.components[k])
            if acc.sup_norm() >= _RESIDUAL_TOL:
                raise AssertionError("system basis residual too large")
    return out


def _apply_matrix_entry(q: HElement, u: ExpSolution) -> ExpSolution:
    if q.is_zero() or u.is_zero():
        return ExpSolution.make([])
    return apply_op(q, u)


# --------------------------------------------------------------------------
# Method of steps (independent time-domain oracle).
# --------------------------------------------------------------------------


def _retarded_normal_form(q: HElement):
    """(J, d, lead, low_terms): y^{(d)}(x+J) = -1/lead * [lower terms].

    Requires den = 1 after normalization; the sigma-valuation shift is
    harmless (it only translates trajectories).
    """
    if not q.den.is_one():
        raise NotRetardedError("denominators are not supported by the simulator")
    num = q.num  # canonical: sigma-valuation 0
    J = num.sigma_degree
    lead_poly = num.coeff(J)
    d = lead_poly.degree
    lead = complex(lead_poly.coeffs[-1])
    # every appearing derivative must be available from the stored state
    for j, p in num.terms.items():
        if j == J:
            continue
        if d == 0 and p.degree > 0:
            raise NotRetardedError("difference part mixes derivatives")
        if d > 0 and p.degree > d - 1:
            raise NotRetardedError(
                f"term at shift {j} carries derivative order {p.degree} >= {d}"
            )
    if J == 0:
        raise NotRetardedError("no genuine shift: not a delay equation")
    return J, d, lead, num


def method_of_steps(
    q: HElement,
    init: ExpSolution,
    horizon: float,
    step: float = 1.0 / 256,
) -> Trajectory:
    """Segmentwise integration of the retarded normal form of q.

    init supplies y (and derivatives) on [0, J); RK4 advances segment by
    segment with cubic-Hermite lookups for delayed midpoint values.
    """
    J, d, lead, num = _retarded_normal_form(q)
    n_per_unit = max(2, round(1.0 / step))
    h = 1.0 / n_per_unit
    n_total = int(math.ceil(horizon / h)) + 1
    xs = np.arange(n_total) * h

    if d == 0:
        # pure difference equation: grid-aligned direct stepping
        vals = np.zeros(n_total, dtype=complex)
        seed = int(min(n_total, J * n_per_unit))
        vals[:seed] = init.eval(xs[:seed])
        coeff = {j: complex(p.coeffs[0]) for j, p in num.terms.items() if j != J}
        for n in range(seed, n_total):
            acc = 0j
            for j, c in coeff.items():
                acc += c * vals[n - (J - j) * n_per_unit]
            vals[n] = -acc / lead
        return Trajectory(grid=xs, values=vals, step=h)

    # state Y = (y, y', ..., y^{(d-1)}): init covers [0, J], stepping starts
    # at s = J so delayed arguments never fall before 0
    derivs = [init]
    for _ in range(d):
        derivs.append(derivs[-1].derivative())
    seed = int(min(n_total, J * n_per_unit + 1))
    states = np.zeros((n_total, d), dtype=complex)
    rhs_store = np.zeros((n_total, d), dtype=complex)
    for k in range(d):
        states[:seed, k] = derivs[k].eval(xs[:seed])
        rhs_store[:seed, k] = derivs[k + 1].eval(xs[:seed])

    poly_coeffs = {
        j: [complex(c) for c in p.coeffs] for j, p in num.terms.items()
    }

    def delayed_value(idx_float: float, order: int) -> complex:
        """y^{(order)} at grid coordinate idx_float (cubic Hermite between
        nodes; derivative of the state comes from the stored RHS)."""
        i0 = int(math.floor(idx_float))
        t = idx_float - i0
        if t < 1e-12:
            return states[i0, order]
        y0, y1 = states[i0, order], states[i0 + 1, order]
        d0, d1 = rhs_store[i0, order] * h, rhs_store[i0 + 1, order] * h
        t2 = t * t
        t3 = t2 * t
        return (
            (2 * t3 - 3 * t2 + 1) * y0
            + (t3 - 2 * t2 + t) * d0
            + (-2 * t3 + 3 * t2) * y1
            + (t3 - t2) * d1
        )

    def top_derivative(n_float: float, Y: np.ndarray) -> complex:
        """y^{(d)} at the advanced time from current state + delayed data."""
        acc = 0j
        for j, cs in poly_coeffs.items():
            delay_steps = (J - j) * n_per_unit
            for order, c in enumerate(cs):
                if not c:
                    continue
                if j == J:
                    if order == d:
                        continue
                    acc += c * Y[order]
                else:
                    acc += c * delayed_value(n_float - delay_steps, order)
        return -acc / lead

    def rhs(n_float: float, Y: np.ndarray) -> np.ndarray:
        out = np.empty(d, dtype=complex)
        out[:-1] = Y[1:]
        out[-1] = top_derivative(n_float, Y)
        return out

    for n in range(seed - 1, n_total - 1):
        Y = states[n].copy()
        k1 = rhs(n, Y)
        rhs_store[n] = k1
        k2 = rhs(n + 0.5, Y + 0.5 * h * k1)
        k3 = rhs(n + 0.5, Y + 0.5 * h * k2)
        k4 = rhs(n + 1.0, Y + h * k3)
        states[n + 1] = Y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        rhs_store[n + 1] = rhs(n + 1.0, states[n + 1])
    return Trajectory(grid=xs, values=states[:, 0].copy(), step=h)


# --------------------------------------------------------------------------
# Spectral projection.
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ProjectionReport:
    coefficients: Tuple[complex, ...]
    residual: float
    condition: float
    ill_conditioned: bool


def spectral_project(traj: Trajectory, basis: List[ExpSolution]) -> ProjectionReport:
    """Least-squares fit of the trajectory onto the mode basis (discrete L2)."""
    if not basis:
        raise ValueError("empty basis")
    A = np.column_stack([b.eval(traj.grid) for b in basis])
    gram = A.conj().T @ A
    cond = float(np.linalg.cond(gram))
    coeffs, *_ = np.linalg.lstsq(A, traj.values, rcond=None)
    resid = traj.values - A @ coeffs
    l2 = float(math.sqrt(traj.step) * np.linalg.norm(resid))
    return ProjectionReport(
        coefficients=tuple(coeffs),
        residual=l2,
        condition=cond,
        ill_conditioned=cond > 1e12,
    )


# --------------------------------------------------------------------------
# Duality pairing.
# --------------------------------------------------------------------------


def pairing(p: Poly, f: FormalSeries) -> GaussianRational:
    """<p, f> = sum n! p_n f_n, exact."""
    if f.truncation <= p.degree:
        raise TruncationTooShortError(
            f"series truncated at {f.truncation} but deg p = {p.degree}"
        )
    acc = GR_ZERO
    for n, c in enumerate(p.coeffs):
        if c:
            acc = acc + c * Fraction(math.factorial(n)) * f.coeff(n)
    return acc


def pairing_adjoint_check(p: Poly, f: FormalSeries) -> dict:
    """Verify <p', f> = <p, z f> and <sigma p, f> = <p, e^z f> exactly.

    sigma p is p(z+1); both sides are computed with matching truncations.
    """
    report = {}
    lhs_d = pairing(p.derivative(), f)
    rhs_d = pairing(p, f.times_z())
    report["derivative_adjoint"] = (lhs_d, rhs_d, lhs_d == rhs_d)
    shifted = p.taylor_shift(GaussianRational(1))
    lhs_s = pairing(shifted, f)
    rhs_s = pairing(p, f.times_exp())
    report["shift_adjoint"] = (lhs_s, rhs_s, lhs_s == rhs_s)
    report["ok"] = report["derivative_adjoint"][2] and report["shift_adjoint"][2]
    return report
