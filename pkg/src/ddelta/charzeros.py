"""Characteristic zeros by the argument principle.

Zero counts come from adaptive boundary quadrature of the logarithmic
derivative; locations from rectangle subdivision, with simple zeros
polished by Newton and multiple zeros boxed until the radius drops under
tolerance. Multiplicity is always a winding number, never a convergence
rate.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List

import numpy as np

from .errors import BoundaryZeroError, NonConvergenceError
from .hring import HElement, factor_polyc

_GK_NODES, _GK_WEIGHTS = np.polynomial.legendre.leggauss(15)
_MODULUS_FLOOR = 1e-13
_INFLATE = 1e-6
_MAX_EDGE_DEPTH = 48
_MAX_SUBDIVISION_DEPTH = 60


@dataclass(frozen=True)
class Rect:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("rectangle must have nonempty interior")

    @property
    def corners(self):
        return (
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        )

    @property
    def center(self) -> complex:
        return complex((self.re_min + self.re_max) / 2, (self.im_min + self.im_max) / 2)

    @property
    def radius(self) -> float:
        return max(self.re_max - self.re_min, self.im_max - self.im_min) / 2

    def contains(self, z: complex) -> bool:
        return self.re_min <= z.real <= self.re_max and self.im_min <= z.imag <= self.im_max

    def inflate(self, eps: float) -> "Rect":
        return Rect(self.re_min - eps, self.re_max + eps, self.im_min - eps, self.im_max + eps)


@dataclass(frozen=True)
class ZeroCluster:
    center: complex
    multiplicity: int
    radius: float


_SERIES_RADIUS = 0.05
_SERIES_TERMS = 40


class _CharFunction:
    """Vectorized num*, den, and logarithmic derivative of q* = num*/den.

    Near z = 0 the expanded form Sum p_j(z) e^{jz} suffers catastrophic
    cancellation whenever num* vanishes there (the O(1) terms cancel to
    below float noise), so inside a small disk evaluation switches to the
    exact-coefficient Taylor series.
    """

    def __init__(self, q: HElement):
        self.num = q.num
        self.dnum = q.num.derivative()
        self.den = q.den
        self.k = q.unit_k
        terms = self.num.ode_order() + _SERIES_TERMS
        self._num_series = np.array(
            [complex(c) for c in self.num.taylor_at_zero(terms)], dtype=complex
        )
        self._dnum_series = np.array(
            [complex(c) for c in self.dnum.taylor_at_zero(terms)], dtype=complex
        )

    @staticmethod
    def _series_eval(coeffs: np.ndarray, Z: np.ndarray) -> np.ndarray:
        out = np.zeros_like(Z, dtype=complex)
        for c in coeffs[::-1]:
            out = out * Z + c
        return out

    def _eval(self, ep, series, Z: np.ndarray) -> np.ndarray:
        Z = np.asarray(Z, dtype=complex)
        small = np.abs(Z) < _SERIES_RADIUS
        if not small.any():
            return ep.eval_grid(Z)
        out = np.empty_like(Z, dtype=complex)
        if (~small).any():
            out[~small] = ep.eval_grid(Z[~small])
        out[small] = self._series_eval(series, Z[small])
        return out

    def num_value(self, z: complex) -> complex:
        return complex(self._eval(self.num, self._num_series, np.array([z]))[0])

    def num_grid(self, Z: np.ndarray) -> np.ndarray:
        return self._eval(self.num, self._num_series, Z)

    def ld_grid(self, Z: np.ndarray) -> np.ndarray:
        """Logarithmic derivative of num* (denominator handled separately)."""
        return self._eval(self.dnum, self._dnum_series, Z) / self._eval(
            self.num, self._num_series, Z
        )

    def ld_scalar(self, z: complex) -> complex:
        Z = np.array([z])
        return complex(self.ld_grid(Z)[0])


def _quad_points(a: complex, b: complex):
    mid = (a + b) / 2
    h = (b - a) / 2
    return mid + h * _GK_NODES, h


def _segment_quad(fvec, a: complex, b: complex, tol: float, depth=0, weight=None):
    """Adaptive Gauss quadrature of a vectorized integrand along [a, b].

    `weight` optionally multiplies the integrand pointwise (used for the
    first-moment integral z * logderiv). The split tolerance is floored:
    below ~1e-13 the comparison only measures floating noise and the
    subdivision tree would explode instead of converging.
    """
    pts, h = _quad_points(a, b)
    vals = fvec(pts)
    if weight is not None:
        vals = vals * weight(pts)
    whole = h * np.dot(_GK_WEIGHTS, vals)
    mid = (a + b) / 2
    pl, hl = _quad_points(a, mid)
    pr, hr = _quad_points(mid, b)
    vl = fvec(pl)
    vr = fvec(pr)
    if weight is not None:
        vl = vl * weight(pl)
        vr = vr * weight(pr)
    fine = hl * np.dot(_GK_WEIGHTS, vl) + hr * np.dot(_GK_WEIGHTS, vr)
    if depth >= _MAX_EDGE_DEPTH:
        if not (np.isfinite(fine.real) and np.isfinite(fine.imag)):
            raise NonConvergenceError("quadrature hit a singular point")
        return fine
    if not (np.isfinite(whole.real) and np.isfinite(fine.real)):
        # a node landed on (or denormally close to) a zero: zoom in
        return _segment_quad(fvec, a, mid, tol, depth + 1, weight) + _segment_quad(
            fvec, mid, b, tol, depth + 1, weight
        )
    if abs(fine - whole) <= tol:
        return fine
    half = max(tol / 2, 1e-13)
    return _segment_quad(fvec, a, mid, half, depth + 1, weight) + _segment_quad(
        fvec, mid, b, half, depth + 1, weight
    )


def _boundary_min_modulus(cf: _CharFunction, rect: Rect, samples=64) -> float:
    cs = rect.corners
    lo = math.inf
    for i in range(4):
        a, b = cs[i], cs[(i + 1) % 4]
        ts = np.linspace(0.0, 1.0, samples, endpoint=False)
        lo = min(lo, float(np.min(np.abs(cf.num_grid(a + (b - a) * ts)))))
    return lo


def _local_scale(cf: _CharFunction, rect: Rect) -> float:
    vals = [abs(cf.num_value(c)) for c in rect.corners] + [abs(cf.num_value(rect.center))]
    return max(max(vals), 1.0)


def _winding_rect(cf: _CharFunction, rect: Rect, moment: bool = False):
    """Winding number of num* around rect; optionally also the first moment."""
    corners = rect.corners
    total = 0j
    mom = 0j
    for i in range(4):
        a, b = corners[i], corners[(i + 1) % 4]
        total += _segment_quad(cf.ld_grid, a, b, 0.02)
        if moment:
            mom += _segment_quad(
                cf.ld_grid, a, b, 0.02 * max(1.0, abs(a)), weight=lambda Z: Z
            )
    w = total / (2j * math.pi)
    n = round(w.real)
    if abs(w - n) > 0.25:
        raise NonConvergenceError(
            f"winding integral did not settle on an integer: {w:.4f} on {rect}"
        )
    if moment:
        return n, mom / (2j * math.pi)
    return n


def _den_zeros(q: HElement, rect: Rect):
    """Roots of the denominator inside rect (removable singularities)."""
    if q.den.is_one():
        return []
    out = []
    for psi, mult in factor_polyc(q.den)[1]:
        roots = np.roots([complex(c) for c in reversed(psi.coeffs)])
        for r in roots:
            r = complex(r)
            if rect.contains(r):
                out.append((r, mult))
    return out


def _safe_rect(cf: _CharFunction, rect: Rect) -> Rect:
    """Deterministic inflation until no numerator zero hugs the boundary."""
    scale = _local_scale(cf, rect)
    r = rect
    for _ in range(8):
        if _boundary_min_modulus(cf, r) >= _MODULUS_FLOOR * scale:
            return r
        r = r.inflate(_INFLATE * max(1.0, r.radius))
    raise BoundaryZeroError(
        "characteristic zero on the contour; try a perturbed rectangle",
        suggested_rect=r.inflate(1e-3 * r.radius),
    )


def count_zeros(q: HElement, rect: Rect) -> int:
    """Total zero count of q* in rect, with multiplicity."""
    if q.is_zero():
        raise ValueError("zero element")
    cf = _CharFunction(q)
    safe = _safe_rect(cf, rect)
    return _winding_rect(cf, safe) - sum(m for _, m in _den_zeros(q, safe))


def _candidate_splits(rect: Rect):
    """Candidate bisections of the longer side, cut nudged deterministically."""
    wide = (rect.re_max - rect.re_min) >= (rect.im_max - rect.im_min)
    length = (rect.re_max - rect.re_min) if wide else (rect.im_max - rect.im_min)
    # never cut exactly at the midline: zeros love symmetric spots
    fracs = [0.5 + s for s in (0.011, -0.037, 0.063, -0.089, 0.117, -0.143, 0.171, -0.197)]
    for frac in fracs:
        cut = (rect.re_min if wide else rect.im_min) + frac * length
        if wide:
            yield (
                Rect(rect.re_min, cut, rect.im_min, rect.im_max),
                Rect(cut, rect.re_max, rect.im_min, rect.im_max),
            )
        else:
            yield (
                Rect(rect.re_min, rect.re_max, rect.im_min, cut),
                Rect(rect.re_min, rect.re_max, cut, rect.im_max),
            )


def _newton_polish(cf: _CharFunction, z0: complex, mult: int, rect: Rect, tol: float):
    """Multiplicity-aware Newton z <- z - m/logderiv(z) on num*."""
    z = z0
    for _ in range(80):
        ld = cf.ld_scalar(z)
        if ld == 0 or not cmath.isfinite(ld):
            # landing exactly on the zero ends the iteration
            return z
        step = mult / ld
        z = z - step
        if abs(step) < tol * 1e-3 or abs(step) < 1e-16 * max(1.0, abs(z)):
            return z
        if not rect.inflate(rect.radius).contains(z):
            return None
    ld = cf.ld_scalar(z)
    return z if ld != 0 and abs(mult / ld) < tol else None


def find_zeros(q: HElement, rect: Rect, tol: float = 1e-9) -> List[ZeroCluster]:
    """Clusters of zeros of q* in rect; multiplicities sum to count_zeros."""
    if q.is_zero():
        raise ValueError("zero element")
    cf = _CharFunction(q)
    safe = _safe_rect(cf, rect)
    den_zeros = _den_zeros(q, safe)
    clusters: List[ZeroCluster] = []

    def recurse(r: Rect, depth: int):
        n = _winding_rect(cf, r)
        if n == 0:
            return
        if n == 1:
            z = _newton_polish(cf, r.center, 1, r, tol)
            if z is not None and safe.contains(z):
                clusters.append(ZeroCluster(center=z, multiplicity=1, radius=tol))
                return
        if r.radius < tol:
            _, centroid = _winding_rect(cf, r, moment=True)
            clusters.append(
                ZeroCluster(center=centroid / n, multiplicity=n, radius=r.radius)
            )
            return
        if depth >= _MAX_SUBDIVISION_DEPTH:
            raise NonConvergenceError(f"subdivision stalled at {r}")
        last_err = None
        mark = len(clusters)
        for left, right in _candidate_splits(r):
            try:
                recurse(left, depth + 1)
                recurse(right, depth + 1)
                return
            except NonConvergenceError as err:
                last_err = err
                # a cut landed on a zero: drop partial results and retry
                del clusters[mark:]
                continue
        raise NonConvergenceError(f"could not split {r}: {last_err}")

    recurse(safe, 0)
    out: List[ZeroCluster] = []
    for c in clusters:
        mult = c.multiplicity
        for r, m in den_zeros:
            if abs(r - c.center) <= max(c.radius * 4, 1e-7):
                mult -= m
        if mult > 0:
            out.append(ZeroCluster(center=c.center, multiplicity=mult, radius=c.radius))
    out.sort(key=lambda c: (round(c.center.real, 12), round(c.center.imag, 12)))
    return out


def vanishing_order(q: HElement, point: complex, tol: float = 1e-9) -> int:
    """Winding number of q* on a small circle around point (0 if no zero
    within tol)."""
    if q.is_zero():
        raise ValueError("zero element")
    cf = _CharFunction(q)
    radius = max(tol, 1e-12)
    point = complex(point)
    # the reference scale a fixed distance out; float noise in num* sits
    # around 1e-16 * ref, so circles whose values drop near that are blind
    ref = max(abs(cf.num_value(point + 0.3)), abs(cf.num_value(point + 0.3j)), 1e-6)
    ts = np.linspace(0, 1, 64, endpoint=False)
    for _ in range(24):
        circle = point + radius * np.exp(2j * math.pi * ts)
        circle_min = float(np.min(np.abs(cf.num_grid(circle))))
        if circle_min >= 1e-12 * ref:
            break
        radius *= 4.0  # deterministic escape from the noise floor
    else:
        raise NonConvergenceError("could not find a zero-free circle")

    def ld_param(T: np.ndarray) -> np.ndarray:
        Z = point + radius * np.exp(2j * math.pi * T)
        dZ = 2j * math.pi * radius * np.exp(2j * math.pi * T)
        return cf.ld_grid(Z) * dZ

    total = _segment_quad(ld_param, 0.0, 1.0, 0.02)
    w = total / (2j * math.pi)
    n = round(w.real)
    if abs(w - n) > 0.25:
        raise NonConvergenceError(f"circle winding did not settle: {w:.4f}")
    inner = Rect(
        point.real - radius, point.real + radius, point.imag - radius, point.imag + radius
    )
    return n - sum(m for r, m in _den_zeros(q, inner) if abs(r - point) < radius)
