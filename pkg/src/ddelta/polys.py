"""Dense univariate polynomials over an exact field, and their fraction field.

`Poly` is generic over the coefficient type: anything with field arithmetic
that coerces ints (GaussianRational does) works. `PolyC` is the concrete
Q(i)[z] used everywhere; `RatFunc` is its fraction field Q(i)(z), the
coefficient field for Euclidean work with sigma-Laurent polynomials.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .scalars import GR_ONE, GR_ZERO, GaussianRational


class Poly:
    """Coefficients stored dense by ascending degree; zero poly has coeffs ()."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = list(coeffs)
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- basics -----------------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def is_one(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 1

    def leading(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def constant(self):
        return self.coeffs[0] if self.coeffs else GR_ZERO

    def __getitem__(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return GR_ZERO

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({list(self.coeffs)!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                parts.append(str(c))
            elif k == 1:
                parts.append(f"({c})*z")
            else:
                parts.append(f"({c})*z^{k}")
        return " + ".join(parts)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, Poly):
            if not self.coeffs or not other.coeffs:
                return Poly()
            out = [GR_ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if not a:
                    continue
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
            return Poly(out)
        # scalar
        return Poly([c * other for c in self.coeffs])

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative polynomial power")
        out = Poly([GR_ONE])
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __divmod__(self, other: "Poly"):
        if not isinstance(other, Poly):
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = [GR_ZERO] * max(0, len(self.coeffs) - len(other.coeffs) + 1)
        rem = list(self.coeffs)
        d = other.degree
        lead = other.leading()
        for k in range(len(rem) - 1, d - 1, -1):
            if not rem[k]:
                continue
            c = rem[k] / lead
            q[k - d] = c
            for j, b in enumerate(other.coeffs):
                rem[k - d + j] = rem[k - d + j] - c * b
        return Poly(q), Poly(rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        """Division known to be exact; raises if a remainder appears."""
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ValueError("inexact polynomial division")
        return q

    def divides(self, other: "Poly") -> bool:
        if self.is_zero():
            return other.is_zero()
        return divmod(other, self)[1].is_zero()

    # -- calculus / evaluation ----------------------------------------------

    def derivative(self) -> "Poly":
        return Poly([c * k for k, c in enumerate(self.coeffs)][1:])

    def eval(self, x):
        """Horner evaluation; x may be exact, complex, or an ndarray."""
        if isinstance(x, np.ndarray):
            out = np.zeros_like(x, dtype=complex)
            for c in reversed(self.coeffs):
                out = out * x + complex(c)
            return out
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * x + c
        if acc is None:
            return GR_ZERO if isinstance(x, GaussianRational) else 0j
        return acc

    def eval_complex(self, x: complex) -> complex:
        out = 0j
        for c in reversed(self.coeffs):
            out = out * x + complex(c)
        return out

    def taylor_shift(self, c) -> "Poly":
        """p(z + c), exact (repeated synthetic division)."""
        n = len(self.coeffs)
        if n == 0:
            return self
        work = list(self.coeffs)
        out = []
        for _ in range(n):
            # evaluate/reduce at -(-c): synthetic division by (z - (-c))
            acc = GR_ZERO
            for k in range(len(work) - 1, -1, -1):
                acc = work[k] + acc * c
                work[k] = acc
            out.append(work[0])
            work = work[1:]
        return Poly(out)

    def shift_up(self, k: int) -> "Poly":
        """Multiply by z^k."""
        if not self.coeffs or k == 0:
            return self
        return Poly([GR_ZERO] * k + list(self.coeffs))

    # -- normal forms ---------------------------------------------------------

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.leading()
        if lead == 1:
            return self
        return Poly([c / lead for c in self.coeffs])


def _as_poly(x):
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, GaussianRational)):
        return Poly([x * GR_ONE]) if x else Poly()
    return NotImplemented


# Convenience constructors for Q(i)[z].

def poly_from(coeffs: Sequence) -> Poly:
    return Poly([c if isinstance(c, GaussianRational) else GaussianRational(c) for c in coeffs])


POLY_ZERO = Poly()
POLY_ONE = poly_from([1])
POLY_Z = poly_from([0, 1])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic exact gcd; gcd(0, 0) = 0."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_lcm(a: Poly, b: Poly) -> Poly:
    if a.is_zero() or b.is_zero():
        return POLY_ZERO
    g = poly_gcd(a, b)
    return (a * b).exact_div(g).monic()


def poly_xgcd(a: Poly, b: Poly):
    """(g, u, v) with u*a + v*b = g, g monic (or zero)."""
    r0, r1 = a, b
    u0, u1 = POLY_ONE, POLY_ZERO
    v0, v1 = POLY_ZERO, POLY_ONE
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if r0.is_zero():
        return POLY_ZERO, POLY_ZERO, POLY_ZERO
    lead = r0.leading()
    inv = GR_ONE / lead
    return r0 * inv, u0 * inv, v0 * inv


class RatFunc:
    """Reduced fraction num/den of Q(i)[z] polynomials; den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly = POLY_ONE, _reduced=False):
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _reduced:
            if num.is_zero():
                den = POLY_ONE
            else:
                g = poly_gcd(num, den)
                if g.degree > 0:
                    num = num.exact_div(g)
                    den = den.exact_div(g)
                lead = den.leading()
                if lead != 1:
                    inv = GR_ONE / lead
                    num = num * inv
                    den = den * inv
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFunc is immutable")

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def __eq__(self, other):
        other = _as_rat(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = _as_rat(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        other = _as_rat(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _as_rat(other) - self

    def __mul__(self, other):
        other = _as_rat(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rat(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("rational function division by zero")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _as_rat(other) / self

    def eval_complex(self, x: complex) -> complex:
        return self.num.eval_complex(x) / self.den.eval_complex(x)

    def __repr__(self):
        return f"RatFunc({self.num!r}, {self.den!r})"

    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        return f"({self.num}) / ({self.den})"


def _as_rat(x):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, Poly):
        return RatFunc(x, POLY_ONE, _reduced=True)
    if isinstance(x, (int, GaussianRational)):
        p = _as_poly(x)
        return RatFunc(p, POLY_ONE, _reduced=True)
    return NotImplemented


RAT_ZERO = RatFunc(POLY_ZERO, POLY_ONE, _reduced=True)
RAT_ONE = RatFunc(POLY_ONE, POLY_ONE, _reduced=True)
