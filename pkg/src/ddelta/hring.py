"""The ring H of generalized differential-delay operators, exactly over Q(i).

An HElement is c * sigma^k * num/den with `num` an ExpPoly of sigma-valuation
0 whose leading coefficient polynomial is monic, `den` a monic polynomial
coprime to the content of `num`, and num*/den entire. Entirety is decided
exactly: at z = 0 by the power series, at algebraic points != 0 through the
derivative-coefficient ladder c_{k+1,j} = c_{k,j}' + j*c_{k,j} together with
the linear independence of powers of e^alpha over the algebraic numbers
(Lindemann-Weierstrass). That independence is what turns point vanishing of
an exponential polynomial into polynomial divisibility of its coefficients,
and it is the correctness backbone of every decision procedure here.
"""

from __future__ import annotations

import cmath
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
import sympy

from .errors import (
    BezoutUnresolvedError,
    BothZeroError,
    DivisionByZeroError,
    NotEntireError,
)
from .exppoly import (
    EP_ONE,
    EP_ZERO,
    ExpPoly,
    RatExpPoly,
    rat_divexact,
    rep_divmod,
    rep_gcd,
    rep_xgcd,
)
from .polys import (
    POLY_ONE,
    POLY_Z,
    POLY_ZERO,
    Poly,
    RatFunc,
    poly_from,
    poly_gcd,
)
from .scalars import GR_ONE, GR_ZERO, GaussianRational


# --------------------------------------------------------------------------
# Factorization over Q(i), bought from sympy behind the Poly contract.
# --------------------------------------------------------------------------

_SYMPY_Z = sympy.Symbol("z")
_factor_cache: Dict[Poly, Tuple[GaussianRational, Tuple[Tuple[Poly, int], ...]]] = {}
_factor_lock = threading.Lock()
_cache_enabled = True


def set_factor_cache(enabled: bool) -> None:
    """Disable to make factorization stateless (concurrency escape hatch)."""
    global _cache_enabled
    with _factor_lock:
        _cache_enabled = enabled
        if not enabled:
            _factor_cache.clear()


def _gr_to_sympy(c: GaussianRational):
    return sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(
        c.im.numerator, c.im.denominator
    )


def _sympy_to_gr(expr) -> GaussianRational:
    re, im = expr.as_real_imag()
    re = sympy.nsimplify(re, rational=True)
    im = sympy.nsimplify(im, rational=True)
    return GaussianRational(Fraction(re.p, re.q), Fraction(im.p, im.q))


def factor_polyc(p: Poly) -> Tuple[GaussianRational, Tuple[Tuple[Poly, int], ...]]:
    """Factor p into monic irreducibles over Q(i); returns (unit, factors)."""
    if p.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    if _cache_enabled:
        with _factor_lock:
            hit = _factor_cache.get(p)
        if hit is not None:
            return hit
    expr = sum(_gr_to_sympy(c) * _SYMPY_Z**k for k, c in enumerate(p.coeffs))
    sp = sympy.Poly(expr, _SYMPY_Z, domain="QQ_I")
    const, factors = sp.factor_list()
    unit = _sympy_to_gr(sympy.sympify(const))
    out: List[Tuple[Poly, int]] = []
    for f, mult in factors:
        coeffs = [_sympy_to_gr(c) for c in reversed(f.all_coeffs())]
        q = Poly(coeffs)
        lead = q.leading()
        if lead != 1:
            unit = unit * lead ** int(mult)
            q = q.monic()
        out.append((q, int(mult)))
    result = (unit, tuple(sorted(out, key=lambda fm: (fm[0].degree, str(fm[0])))))
    if _cache_enabled:
        with _factor_lock:
            _factor_cache[p] = result
    return result


def factor_multiplicity(den: Poly, psi: Poly) -> int:
    """Multiplicity of the monic irreducible psi in den."""
    if den.is_constant():
        return 0
    for f, m in factor_polyc(den)[1]:
        if f == psi:
            return m
    return 0


# --------------------------------------------------------------------------
# Vanishing orders of characteristic functions along irreducible factors.
# --------------------------------------------------------------------------


def ladder_order(num: ExpPoly, psi: Poly) -> int:
    """ord of num* along the roots of the monic irreducible psi != z.

    Runs the derivative ladder: row k is the k-th derivative of num on the
    characteristic side; psi divides every coefficient of rows 0..m-1 iff
    num* vanishes to order >= m at each root of psi.
    """
    if num.is_zero():
        raise ValueError("zero exponential polynomial")
    bound = num.ode_order()
    m = 0
    row = num
    while m < bound:
        if not all(psi.divides(p) for p in row.terms.values()):
            return m
        m += 1
        row = row.derivative()
    return m


def ord_at_factor(num: ExpPoly, psi: Poly) -> int:
    """Vanishing order of num* along psi (z handled by the power series)."""
    if psi == POLY_Z:
        return num.vanishing_order_at_zero()
    return ladder_order(num, psi)


# --------------------------------------------------------------------------
# Entirety certificates.
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesEvidence:
    """Power-series check at 0: the first `required` Taylor coefficients."""

    required: int
    coefficients: Tuple[GaussianRational, ...]

    def replay(self, num: ExpPoly) -> bool:
        actual = tuple(num.taylor_at_zero(self.required))
        return actual == self.coefficients and all(not c for c in actual)


@dataclass(frozen=True)
class LadderEvidence:
    """Divisibility quotients: c_{k,j} = psi * quotients[(k, j)] for k < mult."""

    quotients: Tuple[Tuple[Tuple[int, int], Poly], ...]

    def replay(self, num: ExpPoly, psi: Poly, mult: int) -> bool:
        table = dict(self.quotients)
        row = num
        for k in range(mult):
            for j, p in row.terms.items():
                q = table.get((k, j))
                if q is None or psi * q != p:
                    return False
            row = row.derivative()
        return True


@dataclass(frozen=True)
class EntiretyCertificate:
    """Replayable exact evidence that num*/den is entire."""

    den: Poly
    entries: Tuple[Tuple[Poly, int, object], ...]  # (factor, mult, evidence)

    def replay(self, num: ExpPoly) -> bool:
        for psi, mult, ev in self.entries:
            if isinstance(ev, SeriesEvidence):
                if not ev.replay(num):
                    return False
            else:
                if not ev.replay(num, psi, mult):
                    return False
        return True


class Refusal:
    """Falsy refusal carrying which step failed and a concrete witness."""

    __slots__ = ("step", "detail", "data")

    def __init__(self, step: str, detail: str, data=None):
        self.step = step
        self.detail = detail
        self.data = data

    def __bool__(self):
        return False

    def __repr__(self):
        return f"Refusal({self.step}: {self.detail})"


def is_entire(num: ExpPoly, den: Poly):
    """EntiretyCertificate if num*/den extends entirely, else a Refusal.

    For the factor z with multiplicity m: exact Taylor vanishing to order m.
    For every other irreducible factor psi with multiplicity m: the ladder
    divisibility psi | c_{k,j} for all k < m and all j.
    """
    if den.is_zero():
        raise DivisionByZeroError("zero denominator")
    if num.is_zero():
        return EntiretyCertificate(den=den.monic(), entries=())
    den = den.monic()
    if den.is_one():
        return EntiretyCertificate(den=den, entries=())
    entries: List[Tuple[Poly, int, object]] = []
    for psi, mult in factor_polyc(den)[1]:
        if psi == POLY_Z:
            coeffs = tuple(num.taylor_at_zero(mult))
            bad = next((k for k, c in enumerate(coeffs) if c), None)
            if bad is not None:
                return Refusal(
                    "entirety",
                    f"factor z requires vanishing order {mult}, actual {bad}",
                    data={"factor": psi, "required": mult, "actual": bad},
                )
            entries.append((psi, mult, SeriesEvidence(mult, coeffs)))
        else:
            quots: List[Tuple[Tuple[int, int], Poly]] = []
            row = num
            for k in range(mult):
                for j, p in row.terms.items():
                    q, r = divmod(p, psi)
                    if not r.is_zero():
                        return Refusal(
                            "entirety",
                            f"factor {psi} does not divide derivative "
                            f"coefficient c[{k},{j}]",
                            data={"factor": psi, "k": k, "j": j},
                        )
                    quots.append(((k, j), q))
                row = row.derivative()
            entries.append((psi, mult, LadderEvidence(tuple(quots))))
    return EntiretyCertificate(den=den, entries=tuple(entries))


# --------------------------------------------------------------------------
# HElement.
# --------------------------------------------------------------------------


class HElement:
    """c * sigma^k * num/den in canonical form (see module docstring)."""

    __slots__ = ("num", "den", "unit_c", "unit_k", "_cert")

    def __init__(self, num, den, unit_c, unit_k, _cert=None, _internal=False):
        if not _internal:
            raise TypeError("use HElement.make / h_normalize")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "unit_c", unit_c)
        object.__setattr__(self, "unit_k", unit_k)
        object.__setattr__(self, "_cert", _cert)

    def __setattr__(self, name, value):
        raise AttributeError("HElement is immutable")

    @classmethod
    def make(
        cls,
        num: ExpPoly,
        den: Poly = POLY_ONE,
        unit_c: GaussianRational = GR_ONE,
        unit_k: int = 0,
        check: bool = True,
    ) -> "HElement":
        """Reduce, unit-normalize, and (optionally) certify entirety."""
        if den.is_zero():
            raise DivisionByZeroError("zero denominator")
        if num.is_zero():
            return cls(EP_ZERO, POLY_ONE, GR_ONE, 0, _internal=True)
        if not isinstance(unit_c, GaussianRational):
            unit_c = GaussianRational(unit_c)
        if not unit_c:
            return cls(EP_ZERO, POLY_ONE, GR_ONE, 0, _internal=True)
        # cancel shared polynomial factors
        g = poly_gcd(num.content(), den)
        if g.degree > 0:
            num = num.exact_poly_div(g)
            den = den.exact_div(g)
        # monic denominator; fold its leading coefficient into the unit
        lead = den.leading()
        if lead != 1:
            den = den.monic()
            unit_c = unit_c / lead
        # sigma-valuation 0
        v = num.sigma_valuation
        if v:
            num = num.sigma_shift(-v)
            unit_k += v
        # monic leading coefficient polynomial
        top = num.coeff(num.sigma_degree).leading()
        if top != 1:
            num = num.scale(GR_ONE / top)
            unit_c = unit_c * top
        cert = None
        if check:
            cert = is_entire(num, den)
            if isinstance(cert, Refusal):
                raise NotEntireError(f"not an H element: {cert.detail}", witness=cert)
        return cls(num, den, unit_c, unit_k, _cert=cert, _internal=True)

    # -- inspection ----------------------------------------------------------

    @property
    def certificate(self) -> EntiretyCertificate:
        cert = self._cert
        if cert is None:
            cert = is_entire(self.num, self.den)
            if isinstance(cert, Refusal):  # pragma: no cover - internal bug
                raise AssertionError("stored HElement failed entirety replay")
            object.__setattr__(self, "_cert", cert)
        return cert

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def is_unit(self) -> bool:
        """Units of H are c * sigma^k."""
        return self.num == EP_ONE and self.den.is_one()

    def is_one(self) -> bool:
        return self.is_unit() and self.unit_c == 1 and self.unit_k == 0

    def strip_unit(self) -> "HElement":
        """The canonical associate with unit 1 * sigma^0."""
        if self.is_zero():
            return self
        return HElement(self.num, self.den, GR_ONE, 0, _cert=self._cert, _internal=True)

    def equal_up_to_unit(self, other: "HElement") -> bool:
        return self.num == other.num and self.den == other.den

    def sigma_exponents(self) -> List[int]:
        """Sigma exponents of the value (unit shift included)."""
        return [j + self.unit_k for j in self.num.terms]

    # -- value-level ExpPoly helpers ------------------------------------------

    def value_num(self) -> ExpPoly:
        """The numerator with the unit folded back in: value = value_num/den."""
        return self.num.scale(self.unit_c).sigma_shift(self.unit_k)

    # -- ring operations --------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, HElement):
            return NotImplemented
        return (
            self.num == other.num
            and self.den == other.den
            and self.unit_c == other.unit_c
            and self.unit_k == other.unit_k
        )

    def __hash__(self):
        return hash((self.num, self.den, self.unit_c, self.unit_k))

    def __mul__(self, other):
        if isinstance(other, HElement):
            if self.is_zero() or other.is_zero():
                return H_ZERO
            return HElement.make(
                self.num * other.num,
                self.den * other.den,
                self.unit_c * other.unit_c,
                self.unit_k + other.unit_k,
                check=False,
            )
        if isinstance(other, (int, GaussianRational)):
            c = other if isinstance(other, GaussianRational) else GaussianRational(other)
            if not c or self.is_zero():
                return H_ZERO
            return HElement(
                self.num, self.den, self.unit_c * c, self.unit_k, _cert=self._cert, _internal=True
            )
        return NotImplemented

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, HElement):
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        a = self.value_num()
        b = other.value_num()
        return HElement.make(
            a * other.den + b * self.den, self.den * other.den, GR_ONE, 0, check=False
        )

    def __neg__(self):
        if self.is_zero():
            return self
        return HElement(
            self.num, self.den, -self.unit_c, self.unit_k, _cert=self._cert, _internal=True
        )

    def __sub__(self, other):
        if not isinstance(other, HElement):
            return NotImplemented
        return self + (-other)

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_unit():
                raise ValueError("negative power of a non-unit H element")
            return self.inverse() ** (-n)
        out = H_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> "HElement":
        if not self.is_unit():
            raise ValueError("only units c*sigma^k are invertible in H")
        return HElement(EP_ONE, POLY_ONE, GR_ONE / self.unit_c, -self.unit_k, _internal=True)

    def derivative(self) -> "HElement":
        """d/dz of the characteristic function, as an H element."""
        if self.is_zero():
            return self
        n = self.num
        d = self.den
        k = self.unit_k
        # (e^{kz} n/d)' = e^{kz} (k n d + n' d - n d') / d^2
        top = n * d * k + n.derivative() * d - n * d.derivative()
        return HElement.make(top, d * d, self.unit_c, k, check=False)

    # -- numerics ------------------------------------------------------------------

    def eval(self, z: complex) -> complex:
        """Value of the characteristic function; callers avoid den roots."""
        z = complex(z)
        v = self.num.eval(z) / self.den.eval_complex(z)
        return complex(self.unit_c) * cmath.exp(self.unit_k * z) * v

    def eval_grid(self, Z):
        num = self.num.eval_grid(Z)
        den = self.den.eval(Z) if not self.den.is_one() else 1.0
        return complex(self.unit_c) * np.exp(self.unit_k * Z) * num / den

    def __repr__(self):
        return (
            f"HElement(unit={self.unit_c}*s^{self.unit_k}, num={self.num}, den={self.den})"
        )


H_ZERO = HElement(EP_ZERO, POLY_ONE, GR_ONE, 0, _internal=True)
H_ONE = HElement(EP_ONE, POLY_ONE, GR_ONE, 0, _internal=True)


def h_from_exppoly(num: ExpPoly) -> HElement:
    return HElement.make(num, POLY_ONE, check=False)


def h_normalize(num: ExpPoly, den: Poly = POLY_ONE) -> HElement:
    """Public normalization entry point: certifies entirety, canonicalizes."""
    return HElement.make(num, den, check=True)


# --------------------------------------------------------------------------
# Zero divisors (the algebraic part of the zero set).
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroDivisorPart:
    """Irreducible Q(i) factors carrying the algebraic zeros of q*."""

    factors: Tuple[Tuple[Poly, int], ...]

    def as_poly(self) -> Poly:
        out = POLY_ONE
        for psi, m in self.factors:
            out = out * psi**m
        return out


def algebraic_zero_divisor(a: HElement) -> ZeroDivisorPart:
    """All irreducible psi whose roots are zeros of a*, with exact orders.

    At algebraic alpha != 0 a zero of a* forces every coefficient polynomial
    to vanish (powers of e^alpha are independent over the algebraic numbers),
    so the candidates are exactly the factors of the content; z = 0 is read
    off the power series and corrected by the denominator's multiplicity.
    """
    if a.is_zero():
        raise DivisionByZeroError("zero element has no zero divisor")
    out: List[Tuple[Poly, int]] = []
    ord0 = a.num.vanishing_order_at_zero() - factor_multiplicity(a.den, POLY_Z)
    if ord0 > 0:
        out.append((POLY_Z, ord0))
    content = a.num.content()
    if content.degree > 0:
        for psi, _ in factor_polyc(content)[1]:
            if psi == POLY_Z:
                continue
            m = ladder_order(a.num, psi)
            if m > 0:
                out.append((psi, m))
    return ZeroDivisorPart(tuple(out))


# --------------------------------------------------------------------------
# Divisibility.
# --------------------------------------------------------------------------


def h_divides(a: HElement, b: HElement):
    """Quotient q with q*a = b exactly when b/a lies in H, else a Refusal."""
    if a.is_zero():
        raise DivisionByZeroError("division by the zero element")
    if b.is_zero():
        return H_ZERO
    try:
        q0 = rat_divexact(RatExpPoly.from_exp(b.num), RatExpPoly.from_exp(a.num))
    except ValueError:
        return Refusal("sigma-division", "numerator division leaves a remainder")
    q_rat = q0 * RatFunc(a.den, b.den)
    num, den = q_rat.primitive_clear()
    cert = is_entire(num, den)
    if isinstance(cert, Refusal):
        return Refusal("entirety", f"candidate quotient not entire: {cert.detail}", cert)
    unit_c = b.unit_c / a.unit_c
    unit_k = b.unit_k - a.unit_k
    return HElement.make(num, den, unit_c, unit_k, check=False)


# --------------------------------------------------------------------------
# Gcd.
# --------------------------------------------------------------------------


def _cofactor_parts(num: ExpPoly, den: Poly, g1: ExpPoly):
    """(num', den') for (num/den)/g1, cleared and reduced."""
    q = rat_divexact(RatExpPoly.from_exp(num), RatExpPoly.from_exp(g1))
    q = q * RatFunc(POLY_ONE, den)
    return q.primitive_clear()


def _xgcd_cleared(numA: ExpPoly, numB: ExpPoly):
    """u', v' ExpPoly and d Poly with u'*numA + v'*numB = d (gcd 1 assumed)."""
    g, u, v = rep_xgcd(RatExpPoly.from_exp(numA), RatExpPoly.from_exp(numB))
    if not (g.sigma_degree == 0 and g.sigma_valuation == 0):
        raise AssertionError("cofactors expected to be sigma-coprime")
    # g is 1; clear coefficient denominators of u, v jointly
    from .polys import poly_lcm

    d = POLY_ONE
    for r in list(u.terms.values()) + list(v.terms.values()):
        d = poly_lcm(d, r.den)
    # also absorb g's den (g = 1 exactly, so none)
    u_ep = ExpPoly({j: r.num * d.exact_div(r.den) for j, r in u.terms.items()})
    v_ep = ExpPoly({j: r.num * d.exact_div(r.den) for j, r in v.terms.items()})
    # reduce common polynomial content
    common = poly_gcd(poly_gcd(u_ep.content(), v_ep.content()), d)
    if common.degree > 0:
        u_ep = u_ep.exact_poly_div(common)
        v_ep = v_ep.exact_poly_div(common)
        d = d.exact_div(common)
    return u_ep, v_ep, d


def h_gcd(a: HElement, b: HElement) -> HElement:
    """gcd in H: sigma-Euclid, then an exact algebraic correction.

    The Euclidean gcd g1 over Q(i)(z)[sigma^{+-}] captures common zeros in
    families; the finitely many remaining discrepancies sit over algebraic
    points (roots of the cleared Bezout residual d(z) and of the cofactor
    denominators) and are fixed by multiplying/dividing polynomial factors
    to make ord_psi(g*) = min(ord_psi(a*), ord_psi(b*)) everywhere.
    """
    if a.is_zero() and b.is_zero():
        raise BothZeroError("gcd of (0, 0) is undefined")
    if a.is_zero():
        return b.strip_unit()
    if b.is_zero():
        return a.strip_unit()
    g1_rat = rep_gcd(RatExpPoly.from_exp(a.num), RatExpPoly.from_exp(b.num))
    g1, _ = g1_rat.primitive_clear()
    content = g1.content()
    if content.degree > 0:
        g1 = g1.exact_poly_div(content)
    numA, denA = _cofactor_parts(a.num, a.den, g1)
    numB, denB = _cofactor_parts(b.num, b.den, g1)
    _, _, d = _xgcd_cleared(numA, numB)
    candidates: Dict[Poly, None] = {POLY_Z: None}
    for poly in (d, denA, denB):
        if poly.degree > 0:
            for psi, _ in factor_polyc(poly)[1]:
                candidates[psi] = None
    num_g, den_g = g1, POLY_ONE
    for psi in candidates:
        eA = ord_at_factor(numA, psi) - factor_multiplicity(denA, psi)
        eB = ord_at_factor(numB, psi) - factor_multiplicity(denB, psi)
        e = min(eA, eB)
        if e > 0:
            num_g = num_g * psi**e
        elif e < 0:
            den_g = den_g * psi ** (-e)
    g = HElement.make(num_g, den_g, check=True).strip_unit()
    qa = h_divides(g, a)
    qb = h_divides(g, b)
    if isinstance(qa, Refusal) or isinstance(qb, Refusal):  # pragma: no cover
        raise AssertionError("gcd correction failed divisibility re-check")
    return g


# --------------------------------------------------------------------------
# Bezout identities.
# --------------------------------------------------------------------------


def _try_entire(num: ExpPoly, den: Poly, unit_c=GR_ONE, unit_k=0) -> Optional[HElement]:
    if num.is_zero():
        return H_ZERO
    rat = RatExpPoly.from_exp(num) * RatFunc(POLY_ONE, den)
    n, dd = rat.primitive_clear()
    if isinstance(is_entire(n, dd), Refusal):
        return None
    return HElement.make(n, dd, unit_c, unit_k, check=False)


def h_bezout(a: HElement, b: HElement, allow_jets: bool = False):
    """(g, u, v) with u*a + v*b = g = h_gcd(a, b), verified exactly.

    Tier 1: extended sigma-Euclid on the cofactors, cleared; when the
    residual polynomial divides out entirely the cofactors are returned
    directly. Tier 2 (gated by allow_jets) corrects u -> u + t*B, v -> v -
    t*A with t solved from exact jet conditions at the residual's roots.
    """
    if a.is_zero() and b.is_zero():
        raise BothZeroError("bezout of (0, 0) is undefined")
    if a.is_zero():
        g = b.strip_unit()
        v = h_divides(b, g)
        return g, H_ZERO, v
    if b.is_zero():
        g = a.strip_unit()
        u = h_divides(a, g)
        return g, u, H_ZERO
    g = h_gcd(a, b)
    A = h_divides(g, a)
    B = h_divides(g, b)
    if isinstance(A, Refusal) or isinstance(B, Refusal):  # pragma: no cover
        raise AssertionError("gcd does not divide its arguments")
    if A.is_unit():
        u, v = A.inverse(), H_ZERO
    elif B.is_unit():
        u, v = H_ZERO, B.inverse()
    else:
        u, v = _bezout_cofactors(A, B, allow_jets)
    _verify_bezout(a, b, g, u, v, A, B)
    return g, u, v


def _verify_bezout(a, b, g, u, v, A, B):
    lhs = u * A + v * B
    if not lhs.is_one():
        raise BezoutUnresolvedError("bezout identity failed symbolic re-check")
    total = u * a + v * b
    if total != g:
        raise BezoutUnresolvedError("bezout triple does not reproduce the gcd")


def _bezout_cofactors(A: HElement, B: HElement, allow_jets: bool):
    """u, v in H with u*A + v*B = 1 for coprime A, B (neither a unit)."""
    numA = A.value_num()
    numB = B.value_num()
    u_ep, v_ep, d = _xgcd_cleared(numA, numB)
    # u = (u_ep * den_A) / d,  v = (v_ep * den_B) / d
    u = _try_entire(u_ep * A.den, d)
    v = _try_entire(v_ep * B.den, d)
    if u is not None and v is not None:
        return u, v
    if not allow_jets:
        raise BezoutUnresolvedError(
            "tier-1 Bezout cofactors are not entire; re-run with jet "
            "correction enabled (allow_jets=True)"
        )
    return _bezout_jets(A, B, u_ep, v_ep, d)


# ---- tier 2: jet-corrected cofactors ---------------------------------------


def _gauss_solve(rows, rhs, nvars):
    """One solution of rows * x = rhs over Q(i), or None if inconsistent."""
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(nvars):
        pivot = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = GR_ONE / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    for i in range(r, len(m)):
        if m[i][nvars]:
            return None
    x = [GR_ZERO] * nvars
    for i, c in enumerate(pivots):
        x[c] = m[i][nvars]
    return x


def _vanishing_equations(x: ExpPoly, psi: Poly, order: int):
    """Linear data forcing ord_psi(x*) >= order, as exact Q(i) numbers.

    For psi = z these are the Taylor coefficients at 0; otherwise the
    ladder residues: the coefficients of c_{l,j}(x) mod psi for l < order,
    which vanish iff x* vanishes to that order along psi's roots (powers of
    e^alpha are independent over the algebraic numbers).
    """
    out: List[GaussianRational] = []
    if psi == POLY_Z:
        out.extend(x.taylor_at_zero(order))
        return out
    deg = psi.degree
    row = x
    for _ in range(order):
        for j in sorted(row.terms):
            rem = row.terms[j] % psi
            out.extend(rem[i] for i in range(deg))
        row = row.derivative()
    return out


def _vanishing_keys(support, psi: Poly, order: int):
    """Equation keys aligned with _vanishing_equations for a fixed sigma
    support (so rows from different x line up columnwise)."""
    if psi == POLY_Z:
        return [("taylor", n) for n in range(order)]
    deg = psi.degree
    keys = []
    for l in range(order):
        for j in support:
            for i in range(deg):
                keys.append((l, j, i))
    return keys


def _vanishing_map(x: ExpPoly, psi: Poly, order: int, support):
    """Like _vanishing_equations but keyed, tolerating missing exponents."""
    out: Dict[object, GaussianRational] = {}
    if psi == POLY_Z:
        for n, c in enumerate(x.taylor_at_zero(order)):
            out[("taylor", n)] = c
        return out
    deg = psi.degree
    row = x
    for l in range(order):
        for j, p in row.terms.items():
            rem = p % psi
            for i in range(deg):
                out[(l, j, i)] = rem[i]
        row = row.derivative()
    return out


def _bezout_jets(A: HElement, B: HElement, u_ep: ExpPoly, v_ep: ExpPoly, d: Poly):
    """Correct u -> (U0 + t*B)/d, v -> (V0 - t*A)/d with t = S/d^k.

    For each irreducible factor psi of d the candidate numerator must
    vanish along psi's roots to the denominator's order; those conditions
    are linear in the coefficients of the unknown ExpPoly S, so everything
    reduces to exact linear algebra over Q(i). The side whose cofactor is
    nonvanishing along psi carries the conditions; the other side follows
    from the Bezout identity and is re-verified at the end.
    """
    numA, denA = A.value_num(), A.den
    numB, denB = B.value_num(), B.den
    U0 = u_ep * denA
    V0 = v_ep * denB
    factors = factor_polyc(d)[1]
    sides = []
    for psi, mu in factors:
        ordB = ord_at_factor(numB, psi) - factor_multiplicity(denB, psi)
        sides.append((psi, mu, ordB == 0))
    # S is Laurent: reductions mod psi can collapse the partners' sigma span,
    # so the solution may need exponents well below/above the naive window.
    spans = [numA, numB, U0, V0]
    lo = min(x.sigma_valuation for x in spans if x)
    hi = max(x.sigma_degree for x in spans if x)
    width = max(numA.sigma_span, numB.sigma_span, 1)
    j_min = lo - hi - width
    j_max = hi - lo + width
    base_deg = max(numA.max_coeff_degree(), numB.max_coeff_degree(), d.degree)
    for k in (0, 1):
        dk = d**k
        for extra in (0, base_deg, 3 * base_deg):
            deg_cap = d.degree * (k + 1) + extra
            basis = [(j, t) for j in range(j_min, j_max + 1) for t in range(deg_cap + 1)]
            rows: List[List[GaussianRational]] = []
            rhs: List[GaussianRational] = []
            for psi, mu, u_side in sides:
                if u_side:
                    target = U0 * dk * denB
                    partner = numB
                    lift = factor_multiplicity(denB, psi)
                    sign = GR_ONE
                else:
                    target = V0 * dk * denA
                    partner = numA
                    lift = factor_multiplicity(denA, psi)
                    sign = -GR_ONE
                need = mu * (k + 1) + lift
                support = sorted(
                    set(
                        j1 + j2
                        for j1 in range(j_min, j_max + 1)
                        for j2 in partner.terms
                    )
                    | set(target.terms)
                )
                keys = _vanishing_keys(support, psi, need)
                tmap = _vanishing_map(target, psi, need, support)
                col_maps = []
                for j, t in basis:
                    mono = ExpPoly({j: poly_from([0] * t + [1])})
                    col_maps.append(_vanishing_map(mono * partner, psi, need, support))
                for key in keys:
                    rows.append([sign * cm.get(key, GR_ZERO) for cm in col_maps])
                    rhs.append(-tmap.get(key, GR_ZERO))
            sol = _gauss_solve(rows, rhs, len(basis))
            if sol is None:
                continue
            t_terms: Dict[int, list] = {}
            for (j, tdeg), c in zip(basis, sol):
                if not c:
                    continue
                cs = t_terms.setdefault(j, [GR_ZERO] * (deg_cap + 1))
                cs[tdeg] = c
            S = ExpPoly({j: Poly(cs) for j, cs in t_terms.items()})
            u = _try_entire(U0 * dk * denB + S * numB, d * dk * denB)
            v = _try_entire(V0 * dk * denA - S * numA, d * dk * denA)
            if u is not None and v is not None:
                return u, v
    raise BezoutUnresolvedError("jet correction found no ExpPoly solution")
