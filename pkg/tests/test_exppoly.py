"""Exact arithmetic layer: scalars, polynomials, exponential polynomials."""

import math
import random
from fractions import Fraction

import pytest

from ddelta.exppoly import (
    EP_ONE,
    EP_SIGMA,
    EP_Z,
    ExpPoly,
    RatExpPoly,
    laurent_divmod,
)
from ddelta.errors import DivisionByZeroError, EvalOverflowError
from ddelta.polys import POLY_ONE, POLY_Z, Poly, RatFunc, poly_from, poly_gcd
from ddelta.scalars import GaussianRational, gr


def bisect_root(f, lo, hi, steps=200):
    """Independent bisection oracle for a sign change of a real function."""
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


SIGMA_MINUS_1 = EP_SIGMA - EP_ONE


class TestGaussianRational:
    def test_field_ops(self):
        a = gr(Fraction(1, 2), Fraction(3, 4))
        b = gr(2, -1)
        assert a + b == gr(Fraction(5, 2), Fraction(-1, 4))
        assert a * b == gr(Fraction(7, 4), Fraction(1))
        assert (a / b) * b == a
        assert a - a == gr(0)

    def test_exact_equality_and_hash(self):
        assert gr(Fraction(2, 4)) == gr(Fraction(1, 2))
        assert hash(gr(1, 2)) == hash(gr(1, 2))

    def test_pow_and_inverse(self):
        i = gr(0, 1)
        assert i**2 == gr(-1)
        assert i**-1 == gr(0, -1)


class TestPolyC:
    def test_divmod_exact(self):
        p = poly_from([-1, 0, 1])  # z^2 - 1
        d = poly_from([-1, 1])  # z - 1
        q, r = divmod(p, d)
        assert r.is_zero()
        assert q == poly_from([1, 1])

    def test_gcd_trivial_cases(self):
        assert poly_gcd(poly_from([-1, 0, 1]), poly_from([-1, 1])) == poly_from([-1, 1])
        assert poly_gcd(POLY_Z, POLY_ONE) == POLY_ONE
        assert poly_gcd(Poly(), Poly()).is_zero()

    def test_gcd_derived_example(self):
        # oracle: divide both inputs by the claimed gcd exactly
        a = poly_from([0, -1, 0, 1])  # z^3 - z
        b = poly_from([1, 2, 1])  # z^2 + 2z + 1
        g = poly_gcd(a, b)
        assert g == poly_from([1, 1])
        assert a.exact_div(g) * g == a
        assert b.exact_div(g) * g == b

    def test_taylor_shift(self):
        p = poly_from([1, 2, 3])
        q = p.taylor_shift(gr(1))
        # p(z+1) = 1 + 2(z+1) + 3(z+1)^2 = 6 + 8z + 3z^2
        assert q == poly_from([6, 8, 3])

    def test_ratfunc_reduction(self):
        r = RatFunc(poly_from([0, 0, 1]), poly_from([0, 2]))
        assert r.num == poly_from([0, Fraction(1, 2)])
        assert r.den == POLY_ONE


class TestExpPolyRing:
    def test_mul_trivial(self):
        assert (EP_SIGMA - EP_ONE) * (EP_SIGMA + EP_ONE) == ExpPoly(
            {0: poly_from([-1]), 2: poly_from([1])}
        )

    def test_add_cancel(self):
        assert ((EP_SIGMA - EP_ONE) + (EP_ONE - EP_SIGMA)).is_zero()

    def test_laurent_exponents_add(self):
        zs = EP_Z * EP_SIGMA
        assert zs * ExpPoly({-1: POLY_ONE}) == EP_Z

    def test_ring_axioms_random(self):
        rng = random.Random(7)

        def rand_ep():
            terms = {}
            for j in range(rng.randint(-2, 0), rng.randint(1, 3)):
                coeffs = [gr(rng.randint(-3, 3), rng.randint(-1, 1)) for _ in range(rng.randint(1, 3))]
                terms[j] = Poly(coeffs)
            return ExpPoly(terms)

        for _ in range(25):
            a, b, c = rand_ep(), rand_ep(), rand_ep()
            assert (a + b) + c == a + (b + c)
            assert a * b == b * a
            assert a * (b + c) == a * b + a * c
            assert (a * b) * c == a * (b * c)


class TestDerivative:
    def test_trivial(self):
        assert EP_SIGMA.derivative() == EP_SIGMA
        assert (EP_Z * EP_SIGMA).derivative() == ExpPoly({1: poly_from([1, 1])})
        assert (EP_Z * EP_Z).derivative() == ExpPoly({0: poly_from([0, 2])})

    def test_matches_finite_difference(self):
        rng = random.Random(11)
        h = 1e-5
        for _ in range(10):
            terms = {}
            for j in range(-1, 2):
                terms[j] = Poly([gr(rng.randint(-3, 3)) for _ in range(2)])
            a = ExpPoly(terms)
            if a.is_zero():
                continue
            da = a.derivative()
            for z in [0.3 + 0.2j, -0.5 + 1j, 1.1 - 0.7j]:
                fd = (a.eval(z + h) - a.eval(z - h)) / (2 * h)
                assert abs(da.eval(z) - fd) <= 1e-6 * max(1.0, abs(fd))


class TestEval:
    def test_exp_values(self):
        assert abs(SIGMA_MINUS_1.eval(1j * math.pi) - (-2)) < 1e-12
        assert abs(SIGMA_MINUS_1.eval(0.0)) < 1e-15

    def test_lambert_style_root(self):
        # real root of z e^z = 1 located by an independent bisection oracle
        alpha = bisect_root(lambda x: x * math.exp(x) - 1, 0.0, 1.0)
        zs1 = EP_Z * EP_SIGMA - EP_ONE
        assert abs(zs1.eval(alpha)) < 1e-6

    def test_overflow_guard(self):
        with pytest.raises(EvalOverflowError):
            EP_SIGMA.eval(800.0)

    def test_mul_eval_consistency(self):
        rng = random.Random(3)
        for _ in range(10):
            a = ExpPoly({rng.randint(-2, 2): poly_from([rng.randint(-3, 3), 1])})
            b = ExpPoly(
                {0: poly_from([rng.randint(-2, 2)]), 1: poly_from([1, rng.randint(-2, 2)])}
            )
            for z in [0.2 + 0.1j, -1.0 + 2.0j]:
                lhs = (a * b).eval(z)
                rhs = a.eval(z) * b.eval(z)
                assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


class TestLaurentDivmod:
    def test_exact_quotient(self):
        q, r = laurent_divmod(EP_SIGMA * EP_SIGMA - EP_ONE, SIGMA_MINUS_1)
        assert r.is_zero()
        assert q == RatExpPoly({0: RatFunc(POLY_ONE), 1: RatFunc(POLY_ONE)})

    def test_lower_degree_remainder(self):
        q, r = laurent_divmod(EP_Z, SIGMA_MINUS_1)
        assert q.is_zero()
        assert r == RatExpPoly.from_exp(EP_Z)

    def test_rational_coefficients(self):
        # (sigma^2) / (z sigma - 1): quotient sigma/z + 1/z^2, remainder 1/z^2
        a = EP_SIGMA * EP_SIGMA
        b = EP_Z * EP_SIGMA - EP_ONE
        q, r = laurent_divmod(a, b)
        inv_z = RatFunc(POLY_ONE, POLY_Z)
        inv_z2 = RatFunc(POLY_ONE, POLY_Z * POLY_Z)
        assert q == RatExpPoly({1: inv_z, 0: inv_z2})
        assert r == RatExpPoly({0: inv_z2})
        # identity a = q*b + r over Q(i)(z)
        assert q * RatExpPoly.from_exp(b) + r == RatExpPoly.from_exp(a)

    def test_identity_random(self):
        rng = random.Random(19)
        for _ in range(20):
            a = ExpPoly(
                {
                    j: Poly([gr(rng.randint(-2, 2)) for _ in range(rng.randint(1, 3))])
                    for j in range(rng.randint(-1, 0), rng.randint(1, 3))
                }
            )
            b = ExpPoly({0: poly_from([rng.choice([-1, 1]), 1]), 1: poly_from([rng.randint(-2, 2), 1])})
            if a.is_zero() or b.is_zero():
                continue
            q, r = laurent_divmod(a, b)
            assert q * RatExpPoly.from_exp(b) + r == RatExpPoly.from_exp(a)
            if r:
                # remainder degree sits below the normalized divisor degree
                assert r.sigma_degree < b.sigma_degree - b.sigma_valuation

    def test_zero_divisor_raises(self):
        with pytest.raises(DivisionByZeroError):
            laurent_divmod(EP_ONE, ExpPoly())


class TestTaylorAtZero:
    def test_exp_series(self):
        # sigma - 1 ~ z + z^2/2 + z^3/6
        coeffs = SIGMA_MINUS_1.taylor_at_zero(4)
        assert coeffs[0] == gr(0)
        assert coeffs[1] == gr(1)
        assert coeffs[2] == gr(Fraction(1, 2))
        assert coeffs[3] == gr(Fraction(1, 6))

    def test_vanishing_order(self):
        assert SIGMA_MINUS_1.vanishing_order_at_zero() == 1
        assert (SIGMA_MINUS_1 - EP_Z).vanishing_order_at_zero() == 2
        assert ((SIGMA_MINUS_1) * (SIGMA_MINUS_1)).vanishing_order_at_zero() == 2
