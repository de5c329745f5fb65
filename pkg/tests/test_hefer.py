"""Difference-quotient forms and growth envelopes."""

import cmath
import math
import random

import numpy as np
import pytest

from ddelta.exppoly import EP_ONE, EP_SIGMA, EP_Z, ExpPoly
from ddelta.hefer import (
    MFrac,
    MP_ONE,
    MPoly,
    TwoVarExpPoly,
    _Term,
    _atom_frac,
    _operator_frac,
    _ZETA1,
    _Z1,
    growth_bounds,
    hefer_growth_check,
    hefer_pair_n2,
    hefer_quotient,
)
from ddelta.hring import HElement
from ddelta.polys import POLY_Z, poly_from
from ddelta.scalars import GR_ONE, gr

S1 = EP_SIGMA - EP_ONE


def H(num, den=None):
    return HElement.make(num) if den is None else HElement.make(num, den)


def rand_h(rng):
    terms = {
        j: poly_from([rng.randint(-2, 2) for _ in range(rng.randint(1, 3))])
        for j in range(0, rng.randint(1, 3))
    }
    ep = ExpPoly(terms)
    return H(ep) if not ep.is_zero() else H(EP_ONE)


class TestQuotient:
    def test_exp_atom_diagonal_value(self):
        p = hefer_quotient(H(EP_SIGMA))
        z = 0.4 - 0.2j
        assert abs(p.eval(z, z) - cmath.exp(z)) < 1e-9
        zeta = 1.1 + 0.3j
        expect = (cmath.exp(zeta) - cmath.exp(z)) / (zeta - z)
        assert abs(p.eval(zeta, z) - expect) < 1e-12

    def test_polynomial_quotient(self):
        # q = z^2: quotient is zeta + z
        p = hefer_quotient(H(ExpPoly({0: poly_from([0, 0, 1])})))
        for zeta, z in [(1.5, -0.3), (0.2 + 1j, 0.7 - 0.5j)]:
            assert abs(p.eval(zeta, z) - (zeta + z)) < 1e-12

    def test_constants_cancel(self):
        assert hefer_quotient(H(EP_SIGMA)).equals(hefer_quotient(H(S1)))

    def test_defining_identity_exact(self):
        # (zeta - z) * D_q - (q(zeta) - q(z)) is the zero expression
        for q in [H(EP_SIGMA), H(S1, POLY_Z), H(EP_Z * EP_SIGMA - EP_ONE)]:
            dq = hefer_quotient(q).frac()
            dz = MFrac(MPoly.var(_ZETA1) - MPoly.var(_Z1), MP_ONE)
            lhs = dq * dz
            rhs = _operator_frac(q, True) - _operator_frac(q, False)
            assert lhs.equals(rhs)

    def test_linearity_exact(self):
        rng = random.Random(13)
        for _ in range(10):
            q1, q2 = rand_h(rng), rand_h(rng)
            lhs = hefer_quotient(HElement.make(q1.value_num() + q2.value_num()))
            rhs = hefer_quotient(q1) + hefer_quotient(q2)
            assert lhs.equals(rhs)

    def test_leibniz_exact(self):
        rng = random.Random(29)
        for _ in range(10):
            q1, q2 = rand_h(rng), rand_h(rng)
            lhs = hefer_quotient(q1 * q2)
            rhs = TwoVarExpPoly(
                [_Term(coeff=GR_ONE, zeta_op=q1, atom=q2), _Term(coeff=GR_ONE, atom=q1, z_op=q2)]
            )
            assert lhs.equals(rhs)


class TestPair:
    def test_paper_formula_alpha_one(self):
        h1, h2 = hefer_pair_n2(H(EP_SIGMA), 1)
        # h1 = atom * z2, h2 = e^{zeta_1}
        zeta1, z1, zeta2, z2 = 0.6 + 0.1j, -0.2 + 0.4j, 1.3, 0.7 - 0.2j
        lhs = h1.eval(zeta1, z1, zeta2, z2) * (zeta1 - z1) + h2.eval(
            zeta1, z1, zeta2, z2
        ) * (zeta2 - z2)
        rhs = cmath.exp(zeta1) * zeta2 - cmath.exp(z1) * z2
        assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(rhs))

    def test_alpha_zero_empty_sum(self):
        q = H(EP_Z * EP_SIGMA + EP_ONE)
        h1, h2 = hefer_pair_n2(q, 0)
        assert h2.is_zero_expression()
        assert h1.equals(hefer_quotient(q))

    def test_unit_operator_alpha_two(self):
        h1, h2 = hefer_pair_n2(H(EP_ONE), 2)
        assert h1.is_zero_expression() or all(t.atom is not None for t in h1.terms)
        # h2 = zeta2 + z2: check (zeta2 + z2)(zeta2 - z2) = zeta2^2 - z2^2
        val = h2.eval(0.3, 0.1, 1.5, -0.5)
        assert abs(val - (1.5 + (-0.5))) < 1e-12

    def test_random_pairs_identity(self):
        rng = random.Random(7)
        for _ in range(8):
            q = rand_h(rng)
            alpha = rng.randint(0, 3)
            hefer_pair_n2(q, alpha)  # raises if expansion fails


class TestGrowth:
    def test_sigma_square(self):
        M, N = growth_bounds(H(EP_SIGMA * EP_SIGMA))
        assert N == 2

    def test_z_power(self):
        M, N = growth_bounds(H(ExpPoly({0: poly_from([0, 0, 0, 0, 0, 1])})))
        assert (M, N) == (5, 0)

    def test_laurent_extension(self):
        q = HElement.make(ExpPoly({-1: poly_from([0, 1]), 1: poly_from([1])}))
        M, N = growth_bounds(q)
        assert N == 1

    def test_hefer_check_sigma(self):
        rep = hefer_growth_check(H(EP_SIGMA))
        assert rep.N == 1
        assert rep.dominated

    def test_hefer_check_z_square(self):
        rep = hefer_growth_check(H(ExpPoly({0: poly_from([0, 0, 1])})))
        assert rep.N == 0
        assert rep.M == 1
        assert rep.dominated

    def test_near_diagonal_samples(self):
        rep = hefer_growth_check(H(EP_SIGMA * EP_SIGMA))
        assert rep.dominated
        assert rep.N == 2
