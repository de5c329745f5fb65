"""Argument-principle zero location."""

import cmath
import math

import pytest

from conftest import omega_constant
from ddelta.charzeros import Rect, count_zeros, find_zeros, vanishing_order
from ddelta.exppoly import EP_ONE, EP_SIGMA, EP_Z, ExpPoly
from ddelta.hring import HElement, algebraic_zero_divisor
from ddelta.polys import POLY_Z, poly_from

S1 = EP_SIGMA - EP_ONE
TWO_PI = 2 * math.pi


def H(num, den=None):
    if den is None:
        return HElement.make(num)
    return HElement.make(num, den)


class TestCount:
    def test_sigma_minus_one_strip(self):
        assert count_zeros(H(S1), Rect(-1, 1, -7, 7)) == 3  # 0, +-2*pi*i

    def test_z_square(self):
        assert count_zeros(H(EP_Z * EP_Z), Rect(-1, 1, -1, 1)) == 2

    def test_lambert_root(self):
        assert count_zeros(H(EP_Z * EP_SIGMA - EP_ONE), Rect(0, 1, -1, 1)) == 1

    def test_additivity_over_partition(self):
        q = H(S1 * (EP_SIGMA + EP_ONE))
        whole = count_zeros(q, Rect(-1, 1, -8, 8))
        parts = count_zeros(q, Rect(-1, 1, -8, 0.1)) + count_zeros(q, Rect(-1, 1, 0.1, 8))
        assert whole == parts

    def test_removable_singularity_not_counted(self):
        q = H(S1, POLY_Z)  # (e^z - 1)/z has no zero at 0
        assert count_zeros(q, Rect(-1, 1, -1, 1)) == 0
        assert count_zeros(q, Rect(-1, 1, -7, 7)) == 2


class TestFind:
    def test_sigma_minus_one_ladder(self):
        found = find_zeros(H(S1), Rect(-1, 1, -20, 20), tol=1e-9)
        expected = sorted(TWO_PI * k for k in range(-3, 4))
        assert len(found) == 7
        for c, e in zip(found, [complex(0, v) for v in expected]):
            assert c.multiplicity == 1
            assert abs(c.center - e) < 1e-9

    def test_double_zero_at_origin(self):
        found = find_zeros(H(S1 - EP_Z), Rect(-1, 1, -1, 1), tol=1e-9)
        assert len(found) == 1
        assert found[0].multiplicity == 2
        assert abs(found[0].center) < 1e-7

    def test_log_two(self):
        found = find_zeros(H(EP_SIGMA - EP_ONE - EP_ONE), Rect(0, 1, -1, 1))
        assert len(found) == 1
        assert abs(found[0].center - math.log(2)) < 1e-9

    def test_conjugate_symmetry(self):
        found = find_zeros(H(EP_Z * EP_SIGMA - EP_ONE), Rect(-4, 2, -9, 9))
        centers = sorted((c.center for c in found), key=lambda z: (z.imag, z.real))
        ups = [z for z in centers if z.imag > 1e-6]
        downs = [z for z in centers if z.imag < -1e-6]
        assert len(ups) == len(downs)
        for u, d in zip(ups, sorted(downs, key=lambda z: (-z.imag, z.real))):
            assert abs(u - d.conjugate()) < 1e-7

    def test_exactness_cross_check(self):
        # algebraic zero divisor (z, m) must match the numeric multiplicity
        q = H(EP_Z * S1)
        zd = algebraic_zero_divisor(q)
        assert zd.factors == ((POLY_Z, 2),)
        found = find_zeros(q, Rect(-0.5, 0.5, -0.5, 0.5))
        assert len(found) == 1 and found[0].multiplicity == 2


class TestVanishingOrder:
    def test_simple_zero(self):
        assert vanishing_order(H(S1), 0.0) == 1

    def test_double_zero_shifted(self):
        q = H(S1 * S1)
        assert vanishing_order(q, 2j * math.pi) == 2

    def test_no_zero(self):
        assert vanishing_order(H(S1), 1.0) == 0

    def test_lambert_mode(self):
        alpha = omega_constant()
        assert vanishing_order(H(EP_Z * EP_SIGMA - EP_ONE), alpha) == 1
