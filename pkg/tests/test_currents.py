"""Regularized current pairings and growth certification."""

import math

import numpy as np
import pytest

from ddelta.currents import (
    GrowthCert,
    TestFunction,
    pv_explicit_example,
    pv_pair,
    pw_growth_fit,
    residue_pair,
)
from ddelta.errors import EnvelopeCapExceededError
from ddelta.exppoly import EP_ONE, EP_SIGMA, EP_Z, ExpPoly
from ddelta.hring import HElement
from ddelta.polys import POLY_ONE, poly_from
from ddelta.scalars import gr

S1 = EP_SIGMA - EP_ONE


def H(num):
    return HElement.make(num)


def bump(center=0j, radius=5.0, poly=(1,)):
    return TestFunction(center=center, radius=radius, poly=poly)


def disk_integral(phi: TestFunction, n=1200):
    """Independent quadrature of integral phi dA (plain midpoint grid)."""
    c, R = phi.center, phi.radius
    h = 2 * R / n
    xs = c.real - R + (np.arange(n) + 0.5) * h
    ys = c.imag - R + (np.arange(n) + 0.5) * h
    X, Y = np.meshgrid(xs, ys)
    return complex(np.sum(phi.value(X + 1j * Y))) * h * h


class TestTestFunction:
    def test_support(self):
        phi = bump(radius=2.0)
        assert phi.value(3.0) == 0
        assert phi.value(0j) == pytest.approx(1.0)

    def test_wirtinger_derivatives_match_finite_differences(self):
        phi = bump(center=0.3 - 0.1j, radius=3.0, poly=(1.0, 0.5))
        h = 1e-6
        for z in [0.5 + 0.2j, -1.0 + 0.8j, 1.5 - 1.2j]:
            fx = (phi.value(z + h) - phi.value(z - h)) / (2 * h)
            fy = (phi.value(z + 1j * h) - phi.value(z - 1j * h)) / (2 * h)
            dz = 0.5 * (fx - 1j * fy)
            dzb = 0.5 * (fx + 1j * fy)
            assert abs(phi.d_zeta(z) - dz) < 1e-6
            assert abs(phi.d_zbar(z) - dzb) < 1e-6


class TestResidue:
    def test_calibration_z(self):
        phi = bump(center=0.3 + 0.2j, radius=5.0)
        out = residue_pair(H(EP_Z), phi)
        truth = math.pi * phi.value(0j)
        assert abs(out.value - truth) <= 1e-4 * abs(truth)

    def test_scaling_linearity(self):
        phi = bump(center=0.1j, radius=4.0)
        out = residue_pair(HElement.make(EP_Z, unit_c=gr(2)) if False else H(EP_Z * 2), phi)
        truth = math.pi * phi.value(0j) / 2
        assert abs(out.value - truth) <= 1e-3 * abs(truth)

    def test_paper_delta_comb(self):
        phi = bump(center=0.5, radius=8.5)
        out = residue_pair(H(S1), phi)
        truth = math.pi * (
            phi.value(0j) + phi.value(2j * math.pi) + phi.value(-2j * math.pi)
        )
        assert abs(out.value - truth) <= 1e-3 * abs(truth)

    def test_zero_set_locality(self):
        # support far away from every characteristic zero: pairing ~ 0
        phi = bump(center=4.0, radius=1.2)
        out = residue_pair(H(S1), phi)
        scale = math.pi * phi.value(4.0)
        assert abs(out.value) < 5e-3 * abs(scale)

    def test_lambda_stability(self):
        phi = bump(center=0.2, radius=5.0)
        base = residue_pair(H(EP_Z), phi)
        halved = residue_pair(H(EP_Z), phi, lambdas=(0.1, 0.05, 0.025, 0.00625))
        assert abs(base.value - halved.value) <= max(base.residual, 1e-6)


class TestPV:
    def test_no_singularity_reduces_to_plain_integral(self):
        phi = bump(center=-0.4 + 0.1j, radius=3.0)
        out = pv_pair(H(EP_ONE), phi)
        truth = disk_integral(phi)
        assert abs(out.value - truth) <= 1e-4 * abs(truth)

    def test_odd_symmetry_cancels(self):
        phi = bump(center=0j, radius=3.0)
        out = pv_pair(H(EP_Z), phi)
        scale = disk_integral(phi)
        assert abs(out.value) < 1e-4 * abs(scale)

    def test_explicit_formula_cross_check(self):
        phi = bump(center=0.5, radius=8.5)
        lam = pv_pair(H(S1), phi)
        oracle = pv_explicit_example(H(S1), phi)
        assert abs(lam.value - oracle.value) <= 1e-3 * abs(oracle.value)

    def test_linearity_in_phi(self):
        f = H(S1)
        phi1 = bump(center=0.3, radius=6.0)
        phi2 = bump(center=0.3, radius=6.0, poly=(0.0, 1.0))
        phi12 = bump(center=0.3, radius=6.0, poly=(1.0, 1.0))
        v1 = pv_pair(f, phi1).value
        v2 = pv_pair(f, phi2).value
        v12 = pv_pair(f, phi12).value
        assert abs(v12 - v1 - v2) <= 2e-3 * max(abs(v1), abs(v2), 1.0)

    def test_dbar_relation(self):
        # <pv(1/f), dbar phi> = -residue_pair(f, phi), lambda by lambda
        f = H(S1)
        phi = bump(center=0.4, radius=7.0)

        class DBar:
            center = phi.center
            radius = phi.radius

            def value(self, Z):
                return phi.d_zbar(Z)

        lhs = pv_pair(f, DBar())
        rhs = residue_pair(f, phi)
        assert abs(lhs.value + rhs.value) <= 5e-3 * max(abs(rhs.value), 1e-9)


class TestGrowthFit:
    def _grid(self, re_max=18.0, im_max=18.0, n=41):
        xs = np.linspace(-re_max, re_max, n) + 0.0371
        ys = np.linspace(-im_max, im_max, n) + 0.0153
        X, Y = np.meshgrid(xs, ys)
        return (X + 1j * Y).ravel()

    def test_sigma_square_needs_n_two(self):
        Z = self._grid()
        vals = np.abs(H(EP_SIGMA * EP_SIGMA).eval_grid(Z))
        cert = pw_growth_fit(Z, vals)
        assert cert.N == 2
        fixed = pw_growth_fit(Z, vals, fixed=(cert.M, 1))
        assert not fixed.dominated

    def test_z_power(self):
        Z = self._grid()
        vals = np.abs(Z) ** 5
        cert = pw_growth_fit(Z, vals)
        assert cert.N == 0
        assert cert.M == 5

    def test_explicit_formula_envelope(self):
        # (e^z - 1) log|e^z - 1|^2: locally bounded, exponential at infinity
        Z = self._grid()
        f = H(S1).eval_grid(Z)
        vals = np.abs(f * np.log(np.abs(f) ** 2 + 1e-300))
        cert = pw_growth_fit(Z, vals)
        assert cert.dominated
        assert cert.N <= 2

    def test_cap_exceeded(self):
        Z = self._grid(re_max=10)
        vals = np.exp(np.abs(Z.real) * 4.0)
        with pytest.raises(EnvelopeCapExceededError):
            pw_growth_fit(Z, vals, n_cap=2)

    def test_denominator_witness(self):
        from fractions import Fraction

        Z = self._grid()
        g = np.abs(H(S1).eval_grid(Z)) / np.abs(Z + 0.5)
        witness = poly_from([Fraction(1, 2), 1])  # z + 1/2
        cert = pw_growth_fit(Z, g, denom_witness=witness)
        assert cert.dominated
