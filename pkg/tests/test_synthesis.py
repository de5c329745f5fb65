"""Operator action, solution bases, method-of-steps oracle, duality pairing."""

import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from conftest import omega_constant
from ddelta.charzeros import Rect
from ddelta.errors import NotRetardedError, ResonantDenominatorError, TruncationTooShortError
from ddelta.exppoly import EP_ONE, EP_SIGMA, EP_Z, ExpPoly
from ddelta.hring import HElement
from ddelta.matsmith import HMatrix
from ddelta.polys import POLY_Z, Poly, poly_from
from ddelta.scalars import GaussianRational, gr
from ddelta.synthesis import (
    ExpSolution,
    FormalSeries,
    apply_op,
    method_of_steps,
    pairing,
    pairing_adjoint_check,
    solution_basis_single,
    solution_basis_system,
    spectral_project,
)

S1 = EP_SIGMA - EP_ONE


def H(num, den=None):
    return HElement.make(num) if den is None else HElement.make(num, den)


class TestApplyOp:
    def test_annihilates_periodic_mode(self):
        u = ExpSolution.monomial(2j * math.pi)
        assert apply_op(H(S1), u).is_zero()

    def test_derivative_action(self):
        alpha = 0.7 + 0.3j
        u = ExpSolution.make([(alpha, (0, 1))])  # x e^{alpha x}
        out = apply_op(H(EP_Z), u)
        assert out.modes == ExpSolution.make([(alpha, (1, alpha))]).modes

    def test_denominator_action(self):
        # (sigma-1)/z on e^{alpha x} -> ((e^alpha - 1)/alpha) e^{alpha x}
        alpha = 0.5 - 0.25j
        u = ExpSolution.monomial(alpha)
        q = H(S1, POLY_Z)
        out = apply_op(q, u)
        expect = (cmath.exp(alpha) - 1) / alpha
        assert len(out.modes) == 1
        a, cs = out.modes[0]
        assert abs(a - alpha) < 1e-12
        assert abs(cs[0] - expect) < 1e-12
        # z * result equals (sigma - 1) * u
        lhs = apply_op(H(EP_Z), out)
        rhs = apply_op(H(S1), u)
        xs = np.linspace(0, 1, 33)
        assert np.max(np.abs(lhs.eval(xs) - rhs.eval(xs))) < 1e-12

    def test_resonant_denominator(self):
        with pytest.raises(ResonantDenominatorError):
            apply_op(H(S1, POLY_Z), ExpSolution.monomial(0.0))

    def test_linearity_and_composition(self):
        rng = random.Random(17)
        for _ in range(10):
            q1 = H(ExpPoly({0: poly_from([rng.randint(-2, 2), 1]), 1: poly_from([rng.randint(-2, 2)])}))
            q2 = H(ExpPoly({1: poly_from([1]), 0: poly_from([rng.randint(-2, 2)])}))
            u = ExpSolution.make(
                [(0.3 + 0.1j * rng.randint(-2, 2), (rng.random(), rng.random()))]
            )
            xs = np.linspace(0, 1, 17)
            lhs = apply_op(q1 * q2, u).eval(xs)
            rhs = apply_op(q1, apply_op(q2, u)).eval(xs)
            assert np.max(np.abs(lhs - rhs)) < 1e-10 * max(1.0, np.max(np.abs(rhs)))


class TestBasis:
    def test_sigma_minus_one_strip(self):
        basis = solution_basis_single(H(S1), Rect(-1, 1, -7, 7))
        alphas = sorted(m[0].imag for b in basis for m in b.modes)
        assert len(basis) == 3
        assert all(abs(a - e) < 1e-9 for a, e in zip(alphas, [-2 * math.pi, 0, 2 * math.pi]))

    def test_double_zero_gives_polynomial_modes(self):
        basis = solution_basis_single(H(S1 * S1), Rect(-1, 1, -1, 1))
        degs = sorted(len(m[1]) for b in basis for m in b.modes)
        assert degs == [1, 2]  # 1 and x

    def test_lambert_mode(self):
        alpha = omega_constant()
        basis = solution_basis_single(H(EP_Z * EP_SIGMA - EP_ONE), Rect(0, 1, -1, 1))
        assert len(basis) == 1
        assert abs(basis[0].modes[0][0] - alpha) < 1e-9
        # y'(x+1) = y(x) holds numerically
        y = basis[0]
        xs = np.linspace(0, 2, 41)
        lhs = y.derivative().shift(1.0).eval(xs)
        assert np.max(np.abs(lhs - y.eval(xs))) < 1e-9

    def test_system_column(self):
        # (sigma-1)u = 0 and u' = 0 jointly force constants
        P = HMatrix([[H(S1)], [H(EP_Z)]])
        basis = solution_basis_system(P, Rect(-1, 1, -7, 7))
        assert len(basis) == 1
        sol = basis[0].components[0]
        xs = np.linspace(0, 1, 9)
        vals = sol.eval(xs)
        assert np.max(np.abs(vals - vals[0])) < 1e-9
        assert abs(vals[0]) > 1e-8

    def test_diagonal_system(self):
        P = HMatrix([[H(S1), HElement.make(ExpPoly())], [HElement.make(ExpPoly()), H(EP_Z)]])
        basis = solution_basis_system(P, Rect(-1, 1, -1, 1))
        assert len(basis) == 2

    def test_unit_operator_empty_basis(self):
        basis = solution_basis_system(HMatrix([[H(EP_ONE)]]), Rect(-1, 1, -1, 1))
        assert basis == []


class TestMethodOfSteps:
    def test_characteristic_mode_tracking(self):
        alpha = omega_constant()
        q = H(EP_Z * EP_SIGMA - EP_ONE)  # y'(x+1) = y(x)
        init = ExpSolution.monomial(alpha)
        traj = method_of_steps(q, init, horizon=8.0)
        exact = np.exp(alpha * traj.grid)
        assert np.max(np.abs(traj.values - exact)) < 1e-6

    def test_doubling_difference_equation(self):
        q = H(EP_SIGMA - EP_ONE - EP_ONE)  # y(x+1) = 2 y(x)
        init = ExpSolution.polynomial([1.0])
        traj = method_of_steps(q, init, horizon=6.0)
        for k in range(7):
            idx = int(round(k / traj.step))
            assert abs(traj.values[idx] - 2**k) < 1e-9 * 2**k

    def test_zero_init(self):
        q = H(EP_Z * EP_SIGMA - EP_ONE)
        traj = method_of_steps(q, ExpSolution.make([]), horizon=3.0)
        assert np.max(np.abs(traj.values)) == 0.0

    def test_not_retarded(self):
        with pytest.raises(NotRetardedError):
            method_of_steps(H(EP_Z), ExpSolution.polynomial([1.0]), horizon=2.0)
        with pytest.raises(NotRetardedError):
            # derivative order in the delayed term exceeds the leading one
            method_of_steps(
                H(ExpPoly({1: poly_from([0, 1]), 0: poly_from([0, 0, 1])})),
                ExpSolution.polynomial([1.0]),
                horizon=2.0,
            )


class TestSpectralProject:
    def test_exact_mode_recovery(self):
        alpha = omega_constant()
        q = H(EP_Z * EP_SIGMA - EP_ONE)
        traj = method_of_steps(q, ExpSolution.monomial(alpha), horizon=8.0)
        report = spectral_project(traj, [ExpSolution.monomial(alpha)])
        assert abs(report.coefficients[0] - 1) < 1e-6
        assert report.residual < 1e-6

    def test_zero_trajectory(self):
        q = H(EP_Z * EP_SIGMA - EP_ONE)
        traj = method_of_steps(q, ExpSolution.make([]), horizon=4.0)
        report = spectral_project(traj, [ExpSolution.monomial(0.5)])
        assert all(abs(c) < 1e-12 for c in report.coefficients)

    def test_residual_decreases_with_modes(self):
        from ddelta.charzeros import find_zeros

        rng = random.Random(5)
        q = H(EP_Z * EP_SIGMA - EP_ONE)
        init = ExpSolution.polynomial([rng.uniform(-1, 1) for _ in range(4)])
        traj = method_of_steps(q, init, horizon=8.0)
        clusters = find_zeros(q, Rect(-8, 1, -40, 40))
        modes = sorted(clusters, key=lambda c: -c.center.real)
        residuals = []
        for k in range(1, 7):
            basis = [ExpSolution.monomial(c.center) for c in modes[:k]]
            residuals.append(spectral_project(traj, basis).residual)
        for a, b in zip(residuals, residuals[1:]):
            assert b <= a * 1.05


class TestPairing:
    def test_paper_value(self):
        assert pairing(POLY_Z, FormalSeries((gr(0), gr(1)))) == gr(1)

    def test_square(self):
        f = FormalSeries((gr(0), gr(0), gr(1)))
        assert pairing(poly_from([0, 0, 1]), f) == gr(2)

    def test_shift_adjoint_example(self):
        p = POLY_Z
        f = FormalSeries((gr(0), gr(1)))
        rep = pairing_adjoint_check(p, f)
        assert rep["ok"]
        assert rep["shift_adjoint"][0] == gr(1)

    def test_truncation_guard(self):
        with pytest.raises(TruncationTooShortError):
            pairing(poly_from([1, 1, 1]), FormalSeries((gr(1),)))

    def test_adjoints_random(self):
        rng = random.Random(41)
        for _ in range(40):
            deg = rng.randint(0, 6)
            p = Poly([gr(Fraction(rng.randint(-9, 9), rng.randint(1, 4))) for _ in range(deg + 1)])
            trunc = deg + rng.randint(1, 4)
            f = FormalSeries(
                tuple(gr(Fraction(rng.randint(-9, 9), rng.randint(1, 3))) for _ in range(trunc))
            )
            assert pairing_adjoint_check(p, f)["ok"]
