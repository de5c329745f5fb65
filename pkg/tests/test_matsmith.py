"""Smith normal form over the operator ring."""

import random

import pytest

from ddelta.errors import DimensionMismatchError
from ddelta.exppoly import EP_ONE, EP_SIGMA, EP_Z, ExpPoly
from ddelta.hring import H_ONE, H_ZERO, HElement, Refusal, h_divides, h_gcd
from ddelta.matsmith import HMatrix, SmithDecomposition, determinant, is_unimodular, mat_mul, smith
from ddelta.polys import poly_from
from ddelta.scalars import gr

S1 = EP_SIGMA - EP_ONE


def H(num):
    return HElement.make(num)


def test_mat_mul_identity():
    A = HMatrix([[H(S1), H(EP_Z)], [H_ZERO, H_ONE]])
    assert mat_mul(HMatrix.identity(2), A) == A


def test_mat_mul_scalar():
    A = HMatrix([[H(S1)]])
    B = HMatrix([[H(EP_SIGMA + EP_ONE)]])
    assert mat_mul(A, B) == HMatrix([[H(EP_SIGMA * EP_SIGMA - EP_ONE)]])


def test_mat_mul_paper_composition_vanishes():
    # row (z, 1-sigma) times column (sigma-1, z) is the zero 1x1 matrix
    Q = HMatrix([[H(EP_Z), H(EP_ONE - EP_SIGMA)]])
    P = HMatrix([[H(S1)], [H(EP_Z)]])
    assert mat_mul(Q, P) == HMatrix([[H_ZERO]])


def test_mat_mul_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        mat_mul(HMatrix([[H_ONE]]), HMatrix([[H_ONE], [H_ONE]]))


class TestUnimodular:
    def test_block_from_smith_example(self):
        q = h_divides(H(EP_Z), H(S1))
        V = HMatrix([[H_ZERO, H_ONE], [H_ONE, -q]])
        det = is_unimodular(V)
        assert isinstance(det, HElement)
        assert det.unit_c == gr(-1)

    def test_z_refused(self):
        assert isinstance(is_unimodular(HMatrix([[H(EP_Z)]])), Refusal)

    def test_identity_accepted(self):
        det = is_unimodular(HMatrix.identity(3))
        assert isinstance(det, HElement)
        assert det.is_one()


class TestSmith:
    def test_paper_motivating_column(self):
        P = HMatrix([[H(S1)], [H(EP_Z)]])
        dec = smith(P)
        assert dec.rank == 1
        assert dec.D[0, 0].equal_up_to_unit(H(EP_Z))
        assert dec.D[1, 0].is_zero()
        assert dec.verify(P)

    def test_diagonal_swap_for_chain(self):
        P = HMatrix([[H(S1), H_ZERO], [H_ZERO, H(EP_Z)]])
        dec = smith(P)
        assert dec.rank == 2
        assert dec.D[0, 0].equal_up_to_unit(H(EP_Z))
        # d2 absorbs the rest; chain z | d2 re-verified
        q = h_divides(dec.D[0, 0], dec.D[1, 1])
        assert isinstance(q, HElement)
        assert dec.verify(P)

    def test_single_entry(self):
        q = H(S1 * S1)
        dec = smith(HMatrix([[q]]))
        assert dec.rank == 1
        assert dec.D[0, 0].equal_up_to_unit(q)

    def test_zero_matrix_rank_zero(self):
        dec = smith(HMatrix([[H_ZERO, H_ZERO]]))
        assert dec.rank == 0
        assert dec.D.is_zero()

    def test_invariant_under_unimodular_moves(self):
        rng = random.Random(31)
        P = HMatrix([[H(S1), H(EP_Z)], [H_ZERO, H(S1 * (EP_SIGMA + EP_ONE))]])
        base = smith(P)
        base_diag = [d for d in base.diagonal() if not d.is_zero()]
        for _ in range(4):
            # random elementary moves keep the elementary divisors
            M = P.to_lists()
            if rng.random() < 0.5:
                f = H(ExpPoly({rng.randint(0, 1): poly_from([rng.randint(-2, 2)])}))
                i, j = rng.sample(range(2), 2)
                M[i] = [M[i][k] + f * M[j][k] for k in range(2)]
            else:
                M[0], M[1] = M[1], M[0]
            dec = smith(HMatrix(M))
            diag = [d for d in dec.diagonal() if not d.is_zero()]
            assert len(diag) == len(base_diag)
            for a, b in zip(diag, base_diag):
                assert a.equal_up_to_unit(b)

    def test_permutation_invariance(self):
        P = HMatrix([[H(S1), H(EP_Z * EP_Z)], [H(EP_Z), H(S1)]])
        dec1 = smith(P)
        P2 = HMatrix([[P[1, 0], P[1, 1]], [P[0, 0], P[0, 1]]])
        dec2 = smith(P2)
        for a, b in zip(dec1.diagonal(), dec2.diagonal()):
            if a.is_zero() or b.is_zero():
                assert a.is_zero() == b.is_zero()
            else:
                assert a.equal_up_to_unit(b)

    def test_wide_matrix_with_kernel(self):
        P = HMatrix([[H(S1), H(EP_Z)]])
        dec = smith(P)
        assert dec.rank == 1
        assert dec.D[0, 0].equal_up_to_unit(h_gcd(H(S1), H(EP_Z)))
        assert dec.D[0, 1].is_zero()
