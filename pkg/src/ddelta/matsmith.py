"""Matrices over the operator ring and Smith normal form.

The diagonalization works over any pair for which the Bezout construction
succeeds (see hring): pivots absorb gcds through 2x2 unimodular blocks
[[u, v], [-b/g, a/g]], interior non-divisibility pulls rows into the pivot
row, and a final pass enforces d_i | d_{i+1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from .errors import DimensionMismatchError
from .exppoly import EP_ONE, ExpPoly
from .hring import H_ONE, H_ZERO, HElement, Refusal, h_bezout, h_divides, h_gcd
from .polys import POLY_ONE
from .scalars import GR_ONE


class HMatrix:
    """Immutable rectangular grid of HElements."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: List[List[HElement]]):
        if not entries or not entries[0]:
            raise DimensionMismatchError("empty matrix")
        width = len(entries[0])
        for row in entries:
            if len(row) != width:
                raise DimensionMismatchError("ragged matrix rows")
        object.__setattr__(self, "rows", len(entries))
        object.__setattr__(self, "cols", width)
        object.__setattr__(self, "entries", tuple(tuple(row) for row in entries))

    def __setattr__(self, name, value):
        raise AttributeError("HMatrix is immutable")

    @classmethod
    def identity(cls, n: int) -> "HMatrix":
        return cls([[H_ONE if i == j else H_ZERO for j in range(n)] for i in range(n)])

    def __getitem__(self, key: Tuple[int, int]) -> HElement:
        i, j = key
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, HMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def to_lists(self) -> List[List[HElement]]:
        return [list(row) for row in self.entries]

    def transpose(self) -> "HMatrix":
        return HMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def __repr__(self):
        return f"HMatrix({self.rows}x{self.cols})"


def mat_mul(A: HMatrix, B: HMatrix) -> HMatrix:
    if A.cols != B.rows:
        raise DimensionMismatchError(f"inner dimensions {A.cols} != {B.rows}")
    out = []
    for i in range(A.rows):
        row = []
        for j in range(B.cols):
            acc = H_ZERO
            for k in range(A.cols):
                acc = acc + A[i, k] * B[k, j]
            row.append(acc)
        out.append(row)
    return HMatrix(out)


def determinant(M: HMatrix) -> HElement:
    """Exact cofactor expansion; matrices are desk-sized."""
    if M.rows != M.cols:
        raise DimensionMismatchError("determinant of a non-square matrix")
    n = M.rows
    if n == 1:
        return M[0, 0]
    det = H_ZERO
    sign = 1
    for j in range(n):
        entry = M[0, j]
        if not entry.is_zero():
            minor = HMatrix(
                [
                    [M[i, jj] for jj in range(n) if jj != j]
                    for i in range(1, n)
                ]
            )
            term = entry * determinant(minor)
            det = det + (term if sign > 0 else -term)
        sign = -sign
    return det


def is_unimodular(V: HMatrix):
    """Unit witness (the determinant) if det(V) = c*sigma^k, else a Refusal."""
    det = determinant(V)
    if not det.is_zero() and det.is_unit():
        return det
    return Refusal("unimodularity", f"determinant is not a unit: {det!r}", det)


@dataclass(frozen=True)
class SmithDecomposition:
    V: HMatrix
    D: HMatrix
    W: HMatrix
    rank: int

    def diagonal(self) -> List[HElement]:
        return [self.D[i, i] for i in range(min(self.D.rows, self.D.cols))]

    def verify(self, P: HMatrix) -> bool:
        """Exact replay: V*P*W == D, chain divisibility, V, W unimodular."""
        if mat_mul(mat_mul(self.V, P), self.W) != self.D:
            return False
        diag = self.diagonal()
        for i in range(self.rank - 1):
            if isinstance(h_divides(diag[i], diag[i + 1]), Refusal):
                return False
        if isinstance(is_unimodular(self.V), Refusal):
            return False
        if isinstance(is_unimodular(self.W), Refusal):
            return False
        return True


def _complexity(e: HElement):
    """Pivot choice: smallest sigma-span first, then coefficient degree."""
    return (e.num.sigma_span, e.num.max_coeff_degree(), e.den.degree)


class _Worker:
    """Mutable companion of the immutable HMatrix during reduction."""

    def __init__(self, P: HMatrix, allow_jets: bool):
        self.m = P.to_lists()
        self.rows = P.rows
        self.cols = P.cols
        self.V = HMatrix.identity(P.rows).to_lists()
        self.W = HMatrix.identity(P.cols).to_lists()
        self.allow_jets = allow_jets

    def swap_rows(self, i, j):
        if i != j:
            self.m[i], self.m[j] = self.m[j], self.m[i]
            self.V[i], self.V[j] = self.V[j], self.V[i]

    def swap_cols(self, i, j):
        if i != j:
            for row in self.m:
                row[i], row[j] = row[j], row[i]
            for row in self.W:
                row[i], row[j] = row[j], row[i]

    def add_row(self, dst, src, factor: HElement):
        for j in range(self.cols):
            self.m[dst][j] = self.m[dst][j] + factor * self.m[src][j]
        for j in range(self.rows):
            self.V[dst][j] = self.V[dst][j] + factor * self.V[src][j]

    def add_col(self, dst, src, factor: HElement):
        for row in self.m:
            row[dst] = row[dst] + factor * row[src]
        for row in self.W:
            row[dst] = row[dst] + factor * row[src]

    def scale_row(self, i, unit: HElement):
        self.m[i] = [unit * e for e in self.m[i]]
        self.V[i] = [unit * e for e in self.V[i]]

    def combine_rows(self, t, i, u, v, mb, ma):
        """rows (t, i) <- (u*t + v*i, -mb*t + ma*i); det = u*ma + v*mb = 1."""
        for j in range(self.cols):
            a, b = self.m[t][j], self.m[i][j]
            self.m[t][j] = u * a + v * b
            self.m[i][j] = ma * b - mb * a
        for j in range(self.rows):
            a, b = self.V[t][j], self.V[i][j]
            self.V[t][j] = u * a + v * b
            self.V[i][j] = ma * b - mb * a

    def combine_cols(self, t, i, u, v, mb, ma):
        for row in self.m:
            a, b = row[t], row[i]
            row[t] = u * a + v * b
            row[i] = ma * b - mb * a
        for row in self.W:
            a, b = row[t], row[i]
            row[t] = u * a + v * b
            row[i] = ma * b - mb * a

    def clear_column(self, t):
        changed = False
        for i in range(t + 1, self.rows):
            b = self.m[i][t]
            if b.is_zero():
                continue
            a = self.m[t][t]
            q = h_divides(a, b)
            if isinstance(q, HElement):
                self.add_row(i, t, -q)
            else:
                g, u, v = h_bezout(a, b, allow_jets=self.allow_jets)
                ma = h_divides(g, a)
                mb = h_divides(g, b)
                self.combine_rows(t, i, u, v, mb, ma)
            changed = True
        return changed

    def clear_row(self, t):
        changed = False
        for j in range(t + 1, self.cols):
            b = self.m[t][j]
            if b.is_zero():
                continue
            a = self.m[t][t]
            q = h_divides(a, b)
            if isinstance(q, HElement):
                self.add_col(j, t, -q)
            else:
                g, u, v = h_bezout(a, b, allow_jets=self.allow_jets)
                ma = h_divides(g, a)
                mb = h_divides(g, b)
                self.combine_cols(t, j, u, v, mb, ma)
            changed = True
        return changed


def smith(P: HMatrix, allow_jets: bool = True) -> SmithDecomposition:
    """V*P*W = diag(d_1..d_r, 0, ..) with d_i | d_{i+1}, V, W unimodular.

    Deterministic: pivots chosen by smallest (sigma-span, coefficient
    degree); no other heuristics.
    """
    wk = _Worker(P, allow_jets)
    n = min(P.rows, P.cols)
    t = 0
    while t < n:
        # pick pivot among remaining entries
        best = None
        for i in range(t, wk.rows):
            for j in range(t, wk.cols):
                e = wk.m[i][j]
                if e.is_zero():
                    continue
                key = _complexity(e)
                if best is None or key < best[0]:
                    best = (key, i, j)
        if best is None:
            break
        _, bi, bj = best
        wk.swap_rows(t, bi)
        wk.swap_cols(t, bj)
        while True:
            col_done = not wk.clear_column(t)
            row_done = not wk.clear_row(t)
            if col_done and row_done:
                # pivot must divide the interior; else absorb the bad row
                bad = None
                pivot = wk.m[t][t]
                for i in range(t + 1, wk.rows):
                    for j in range(t + 1, wk.cols):
                        if wk.m[i][j].is_zero():
                            continue
                        if isinstance(h_divides(pivot, wk.m[i][j]), Refusal):
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                wk.add_row(t, bad, H_ONE)
        t += 1
    rank = t
    # normalize diagonal units into V
    for i in range(rank):
        d = wk.m[i][i]
        unit = HElement(
            EP_ONE, POLY_ONE, d.unit_c, d.unit_k, _internal=True
        )
        wk.scale_row(i, unit.inverse())
    V = HMatrix(wk.V)
    W = HMatrix(wk.W)
    D = HMatrix(wk.m)
    dec = SmithDecomposition(V=V, D=D, W=W, rank=rank)
    if not dec.verify(P):  # pragma: no cover - internal consistency
        raise AssertionError("smith decomposition failed its own replay")
    return dec
