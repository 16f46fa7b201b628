"""Jacobi matrices of element systems, minors and exact determinants.

The Jacobi matrix of (g_1, .., g_k) over n generators is the n x k matrix
whose column j holds the derivative vector of g_j.  Determinants are exact
over Z[X]: cofactor expansion for small sizes, fraction-free Bareiss
elimination with exact division for larger ones.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from metlie.poly import Poly, divexact
from metlie.ring import MElement


@dataclass(frozen=True)
class PolyMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[Poly, ...], ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrix dimensions must be positive")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entry grid does not match the declared shape")

    def entry(self, i: int, j: int) -> Poly:
        return self.entries[i][j]

    def __str__(self) -> str:
        return "\n".join("[" + ", ".join(str(e) for e in row) + "]" for row in self.entries)


def jacobi_matrix(gs: list[MElement]) -> PolyMatrix:
    """Column j holds the derivative vector of gs[j]."""
    if not gs:
        raise ValueError("empty system of elements")
    n = gs[0].n
    for g in gs:
        if g.n != n:
            raise ValueError("mismatched generator counts in the system")
    entries = tuple(tuple(g.deriv[i] for g in gs) for i in range(n))
    return PolyMatrix(n, len(gs), entries)


def jacobi_substituted(gs: list[MElement], fs) -> PolyMatrix:
    """Jacobi matrix of gs with the linear parts of fs substituted for x1..xn.

    Each f may be an element (its linear part is used) or a polynomial
    substituted as-is.
    """
    if not gs:
        raise ValueError("empty system of elements")
    n = gs[0].n
    if len(fs) != n:
        raise ValueError(f"expected {n} substitutions, got {len(fs)}")
    images = []
    for f in fs:
        if isinstance(f, MElement):
            images.append(f.linear_poly())
        elif isinstance(f, Poly):
            images.append(f)
        else:
            raise TypeError(f"cannot substitute {f!r}")
    one = Poly.one(n)
    base = jacobi_matrix(gs)
    entries = tuple(
        tuple(e.evaluate(images, one) for e in row) for row in base.entries
    )
    return PolyMatrix(n, len(gs), entries)


def sigma(A: PolyMatrix, i: int) -> Poly:
    """The polynomial sum_j x_j * A[j][i] of a square matrix (1-based i)."""
    if A.rows != A.cols:
        raise ValueError("sigma requires a square matrix")
    if not 1 <= i <= A.cols:
        raise ValueError(f"column index {i} out of range 1..{A.cols}")
    n = A.rows
    total = Poly.zero(n)
    for j in range(n):
        mono = tuple(1 if t == j else 0 for t in range(n))
        total = total + A.entries[j][i - 1].mul_term(1, mono)
    return total


def _det_cofactor(rows: list[list[Poly]], n_gens: int) -> Poly:
    size = len(rows)
    if size == 1:
        return rows[0][0]
    total = Poly.zero(n_gens)
    for r in range(size):
        c = rows[r][0]
        if not c:
            continue
        minor = [row[1:] for t, row in enumerate(rows) if t != r]
        sub = _det_cofactor(minor, n_gens)
        total = total + (c * sub if r % 2 == 0 else -(c * sub))
    return total


def _det_bareiss(rows: list[list[Poly]], n_gens: int) -> Poly:
    size = len(rows)
    m = [list(row) for row in rows]
    sign = 1
    prev = Poly.one(n_gens)
    for k in range(size - 1):
        if not m[k][k]:
            pivot = next((r for r in range(k + 1, size) if m[r][k]), None)
            if pivot is None:
                return Poly.zero(n_gens)
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                m[i][j] = divexact(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev)
            m[i][k] = Poly.zero(n_gens)
        prev = m[k][k]
    result = m[size - 1][size - 1]
    return result if sign == 1 else -result


def det(A: PolyMatrix) -> Poly:
    """Exact determinant of a square polynomial matrix."""
    if A.rows != A.cols:
        raise ValueError("determinant requires a square matrix")
    n_gens = A.entries[0][0].n
    rows = [list(r) for r in A.entries]
    if A.rows <= 4:
        return _det_cofactor(rows, n_gens)
    return _det_bareiss(rows, n_gens)


def minors(A: PolyMatrix, k: int) -> list[Poly]:
    """All k x k minor determinants, ordered by (row tuple, column tuple)."""
    if not 1 <= k <= min(A.rows, A.cols):
        raise ValueError(f"minor order {k} out of range 1..{min(A.rows, A.cols)}")
    out = []
    for row_idx in itertools.combinations(range(A.rows), k):
        for col_idx in itertools.combinations(range(A.cols), k):
            sub = PolyMatrix(
                k, k,
                tuple(tuple(A.entries[r][c] for c in col_idx) for r in row_idx),
            )
            out.append(det(sub))
    return out


def matmul(A: PolyMatrix, B: PolyMatrix) -> PolyMatrix:
    if A.cols != B.rows:
        raise ValueError("incompatible shapes for matrix product")
    n_gens = A.entries[0][0].n
    entries = tuple(
        tuple(
            sum(
                (A.entries[i][t] * B.entries[t][j] for t in range(A.cols)),
                Poly.zero(n_gens),
            )
            for j in range(B.cols)
        )
        for i in range(A.rows)
    )
    return PolyMatrix(A.rows, B.cols, entries)


def identity_matrix(n: int, n_gens: int | None = None) -> PolyMatrix:
    n_gens = n if n_gens is None else n_gens
    entries = tuple(
        tuple(Poly.one(n_gens) if i == j else Poly.zero(n_gens) for j in range(n))
        for i in range(n)
    )
    return PolyMatrix(n, n, entries)


def matrix_to_json(A: PolyMatrix) -> dict:
    return {
        "rows": A.rows,
        "cols": A.cols,
        "entries": [[str(e) for e in row] for row in A.entries],
    }
