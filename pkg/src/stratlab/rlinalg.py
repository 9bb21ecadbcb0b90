"""Exact linear algebra over Q: Bareiss elimination, kernels, ranks, solves.

Matrices are lists of lists of Fractions (or ints).  Row operations clear
denominators first and then run fraction-free Bareiss elimination, so every
intermediate value is an integer and every reported dimension is exact.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

__all__ = ["bareiss_echelon", "rank", "nullspace", "solve", "span_contains"]


def _to_int_rows(matrix):
    rows = []
    for row in matrix:
        fracs = [Fraction(x) for x in row]
        denom = 1
        for f in fracs:
            denom = denom * f.denominator // gcd(denom, f.denominator)
        ints = [int(f * denom) for f in fracs]
        g = 0
        for v in ints:
            g = gcd(g, abs(v))
        if g > 1:
            ints = [v // g for v in ints]
        rows.append(ints)
    return rows


def bareiss_echelon(matrix):
    """Row echelon form by fraction-free Bareiss elimination.

    Returns (echelon_rows, pivot_columns) where echelon_rows are integer rows.
    """
    rows = _to_int_rows(matrix)
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    prev = 1
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        p = rows[r][c]
        for i in range(r + 1, len(rows)):
            factor = rows[i][c]
            for j in range(ncols):
                rows[i][j] = (p * rows[i][j] - factor * rows[r][j]) // prev
        prev = p
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[: len(pivots)], pivots


def rank(matrix) -> int:
    return len(bareiss_echelon(matrix)[1])


def nullspace(matrix):
    """Exact rational basis of the right kernel.

    The basis is in the standard back-substitution form: one vector per free
    column, with a 1 in the free position.
    """
    if not matrix:
        return []
    ncols = len(matrix[0])
    echelon, pivots = bareiss_echelon(matrix)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for i in reversed(range(len(pivots))):
            pc = pivots[i]
            s = Fraction(0)
            for j in range(pc + 1, ncols):
                if echelon[i][j]:
                    s += Fraction(echelon[i][j]) * vec[j]
            vec[pc] = -s / Fraction(echelon[i][pc])
        basis.append(tuple(vec))
    return basis


def solve(matrix, rhs):
    """One exact solution of A x = b, or None when inconsistent.

    Free variables are set to zero.
    """
    if not matrix:
        return None if any(Fraction(b) != 0 for b in rhs) else []
    ncols = len(matrix[0])
    augmented = [list(row) + [b] for row, b in zip(matrix, rhs)]
    echelon, pivots = bareiss_echelon(augmented)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i in reversed(range(len(pivots))):
        pc = pivots[i]
        s = Fraction(echelon[i][ncols])
        for j in range(pc + 1, ncols):
            if echelon[i][j]:
                s -= Fraction(echelon[i][j]) * x[j]
        x[pc] = s / Fraction(echelon[i][pc])
    return x


def span_contains(vectors: Sequence[Sequence], candidate) -> bool:
    """Exact test that candidate lies in the rational span of vectors."""
    vecs = [list(v) for v in vectors]
    base_rank = rank(vecs)
    return rank(vecs + [list(candidate)]) == base_rank
