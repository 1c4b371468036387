"""Exact dense linear algebra over the Gaussian rationals.

Small systems only (syzygy searches, cone bases); everything is fraction-free
in spirit but plain Gauss-Jordan in practice, which is fine at these sizes.
"""

from __future__ import annotations

from typing import Sequence

from .errors import FoliaError
from .gaussian import GaussianRational

Matrix = list[list[GaussianRational]]

_ZERO = GaussianRational(0)
_ONE = GaussianRational(1)


def _copy(m: Sequence[Sequence[GaussianRational]]) -> Matrix:
    return [list(row) for row in m]


def rref(m: Sequence[Sequence[GaussianRational]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    a = _copy(m)
    if not a:
        return a, []
    rows, cols = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if not a[i][c].is_zero), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = _ONE / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(rows):
            if i != r and not a[i][c].is_zero:
                f = a[i][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def nullspace(m: Sequence[Sequence[GaussianRational]]) -> list[list[GaussianRational]]:
    """Basis of the right kernel, one vector per free column.

    Deterministic: free columns are taken in increasing order and each basis
    vector has a 1 in its free column.
    """
    if not m:
        return []
    cols = len(m[0])
    red, pivots = rref(m)
    pivot_set = set(pivots)
    basis: list[list[GaussianRational]] = []
    for free in range(cols):
        if free in pivot_set:
            continue
        vec = [_ZERO] * cols
        vec[free] = _ONE
        for r, pc in enumerate(pivots):
            vec[pc] = -red[r][free]
        basis.append(vec)
    return basis


def solve(
    m: Sequence[Sequence[GaussianRational]], rhs: Sequence[GaussianRational]
) -> list[GaussianRational] | None:
    """One exact solution of m x = rhs, or None when inconsistent."""
    if not m:
        return None if any(not v.is_zero for v in rhs) else []
    cols = len(m[0])
    aug = [list(row) + [rhs[i]] for i, row in enumerate(m)]
    red, pivots = rref(aug)
    if cols in pivots:
        return None  # a pivot in the rhs column: 0 = 1
    x = [_ZERO] * cols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][cols]
    return x


def invert(m: Sequence[Sequence[GaussianRational]]) -> Matrix:
    n = len(m)
    if any(len(row) != n for row in m):
        raise FoliaError("matrix is not square")
    aug = [list(row) + [_ONE if i == j else _ZERO for j in range(n)] for i, row in enumerate(m)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise FoliaError("matrix is singular")
    return [row[n:] for row in red[:n]]


def matvec(
    m: Sequence[Sequence[GaussianRational]], x: Sequence[GaussianRational]
) -> list[GaussianRational]:
    return [sum((a * b for a, b in zip(row, x)), _ZERO) for row in m]
