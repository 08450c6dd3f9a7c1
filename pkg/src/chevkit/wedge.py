"""Exterior-power operators and span-membership tests.

For a matrix B with e columns and f rows and r = rank B, the wedge operator
of order r sends w to the wedge of w with every r-tuple of columns of B; its
kernel is exactly the column span of B.  That turns "is this vector in the
image" into "does this matrix kill it", which composes with other maps.

The dense operator has comb(e, r) * comb(f, r+1) rows and explodes quickly,
so it is guarded by a cap.  membership_kernel computes the same kernel by a
staged elimination instead: eliminate B's columns, and the pivot-free rows
of what remains are a row system with the identical kernel at any size.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .errors import InputError, WedgeCapError
from .linalg import Matrix, Subspace, staged_elimination

DEFAULT_WEDGE_CAP = 10**6


def _minor(rows_of_b, row_set, col_set, memo):
    """Determinant of the square submatrix, memoized by index sets."""
    key = (row_set, col_set)
    got = memo.get(key)
    if got is not None:
        return got
    size = len(row_set)
    if size == 0:
        val = Fraction(1)
    elif size == 1:
        val = rows_of_b[row_set[0]][col_set[0]]
    else:
        # expand along the first column; subminors repeat across the
        # operator's rows, which is where the memo pays off
        val = Fraction(0)
        rest = col_set[1:]
        for pos, ri in enumerate(row_set):
            c = rows_of_b[ri][col_set[0]]
            if not c:
                continue
            sub = row_set[:pos] + row_set[pos + 1:]
            term = c * _minor(rows_of_b, sub, rest, memo)
            val += term if pos % 2 == 0 else -term
    memo[key] = val
    return val


def wedge_operator(b, r, cap=DEFAULT_WEDGE_CAP):
    """The order-r wedge operator of b, as a dense matrix.

    Rows are indexed by (column r-subset J, row (r+1)-subset I), both in
    lexicographic order, J outermost.  The entry in column p is zero unless
    p is in I, and otherwise the signed r x r minor of b on rows I minus p
    and columns J.  Order 0 gives the identity.
    """
    if r < 0:
        raise InputError("wedge order must be >= 0")
    f, e = b.nrows, b.ncols
    if r == 0:
        return Matrix.identity(f)
    if r > e or r + 1 > f:
        # the source or target exterior power collapses to zero
        return Matrix([], ncols=f)
    cells = comb(e, r) * comb(f, r + 1)
    if cells > cap:
        raise WedgeCapError(
            f"wedge target needs {cells} rows x {f} cols, over the cap"
            f" {cap}; use membership_kernel for large blocks"
        )
    memo = {}
    rows = []
    for col_subset in combinations(range(e), r):
        for row_subset in combinations(range(f), r + 1):
            row = [Fraction(0)] * f
            for pos, p in enumerate(row_subset):
                rest = row_subset[:pos] + row_subset[pos + 1:]
                minor = _minor(b.rows, rest, col_subset, memo)
                if minor:
                    row[p] = minor if pos % 2 == 0 else -minor
            rows.append(row)
    return Matrix(rows, ncols=f)


def column_span(b):
    return Subspace.from_vectors(b.transpose().rows, b.nrows)


def image_kernel_check(b, cap=DEFAULT_WEDGE_CAP):
    """Self-test: the column span of b equals the kernel of its wedge operator
    at order rank(b).  Should hold for every matrix."""
    r = b.rank()
    op = wedge_operator(b, r, cap)
    _, kernel = op.rank_kernel()
    return column_span(b) == kernel


def membership_operator(kept, absorbed, r, cap=DEFAULT_WEDGE_CAP):
    """Compose the order-r wedge operator of `absorbed` with `kept`.

    With r = rank(absorbed), a vector u is killed exactly when kept . u
    lies in the column span of absorbed.
    """
    if kept.nrows != absorbed.nrows:
        raise InputError(
            f"row mismatch: kept has {kept.nrows}, absorbed has"
            f" {absorbed.nrows}"
        )
    return wedge_operator(absorbed, r, cap) @ kept


@dataclass(frozen=True)
class MembershipResult:
    """Kernel and ranks of a span-membership system.

    kernel: all u with kept . u in the column span of absorbed.
    residual_rank: codimension of that kernel (rank of the residual rows,
    which equals the rank of the composed wedge operator).
    absorbed_rank: rank of the absorbed block.
    residual: the row system itself, for reuse.
    """

    kernel: Subspace
    residual_rank: int
    absorbed_rank: int
    residual: Matrix


def membership_kernel(kept, absorbed):
    """Same kernel as membership_operator at r = rank(absorbed), any size.

    One staged elimination: absorbed's columns first, snapshot, done.  The
    pivot-free rows restricted to kept's columns vanish on u exactly when
    kept . u is a combination of absorbed's columns.
    """
    if kept.nrows != absorbed.nrows:
        raise InputError(
            f"row mismatch: kept has {kept.nrows}, absorbed has"
            f" {absorbed.nrows}"
        )
    ea, ek = absorbed.ncols, kept.ncols
    rows = [ra + rk for ra, rk in zip(absorbed.rows, kept.rows)]
    elim = staged_elimination(
        rows,
        ea + ek,
        [list(range(ea)), list(range(ea, ea + ek))],
        snapshot_after={0},
    )
    snap = elim.snapshots[0]
    rank, kernel = snap.residual.rank_kernel()
    return MembershipResult(
        kernel=kernel,
        residual_rank=rank,
        absorbed_rank=snap.rank,
        residual=snap.residual,
    )
