"""Dense exact linear algebra over the rationals.

The workhorse is a staged fraction-free elimination: columns are processed
in caller-chosen groups, and the reduced state can be photographed at group
boundaries.  One pass over a matrix therefore yields the ranks of a whole
chain of nested column blocks, the residual row systems that test membership
in their column spans, and finally the full kernel.  Callers that only want
a plain rank/kernel use the single-stage wrapper.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .errors import InputError


def _integerize(row):
    """Scale a row of Fractions to coprime integers (kernel-preserving)."""
    denom = 1
    for x in row:
        denom = lcm(denom, x.denominator)
    ints = [int(x * denom) for x in row]
    g = 0
    for v in ints:
        g = gcd(g, v)
        if g == 1:
            return ints
    if g > 1:
        ints = [v // g for v in ints]
    return ints


def _normalize(row):
    g = 0
    for v in row:
        g = gcd(g, v)
        if g == 1:
            return
    if g > 1:
        for i, v in enumerate(row):
            row[i] = v // g


class Matrix:
    """Immutable-by-convention dense rational matrix."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows, ncols=None):
        rows = [[Fraction(x) for x in r] for r in rows]
        if rows:
            width = len(rows[0])
            for r in rows:
                if len(r) != width:
                    raise InputError("ragged matrix rows")
            if ncols is not None and ncols != width:
                raise InputError(
                    f"declared {ncols} columns but rows have {width}"
                )
            ncols = width
        elif ncols is None:
            raise InputError("a matrix with no rows needs an explicit ncols")
        if ncols < 0:
            raise InputError("negative column count")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols

    @classmethod
    def identity(cls, n):
        return cls(
            [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        )

    @classmethod
    def zero(cls, nrows, ncols):
        return cls([[Fraction(0)] * ncols for _ in range(nrows)], ncols=ncols)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def entry(self, i, j):
        return self.rows[i][j]

    def row(self, i):
        return list(self.rows[i])

    def col(self, j):
        return [r[j] for r in self.rows]

    def transpose(self):
        rows = [[self.rows[i][j] for i in range(self.nrows)]
                for j in range(self.ncols)]
        return Matrix(rows, ncols=self.nrows)

    def submatrix(self, row_idx=None, col_idx=None):
        rs = range(self.nrows) if row_idx is None else row_idx
        cs = range(self.ncols) if col_idx is None else list(col_idx)
        rows = [[self.rows[i][j] for j in cs] for i in rs]
        return Matrix(rows, ncols=len(cs))

    def apply(self, vec):
        if len(vec) != self.ncols:
            raise InputError(
                f"vector length {len(vec)} does not match {self.ncols} columns"
            )
        return [sum((r[j] * vec[j] for j in range(self.ncols)), Fraction(0))
                for r in self.rows]

    def __matmul__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise InputError(
                f"cannot multiply {self.shape} by {other.shape}"
            )
        cols = other.transpose().rows
        rows = [[sum((a * b for a, b in zip(row, col)), Fraction(0))
                 for col in cols] for row in self.rows]
        return Matrix(rows, ncols=other.ncols)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def is_zero(self):
        return all(not x for r in self.rows for x in r)

    def rank(self):
        return self.elimination().rank

    def kernel(self):
        """Kernel basis as raw vectors (not canonicalized)."""
        return self.elimination().kernel_vectors()

    def rank_kernel(self):
        """(rank, kernel as canonical Subspace); rank + dim kernel = ncols."""
        elim = self.elimination()
        kernel = Subspace.from_vectors(elim.kernel_vectors(), self.ncols)
        return elim.rank, kernel

    def elimination(self):
        return staged_elimination(self.rows, self.ncols,
                                  [list(range(self.ncols))])

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols})"


@dataclass
class StageSnapshot:
    """State photographed after a column stage finished.

    rank: pivots found so far = rank of the columns of all finished stages.
    kept_cols: columns of the unfinished stages, ascending.
    residual: the pivot-free rows restricted to kept_cols.  A vector u lies
    in the kernel of residual exactly when (kept columns)·u is a combination
    of the finished columns, so residual is a membership test for the span
    of the eliminated block.
    """

    rank: int
    kept_cols: list
    residual: Matrix


class Elimination:
    """Result of staged_elimination: reduced rows plus pivot bookkeeping."""

    def __init__(self, rows, ncols, pivots, snapshots):
        self.rows = rows
        self.ncols = ncols
        self.pivots = pivots
        self.snapshots = snapshots

    @property
    def rank(self):
        return len(self.pivots)

    def kernel_vectors(self):
        pivot_cols = {c for _, c in self.pivots}
        basis = []
        for free in range(self.ncols):
            if free in pivot_cols:
                continue
            v = [Fraction(0)] * self.ncols
            v[free] = Fraction(1)
            for r, c in self.pivots:
                num = self.rows[r][free]
                if num:
                    v[c] = Fraction(-num, self.rows[r][c])
            basis.append(v)
        return basis


def staged_elimination(rows, ncols, col_stages, snapshot_after=()):
    """Fraction-free Gauss-Jordan over caller-ordered column stages.

    col_stages must partition range(ncols); stages are processed in order.
    snapshot_after is a set of stage indices; after each listed stage the
    pivot-free rows restricted to the remaining columns are recorded.
    Row operations preserve kernel and row space, so every snapshot's
    residual answers span-membership for the block eliminated so far.
    """
    work = [_integerize([Fraction(x) for x in r]) for r in rows]
    for r in work:
        if len(r) != ncols:
            raise InputError("row length does not match column count")
    seen = set()
    for stage in col_stages:
        for c in stage:
            if not 0 <= c < ncols or c in seen:
                raise InputError("column stages must partition the columns")
            seen.add(c)
    if len(seen) != ncols:
        raise InputError("column stages must cover every column")
    snapshot_after = set(snapshot_after)

    nrows = len(work)
    pivots = []
    pivot_rows = set()
    snapshots = {}
    for si, stage in enumerate(col_stages):
        for c in stage:
            # smallest nonzero pivot keeps the integer growth tame
            best = None
            for i in range(nrows):
                if i in pivot_rows or not work[i][c]:
                    continue
                if best is None or abs(work[i][c]) < abs(work[best][c]):
                    best = i
            if best is None:
                continue
            pivots.append((best, c))
            pivot_rows.add(best)
            pv = work[best][c]
            prow = work[best]
            for i in range(nrows):
                if i == best:
                    continue
                row = work[i]
                f = row[c]
                if not f:
                    continue
                for j in range(ncols):
                    row[j] = pv * row[j] - f * prow[j]
                _normalize(row)
        if si in snapshot_after:
            kept = sorted(
                c for later in col_stages[si + 1:] for c in later
            )
            resid = [[Fraction(work[i][c]) for c in kept]
                     for i in range(nrows) if i not in pivot_rows]
            snapshots[si] = StageSnapshot(
                rank=len(pivots),
                kept_cols=kept,
                residual=Matrix(resid, ncols=len(kept)),
            )
    return Elimination(work, ncols, pivots, snapshots)


def rank_kernel(m):
    """Exact (rank, kernel Subspace) of a Matrix."""
    return m.rank_kernel()


class Subspace:
    """A subspace of Q^n held as a canonical reduced row-echelon basis.

    Pivot entries are 1, pivot columns are cleared everywhere else, and rows
    are sorted by pivot position, so two Subspace objects are equal exactly
    when they describe the same subspace.
    """

    __slots__ = ("ambient_dim", "basis", "pivots")

    def __init__(self, ambient_dim, basis, pivots, _trusted=False):
        if not _trusted:
            raise InputError("use Subspace.from_vectors to build a subspace")
        self.ambient_dim = ambient_dim
        self.basis = basis
        self.pivots = pivots

    @classmethod
    def from_vectors(cls, vectors, ambient_dim):
        if ambient_dim < 0:
            raise InputError("negative ambient dimension")
        basis = []
        pivots = []
        for vec in vectors:
            row = [Fraction(x) for x in vec]
            if len(row) != ambient_dim:
                raise InputError(
                    f"vector of length {len(row)} in ambient dim {ambient_dim}"
                )
            for b, p in zip(basis, pivots):
                f = row[p]
                if f:
                    row = [x - f * y for x, y in zip(row, b)]
            lead = next((i for i, x in enumerate(row) if x), None)
            if lead is None:
                continue
            lv = row[lead]
            row = [x / lv for x in row]
            for i, b in enumerate(basis):
                f = b[lead]
                if f:
                    basis[i] = [x - f * y for x, y in zip(b, row)]
            basis.append(row)
            pivots.append(lead)
        order = sorted(range(len(basis)), key=lambda i: pivots[i])
        return cls(
            ambient_dim,
            [basis[i] for i in order],
            [pivots[i] for i in order],
            _trusted=True,
        )

    @classmethod
    def zero_space(cls, ambient_dim):
        return cls.from_vectors([], ambient_dim)

    @classmethod
    def full_space(cls, ambient_dim):
        return cls.from_vectors(Matrix.identity(ambient_dim).rows, ambient_dim)

    @property
    def dim(self):
        return len(self.basis)

    @property
    def codim(self):
        return self.ambient_dim - len(self.basis)

    def is_zero(self):
        return not self.basis

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim and self.basis == other.basis
        )

    def __hash__(self):
        return hash(
            (self.ambient_dim, tuple(tuple(r) for r in self.basis))
        )

    def _check_ambient(self, other):
        if self.ambient_dim != other.ambient_dim:
            raise InputError(
                f"ambient dimension mismatch: {self.ambient_dim} vs"
                f" {other.ambient_dim}"
            )

    def reduce_vector(self, vec):
        """Subtract the basis component; the result is zero iff vec is inside."""
        row = [Fraction(x) for x in vec]
        if len(row) != self.ambient_dim:
            raise InputError(
                f"vector of length {len(row)} in ambient dim {self.ambient_dim}"
            )
        for b, p in zip(self.basis, self.pivots):
            f = row[p]
            if f:
                row = [x - f * y for x, y in zip(row, b)]
        return row

    def contains_vector(self, vec):
        return not any(self.reduce_vector(vec))

    def contains(self, other):
        self._check_ambient(other)
        return all(self.contains_vector(b) for b in other.basis)

    def sum_with(self, other):
        self._check_ambient(other)
        return Subspace.from_vectors(self.basis + other.basis,
                                     self.ambient_dim)

    def intersect(self, other):
        self._check_ambient(other)
        if not self.basis or not other.basis:
            return Subspace.zero_space(self.ambient_dim)
        # solve sum_i s_i a_i = sum_j t_j b_j; columns are the basis vectors
        stacked = [list(a) for a in self.basis]
        stacked += [[-x for x in b] for b in other.basis]
        combos = Matrix(stacked, ncols=self.ambient_dim).transpose().kernel()
        vecs = []
        for w in combos:
            coeffs = w[: len(self.basis)]
            vec = [Fraction(0)] * self.ambient_dim
            for s, a in zip(coeffs, self.basis):
                if s:
                    for i, x in enumerate(a):
                        vec[i] += s * x
            vecs.append(vec)
        return Subspace.from_vectors(vecs, self.ambient_dim)

    def project(self, coords):
        """Image under selection of the listed coordinates."""
        coords = list(coords)
        for c in coords:
            if not 0 <= c < self.ambient_dim:
                raise InputError(f"projection coordinate {c} out of range")
        vecs = [[b[c] for c in coords] for b in self.basis]
        return Subspace.from_vectors(vecs, len(coords))

    def __repr__(self):
        return f"Subspace(dim {self.dim} of Q^{self.ambient_dim})"
