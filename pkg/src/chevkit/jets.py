"""Jet matrices of polynomial maps at fibred tuples of points.

The jet matrix of order l maps coefficient vectors of target-variable
polynomials (degree <= l, coordinates centered at the shared image point) to
the Taylor coefficients of their pullbacks at each source point.  Columns
follow the shared index enumeration of the target, rows are grouped per
source point.  Every column for an exponent of degree D is a pullback of
order >= D, so rows of degree <= k see zeros in all columns of degree > k;
that triangular shape is what the staged elimination exploits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError
from .indices import degree, index_count, indices_up_to
from .linalg import Matrix, Subspace, staged_elimination
from .poly import Poly, TruncatedSeries


class PolyMap:
    """A polynomial map from source variables to target variables."""

    __slots__ = ("name", "source_arity", "target_arity", "components")

    def __init__(self, name, components, source_arity=None):
        components = tuple(components)
        if not components:
            raise InputError("a map needs at least one component")
        if source_arity is None:
            source_arity = components[0].arity
        for c in components:
            if c.arity != source_arity:
                raise InputError(
                    f"component arity {c.arity} does not match source arity"
                    f" {source_arity}"
                )
        self.name = name
        self.source_arity = source_arity
        self.target_arity = len(components)
        self.components = components

    def eval_at(self, point):
        if len(point) != self.source_arity:
            raise InputError(
                f"point has {len(point)} coordinates, map expects"
                f" {self.source_arity}"
            )
        point = tuple(Fraction(p) for p in point)
        return tuple(c.eval(point) for c in self.components)

    def __repr__(self):
        return (
            f"PolyMap({self.name!r}, {self.source_arity}->{self.target_arity})"
        )


@dataclass(frozen=True)
class FibredTuple:
    """Source points sharing one exact image point."""

    points: tuple
    image: tuple

    @classmethod
    def make(cls, phi, points):
        if not points:
            raise InputError("a fibred tuple needs at least one point")
        pts = tuple(tuple(Fraction(c) for c in p) for p in points)
        images = [phi.eval_at(p) for p in pts]
        first = images[0]
        for p, img in zip(pts, images):
            if img != first:
                raise InputError(
                    f"points do not share an image: phi{pts[0]} = {first}"
                    f" but phi{p} = {img}"
                )
        return cls(pts, first)

    @property
    def size(self):
        return len(self.points)


@dataclass(frozen=True)
class JetMatrix:
    """A jet matrix with its row/column index labels.

    col_labels[j] is the target exponent of column j; row_labels[i] is a
    (point position, source exponent) pair.
    """

    matrix: Matrix
    level: int
    col_labels: tuple
    row_labels: tuple

    @property
    def shape(self):
        return self.matrix.shape


def component_series(phi, tup, point_index, l):
    """Image-centered component series at one source point, truncated at l."""
    a = tup.points[point_index]
    b = tup.image
    return [
        (c - Poly.constant(phi.source_arity, bj)).taylor(a, l)
        for c, bj in zip(phi.components, b)
    ]


def jet_matrix(phi, tup, l):
    """The order-l jet matrix of phi at the fibred tuple.

    Column for exponent beta holds, per point, the Taylor coefficients of
    the product of the image-centered components raised to beta.  Products
    are memoized along the exponent lattice: each column is one truncated
    multiplication away from a previously built column.
    """
    if l < 0:
        raise InputError("jet order must be >= 0")
    m, n = phi.source_arity, phi.target_arity
    betas = indices_up_to(n, l)
    alphas = indices_up_to(m, l)
    rows_per_point = len(alphas)
    alpha_pos = {a: i for i, a in enumerate(alphas)}

    rows = [
        [Fraction(0)] * len(betas)
        for _ in range(tup.size * rows_per_point)
    ]
    for pi in range(tup.size):
        comps = component_series(phi, tup, pi, l)
        powers = {(0,) * n: TruncatedSeries.constant(m, 1, l)}
        base = pi * rows_per_point
        for col, beta in enumerate(betas):
            if any(beta):
                j = next(i for i, e in enumerate(beta) if e)
                parent = tuple(
                    e - (i == j) for i, e in enumerate(beta)
                )
                powers[beta] = powers[parent] * comps[j]
            series = powers[beta]
            for alpha, c in series.terms.items():
                rows[base + alpha_pos[alpha]][col] = c

    row_labels = tuple(
        (pi, alpha) for pi in range(tup.size) for alpha in alphas
    )
    return JetMatrix(
        matrix=Matrix(rows, ncols=len(betas)),
        level=l,
        col_labels=tuple(betas),
        row_labels=row_labels,
    )


def jet_blocks(jm, k):
    """Split columns at degree k: (low block, high block).

    Low carries the columns of degree <= k, high the rest.  Columns are
    degree-sorted, so both blocks are contiguous.
    """
    if k > jm.level:
        raise InputError(f"split degree {k} exceeds jet order {jm.level}")
    if k < 0:
        raise InputError("split degree must be >= 0")
    n = len(jm.col_labels[0])
    cut = index_count(n, k)
    low = jm.matrix.submatrix(col_idx=range(cut))
    high = jm.matrix.submatrix(col_idx=range(cut, jm.matrix.ncols))
    return low, high


class JetSystem:
    """Cached jet analyses of one map at one fibred tuple.

    analysis(l) runs a single staged elimination of the order-l jet matrix,
    eliminating column blocks from the highest degree down and photographing
    the state at every degree boundary.  That one pass yields, for every
    k <= l: the rank of the degree-> k column block, and a residual row
    system whose kernel is the projected jet kernel at degree k.
    """

    def __init__(self, phi, tup):
        self.phi = phi
        self.tup = tup
        self._analyses = {}

    def jet(self, l):
        return self.analysis(l).jet

    def analysis(self, l):
        if l not in self._analyses:
            self._analyses[l] = _JetAnalysis(self.phi, self.tup, l)
        return self._analyses[l]

    def kernel(self, l):
        """Kernel of the order-l jet matrix, ambient dim = target indices."""
        return self.analysis(l).kernel

    def projected_kernel(self, l, k):
        """Projection of the order-l kernel onto coordinates of degree <= k."""
        return self.analysis(l).block(k)[1]

    def quotient_dim(self, l, k):
        """Codimension of the projected kernel in the degree-<= k jet space."""
        return self.analysis(l).block(k)[2]

    def membership_residual(self, l, k):
        """(residual matrix, high-block rank) for the degree-k split at order l.

        The residual's kernel equals the projected kernel: u is in it exactly
        when (low block)u lies in the column span of the high block.
        """
        a = self.analysis(l)
        return a.residuals[k], a.high_ranks[k]


class _JetAnalysis:
    def __init__(self, phi, tup, l):
        self.level = l
        self.jet = jet_matrix(phi, tup, l)
        n = phi.target_arity
        counts = [index_count(n, d) for d in range(-1, l + 1)]
        # stage si holds the columns of degree l - si; highest degree first
        stages = [
            list(range(counts[l - si], counts[l - si + 1]))
            for si in range(l + 1)
        ]
        elim = staged_elimination(
            self.jet.matrix.rows,
            self.jet.matrix.ncols,
            stages,
            snapshot_after=range(l),
        )
        self.rank = elim.rank
        self.kernel = Subspace.from_vectors(
            elim.kernel_vectors(), self.jet.matrix.ncols
        )
        self.residuals = {}
        self.high_ranks = {}
        for k in range(l):
            snap = elim.snapshots[l - k - 1]
            self.residuals[k] = snap.residual
            self.high_ranks[k] = snap.rank
        self.residuals[l] = self.jet.matrix
        self.high_ranks[l] = 0
        self._blocks = {}

    def block(self, k):
        """(residual, projected kernel, quotient dim) at degree k."""
        if k not in self._blocks:
            if not 0 <= k <= self.level:
                raise InputError(
                    f"block degree {k} outside 0..{self.level}"
                )
            residual = self.residuals[k]
            rank, kernel = residual.rank_kernel()
            self._blocks[k] = (residual, kernel, rank)
        return self._blocks[k]


def jet_kernel(phi, tup, l):
    """Kernel of the order-l jet matrix as a canonical subspace."""
    return JetSystem(phi, tup).kernel(l)


def projected_jet_kernel(phi, tup, l, k):
    """Projection of the order-l jet kernel to coordinates of degree <= k."""
    if k > l:
        raise InputError(f"projection degree {k} exceeds jet order {l}")
    return JetSystem(phi, tup).projected_kernel(l, k)


def jet_quotient_dim(phi, tup, l, k):
    """Dimension of the degree-<= k jet space modulo the projected kernel."""
    if k > l:
        raise InputError(f"projection degree {k} exceeds jet order {l}")
    return JetSystem(phi, tup).quotient_dim(l, k)
