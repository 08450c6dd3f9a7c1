from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import _oracles as O
from chevkit.errors import InputError
from chevkit.linalg import Matrix, Subspace, rank_kernel, staged_elimination

entries = st.fractions(min_value=-4, max_value=4, max_denominator=3)


def matrix_strategy(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(
                st.lists(entries, min_size=c, max_size=c),
                min_size=r, max_size=r,
            ).map(lambda rows: Matrix(rows, ncols=c))
        )
    )


class TestMatrix:
    def test_shapes_and_zero_rows(self):
        m = Matrix([], ncols=3)
        assert m.shape == (0, 3)
        assert m.rank() == 0
        _, kern = m.rank_kernel()
        assert kern.dim == 3

    def test_matmul(self):
        a = Matrix([[1, 2], [3, 4]], ncols=2)
        b = Matrix([[0, 1], [1, 0]], ncols=2)
        assert (a @ b).rows == [[Fraction(2), Fraction(1)],
                                [Fraction(4), Fraction(3)]]

    @given(matrix_strategy())
    @settings(max_examples=60, deadline=None)
    def test_rank_matches_sympy(self, m):
        assert m.rank() == O.sympy_rank(m.rows)

    @given(matrix_strategy())
    @settings(max_examples=60, deadline=None)
    def test_kernel_is_annihilated_and_has_right_dim(self, m):
        rank, kern = m.rank_kernel()
        assert rank + kern.dim == m.ncols
        for v in kern.basis:
            assert all(x == 0 for x in m.apply(v))

    def test_submatrix(self):
        m = Matrix([[1, 2, 3], [4, 5, 6]], ncols=3)
        s = m.submatrix(row_idx=[1], col_idx=[0, 2])
        assert s.rows == [[Fraction(4), Fraction(6)]]


class TestSubspace:
    @given(st.lists(st.lists(entries, min_size=3, max_size=3),
                    min_size=0, max_size=4))
    def test_canonical_under_generator_shuffling(self, vecs):
        a = Subspace.from_vectors(vecs, 3)
        b = Subspace.from_vectors(list(reversed(vecs)), 3)
        assert a == b
        doubled = [[2 * x for x in v] for v in vecs]
        assert Subspace.from_vectors(doubled + vecs, 3) == a

    def test_contains(self):
        s = Subspace.from_vectors([[1, 0, 1], [0, 1, 0]], 3)
        assert s.contains_vector([2, 3, 2])
        assert not s.contains_vector([1, 0, 0])

    @given(st.lists(st.lists(entries, min_size=4, max_size=4), max_size=3),
           st.lists(st.lists(entries, min_size=4, max_size=4), max_size=3))
    @settings(max_examples=50, deadline=None)
    def test_dimension_formula(self, gens_a, gens_b):
        a = Subspace.from_vectors(gens_a, 4)
        b = Subspace.from_vectors(gens_b, 4)
        total = a.sum_with(b)
        meet = a.intersect(b)
        assert a.dim + b.dim == total.dim + meet.dim
        assert total.contains(a) and total.contains(b)
        assert a.contains(meet) and b.contains(meet)

    def test_project(self):
        s = Subspace.from_vectors([[1, 2, 0], [0, 0, 1]], 3)
        p = s.project([0, 1])
        assert p == Subspace.from_vectors([[1, 2]], 2)
        assert s.project([2]).dim == 1

    def test_zero_and_full(self):
        z = Subspace.zero_space(4)
        f = Subspace.full_space(4)
        assert z.is_zero() and z.dim == 0
        assert f.dim == 4 and f.contains(z)


class TestStagedElimination:
    def test_stages_must_partition_columns(self):
        with pytest.raises(InputError):
            staged_elimination([[1, 2]], 2, [[0], [0, 1]])

    @given(matrix_strategy(max_rows=5, max_cols=5), st.integers(1, 4))
    @settings(max_examples=50, deadline=None)
    def test_snapshot_matches_membership_oracle(self, m, cut_raw):
        # split columns [0, cut) | [cut, ncols); the snapshot's residual
        # kernel must be exactly {u : (second block) u lies in the image of
        # the first block}
        cut = min(cut_raw, m.ncols - 1)
        if cut < 1:
            return
        stages = [list(range(cut)), list(range(cut, m.ncols))]
        elim = staged_elimination(m.rows, m.ncols, stages,
                                  snapshot_after=(0,))
        snap = elim.snapshots[0]
        first = [[row[c] for c in range(cut)] for row in m.rows]
        second = [[row[c] for c in range(cut, m.ncols)] for row in m.rows]
        assert snap.rank == O.sympy_rank(first)
        _, kern = snap.residual.rank_kernel()
        ncols2 = m.ncols - cut
        first_cols = [list(col) for col in zip(*first)]
        for u in kern.basis:
            bu = [
                sum(second[i][j] * u[j] for j in range(ncols2))
                for i in range(m.nrows)
            ]
            assert O.in_row_span(first_cols, [Fraction(v) for v in bu])
        schur = _schur_rows(first, second)
        assert kern.dim == ncols2 - O.sympy_rank(schur)

    @given(matrix_strategy(max_rows=4, max_cols=5))
    @settings(max_examples=40, deadline=None)
    def test_total_rank_is_preserved(self, m):
        stages = [[c] for c in range(m.ncols)]
        elim = staged_elimination(m.rows, m.ncols, stages)
        assert elim.rank == O.sympy_rank(m.rows)


def _schur_rows(first, second):
    """Dense oracle for {u : second u in Im(first)}: rows spanning the
    orthogonal complement of Im(first), applied to second."""
    import sympy

    nrows = len(first)
    if nrows == 0:
        return []
    a = sympy.Matrix([[O._to_sympy(Fraction(v)) for v in r] for r in first])
    if a.cols == 0:
        a = sympy.zeros(nrows, 1)
    # left null space of first = functionals vanishing on its image
    left = a.T.nullspace()
    out = []
    for w in left:
        out.append([
            Fraction(sum(
                O._from_sympy(sympy.Rational(w[i])) * second[i][j]
                for i in range(nrows)
            ))
            for j in range(len(second[0]) if second and second[0] else 0)
        ])
    return [r for r in out if r]


def test_rank_kernel_function_wrapper():
    m = Matrix([[1, 1], [1, 1]], ncols=2)
    rank, kern = rank_kernel(m)
    assert rank == 1
    assert kern == Subspace.from_vectors([[1, -1]], 2)
