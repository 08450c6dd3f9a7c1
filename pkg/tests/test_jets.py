import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import _oracles as oracles
from chevkit.errors import InputError
from chevkit.indices import degree, index_count, indices_up_to
from chevkit.jets import (
    FibredTuple,
    JetSystem,
    PolyMap,
    component_series,
    jet_blocks,
    jet_kernel,
    jet_matrix,
    jet_quotient_dim,
    projected_jet_kernel,
)
from chevkit.poly import Poly, parse_poly


def squaring():
    return PolyMap("squaring", [parse_poly("x1^2", 1)])


def cusp():
    return PolyMap("cusp", [parse_poly("x1^2", 1), parse_poly("x1^3", 1)])


def cone():
    comps = [parse_poly(t, 2) for t in ("x1", "x1 x2", "x1 x2^2")]
    return PolyMap("cone", comps)


class TestFibredTuple:
    def test_shared_image_required(self):
        with pytest.raises(InputError, match="share an image"):
            FibredTuple.make(squaring(), [(1,), (2,)])

    def test_opposite_points_share_square(self):
        tup = FibredTuple.make(squaring(), [(1,), (-1,)])
        assert tup.image == (Fraction(1),)
        assert tup.size == 2

    def test_empty_rejected(self):
        with pytest.raises(InputError):
            FibredTuple.make(squaring(), [])


class TestJetMatrix:
    def test_squaring_at_origin_order_2(self):
        tup = FibredTuple.make(squaring(), [(0,)])
        jm = jet_matrix(squaring(), tup, 2)
        assert jm.shape == (3, 3)
        assert jm.col_labels == ((0,), (1,), (2,))
        assert jm.row_labels == ((0, (0,)), (0, (1,)), (0, (2,)))
        expected = [
            [1, 0, 0],
            [0, 0, 0],
            [0, 1, 0],
        ]
        assert jm.matrix.rows == [[Fraction(v) for v in r] for r in expected]

    def test_squaring_pair_order_1(self):
        tup = FibredTuple.make(squaring(), [(1,), (-1,)])
        jm = jet_matrix(squaring(), tup, 1)
        expected = [
            [1, 0],
            [0, 2],
            [1, 0],
            [0, -2],
        ]
        assert jm.matrix.rows == [[Fraction(v) for v in r] for r in expected]

    def test_constant_column_is_indicator(self):
        tup = FibredTuple.make(cusp(), [(2,)])
        jm = jet_matrix(cusp(), tup, 3)
        col0 = [r[0] for r in jm.matrix.rows]
        for (pi, alpha), v in zip(jm.row_labels, col0):
            assert v == (1 if degree(alpha) == 0 else 0)

    def test_triangular_shape(self):
        # rows of source degree <= k are zero in columns of target degree > k
        tup = FibredTuple.make(cone(), [(1, 1)])
        jm = jet_matrix(cone(), tup, 3)
        for i, (pi, alpha) in enumerate(jm.row_labels):
            for j, beta in enumerate(jm.col_labels):
                if degree(beta) > degree(alpha):
                    assert jm.matrix.rows[i][j] == 0

    @pytest.mark.parametrize("mk,pts,l", [
        (squaring, [(0,)], 3),
        (squaring, [(1,), (-1,)], 3),
        (cusp, [(Fraction(1, 2),)], 3),
        (cone, [(1, 1)], 2),
        (cone, [(0, 1)], 3),
    ])
    def test_matches_composition_oracle(self, mk, pts, l):
        phi = mk()
        tup = FibredTuple.make(phi, pts)
        jm = jet_matrix(phi, tup, l)
        expected = oracles.jet_matrix_by_composition(
            phi.components, tup.points, tup.image, l
        )
        assert jm.matrix.rows == expected

    def test_negative_order_rejected(self):
        tup = FibredTuple.make(squaring(), [(0,)])
        with pytest.raises(InputError):
            jet_matrix(squaring(), tup, -1)


class TestJetBlocks:
    def test_split_shapes(self):
        tup = FibredTuple.make(cusp(), [(1,)])
        jm = jet_matrix(cusp(), tup, 4)
        low, high = jet_blocks(jm, 2)
        assert low.ncols == index_count(2, 2)
        assert high.ncols == jm.matrix.ncols - low.ncols
        assert low.nrows == high.nrows == jm.matrix.nrows

    def test_split_degree_bounds(self):
        tup = FibredTuple.make(cusp(), [(1,)])
        jm = jet_matrix(cusp(), tup, 2)
        with pytest.raises(InputError):
            jet_blocks(jm, 3)
        with pytest.raises(InputError):
            jet_blocks(jm, -1)


class TestKernels:
    def test_squaring_order_2_kernel(self):
        tup = FibredTuple.make(squaring(), [(0,)])
        kern = jet_kernel(squaring(), tup, 2)
        assert kern.dim == 1
        assert list(kern.basis[0]) == [0, 0, 1]

    def test_kernel_annihilated(self):
        tup = FibredTuple.make(cusp(), [(Fraction(1, 2),)])
        jm = jet_matrix(cusp(), tup, 4)
        kern = jet_kernel(cusp(), tup, 4)
        for v in kern.basis:
            image = jm.matrix.apply(list(v))
            assert all(c == 0 for c in image)

    @pytest.mark.parametrize("mk,pts", [
        (squaring, [(0,)]),
        (squaring, [(1,), (-1,)]),
        (cusp, [(0,)]),
        (cone, [(0, 1)]),
    ])
    def test_dims_match_sympy(self, mk, pts):
        phi = mk()
        tup = FibredTuple.make(phi, pts)
        l = 4
        jm = jet_matrix(phi, tup, l)
        rank = oracles.sympy_rank(jm.matrix.rows)
        assert jet_kernel(phi, tup, l).dim == jm.matrix.ncols - rank
        for k in range(0, l + 1):
            expected = oracles.projected_kernel_dim(
                phi.components, tup.points, tup.image, l, k
            )
            assert projected_jet_kernel(phi, tup, l, k).dim == expected

    def test_projection_routes_agree(self):
        phi = cusp()
        tup = FibredTuple.make(phi, [(0,)])
        sys = JetSystem(phi, tup)
        for l in range(1, 6):
            full = sys.kernel(l)
            for k in range(0, l + 1):
                cut = index_count(phi.target_arity, k)
                assert sys.projected_kernel(l, k) == full.project(range(cut))

    def test_quotient_dim_is_codimension(self):
        phi = cone()
        tup = FibredTuple.make(phi, [(1, 1)])
        sys = JetSystem(phi, tup)
        for l in range(0, 4):
            for k in range(0, l + 1):
                total = index_count(phi.target_arity, k)
                proj = sys.projected_kernel(l, k).dim
                assert sys.quotient_dim(l, k) == total - proj

    def test_projection_degree_bound(self):
        tup = FibredTuple.make(squaring(), [(0,)])
        with pytest.raises(InputError):
            projected_jet_kernel(squaring(), tup, 2, 3)
        with pytest.raises(InputError):
            jet_quotient_dim(squaring(), tup, 2, 3)

    def test_membership_residual_kernel(self):
        phi = cusp()
        tup = FibredTuple.make(phi, [(0,)])
        sys = JetSystem(phi, tup)
        l, k = 5, 2
        residual, high_rank = sys.membership_residual(l, k)
        _, kern = residual.rank_kernel()
        assert kern == sys.projected_kernel(l, k)
        low, high = jet_blocks(sys.jet(l), k)
        assert high_rank == oracles.sympy_rank(high.rows)


class TestDefiningProperty:
    """J^l(phi) applied to the coefficients of F equals the Taylor
    coefficients of F composed with the recentered map, at every point."""

    def run_case(self, phi, pts, f_local, l):
        tup = FibredTuple.make(phi, pts)
        jm = jet_matrix(phi, tup, l)
        origin = (0,) * phi.target_arity
        vec = f_local.taylor(origin, l).coeff_vector(l)
        image = jm.matrix.apply(vec)
        per_point = len(indices_up_to(phi.source_arity, l))
        for pi, a in enumerate(tup.points):
            expected = oracles.composition_taylor_vector(
                f_local, phi.components, tup.image, a, l
            )
            got = image[pi * per_point:(pi + 1) * per_point]
            assert got == expected

    def test_cusp_case(self):
        f = parse_poly("y1^3 - y2^2 + 2y2", 2, names=["y1", "y2"])
        self.run_case(cusp(), [(1,)], f, 4)
        self.run_case(cusp(), [(Fraction(1, 2),)], f, 5)

    def test_random_cases(self):
        rng = random.Random(7)
        names = ["y1", "y2", "y3"]
        for _ in range(20):
            phi = cone()
            a = (Fraction(rng.randint(-2, 2)), Fraction(rng.randint(-2, 2)))
            l = rng.randint(1, 3)
            f = Poly.zero(3)
            for _ in range(rng.randint(1, 3)):
                beta = tuple(rng.randint(0, 2) for _ in range(3))
                f = f + Poly.monomial(beta, Fraction(rng.randint(-3, 3)))
            if f.is_zero():
                continue
            self.run_case(phi, [a], f, l)


class TestComponentSeries:
    def test_centering(self):
        phi = cusp()
        tup = FibredTuple.make(phi, [(1,)])
        series = component_series(phi, tup, 0, 3)
        # components minus image values vanish at the point
        for s in series:
            assert s.terms.get((0,), Fraction(0)) == 0
