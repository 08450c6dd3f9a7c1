from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from chevkit.errors import ConsistencyError, InputError
from chevkit.indices import index_count
from chevkit.poly import Poly, parse_poly
from chevkit.staircase import (
    IdealPresentation,
    diagram_from_generators,
    hilbert_samuel_count,
    ideal_jet_space,
    initial_exponent,
    normal_form,
    residual_order,
)
from chevkit.censored import AtLeast

Y = ["y1", "y2"]


def cusp_presentation(center=(0, 0)):
    g = parse_poly("y1^3 - y2^2", 2, names=Y)
    return IdealPresentation.make([g], center)


@pytest.fixture(scope="module")
def cusp_diagram():
    return diagram_from_generators(cusp_presentation(), 8)


class TestInitialExponent:
    def test_plain(self):
        p = parse_poly("y1^3 - y2^2", 2, names=Y)
        assert initial_exponent(p) == (0, 2)

    def test_degree_tie_breaks_lexicographically(self):
        # after recentering at a smooth point both degree-1 terms survive;
        # (0, 1) sorts before (1, 0) in the shared order
        pres = cusp_presentation(center=(1, 1))
        (g_loc,) = pres.recentered_generators()
        assert initial_exponent(g_loc) == (0, 1)

    def test_zero(self):
        assert initial_exponent(Poly.zero(2)) is None


class TestDiagram:
    def test_cusp_staircase(self, cusp_diagram):
        assert cusp_diagram.vertices == ((0, 2),)
        assert cusp_diagram.provisional is True
        assert cusp_diagram.trunc_degree == 8
        assert cusp_diagram.contains((0, 2))
        assert cusp_diagram.contains((3, 5))
        assert not cusp_diagram.contains((4, 1))
        assert not cusp_diagram.contains((0, 1))

    def test_truncation_must_cover_generators(self):
        with pytest.raises(InputError):
            diagram_from_generators(cusp_presentation(), 2)

    def test_vertices_stable_across_truncations(self, cusp_diagram):
        small = diagram_from_generators(cusp_presentation(), 4)
        assert small.vertices == cusp_diagram.vertices

    def test_smooth_point_staircase(self):
        pres = cusp_presentation(center=(1, 1))
        diag = diagram_from_generators(pres, 6)
        assert diag.vertices == ((0, 1),)

    def test_zero_ideal(self):
        pres = IdealPresentation.make([], (0, 0))
        diag = diagram_from_generators(pres, 5)
        assert diag.vertices == ()
        assert diag.provisional is False
        assert hilbert_samuel_count(diag, 3) == index_count(2, 3)


class TestCounts:
    @pytest.mark.parametrize("k", range(0, 7))
    def test_cusp_count_is_2k_plus_1(self, cusp_diagram, k):
        assert hilbert_samuel_count(cusp_diagram, k) == 2 * k + 1

    def test_count_needs_exactness(self, cusp_diagram):
        with pytest.raises(InputError):
            hilbert_samuel_count(cusp_diagram, 9)

    def test_smooth_count_is_k_plus_1(self):
        diag = diagram_from_generators(cusp_presentation((1, 1)), 6)
        for k in range(0, 6):
            assert hilbert_samuel_count(diag, k) == k + 1


class TestNormalForm:
    def test_frozen_orders(self, cusp_diagram):
        cases = [
            ("y2^2", 3, "y1^3"),
            ("y1 + y2^2", 1, None),
            ("y2^4", 6, "y1^6"),
        ]
        for text, order, nf_text in cases:
            f = parse_poly(text, 2, names=Y)
            assert residual_order(f, cusp_diagram) == order
            if nf_text is not None:
                nf = normal_form(f, cusp_diagram)
                assert nf.to_poly() == parse_poly(nf_text, 2, names=Y)

    def test_generator_reduces_to_zero_and_is_censored(self, cusp_diagram):
        g = parse_poly("y1^3 - y2^2", 2, names=Y)
        assert normal_form(g, cusp_diagram).to_poly().is_zero()
        assert residual_order(g, cusp_diagram) == AtLeast(8)

    def test_order_censored_at_truncation(self, cusp_diagram):
        f = parse_poly("y2^8", 2, names=Y)
        # reduces to y1^12, past the truncation degree
        assert residual_order(f, cusp_diagram) == AtLeast(8)

    def test_poly_deeper_than_truncation_rejected(self, cusp_diagram):
        with pytest.raises(InputError):
            normal_form(parse_poly("y2^9", 2, names=Y), cusp_diagram)

    def test_support_avoids_staircase(self, cusp_diagram):
        f = parse_poly("y2^3 + y1 y2^2 - 2y1^2", 2, names=Y)
        nf = normal_form(f, cusp_diagram)
        assert all(
            not cusp_diagram.contains(b) for b in nf.terms
        )

    @given(st.lists(
        st.tuples(
            st.integers(0, 3), st.integers(0, 3),
            st.fractions(min_value=-3, max_value=3, max_denominator=2),
        ),
        max_size=5,
    ))
    @settings(max_examples=50, deadline=None)
    def test_idempotent_and_linear(self, raw):
        diag = diagram_from_generators(cusp_presentation(), 6)
        f = Poly.zero(2)
        for e1, e2, c in raw:
            f = f + Poly.monomial((e1, e2), c)
        nf = normal_form(f, diag)
        again = normal_form(nf.to_poly(), diag)
        assert again == nf
        double = normal_form(f + f, diag)
        assert double == nf + nf

    def test_order_never_decreases(self, cusp_diagram):
        for text in ("y2^2", "y1 y2^2", "y1^2 + y2^3", "y2^2 - y1^2"):
            f = parse_poly(text, 2, names=Y)
            nf = normal_form(f, cusp_diagram)
            if not nf.to_poly().is_zero():
                assert nf.order() >= f.order()


class TestIdealJets:
    def test_cusp_jet_dimensions(self):
        pres = cusp_presentation()
        for k in range(0, 6):
            space = ideal_jet_space(pres, k)
            assert space.ambient_dim == index_count(2, k)
            assert index_count(2, k) - space.dim == 2 * k + 1

    def test_zero_ideal_jets(self):
        pres = IdealPresentation.make([], (0, 0))
        assert ideal_jet_space(pres, 4).is_zero()

    def test_count_routes_agree_at_smooth_point(self):
        pres = cusp_presentation((1, 1))
        diag = diagram_from_generators(pres, 6)
        for k in range(0, 6):
            via_jets = index_count(2, k) - ideal_jet_space(pres, k).dim
            assert via_jets == hilbert_samuel_count(diag, k)
