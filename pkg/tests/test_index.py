"""Winding numbers, the Bendixson formula, and connexion feasibility."""

from fractions import Fraction

import pytest

from phaseprint.classify import SectorProfile, sector_profile
from phaseprint.errors import UnknownIndex, ZeroOnContour
from phaseprint.index import (
    ContourSpec,
    IndexMethod,
    bendixson_index,
    connexion_check,
    delta_feasibility,
    enclosed_index_sum,
    winding_index,
)
from phaseprint.normalform import pendulum_surrogate
from phaseprint.polyfield import parse_field

WHORL = parse_field("y ; -x*(x^2-1)^2")
UNIT_CIRCLE = ContourSpec.circle(0.0, 0.0, 1.0)


class TestWindingIndex:
    @pytest.mark.parametrize(
        "text, contour, expected",
        [
            ("x ; -y", UNIT_CIRCLE, -1),                      # saddle
            ("-y ; x", UNIT_CIRCLE, 1),                       # rotation
            ("y ; x^2", UNIT_CIRCLE, 0),                      # cusp
            ("y ; -x*(x^2-1)^2", ContourSpec.circle(0, 0, 3), 1),  # all three points
            ("x^2 ; y", ContourSpec.circle(0, 0, 0.1), 0),    # saddle-node
            ("x ; 2*y", ContourSpec.circle(0, 0, 0.1), 1),    # node
            ("x^2 - y^2 ; 2*x*y", UNIT_CIRCLE, 2),            # dipole
        ],
    )
    def test_known_values(self, text, contour, expected):
        value = winding_index(parse_field(text), contour)
        assert int(value) == expected
        assert value.residual < 1e-6
        assert value.method is IndexMethod.WINDING

    def test_contour_deformation_invariance(self):
        # circle and rectangle enclosing the same points agree
        for field in (WHORL, parse_field("x ; -y"), pendulum_surrogate()):
            rect = winding_index(field, ContourSpec.rectangle(-0.6, 0.6, -0.5, 0.5))
            circ = winding_index(field, ContourSpec.circle(0, 0, 0.55))
            assert int(rect) == int(circ)

    def test_negating_the_field_preserves_the_index(self):
        for text in ("x ; -y", "-y ; x", "y ; x^2", "x^2 - y^2 ; 2*x*y"):
            field = parse_field(text)
            assert int(winding_index(field, UNIT_CIRCLE)) == int(
                winding_index(field.negate(), UNIT_CIRCLE)
            )

    def test_polyline_contour(self):
        loop = ContourSpec.polyline([(-1, -1), (1, -1), (1, 1), (-1, 1)])
        assert int(winding_index(parse_field("x ; -y"), loop)) == -1

    def test_zero_on_contour(self):
        with pytest.raises(ZeroOnContour):
            winding_index(WHORL, ContourSpec.circle(1.0, 0.0, 1.0))

    def test_small_circle_matches_table_index_on_templates(self):
        # every detected singular point: winding on a small circle equals
        # the table index of its label
        from phaseprint.index import INDEX_TABLE
        from phaseprint.report import survey_field
        from phaseprint.flow import DomainU

        for text in ("y ; -x*(x^2-1)^2", "y ; (2*y-x)*(x-1)^2"):
            field = parse_field(text)
            for report in survey_field(field, DomainU(-2, 2, -2, 2)):
                assert report.index == INDEX_TABLE[report.label]


class TestBendixson:
    @pytest.mark.parametrize(
        "e, h, expected",
        [(0, 2, 0), (0, 0, 1), (1, 1, 1), (0, 4, -1), (2, 0, 2)],
    )
    def test_formula(self, e, h, expected):
        value = bendixson_index(SectorProfile(e=e, h=h, p=0))
        assert value.value == expected
        assert value.is_integer

    def test_three_hyperbolic_sectors_give_half_integer(self):
        value = bendixson_index(SectorProfile(e=0, h=3, p=0))
        assert value.value == Fraction(-1, 2)
        assert not value.is_integer
        with pytest.raises(ValueError):
            int(value)

    def test_matches_measured_profiles(self):
        for text, point, expected in [
            ("y ; x^2", (0, 0), 0),
            ("x ; -y", (0, 0), -1),
            ("x^2 ; y", (0, 0), 0),
            ("y ; -x^3 + 4*x*y", (0, 0), 1),
        ]:
            profile = sector_profile(parse_field(text), point)
            assert bendixson_index(profile).value == expected


class TestDeltaFeasibility:
    def test_three_hyperbolic_is_impossible(self):
        verdict = delta_feasibility(3, True)
        assert not verdict.feasible
        assert verdict.bendixson == Fraction(-1, 2)

    def test_even_counts_are_fine(self):
        assert delta_feasibility(4, True).feasible   # a saddle
        assert delta_feasibility(2, True).feasible   # a cusp

    def test_odd_counts_allowed_when_not_all_hyperbolic(self):
        assert delta_feasibility(3, False).feasible

    @pytest.mark.parametrize("h", [1, 3, 5, 7, 9])
    def test_every_odd_all_hyperbolic_count_is_infeasible(self, h):
        assert not delta_feasibility(h, True).feasible


class TestConnexionCheck:
    def test_sphere_with_hyperbolic_points(self):
        result = connexion_check(["node", "node", "focus", "saddle"], genus=0)
        assert result.feasible and result.total_index == 2
        assert result.corollary == {
            "nodes": 2,
            "foci": 1,
            "saddles": 1,
            "lhs": 2,
            "rhs": 2,
            "holds": True,
        }

    def test_torus_node_saddle(self):
        result = connexion_check(["node", "saddle"], genus=1)
        assert result.feasible and result.euler == 0

    def test_whorl_data_fails_on_the_sphere(self):
        result = connexion_check(["center", "cusp", "cusp"], genus=0)
        assert not result.feasible
        assert result.total_index == 1

    def test_explicit_integer_indices(self):
        result = connexion_check([2], genus=0)
        assert result.feasible
        result = connexion_check([1, 1, -1], genus=1)
        assert not result.feasible  # sum 1 != 0

    def test_more_hand_built_multisets(self):
        assert connexion_check(["focus", "focus"], 0).feasible
        assert not connexion_check(["saddle"], 0).feasible
        assert connexion_check(["ellipticdomainpoint", "node"], 0).feasible
        assert not connexion_check(["saddle", "saddle"], 1).feasible
        assert connexion_check(["saddle", "saddle", "node", "node"], 1).feasible

    def test_unknown_label_raises(self):
        with pytest.raises(UnknownIndex):
            connexion_check(["degenerateunresolved"], genus=0)
        with pytest.raises(UnknownIndex):
            connexion_check(["frobnitz"], genus=0)

    def test_enum_members_accepted(self):
        from phaseprint.classify import ClassificationLabel as L

        result = connexion_check([L.CENTER, L.CUSP, L.CUSP], 0)
        assert result.total_index == 1


class TestEnclosedIndexSum:
    def test_whorl_rectangle(self):
        report = enclosed_index_sum(
            WHORL,
            ContourSpec.rectangle(-2, 2, -2, 2),
            [(-1, 0), (0, 0), (1, 0)],
        )
        assert report.boundary_index == 1
        assert report.point_indices == (0, 1, 0)
        assert report.consistent

    def test_pendulum_surrogate_rectangle(self):
        field = pendulum_surrogate()
        p = 355 / 113
        report = enclosed_index_sum(
            field,
            ContourSpec.rectangle(-4, 4, -4, 4),
            [(-p, 0), (0, 0), (p, 0)],
        )
        assert report.boundary_index == -1
        assert report.point_indices == (-1, 1, -1)
        assert report.consistent

    def test_empty_region(self):
        report = enclosed_index_sum(
            WHORL, ContourSpec.circle(0.0, 1.5, 0.3), []
        )
        assert report.boundary_index == 0
        assert report.consistent
