"""Singular point classification: linear ladder, reversibility, the
nilpotent case table, and the empirical sector census."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from phaseprint.classify import (
    ClassificationLabel as L,
    SectorConfig,
    characteristic_directions,
    classify_linear,
    classify_nilpotent,
    classify_reversible,
    exact_singular_point,
    sector_profile,
)
from phaseprint.errors import (
    JacobianNotNilpotent,
    NotInNormalForm,
    ZeroF,
)
from phaseprint.polyfield import JacobianData, parse_field

WHORL = parse_field("y ; -x*(x^2-1)^2")
SPIRAL = parse_field("y ; (y-x/2)*(x^2-1)^2")
TWIST = parse_field("y ; (2*y-x)*(x-1)^2")
DEG_SPIRAL = parse_field("y ; -x^5*(x^2-1)^2*(1+y*(1+x)^3)")


def jac(a, b, c, d) -> JacobianData:
    return JacobianData.from_entries(
        Fraction(a), Fraction(b), Fraction(c), Fraction(d)
    )


class TestClassifyLinear:
    @pytest.mark.parametrize(
        "entries, expected",
        [
            ((0, 1, -1, 0), L.FOCUS_OR_CENTER),          # tau=0, delta=1
            ((1, 0, 0, 1), L.UNSTABLE_NODE),             # identity: star node
            ((0, 1, -1, 2), L.IMPROPER_NODE_UNSTABLE),   # twist linear part
            ((0, 1, Fraction(-1, 2), 1), L.UNSTABLE_FOCUS),  # spiral linear part
            ((1, 0, 0, -1), L.SADDLE),
            ((-1, 0, 0, -2), L.STABLE_NODE),
            ((-1, 1, -1, -1), L.STABLE_FOCUS),
            ((2, 1, 0, 2), L.IMPROPER_NODE_UNSTABLE),
            ((-2, 0, 1, -2), L.IMPROPER_NODE_STABLE),
            ((-1, 0, 0, -1), L.STABLE_NODE),             # stable star
            ((0, 0, 0, 1), L.DEGENERATE_UNRESOLVED),
            ((0, 1, 0, 0), L.DEGENERATE_UNRESOLVED),
        ],
    )
    def test_trace_determinant_table(self, entries, expected):
        assert classify_linear(jac(*entries)) is expected

    @given(
        st.tuples(*(st.integers(-5, 5) for _ in range(4))),
        st.fractions(min_value=Fraction(1, 8), max_value=8, max_denominator=16),
    )
    def test_invariant_under_positive_rescaling(self, entries, scale):
        j1 = jac(*entries)
        j2 = jac(*(scale * Fraction(v) for v in entries))
        assert classify_linear(j1) is classify_linear(j2)


class TestReversibility:
    def test_whorl_is_reversible_at_origin(self):
        assert classify_reversible(WHORL, (0, 0)) is True

    def test_spiral_is_not(self):
        assert classify_reversible(SPIRAL, (0, 0)) is False

    def test_linear_center(self):
        assert classify_reversible(parse_field("y ; -x"), (0, 0)) is True

    def test_x_axis_symmetry_branch(self):
        # P even in x, Q odd in x
        assert classify_reversible(parse_field("y + x^2 ; -x^3"), (0, 0)) is True

    def test_requires_singular_point(self):
        with pytest.raises(ValueError):
            classify_reversible(WHORL, (Fraction(1, 2), 0))


class TestClassifyNilpotent:
    def test_whorl_cusp(self):
        label, data = classify_nilpotent(WHORL, (1, 0))
        assert label is L.CUSP
        assert (data.k, data.m, data.a_k, data.b_n, data.n) == (2, 1, -4, 0, None)
        assert data.lam is None

    def test_degenerate_spiral_origin(self):
        label, data = classify_nilpotent(DEG_SPIRAL, (0, 0))
        assert label is L.FOCUS_OR_CENTER
        assert (data.k, data.m, data.n, data.a_k, data.b_n) == (5, 2, 5, -1, -1)
        assert data.lam == Fraction(-11)  # b^2 + 4(m+1) a = 1 - 12

    def test_saddle_node_case(self):
        label, data = classify_nilpotent(parse_field("y ; x^4 + x*y"), (0, 0))
        assert label is L.SADDLE_NODE
        assert (data.k, data.m, data.n, data.b_n) == (4, 2, 1, 1)

    def test_spiral_cusps(self):
        for point, a_sign in (((1, 0), -1), ((-1, 0), 1)):
            label, data = classify_nilpotent(SPIRAL, point)
            assert label is L.CUSP
            assert data.k == 2 and data.n == 2
            assert (1 if data.a_k > 0 else -1) == a_sign

    @pytest.mark.parametrize(
        "text, expected",
        [
            ("y ; x^3", L.SADDLE),                    # k odd, a > 0
            ("y ; -x^3", L.FOCUS_OR_CENTER),          # b = 0
            ("y ; -x^3 + 4*x*y", L.ELLIPTIC_DOMAIN_POINT),  # n=m odd, lam=8
            ("y ; -x^3 + x*y", L.FOCUS_OR_CENTER),    # n=m, lam=-7
            ("y ; -x^5 + 4*x^2*y", L.UNSTABLE_NODE),  # n=m even, lam=4
            ("y ; -x^5 - 4*x^2*y", L.STABLE_NODE),
            ("y ; x^2", L.CUSP),
            ("y ; -x^2", L.CUSP),
        ],
    )
    def test_case_table(self, text, expected):
        label, _ = classify_nilpotent(parse_field(text), (0, 0))
        assert label is expected

    def test_rejects_wrong_first_component(self):
        with pytest.raises(NotInNormalForm):
            classify_nilpotent(parse_field("x^2 ; y^2"), (0, 0))

    def test_rejects_non_nilpotent_jacobian(self):
        with pytest.raises(JacobianNotNilpotent):
            classify_nilpotent(parse_field("y ; x"), (0, 0))

    def test_rejects_vanishing_f(self):
        with pytest.raises(ZeroF):
            classify_nilpotent(parse_field("y ; y^2"), (0, 0))


class TestCharacteristicDirections:
    def test_cusp_directions_standard(self):
        dirs = characteristic_directions(parse_field("y ; x^2"), "standard")
        assert dirs == pytest.approx([0.0, pytest.approx(3.141592653589793)])

    def test_cusp_directions_paper_ordering(self):
        # the paper's displayed component order yields four candidates here
        dirs = characteristic_directions(parse_field("y ; x^2"), "paper")
        assert len(dirs) == 4

    def test_focus_has_none(self):
        assert characteristic_directions(SPIRAL) == []

    def test_star_node_is_isotropic(self):
        assert characteristic_directions(parse_field("x ; y")) is None

    def test_tangential_zeros_are_found(self):
        # improper node: direction polynomial is -(x - y)^2, a double root
        # invisible to sign changes
        dirs = characteristic_directions(parse_field("y ; -x + 2*y"))
        import math

        assert dirs == pytest.approx([math.pi / 4, 5 * math.pi / 4])


class TestSectorProfile:
    @pytest.mark.parametrize(
        "text, point, ehp",
        [
            ("x ; -y", (0, 0), (0, 4, 0)),            # linear saddle
            ("y ; x^2", (0, 0), (0, 2, 0)),           # cusp
            ("y ; -x^2", (0, 0), (0, 2, 0)),          # topsy-turvy cusp
            ("x^2 ; y", (0, 0), (0, 2, 1)),           # saddle-node
            ("y ; -x^3 + 4*x*y", (0, 0), (1, 1, 2)),  # elliptic domain
            ("x ; 2*y", (0, 0), (0, 0, 1)),           # node
            ("y ; -x + 2*y", (0, 0), (0, 0, 1)),      # improper node
            ("x^2 - y^2 ; 2*x*y", (0, 0), (2, 0, 2)), # dipole, index 2
        ],
    )
    def test_canonical_profiles(self, text, point, ehp):
        profile = sector_profile(parse_field(text), point)
        assert (profile.e, profile.h, profile.p) == ehp
        assert profile.parity_ok

    @pytest.mark.parametrize(
        "field, point",
        [
            (WHORL, (0, 0)),
            (SPIRAL, (0, 0)),
            (DEG_SPIRAL, (0, 0)),
        ],
    )
    def test_rotational_points(self, field, point):
        profile = sector_profile(field, point)
        assert profile.rotational
        assert (profile.e, profile.h, profile.p) == (0, 0, 0)

    def test_template_cusps_all_report_two_hyperbolic(self):
        for field, point in [
            (WHORL, (1, 0)),
            (WHORL, (-1, 0)),
            (SPIRAL, (1, 0)),
            (TWIST, (1, 0)),
            (DEG_SPIRAL, (1, 0)),
            (DEG_SPIRAL, (-1, 0)),
        ]:
            profile = sector_profile(field, point)
            assert (profile.e, profile.h) == (0, 2)

    def test_paper_ordering_changes_the_cusp_count(self):
        # under the verbatim component order the cusp splits into four
        # wedges, which is why the standard ordering is the default
        profile = sector_profile(
            parse_field("y ; x^2"), (0, 0), config=SectorConfig(ordering="paper")
        )
        assert profile.h == 4

    def test_degenerate_focus_without_screen_is_ambiguous(self):
        from phaseprint.errors import TooManyNearMisses

        with pytest.raises(TooManyNearMisses):
            sector_profile(
                DEG_SPIRAL, (0, 0), config=SectorConfig(analytic_screen=False)
            )


class TestExactSingularPoint:
    def test_snaps_floats(self):
        assert exact_singular_point(WHORL, (0.9999999999, 1e-12)) == (1, 0)

    def test_accepts_exact(self):
        assert exact_singular_point(WHORL, (Fraction(-1), 0)) == (-1, 0)

    def test_rejects_nonsingular(self):
        with pytest.raises(ValueError):
            exact_singular_point(WHORL, (0.5, 0.0))
