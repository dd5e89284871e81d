"""Hermite interpolation, built-in templates, and condition verification."""

from fractions import Fraction

import pytest

from phaseprint.errors import InfeasibleInequalities, UnderDetermined
from phaseprint.flow import DomainU
from phaseprint.normalform import (
    PI_APPROX,
    ExpectedPoint,
    HermiteConstraint,
    TemplateId,
    assemble_field,
    check_derivative_constraints,
    conserved_energy,
    hermite_solve,
    pendulum_surrogate,
    template,
    verify_conditions,
)
from phaseprint.polyfield import (
    BivariatePolynomial,
    X,
    Y,
    parse_field,
    parse_polynomial,
)

WHORL_CONSTRAINTS = [
    HermiteConstraint(0, 1, ((1, "=", -1),)),
    HermiteConstraint(1, 2, ((2, "<", 0),)),
    HermiteConstraint(-1, 2, ((2, ">", 0),)),
]


class TestHermiteSolve:
    def test_whorl_profile_is_reproduced_exactly(self):
        assert hermite_solve(WHORL_CONSTRAINTS) == parse_polynomial("-x*(x^2-1)^2")

    def test_single_simple_root(self):
        assert hermite_solve([HermiteConstraint(0, 1, ((1, "=", 1),))]) == X

    def test_pendulum_surrogate_profile(self):
        # f'(0) = -1 with simple roots at +-pi forces f = x(x^2 - pi^2)/pi^2,
        # the center-at-origin saddles-at-+-pi profile mimicking -sin x
        p = PI_APPROX
        constraints = [
            HermiteConstraint(0, 1, ((1, "=", -1),)),
            HermiteConstraint(p, 1, ((1, ">", 0),)),
            HermiteConstraint(-p, 1, ((1, ">", 0),)),
        ]
        solution = hermite_solve(constraints)
        expected = (X**3 - X * p**2) * (Fraction(1) / p**2)
        assert solution == expected

    def test_multiple_equalities_use_a_multiplier_polynomial(self):
        constraints = [
            HermiteConstraint(0, 1, ((1, "=", -1), (2, "=", 6))),
        ]
        solution = hermite_solve(constraints)
        # f = (c0 + c1 x) x with f'(0) = c0 = -1, f''(0) = 2 c1 = 6
        assert solution == 3 * X * X - X

    def test_inequalities_are_verified_not_solved(self):
        flipped = [
            HermiteConstraint(0, 1, ((1, "=", -1),)),
            HermiteConstraint(1, 2, ((2, ">", 0),)),  # wrong sign for this profile
        ]
        with pytest.raises(InfeasibleInequalities) as err:
            hermite_solve(flipped)
        assert any(chk.order == 2 for chk in err.value.violations)

    def test_scale_mode(self):
        solution = hermite_solve(
            [HermiteConstraint(2, 3)], scale=Fraction(-1, 2)
        )
        assert solution == (X - BivariatePolynomial.constant(2)) ** 3 * Fraction(-1, 2)

    def test_underdetermined_without_scale(self):
        with pytest.raises(UnderDetermined):
            hermite_solve([HermiteConstraint(0, 2)])

    def test_duplicate_locations_rejected(self):
        with pytest.raises(ValueError):
            hermite_solve([HermiteConstraint(1, 1), HermiteConstraint(1, 2)])

    def test_constraint_validation(self):
        with pytest.raises(ValueError):
            HermiteConstraint(0, 0)
        with pytest.raises(ValueError):
            HermiteConstraint(0, 2, ((1, "=", 0),))  # order below multiplicity
        with pytest.raises(ValueError):
            HermiteConstraint(0, 1, ((1, ">=", 0),))

    def test_check_report_covers_all_constraints(self):
        solution = hermite_solve(WHORL_CONSTRAINTS)
        checks = check_derivative_constraints(solution, WHORL_CONSTRAINTS)
        assert len(checks) == 3
        assert all(c.satisfied for c in checks)
        assert {(c.order, c.relation) for c in checks} == {(1, "="), (2, "<"), (2, ">")}


class TestAssembleField:
    def test_plain_profile(self):
        field = assemble_field(parse_polynomial("-x*(x^2-1)^2"))
        assert field == parse_field("y ; -x*(x^2-1)^2")

    def test_y_factor_mode(self):
        spiral = assemble_field(
            y_factor=Y - X * Fraction(1, 2), w=parse_polynomial("(x^2-1)^2")
        )
        assert spiral == parse_field("y ; (y-x/2)*(x^2-1)^2")
        twist = assemble_field(y_factor=2 * Y - X, w=parse_polynomial("(x-1)^2"))
        assert twist == parse_field("y ; (2*y-x)*(x-1)^2")

    def test_mode_validation(self):
        with pytest.raises(ValueError):
            assemble_field(X, y_factor=Y, w=X)
        with pytest.raises(ValueError):
            assemble_field(Y)  # profile must not involve y
        with pytest.raises(ValueError):
            assemble_field(y_factor=Y * Y, w=X)


class TestTemplates:
    @pytest.mark.parametrize(
        "tid, expected",
        [
            (TemplateId.PLAIN_ARCH, "1 ; 0"),
            (TemplateId.TENTED_ARCH, "y ; -x^2"),
            (TemplateId.OBLIQUE_STRIA, "y ; -x^2"),
            (TemplateId.WHORL, "y ; -x*(x^2-1)^2"),
            (TemplateId.SPIRAL, "y ; (y-x/2)*(x^2-1)^2"),
            (TemplateId.TWIST, "y ; (2*y-x)*(x-1)^2"),
            (TemplateId.DEGENERATE_SPIRAL, "y ; -x^5*(x^2-1)^2*(1+y*(1+x)^3)"),
        ],
    )
    def test_exact_fields(self, tid, expected):
        field, _ = template(tid)
        assert field == parse_field(expected)

    def test_whorl_vanishes_at_the_cusps(self):
        field, _ = template("whorl")
        assert field.evaluate_exact((1, 0)) == (0, 0)
        assert field.evaluate_exact((-1, 0)) == (0, 0)

    def test_string_lookup_matches_enum(self):
        assert template("whorl")[0] == template(TemplateId.WHORL)[0]
        with pytest.raises(ValueError):
            template("loop")  # no normal form exists for the loop

    def test_oblique_stria_excludes_only_the_separatrix_seed(self):
        _, tented = template("tented-arch")
        _, oblique = template("oblique-stria")
        assert [s.point for s in tented.seeds] == [s.point for s in oblique.seeds]
        dropped = [s for s in oblique.seeds if not s.include]
        assert len(dropped) == 1 and dropped[0].tag == "separatrix"

    def test_separatrix_seeds_sit_on_characteristic_directions(self):
        field, spec = template("whorl")
        sep = [s for s in spec.seeds if s.tag == "separatrix"]
        assert len(sep) == 2
        for seed in sep:
            # at radius 1e-3 from a cusp, on the x-axis, inner side
            assert abs(seed.point[1]) == 0
            assert min(abs(abs(seed.point[0]) - 1 + 1e-3),
                       abs(abs(seed.point[0]) - 1 - 1e-3)) < 1e-12
            assert abs(seed.point[0]) < 1  # both open toward the center


class TestConservedEnergy:
    def test_whorl_energy(self):
        field, _ = template("whorl")
        energy = conserved_energy(field)
        assert energy == parse_polynomial("y^2/2 + x^2/2 - x^4/2 + x^6/6")

    def test_requires_reversible_form(self):
        with pytest.raises(ValueError):
            conserved_energy(parse_field("y ; (y-x/2)*(x^2-1)^2"))
        with pytest.raises(ValueError):
            conserved_energy(parse_field("x ; -y"))


class TestVerifyConditions:
    def test_pendulum_surrogate_passes_its_conditions(self):
        p = float(PI_APPROX)
        report = verify_conditions(
            pendulum_surrogate(),
            DomainU(-4, 4, -4, 4),
            [
                ExpectedPoint((0, 0), "center"),
                ExpectedPoint((p, 0), "saddle"),
                ExpectedPoint((-p, 0), "saddle"),
            ],
        )
        assert report.all_passed

    def test_whorl_passes_center_and_cusps(self):
        field, _ = template("whorl")
        report = verify_conditions(
            field,
            DomainU(-2, 2, -2, 2),
            [
                ExpectedPoint((0, 0), "center"),
                ExpectedPoint((1, 0), "cusp"),
                ExpectedPoint((-1, 0), "cusp"),
            ],
        )
        assert report.all_passed

    def test_negative_control_saddle_demand_fails_with_evidence(self):
        field, _ = template("whorl")
        report = verify_conditions(
            field,
            DomainU(-2, 2, -2, 2),
            [
                ExpectedPoint((0, 0), "saddle"),
                ExpectedPoint((1, 0), "cusp"),
                ExpectedPoint((-1, 0), "cusp"),
            ],
        )
        assert not report.all_passed
        failing = [c for c in report.checks if not c.passed]
        assert len(failing) == 1
        assert "det" in failing[0].description
        assert "delta=1" in failing[0].evidence.replace("det=", "delta=")

    def test_missing_point_fails(self):
        field, _ = template("whorl")
        report = verify_conditions(
            field,
            DomainU(-2, 2, -2, 2),
            [ExpectedPoint((0.5, 0.5), "center")],
        )
        assert not report.all_passed
