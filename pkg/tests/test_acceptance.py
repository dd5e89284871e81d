"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines on a green run (pytest shows captured output for failures anyway).
"""

from fractions import Fraction

import numpy as np

from phaseprint.classify import ClassificationLabel as L
from phaseprint.classify import sector_profile
from phaseprint.cli import main
from phaseprint.flow import DomainU, IntegrationSettings, integrate
from phaseprint.index import (
    ContourSpec,
    bendixson_index,
    connexion_check,
    delta_feasibility,
    enclosed_index_sum,
    winding_index,
)
from phaseprint.normalform import (
    PI_APPROX,
    HermiteConstraint,
    conserved_energy,
    hermite_solve,
    pendulum_surrogate,
    template,
)
from phaseprint.polyfield import X, parse_field, parse_polynomial
from phaseprint.report import survey_field

SQUARE = DomainU(-2, 2, -2, 2)


def _verdict(number: int, description: str, ok: bool) -> None:
    print(f"[criterion {number}] {'PASS' if ok else 'FAIL'}: {description}")
    assert ok, f"criterion {number} failed: {description}"


def test_criterion_1_template_classification():
    expectations = {
        "whorl": {(-1.0, 0.0): L.CUSP, (0.0, 0.0): L.CENTER, (1.0, 0.0): L.CUSP},
        "spiral": {
            (-1.0, 0.0): L.CUSP,
            (0.0, 0.0): L.UNSTABLE_FOCUS,
            (1.0, 0.0): L.CUSP,
        },
        "twist": {(0.0, 0.0): L.IMPROPER_NODE_UNSTABLE, (1.0, 0.0): L.CUSP},
        "tented-arch": {(0.0, 0.0): L.CUSP},
        "oblique-stria": {(0.0, 0.0): L.CUSP},
        "degenerate-spiral": {
            (-1.0, 0.0): L.CUSP,
            (0.0, 0.0): L.FOCUS_OR_CENTER,
            (1.0, 0.0): L.CUSP,
        },
        "plain-arch": {},
    }
    ok = True
    for name, want in expectations.items():
        field, _ = template(name)
        reports = {r.location: r for r in survey_field(field, SQUARE)}
        ok &= {loc: r.label for loc, r in reports.items()} == want
        if name == "whorl":
            center = reports[(0.0, 0.0)]
            ok &= center.reversible is True
            for cusp in ((1.0, 0.0), (-1.0, 0.0)):
                data = reports[cusp].nilpotent
                ok &= data.k == 2 and data.b_n == 0 and data.n is None
        if name == "spiral":
            jac = reports[(0.0, 0.0)].jacobian
            ok &= jac.tau == 1 and jac.delta == Fraction(1, 2)
        if name == "twist":
            ok &= reports[(0.0, 0.0)].jacobian.discriminant == 0
        if name == "degenerate-spiral":
            data = reports[(0.0, 0.0)].nilpotent
            ok &= (data.k, data.m, data.n) == (5, 2, 5)
    _verdict(1, "template suite classifies with exact label equality", ok)


def test_criterion_2_winding_equals_table_index():
    canonical = [
        ("x ; -y", -1, "saddle"),
        ("x ; 2*y", 1, "node"),
        ("x - y ; x + y", 1, "focus"),
        ("-y ; x", 1, "center"),
        ("y ; x^2", 0, "cusp"),
        ("x^2 ; y", 0, "saddle-node"),
    ]
    ok = True
    for text, expected, _name in canonical:
        value = winding_index(parse_field(text), ContourSpec.circle(0, 0, 0.1))
        ok &= value.residual < 1e-6 and int(value) == expected
    _verdict(2, "small-circle winding equals the table index, residual < 1e-6", ok)


def test_criterion_3_bendixson_cross_check():
    ok = True
    for name in (
        "whorl",
        "spiral",
        "twist",
        "tented-arch",
        "oblique-stria",
        "degenerate-spiral",
    ):
        field, _ = template(name)
        for report in survey_field(field, SQUARE):
            profile = sector_profile(
                field, report.location_exact, radius=0.1
            )
            bend = bendixson_index(profile).value
            winding = winding_index(
                field, ContourSpec.circle(*report.location, 0.1)
            )
            ok &= bend.denominator == 1 and bend == int(winding)
            ok &= (profile.e - profile.h) % 2 == 0
    _verdict(3, "1 + (e-h)/2 equals the winding index at every template point", ok)


def test_criterion_4_delta_impossibility():
    three = delta_feasibility(3, True)
    four = delta_feasibility(4, True)
    ok = (
        not three.feasible
        and three.bendixson == Fraction(-1, 2)
        and four.feasible
    )
    _verdict(4, "three all-hyperbolic sectors impossible (Bendixson -1/2)", ok)


def test_criterion_5_hermite_reproduction():
    whorl_profile = hermite_solve(
        [
            HermiteConstraint(0, 1, ((1, "=", -1),)),
            HermiteConstraint(1, 2, ((2, "<", 0),)),
            HermiteConstraint(-1, 2, ((2, ">", 0),)),
        ]
    )
    ok = whorl_profile == parse_polynomial("-x*(x^2-1)^2")

    # pendulum surrogate with pi = 355/113 (module constant): the constraint
    # set f'(0) = -1, f'(+-pi) > 0 pins f = x(x^2 - pi^2)/pi^2 exactly, the
    # polynomial that mimics -sin x (center at the origin, saddles at +-pi)
    p = PI_APPROX
    pendulum_profile = hermite_solve(
        [
            HermiteConstraint(0, 1, ((1, "=", -1),)),
            HermiteConstraint(p, 1, ((1, ">", 0),)),
            HermiteConstraint(-p, 1, ((1, ">", 0),)),
        ]
    )
    expected = (X**3 - X * p**2) * (Fraction(1) / p**2)
    ok &= pendulum_profile == expected
    ok &= pendulum_surrogate().q == expected
    _verdict(5, "Hermite solver reproduces both ridge profiles exactly", ok)


def test_criterion_6_energy_conservation_over_five_periods():
    field, _ = template("whorl")
    energy = conserved_energy(field)
    e0 = float(energy(0.5, 0.0))
    # one period = arclength of the closed orbit through (0.5, 0)
    loop = integrate(
        field,
        (0.5, 0.0),
        "forward",
        IntegrationSettings(closed_orbit_tol=1e-5),
        SQUARE,
        [(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)],
    )
    assert loop.termination.value == "ClosedOrbit"
    settings = IntegrationSettings(
        rel_tol=1e-12,
        abs_tol=1e-12,
        max_arclength=5 * loop.arclength,
        closed_orbit_tol=None,
    )
    run = integrate(field, (0.5, 0.0), "forward", settings, None, [])
    values = energy(run.vertices[:, 0], run.vertices[:, 1])
    drift = float(np.max(np.abs(values - e0))) / abs(e0)
    _verdict(6, f"|dE|/E0 = {drift:.2e} < 1e-6 over five periods", drift < 1e-6)


def test_criterion_7_enclosed_index_consistency():
    whorl, _ = template("whorl")
    report = enclosed_index_sum(
        whorl,
        ContourSpec.rectangle(-2, 2, -2, 2),
        [(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)],
    )
    ok = report.boundary_index == 1 and report.consistent

    p = float(PI_APPROX)
    pend = enclosed_index_sum(
        pendulum_surrogate(),
        ContourSpec.rectangle(-4, 4, -4, 4),
        [(-p, 0.0), (0.0, 0.0), (p, 0.0)],
    )
    ok &= pend.boundary_index == -1 and pend.consistent
    _verdict(7, "boundary winding equals the per-point index sum (+1 / -1)", ok)


def test_criterion_8_connexion_checks():
    cases = [
        (["node", "node", "focus", "saddle"], 0, True, Fraction(2)),
        (["center", "cusp", "cusp"], 0, False, Fraction(1)),
        (["node", "saddle"], 1, True, Fraction(0)),
        (["focus", "focus"], 0, True, Fraction(2)),
        (["saddle"], 0, False, Fraction(-1)),
        (["ellipticdomainpoint", "node"], 0, True, Fraction(2)),
    ]
    ok = True
    for entries, genus, feasible, total in cases:
        result = connexion_check(entries, genus)
        ok &= result.feasible == feasible and result.total_index == total
        if all(e in ("node", "focus", "saddle") for e in entries):
            ok &= result.corollary is not None and result.corollary["holds"] == (
                result.corollary["lhs"] == result.corollary["rhs"]
            )
    _verdict(8, "index sums decide feasibility on 6 hand-built multisets", ok)


def test_criterion_9_determinism(tmp_path):
    commands = [
        ["classify", "--template", "twist"],
        ["portrait", "--template", "plain-arch", "--format", "csv"],
        ["portrait", "--template", "tented-arch", "--format", "svg"],
        ["orient", "--template", "whorl", "--grid", "24,24"],
        ["orient", "--template", "whorl", "--grid", "24,24", "--format", "pgm"],
        ["connexion", "--genus", "0", "--points", "center,cusp,cusp"],
    ]
    ok = True
    for i, argv in enumerate(commands):
        out_a = tmp_path / f"a{i}.bin"
        out_b = tmp_path / f"b{i}.bin"
        code_a = main(argv + ["--out", str(out_a)])
        code_b = main(argv + ["--out", str(out_b)])
        ok &= code_a == code_b
        ok &= out_a.read_bytes() == out_b.read_bytes()
    _verdict(9, "re-running every command yields byte-identical artifacts", ok)
