"""Normal forms for the Arch-Loop-Whorl pattern classes.

The built-in fields put a center, focus or improper node between cusps (or
use a trivial translation flow for the plain arch); each is the solution of
a univariate Hermite interpolation problem of the kind solved here: prescribe
roots with multiplicities for the ridge-profile function f, pin the free
parameters with derivative equalities, and verify (never solve for) the
derivative sign constraints.

Trigonometric systems are represented by polynomial surrogates; the circle
constant is the exact rational PI_APPROX throughout, so surrogate solutions
stay inside the exact-coefficient algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .classify import ClassificationLabel, classify_nilpotent
from .errors import InfeasibleInequalities, UnderDetermined
from .flow import DomainU, IntegrationSettings, PortraitSpec, Seed, find_singularities
from .polyfield import (
    ONE,
    BivariatePolynomial,
    PlanarVectorField,
    X,
    Y,
    split_xy,
    univariate_x,
)

__all__ = [
    "PI_APPROX",
    "HermiteConstraint",
    "hermite_solve",
    "check_derivative_constraints",
    "ConstraintCheck",
    "assemble_field",
    "TemplateId",
    "template",
    "pendulum_surrogate",
    "conserved_energy",
    "ExpectedPoint",
    "ConditionReport",
    "verify_conditions",
]

# Exact rational stand-in for pi (the Milü convergent, error < 3e-7); every
# trigonometric normal form is represented by a polynomial surrogate with
# this constant, keeping Hermite solutions exactly rational.
PI_APPROX = Fraction(355, 113)


@dataclass(frozen=True)
class HermiteConstraint:
    """Root of prescribed multiplicity plus constraints on free derivatives.

    `multiplicity` is the order of vanishing at `location`;
    `derivative_constraints` are (order, relation, value) triples with
    relation one of "=", "<", ">" and order at least the multiplicity (the
    first derivatives not already forced to zero by the root).
    """

    location: Fraction
    multiplicity: int = 1
    derivative_constraints: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "location", Fraction(self.location))
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be at least 1")
        normalized = []
        for order, relation, value in self.derivative_constraints:
            if relation not in ("=", "<", ">"):
                raise ValueError(f"unknown relation {relation!r}")
            if order < self.multiplicity:
                raise ValueError(
                    "constrained derivative orders start at the multiplicity"
                )
            normalized.append((int(order), relation, Fraction(value)))
        object.__setattr__(self, "derivative_constraints", tuple(normalized))


@dataclass(frozen=True)
class ConstraintCheck:
    location: Fraction
    order: int
    relation: str
    value: Fraction
    actual: Fraction
    satisfied: bool

    def __str__(self) -> str:
        return (
            f"f^({self.order})({self.location}) = {self.actual} "
            f"required {self.relation} {self.value}"
        )


def _derivative_at(poly: BivariatePolynomial, order: int, x0: Fraction) -> Fraction:
    for _ in range(order):
        poly = poly.partial_x()
    return poly.eval_exact(x0, 0)


def hermite_solve(
    constraints: Sequence[HermiteConstraint],
    scale: Fraction | None = None,
) -> BivariatePolynomial:
    """Minimal-degree polynomial with prescribed roots and derivative data.

    The solution has the form q(x) * prod (x - x_i)^{m_i} where q collects
    one free coefficient per derivative equality; the equalities become a
    linear system over the rationals (solved exactly), after which every
    inequality constraint is verified against the determined polynomial.
    With no equalities at all, `scale` must supply the overall constant.

    Raises
    ------
    UnderDetermined
        No equality constraint and no `scale`, or a singular equality system.
    InfeasibleInequalities
        A sign constraint fails on the equality-determined solution; the
        exception carries the violating checks.
    """
    if not constraints:
        raise UnderDetermined("no constraints given")
    locations = [c.location for c in constraints]
    if len(set(locations)) != len(locations):
        raise ValueError("constraint locations must be pairwise distinct")

    base = ONE
    for c in constraints:
        base = base * (X - BivariatePolynomial.constant(c.location)) ** c.multiplicity

    equalities = [
        (c.location, order, value)
        for c in constraints
        for order, relation, value in c.derivative_constraints
        if relation == "="
    ]

    if not equalities:
        if scale is None:
            raise UnderDetermined(
                "no equality constraint or normalization scale given"
            )
        solution = base * scale
    else:
        n_unknown = len(equalities)
        # f = (c_0 + c_1 x + ... ) * base; d-th derivative at x0 is linear in
        # the c_j by the Leibniz rule, with base^(d-j)(x0) as exact weights.
        base_derivs: list[BivariatePolynomial] = [base]
        max_order = max(order for _, order, _ in equalities)
        for _ in range(max_order):
            base_derivs.append(base_derivs[-1].partial_x())

        matrix: list[list[Fraction]] = []
        rhs: list[Fraction] = []
        for x0, order, value in equalities:
            row = []
            for j in range(n_unknown):
                # d^j/dx^j of x^j-coefficient basis monomial x^j is j!/(j-r)! ...
                weight = Fraction(0)
                for r in range(min(j, order) + 1):
                    # r-th derivative of x^j at x0 times binom(order, r)
                    mono_deriv = Fraction(math.perm(j, r)) * x0 ** (j - r)
                    weight += (
                        Fraction(math.comb(order, r))
                        * mono_deriv
                        * base_derivs[order - r].eval_exact(x0, 0)
                    )
                row.append(weight)
            matrix.append(row)
            rhs.append(value)

        coeffs = _solve_exact(matrix, rhs)
        solution = univariate_x(coeffs) * base
        if scale is not None:
            raise ValueError("scale only applies when no equality is given")

    violations = [
        chk
        for chk in check_derivative_constraints(solution, constraints)
        if not chk.satisfied and chk.relation != "="
    ]
    if violations:
        raise InfeasibleInequalities(violations)
    return solution


def _solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over the rationals with partial pivoting."""
    n = len(rhs)
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise UnderDetermined("equality system is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        lead = aug[col][col]
        aug[col] = [v / lead for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [v - factor * w for v, w in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def check_derivative_constraints(
    poly: BivariatePolynomial, constraints: Iterable[HermiteConstraint]
) -> list[ConstraintCheck]:
    """Exact evaluation of every derivative constraint against `poly`."""
    checks = []
    for c in constraints:
        for order, relation, value in c.derivative_constraints:
            actual = _derivative_at(poly, order, c.location)
            if relation == "=":
                ok = actual == value
            elif relation == "<":
                ok = actual < value
            else:
                ok = actual > value
            checks.append(
                ConstraintCheck(
                    location=c.location,
                    order=order,
                    relation=relation,
                    value=value,
                    actual=actual,
                    satisfied=ok,
                )
            )
    return checks


def assemble_field(
    f_of_x: BivariatePolynomial | None = None,
    y_factor: BivariatePolynomial | None = None,
    w: BivariatePolynomial | None = None,
) -> PlanarVectorField:
    """Build (y, .) systems from Hermite solutions.

    Either pass `f_of_x` alone, giving the reversible system (y, f(x)), or
    pass `y_factor` (a polynomial linear in y, e.g. y - x/2) together with
    the root-carrying profile `w(x)`, giving (y, y_factor * w).
    """
    if f_of_x is not None:
        if y_factor is not None or w is not None:
            raise ValueError("pass either f_of_x or (y_factor, w), not both")
        if any(j != 0 for _, j in f_of_x.terms):
            raise ValueError("f_of_x must not involve y")
        return PlanarVectorField(Y, f_of_x)
    if y_factor is None or w is None:
        raise ValueError("need y_factor and w when f_of_x is not given")
    if any(j > 1 for _, j in y_factor.terms):
        raise ValueError("y_factor must be linear in y")
    if any(j != 0 for _, j in w.terms):
        raise ValueError("w must not involve y")
    return PlanarVectorField(Y, y_factor * w)


def pendulum_surrogate() -> PlanarVectorField:
    """Polynomial stand-in for the undamped pendulum (y, -sin x).

    Solved from the surrogate constraint set {f(0) = 0 with f'(0) = -1;
    f(+-pi) = 0 with f'(+-pi) > 0} with pi as PI_APPROX, yielding
    f(x) = x (x^2 - pi^2) / pi^2: a center at the origin flanked by saddles
    at (+-pi, 0).
    """
    constraints = [
        HermiteConstraint(Fraction(0), 1, ((1, "=", Fraction(-1)),)),
        HermiteConstraint(PI_APPROX, 1, ((1, ">", Fraction(0)),)),
        HermiteConstraint(-PI_APPROX, 1, ((1, ">", Fraction(0)),)),
    ]
    return assemble_field(hermite_solve(constraints))


def conserved_energy(field: PlanarVectorField) -> BivariatePolynomial:
    """Energy integral y^2/2 + V(x) for reversible systems (y, F(x)).

    V is the exact antiderivative of -F; the value is constant along orbits
    because the system is Hamiltonian with x' = dE/dy, y' = -dE/dx.
    """
    if field.p != Y:
        raise ValueError("energy integral requires the form (y, F(x))")
    f_part, g_part, r_part = split_xy(field.q)
    if not (g_part.is_zero() and r_part.is_zero()):
        raise ValueError("energy integral requires y' independent of y")
    potential = BivariatePolynomial(
        {(i + 1, 0): -c / (i + 1) for (i, _), c in f_part.terms.items()}
    )
    return Y * Y * Fraction(1, 2) + potential


# ---------------------------------------------------------------------------
# Built-in templates
# ---------------------------------------------------------------------------


class TemplateId(str, Enum):
    PLAIN_ARCH = "plain-arch"
    TENTED_ARCH = "tented-arch"
    OBLIQUE_STRIA = "oblique-stria"
    WHORL = "whorl"
    SPIRAL = "spiral"
    DEGENERATE_SPIRAL = "degenerate-spiral"
    TWIST = "twist"


def _whorl_profile() -> BivariatePolynomial:
    # f vanishing at 0 with f'(0) = -1 and doubly at +-1 with f''(1) < 0,
    # f''(-1) > 0: the circular/elliptical whorl ridge profile -x(x^2-1)^2.
    constraints = [
        HermiteConstraint(Fraction(0), 1, ((1, "=", Fraction(-1)),)),
        HermiteConstraint(Fraction(1), 2, ((2, "<", Fraction(0)),)),
        HermiteConstraint(Fraction(-1), 2, ((2, ">", Fraction(0)),)),
    ]
    return hermite_solve(constraints)


_SQUARED_WELL = (X * X - ONE) ** 2    # (x^2 - 1)^2
_TEMPLATE_FIELDS: dict[TemplateId, PlanarVectorField] = {
    TemplateId.PLAIN_ARCH: PlanarVectorField(ONE, BivariatePolynomial.zero()),
    TemplateId.TENTED_ARCH: PlanarVectorField(Y, -(X * X)),
    TemplateId.OBLIQUE_STRIA: PlanarVectorField(Y, -(X * X)),
    TemplateId.WHORL: assemble_field(_whorl_profile()),
    TemplateId.SPIRAL: assemble_field(y_factor=Y - X * Fraction(1, 2), w=_SQUARED_WELL),
    TemplateId.DEGENERATE_SPIRAL: PlanarVectorField(
        Y, -(X**5) * _SQUARED_WELL * (ONE + Y * (ONE + X) ** 3)
    ),
    TemplateId.TWIST: assemble_field(y_factor=2 * Y - X, w=(X - ONE) ** 2),
}

_SEPARATRIX_SEED_RADIUS = 1e-3


def _cusp_seeds(field: PlanarVectorField, point: tuple[int, int]) -> list[Seed]:
    """Seeds hugging the cusp separatrix and its outer companion orbit.

    Both sit on the characteristic directions at the standard small radius;
    the separatrix branch lies on the side where the potential of the
    leading cusp term is negative (angle pi for a_k < 0, angle 0 otherwise).
    """
    label, data = classify_nilpotent(field, point)
    if label is not ClassificationLabel.CUSP:
        raise ValueError(f"{point} is not a cusp of the field")
    toward = -1.0 if data.a_k < 0 else 1.0  # side where the potential is negative
    x0, y0 = float(point[0]), float(point[1])
    r = _SEPARATRIX_SEED_RADIUS
    return [
        Seed((x0 + toward * r, y0), direction="both", tag="separatrix"),
        Seed((x0 - toward * r, y0), direction="both", tag="cusp-outer"),
    ]


def _ring(cx: float, cy: float, radius: float, count: int, direction: str) -> list[Seed]:
    return [
        Seed(
            (
                cx + radius * math.cos(2 * math.pi * k / count),
                cy + radius * math.sin(2 * math.pi * k / count),
            ),
            direction=direction,
            tag="ring",
        )
        for k in range(count)
    ]


def _default_spec(tid: TemplateId, field: PlanarVectorField) -> PortraitSpec:
    domain = DomainU(-2.0, 2.0, -2.0, 2.0)
    # first-return detection must out-tolerance the integrator's global
    # error over one loop, which at the default step tolerances is ~1e-6
    settings = IntegrationSettings(closed_orbit_tol=1e-5)
    if tid is TemplateId.PLAIN_ARCH:
        seeds = [
            Seed((-2.0, y), direction="forward", tag="stream")
            for y in (-1.75, -1.25, -0.75, -0.25, 0.25, 0.75, 1.25, 1.75)
        ]
        return PortraitSpec(tuple(seeds), domain, settings)
    if tid in (TemplateId.TENTED_ARCH, TemplateId.OBLIQUE_STRIA):
        seeds = [
            Seed((0.0, y), direction="both", tag="stream")
            for y in (-1.6, -1.2, -0.8, -0.4, 0.4, 0.8, 1.2, 1.6)
        ]
        seeds += _cusp_seeds(field, (0, 0))
        if tid is TemplateId.OBLIQUE_STRIA:
            seeds = [
                Seed(s.point, s.direction, include=s.tag != "separatrix", tag=s.tag)
                for s in seeds
            ]
        return PortraitSpec(tuple(seeds), domain, settings)
    if tid is TemplateId.WHORL:
        seeds = _ring(0.0, 0.0, 0.75, 12, "forward")
        seeds += _cusp_seeds(field, (1, 0)) + _cusp_seeds(field, (-1, 0))
        seeds += [
            Seed((sx, sy), direction="both", tag="outer")
            for sx in (-1.5, 1.5)
            for sy in (-1.5, 1.5)
        ]
        return PortraitSpec(tuple(seeds), domain, settings)
    if tid is TemplateId.SPIRAL:
        seeds = _ring(0.0, 0.0, 0.25, 6, "both")
        seeds += _cusp_seeds(field, (1, 0)) + _cusp_seeds(field, (-1, 0))
        return PortraitSpec(tuple(seeds), domain, settings)
    if tid is TemplateId.TWIST:
        seeds = _ring(0.0, 0.0, 0.4, 8, "both")
        seeds += _cusp_seeds(field, (1, 0))
        return PortraitSpec(tuple(seeds), domain, settings)
    if tid is TemplateId.DEGENERATE_SPIRAL:
        seeds = _ring(0.0, 0.0, 0.6, 6, "forward")
        seeds += _cusp_seeds(field, (1, 0)) + _cusp_seeds(field, (-1, 0))
        settings = IntegrationSettings(max_arclength=25.0, closed_orbit_tol=1e-5)
        return PortraitSpec(tuple(seeds), domain, settings)
    raise ValueError(f"unknown template {tid!r}")


def template(tid: TemplateId | str) -> tuple[PlanarVectorField, PortraitSpec]:
    """The built-in field and default portrait spec for a pattern class.

    Seed sets are fixed, versioned data: portraits are seed-relative, so
    reproducibility requires pinning them.  The oblique stria reuses the
    tented-arch cusp with its separatrix seed excluded.
    """
    tid = TemplateId(tid)
    field = _TEMPLATE_FIELDS[tid]
    return field, _default_spec(tid, field)


# ---------------------------------------------------------------------------
# Post-hoc verification of prescribed singularity data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpectedPoint:
    """A prescribed singular point with its Jacobian-level requirement.

    kind is one of "center" (tr = 0, det > 0), "focus" (det > 0,
    tau^2 < 4 det, tau != 0), "node" (det > 0, tau^2 >= 4 det, tau != 0),
    "saddle" (det < 0), or "cusp" (nilpotent Jacobian classifying as a
    cusp in the normal-form table).
    """

    location: tuple
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in ("center", "focus", "node", "saddle", "cusp"):
            raise ValueError(f"unknown expected kind {self.kind!r}")


@dataclass(frozen=True)
class ConditionCheck:
    description: str
    passed: bool
    evidence: str


@dataclass(frozen=True)
class ConditionReport:
    checks: tuple[ConditionCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def verify_conditions(
    field: PlanarVectorField,
    domain: DomainU,
    expected: Sequence[ExpectedPoint],
    match_tol: float = 1e-6,
) -> ConditionReport:
    """Certify a field against prescribed singularities and sign conditions.

    Two groups of checks: the vanishing set of the field inside `domain`
    must consist of exactly the expected locations (no extra zeros, none
    missing), and the exact Jacobian at each expected point must satisfy
    the trace/determinant sign pattern of its kind.
    """
    checks: list[ConditionCheck] = []
    found = find_singularities(field, domain)

    matched = set()
    for exp in expected:
        ex, ey = float(exp.location[0]), float(exp.location[1])
        hit = None
        for idx, pt in enumerate(found):
            if math.hypot(float(pt[0]) - ex, float(pt[1]) - ey) <= match_tol:
                hit = idx
                break
        if hit is None:
            checks.append(
                ConditionCheck(
                    f"singular point at {exp.location}",
                    False,
                    "no zero of the field found there",
                )
            )
            continue
        matched.add(hit)
        checks.append(
            ConditionCheck(f"singular point at {exp.location}", True, "zero found")
        )
        checks.append(_jacobian_check(field, exp))

    extras = [pt for idx, pt in enumerate(found) if idx not in matched]
    checks.append(
        ConditionCheck(
            "no other zeros in the domain",
            not extras,
            "vanishing set matches" if not extras else f"extra zeros at {extras}",
        )
    )
    return ConditionReport(tuple(checks))


def _jacobian_check(field: PlanarVectorField, exp: ExpectedPoint) -> ConditionCheck:
    loc = (
        Fraction(exp.location[0]).limit_denominator(10**9),
        Fraction(exp.location[1]).limit_denominator(10**9),
    )
    jac = field.jacobian_at(loc)
    tau, det, disc = jac.tau, jac.delta, jac.discriminant
    evidence = f"tau={tau}, det={det}, tau^2-4det={disc}"
    if exp.kind == "saddle":
        return ConditionCheck(f"det(J) < 0 at {exp.location}", det < 0, evidence)
    if exp.kind == "center":
        return ConditionCheck(
            f"tr(J) = 0 and det(J) > 0 at {exp.location}",
            tau == 0 and det > 0,
            evidence,
        )
    if exp.kind == "focus":
        return ConditionCheck(
            f"focus signs at {exp.location}", det > 0 and disc < 0 and tau != 0, evidence
        )
    if exp.kind == "node":
        return ConditionCheck(
            f"node signs at {exp.location}", det > 0 and disc >= 0 and tau != 0, evidence
        )
    # cusp: nilpotent Jacobian with the normal-form table agreeing
    if not jac.is_nilpotent():
        return ConditionCheck(f"cusp at {exp.location}", False, evidence)
    try:
        label, data = classify_nilpotent(field, loc)
    except Exception as exc:  # noqa: BLE001 - evidence wants the reason
        return ConditionCheck(f"cusp at {exp.location}", False, str(exc))
    return ConditionCheck(
        f"cusp at {exp.location}",
        label is ClassificationLabel.CUSP,
        f"{evidence}; normal-form label {label.value} (k={data.k}, b_n={data.b_n})",
    )
