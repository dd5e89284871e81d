"""Full per-point analysis: location, classification, sectors and index.

This is the pipeline behind the `classify` command: find zeros, classify
each through the linear / reversibility / normal-form ladder, measure the
sector profile, and cross-check the Bendixson count against the winding
number on a small circle.  Everything is gathered into one serializable
report per point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .classify import (
    ClassificationLabel,
    NilpotentData,
    SectorConfig,
    SectorProfile,
    classify_linear,
    classify_nilpotent,
    classify_reversible,
    sector_profile,
)
from .errors import (
    JacobianNotNilpotent,
    NotInNormalForm,
    NumericalError,
    PhaseprintError,
    ZeroF,
)
from .flow import DomainU, find_singularities, snap_to_exact
from .index import ContourSpec, bendixson_index, winding_index
from .polyfield import JacobianData, PlanarVectorField

__all__ = ["SingularityReport", "classify_point", "survey_field", "SurveyReport"]


@dataclass(frozen=True)
class SingularityReport:
    """Everything measured about one singular point."""

    location: tuple[float, float]
    location_exact: tuple[Fraction, Fraction] | None
    label: ClassificationLabel
    jacobian: JacobianData | None
    reversible: bool | None
    nilpotent: NilpotentData | None
    profile: SectorProfile | None
    index: int | None
    bendixson: Fraction | None
    index_consistent: bool | None
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        jac = self.jacobian
        nil = self.nilpotent
        n_value: object = None
        lam: object = None
        if nil is not None:
            n_value = "inf" if nil.n is None else nil.n
            lam = None if nil.lam is None else str(nil.lam)
        return {
            "location": [self.location[0], self.location[1]],
            "location_exact": None
            if self.location_exact is None
            else [str(v) for v in self.location_exact],
            "label": self.label.value,
            "tau": None if jac is None else str(jac.tau),
            "delta": None if jac is None else str(jac.delta),
            "discriminant": None if jac is None else str(jac.discriminant),
            "reversible": self.reversible,
            "k": None if nil is None else nil.k,
            "m": None if nil is None else nil.m,
            "n": n_value,
            "a_k": None if nil is None else str(nil.a_k),
            "b_n": None if nil is None else str(nil.b_n),
            "lambda": lam,
            "sectors": None
            if self.profile is None
            else {"e": self.profile.e, "h": self.profile.h, "p": self.profile.p},
            "rotational": None if self.profile is None else self.profile.rotational,
            "directions": None
            if self.profile is None
            else [round(d, 12) for d in self.profile.directions],
            "index": self.index,
            "bendixson": None if self.bendixson is None else str(self.bendixson),
            "index_consistent": self.index_consistent,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class SurveyReport:
    field_text: str
    domain: DomainU
    ordering: str
    points: tuple[SingularityReport, ...]

    @property
    def has_issues(self) -> bool:
        return any(r.notes for r in self.points)

    def to_dict(self) -> dict:
        return {
            "field": self.field_text,
            "domain": list(self.domain.as_tuple()),
            "direction_ordering": self.ordering,
            "points": [r.to_dict() for r in self.points],
        }


def classify_point(
    field: PlanarVectorField,
    point,
    radius: float = 0.1,
    config: SectorConfig = SectorConfig(),
) -> SingularityReport:
    """Classify one singular point through the full ladder.

    Order of attack: exact Jacobian sign tests; reversibility certificate to
    promote FocusOrCenter to Center; the nilpotent normal-form table when
    the linear part is doubly degenerate; then the empirical sector profile
    and a small-circle winding index, cross-checked via Bendixson.
    """
    notes: list[str] = []
    exact = _resolve_exact(field, point)
    location = (float(point[0]), float(point[1]))
    if exact is not None:
        location = (float(exact[0]), float(exact[1]))

    probe = exact if exact is not None else (
        Fraction(location[0]),
        Fraction(location[1]),
    )
    if exact is None:
        fx, fy = field.evaluate(location)
        if math.hypot(fx, fy) > 1e-9:
            return SingularityReport(
                location=location,
                location_exact=None,
                label=ClassificationLabel.NON_SINGULAR,
                jacobian=field.jacobian_at(probe),
                reversible=None,
                nilpotent=None,
                profile=None,
                index=None,
                bendixson=None,
                index_consistent=None,
                notes=("field does not vanish here",),
            )
        notes.append("no exact rational zero found; Jacobian taken at the float point")

    jac = field.jacobian_at(probe)
    label = classify_linear(jac)
    reversible: bool | None = None
    nilpotent: NilpotentData | None = None

    if label is ClassificationLabel.FOCUS_OR_CENTER and exact is not None:
        reversible = classify_reversible(field, exact)
        if reversible:
            label = ClassificationLabel.CENTER

    if label is ClassificationLabel.DEGENERATE_UNRESOLVED and exact is not None:
        try:
            label, nilpotent = classify_nilpotent(field, exact)
        except JacobianNotNilpotent:
            notes.append("one zero eigenvalue only; outside the nilpotent table")
        except NotInNormalForm:
            notes.append("not in (y, Q(x, y)) shape; pre-rotation needed")
        except ZeroF:
            notes.append("Q(x, 0) identically zero; outside the table hypotheses")
        if label is ClassificationLabel.FOCUS_OR_CENTER and exact is not None:
            reversible = classify_reversible(field, exact)
            if reversible:
                label = ClassificationLabel.CENTER

    profile: SectorProfile | None = None
    bendixson_value: Fraction | None = None
    if exact is not None:
        try:
            profile = sector_profile(field, exact, radius=radius, config=config)
            bendixson_value = bendixson_index(profile).value
        except (NumericalError, ValueError) as exc:
            notes.append(f"sector profile unavailable: {exc}")
    else:
        notes.append("sector profile skipped at inexact point")

    index_value: int | None = None
    consistent: bool | None = None
    try:
        winding = winding_index(
            field, ContourSpec.circle(location[0], location[1], radius)
        )
        index_value = int(winding)
    except PhaseprintError as exc:
        notes.append(f"winding index unavailable: {exc}")
    if index_value is not None and bendixson_value is not None:
        consistent = bendixson_value == index_value

    return SingularityReport(
        location=location,
        location_exact=exact,
        label=label,
        jacobian=jac,
        reversible=reversible,
        nilpotent=nilpotent,
        profile=profile,
        index=index_value,
        bendixson=bendixson_value,
        index_consistent=consistent,
        notes=tuple(notes),
    )


def _resolve_exact(field, point) -> tuple[Fraction, Fraction] | None:
    x, y = point
    if isinstance(x, (int, Fraction)) and isinstance(y, (int, Fraction)):
        exact = (Fraction(x), Fraction(y))
        return exact if field.is_singular_at(exact) else None
    return snap_to_exact(field, (float(x), float(y)))


def survey_field(
    field: PlanarVectorField,
    domain: DomainU,
    config: SectorConfig = SectorConfig(),
    base_radius: float = 0.1,
) -> list[SingularityReport]:
    """Find and classify every singular point of the field in a domain.

    The sector/winding probe radius shrinks to a fifth of the distance to
    the nearest other singularity so the probe disks stay disjoint.
    """
    points = find_singularities(field, domain)
    reports = []
    for i, pt in enumerate(points):
        radius = base_radius
        for j, other in enumerate(points):
            if i != j:
                gap = math.hypot(
                    float(pt[0]) - float(other[0]), float(pt[1]) - float(other[1])
                )
                radius = min(radius, 0.2 * gap)
        reports.append(classify_point(field, pt, radius=radius, config=config))
    return reports
