"""Poincaré index machinery: winding numbers along Jordan curves, the
Bendixson sector formula, and connexion feasibility on closed surfaces.

The winding index is computed by accumulating the turning angle of the
field along a discretized contour, doubling the sample count until every
per-step turn is below pi/2; branch tracking is then unambiguous and the
accumulated angle is an exact multiple of 2*pi up to a residual that is
asserted small.  This gives an integer certificate rather than a quadrature
estimate of the index line integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .classify import ClassificationLabel, SectorProfile
from .errors import NoConvergence, UnknownIndex, ZeroOnContour
from .flow import DomainU
from .polyfield import PlanarVectorField

__all__ = [
    "ContourSpec",
    "IndexMethod",
    "IndexValue",
    "ConnexionCheck",
    "INDEX_TABLE",
    "winding_index",
    "bendixson_index",
    "delta_feasibility",
    "DeltaVerdict",
    "connexion_check",
    "enclosed_index_sum",
    "EnclosedIndexReport",
]


@dataclass(frozen=True)
class ContourSpec:
    """Closed positively-oriented Jordan curve along which to track the field.

    kind "circle" takes params (cx, cy, radius); "rectangle" takes
    (x_min, x_max, y_min, y_max); "polyline" takes an (n, 2) vertex loop
    (closing edge implied).  `samples` is the initial discretization.
    """

    kind: str
    params: tuple
    samples: int = 256

    def __post_init__(self) -> None:
        if self.kind not in ("circle", "rectangle", "polyline"):
            raise ValueError(f"unknown contour kind {self.kind!r}")
        if self.samples < 8:
            raise ValueError("need at least 8 samples")

    @staticmethod
    def circle(cx: float, cy: float, radius: float, samples: int = 256) -> "ContourSpec":
        if radius <= 0:
            raise ValueError("radius must be positive")
        return ContourSpec("circle", (cx, cy, radius), samples)

    @staticmethod
    def rectangle(
        x_min: float, x_max: float, y_min: float, y_max: float, samples: int = 256
    ) -> "ContourSpec":
        if not (x_min < x_max and y_min < y_max):
            raise ValueError("rectangle must have nonempty interior")
        return ContourSpec("rectangle", (x_min, x_max, y_min, y_max), samples)

    @staticmethod
    def from_domain(domain: DomainU, samples: int = 256) -> "ContourSpec":
        return ContourSpec.rectangle(*domain.as_tuple(), samples=samples)

    @staticmethod
    def polyline(vertices: Sequence[tuple[float, float]], samples: int = 256) -> "ContourSpec":
        pts = tuple((float(x), float(y)) for x, y in vertices)
        if len(pts) < 3:
            raise ValueError("polyline loop needs at least 3 vertices")
        return ContourSpec("polyline", pts, samples)

    def points(self, n: int) -> np.ndarray:
        """n points along the curve at equal parameter spacing, CCW."""
        t = np.arange(n) / n
        if self.kind == "circle":
            cx, cy, r = self.params
            ang = 2 * math.pi * t
            return np.column_stack([cx + r * np.cos(ang), cy + r * np.sin(ang)])
        if self.kind == "rectangle":
            x0, x1, y0, y1 = self.params
            loop = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
        else:
            loop = np.array(self.params, dtype=float)
        edges = np.vstack([loop, loop[:1]])
        seg = np.diff(edges, axis=0)
        lengths = np.hypot(seg[:, 0], seg[:, 1])
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        total = cum[-1]
        s = t * total
        idx = np.minimum(np.searchsorted(cum, s, side="right") - 1, len(seg) - 1)
        local = (s - cum[idx]) / lengths[idx]
        return edges[idx] + seg[idx] * local[:, None]


class IndexMethod(str, Enum):
    WINDING = "Winding"
    BENDIXSON = "Bendixson"
    TABLE_LOOKUP = "TableLookup"


@dataclass(frozen=True)
class IndexValue:
    """An index with the method that produced it.

    Winding values are exact integers; Bendixson values are exact rationals
    and a half-integer marks a structurally infeasible sector profile.
    """

    value: Fraction
    method: IndexMethod
    residual: float = 0.0

    def __post_init__(self) -> None:
        if self.method is IndexMethod.WINDING and self.value.denominator != 1:
            raise ValueError("winding indices are integers")

    @property
    def is_integer(self) -> bool:
        return self.value.denominator == 1

    def __int__(self) -> int:
        if not self.is_integer:
            raise ValueError(f"index {self.value} is not an integer")
        return int(self.value)


def winding_index(
    field: PlanarVectorField,
    contour: ContourSpec,
    zero_tol: float = 1e-9,
    residual_tol: float = 1e-6,
    max_samples: int = 2**20,
) -> IndexValue:
    """Winding number of the field direction along a closed contour.

    Sample counts are doubled until every per-step turning angle is under
    pi/2, which pins the branch of the angle increment; the total is then
    an integer multiple of 2*pi up to `residual_tol`.

    Raises
    ------
    ZeroOnContour
        If the sampled field magnitude drops below `zero_tol`.
    NoConvergence
        If the per-step criterion is still violated at `max_samples`.
    """
    n = contour.samples
    while True:
        pts = contour.points(n)
        fx, fy = field.evaluate_array(pts[:, 0], pts[:, 1])
        fx = np.asarray(fx, dtype=float)
        fy = np.asarray(fy, dtype=float)
        if float(np.min(np.hypot(fx, fy))) <= zero_tol:
            raise ZeroOnContour(
                "field magnitude fell below tolerance on the contour"
            )
        fx2, fy2 = np.roll(fx, -1), np.roll(fy, -1)
        cross = fx * fy2 - fy * fx2
        dot = fx * fx2 + fy * fy2
        steps = np.arctan2(cross, dot)
        if float(np.max(np.abs(steps))) < math.pi / 2:
            total = float(np.sum(steps)) / (2 * math.pi)
            nearest = round(total)
            residual = abs(total - nearest)
            if residual > residual_tol:
                raise NoConvergence(
                    f"winding residual {residual:.3g} exceeds {residual_tol:.3g}"
                )
            return IndexValue(Fraction(nearest), IndexMethod.WINDING, residual)
        if n >= max_samples:
            raise NoConvergence(
                f"per-step angle criterion unmet at {max_samples} samples"
            )
        n *= 2


def bendixson_index(profile: SectorProfile) -> IndexValue:
    """Index from sector counts: 1 + (e - h)/2, as an exact rational.

    A non-integer value certifies that no smooth planar field realizes the
    profile (e and h must share parity)."""
    value = 1 + Fraction(profile.e - profile.h, 2)
    return IndexValue(value, IndexMethod.BENDIXSON)


@dataclass(frozen=True)
class DeltaVerdict:
    """Outcome of the all-hyperbolic-sector realizability test."""

    h_sectors: int
    all_hyperbolic: bool
    feasible: bool
    bendixson: Fraction


def delta_feasibility(h_sectors: int, all_hyperbolic: bool) -> DeltaVerdict:
    """Can a singular point consist of `h_sectors` sectors, all hyperbolic?

    An odd number of purely hyperbolic sectors is impossible (this is the
    obstruction that bars a triangular fingerprint delta from being a
    smooth equilibrium); the half-integer Bendixson value is the evidence.
    """
    if h_sectors < 0:
        raise ValueError("sector count must be nonnegative")
    value = 1 + Fraction(0 - h_sectors, 2)
    infeasible = all_hyperbolic and h_sectors % 2 == 1
    return DeltaVerdict(
        h_sectors=h_sectors,
        all_hyperbolic=all_hyperbolic,
        feasible=not infeasible,
        bendixson=value,
    )


# Per-label point indices; DegenerateUnresolved and NonSingular carry none.
INDEX_TABLE: dict[ClassificationLabel, int] = {
    ClassificationLabel.SADDLE: -1,
    ClassificationLabel.STABLE_NODE: 1,
    ClassificationLabel.UNSTABLE_NODE: 1,
    ClassificationLabel.IMPROPER_NODE_STABLE: 1,
    ClassificationLabel.IMPROPER_NODE_UNSTABLE: 1,
    ClassificationLabel.STABLE_FOCUS: 1,
    ClassificationLabel.UNSTABLE_FOCUS: 1,
    ClassificationLabel.CENTER: 1,
    ClassificationLabel.FOCUS_OR_CENTER: 1,
    ClassificationLabel.SADDLE_NODE: 0,
    ClassificationLabel.CUSP: 0,
    ClassificationLabel.ELLIPTIC_DOMAIN_POINT: 1,
}

_HYPERBOLIC = {
    ClassificationLabel.SADDLE,
    ClassificationLabel.STABLE_NODE,
    ClassificationLabel.UNSTABLE_NODE,
    ClassificationLabel.IMPROPER_NODE_STABLE,
    ClassificationLabel.IMPROPER_NODE_UNSTABLE,
    ClassificationLabel.STABLE_FOCUS,
    ClassificationLabel.UNSTABLE_FOCUS,
}

_NODES = {
    ClassificationLabel.STABLE_NODE,
    ClassificationLabel.UNSTABLE_NODE,
    ClassificationLabel.IMPROPER_NODE_STABLE,
    ClassificationLabel.IMPROPER_NODE_UNSTABLE,
}
_FOCI = {ClassificationLabel.STABLE_FOCUS, ClassificationLabel.UNSTABLE_FOCUS}


@dataclass(frozen=True)
class ConnexionCheck:
    """Feasibility of assembling given singularities on a genus-p surface.

    `feasible` iff the total index equals the Euler characteristic
    2(1 - p).  For all-hyperbolic inputs, `corollary` carries the
    node/focus/saddle counts of the identity n + f - s = 2(1 - p).
    """

    genus: int
    singularities: tuple
    indices: tuple[Fraction, ...]
    total_index: Fraction
    euler: int
    feasible: bool
    corollary: dict | None = None


def _normalize_label(entry) -> ClassificationLabel | None:
    if isinstance(entry, ClassificationLabel):
        return entry
    if isinstance(entry, str):
        text = entry.strip().lower().replace("-", "").replace("_", "").replace(" ", "")
        aliases = {
            "node": ClassificationLabel.UNSTABLE_NODE,
            "focus": ClassificationLabel.UNSTABLE_FOCUS,
            "improprernode": ClassificationLabel.IMPROPER_NODE_UNSTABLE,
            "impropernode": ClassificationLabel.IMPROPER_NODE_UNSTABLE,
            "ellipticdomain": ClassificationLabel.ELLIPTIC_DOMAIN_POINT,
        }
        if text in aliases:
            return aliases[text]
        for label in ClassificationLabel:
            if label.value.lower() == text:
                return label
        raise UnknownIndex(f"unrecognized singularity label {entry!r}")
    return None


def connexion_check(singularities: Iterable, genus: int) -> ConnexionCheck:
    """Test the index-sum obstruction for a multiset of singularities.

    Entries are classification labels (enum members or names; bare "node",
    "focus" count as their unstable variants, the index being
    stability-blind) or explicit integer indices.

    Raises
    ------
    UnknownIndex
        For labels without a table entry (e.g. DegenerateUnresolved) and no
        explicit index.
    """
    if genus < 0:
        raise ValueError("genus must be a nonnegative integer")
    entries = tuple(singularities)
    indices: list[Fraction] = []
    labels: list[ClassificationLabel | None] = []
    for entry in entries:
        if isinstance(entry, bool):
            raise UnknownIndex(f"cannot interpret {entry!r} as a singularity")
        if isinstance(entry, int):
            indices.append(Fraction(entry))
            labels.append(None)
            continue
        label = _normalize_label(entry)
        if label is None or label not in INDEX_TABLE:
            raise UnknownIndex(f"no table index for {entry!r}")
        indices.append(Fraction(INDEX_TABLE[label]))
        labels.append(label)

    total = sum(indices, Fraction(0))
    euler = 2 * (1 - genus)
    feasible = total == euler and all(v.denominator == 1 for v in indices)

    corollary = None
    if entries and all(lab is not None and lab in _HYPERBOLIC for lab in labels):
        n_nodes = sum(lab in _NODES for lab in labels)
        n_foci = sum(lab in _FOCI for lab in labels)
        n_saddles = sum(lab is ClassificationLabel.SADDLE for lab in labels)
        corollary = {
            "nodes": n_nodes,
            "foci": n_foci,
            "saddles": n_saddles,
            "lhs": n_nodes + n_foci - n_saddles,
            "rhs": euler,
            "holds": n_nodes + n_foci - n_saddles == euler,
        }

    return ConnexionCheck(
        genus=genus,
        singularities=entries,
        indices=tuple(indices),
        total_index=total,
        euler=euler,
        feasible=feasible,
        corollary=corollary,
    )


@dataclass(frozen=True)
class EnclosedIndexReport:
    boundary_index: int
    point_indices: tuple[int, ...]
    points: tuple
    consistent: bool


def enclosed_index_sum(
    field: PlanarVectorField,
    contour: ContourSpec,
    known_points: Sequence[tuple[float, float]],
    point_radius: float | None = None,
) -> EnclosedIndexReport:
    """Check that the boundary winding equals the sum of per-point windings.

    Each known point gets a small circle (radius `point_radius`, default a
    quarter of the least separation between points, capped at 0.1); the
    report carries both sides so the caller can see the split.
    """
    pts = [(float(x), float(y)) for x, y in known_points]
    boundary = winding_index(field, contour)
    radius = point_radius
    if radius is None:
        radius = 0.1
        for i, a in enumerate(pts):
            for b in pts[i + 1 :]:
                radius = min(radius, 0.25 * math.hypot(a[0] - b[0], a[1] - b[1]))
    per_point = [
        int(winding_index(field, ContourSpec.circle(x, y, radius)))
        for x, y in pts
    ]
    total = sum(per_point)
    return EnclosedIndexReport(
        boundary_index=int(boundary),
        point_indices=tuple(per_point),
        points=tuple(pts),
        consistent=int(boundary) == total,
    )
