"""Phase-portrait models of fingerprint patterns.

A library for the planar-dynamical-systems reading of Arch-Loop-Whorl
fingerprint classes: exact bivariate polynomial vector fields, singular
point classification (trace-determinant diagram, reversibility, nilpotent
normal-form table), Poincaré index theory with connexion feasibility,
Hermite-interpolated normal forms, trajectory integration and orientation
field sampling.  The `phaseprint` CLI exposes the same operations as
reproducible commands.
"""

from __future__ import annotations

from .classify import (
    ClassificationLabel,
    NilpotentData,
    SectorConfig,
    SectorProfile,
    characteristic_directions,
    classify_linear,
    classify_nilpotent,
    classify_reversible,
    sector_profile,
)
from .flow import (
    DomainU,
    IntegrationSettings,
    OrientationField,
    Polyline,
    PortraitSpec,
    Seed,
    Termination,
    find_singularities,
    integrate,
    orientation_field,
    phase_portrait,
)
from .index import (
    ConnexionCheck,
    ContourSpec,
    IndexValue,
    bendixson_index,
    connexion_check,
    delta_feasibility,
    enclosed_index_sum,
    winding_index,
)
from .normalform import (
    PI_APPROX,
    HermiteConstraint,
    TemplateId,
    assemble_field,
    conserved_energy,
    hermite_solve,
    pendulum_surrogate,
    template,
    verify_conditions,
)
from .polyfield import (
    BivariatePolynomial,
    JacobianData,
    PlanarVectorField,
    parse_field,
    parse_polynomial,
    split_xy,
)
from .report import SingularityReport, classify_point, survey_field

__version__ = "0.1.0"

__all__ = [
    "BivariatePolynomial",
    "ClassificationLabel",
    "ConnexionCheck",
    "ContourSpec",
    "DomainU",
    "HermiteConstraint",
    "IndexValue",
    "IntegrationSettings",
    "JacobianData",
    "NilpotentData",
    "OrientationField",
    "PI_APPROX",
    "PlanarVectorField",
    "Polyline",
    "PortraitSpec",
    "SectorConfig",
    "SectorProfile",
    "Seed",
    "SingularityReport",
    "TemplateId",
    "Termination",
    "assemble_field",
    "bendixson_index",
    "characteristic_directions",
    "classify_linear",
    "classify_nilpotent",
    "classify_point",
    "classify_reversible",
    "connexion_check",
    "conserved_energy",
    "delta_feasibility",
    "enclosed_index_sum",
    "find_singularities",
    "hermite_solve",
    "integrate",
    "orientation_field",
    "parse_field",
    "parse_polynomial",
    "pendulum_surrogate",
    "phase_portrait",
    "sector_profile",
    "split_xy",
    "survey_field",
    "template",
    "verify_conditions",
    "winding_index",
]
