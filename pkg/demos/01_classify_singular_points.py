"""Classifying the singular points behind the fingerprint pattern classes.

Each built-in field carries the singularities of one Purkyne-Galton pattern:
the whorl wraps a center between two face-to-face cusps, the spiral swaps
the center for an unstable focus, the twist uses an improper node, and the
tented arch is a single cusp.  This demo surveys every template and prints
the full classification ladder per point: trace/determinant data, the
reversibility certificate, nilpotent normal-form exponents, the measured
sector profile and the winding index.
"""

from phaseprint import DomainU, TemplateId, survey_field, template

SQUARE = DomainU(-2, 2, -2, 2)

for tid in TemplateId:
    field, _ = template(tid)
    print(f"\n=== {tid.value}:  x' = {field.p.to_text()},  y' = {field.q.to_text()}")
    reports = survey_field(field, SQUARE)
    if not reports:
        print("    no singular points in the domain (pure translation flow)")
        continue
    for r in reports:
        jac = r.jacobian
        line = (
            f"    {r.label.value:22s} at {r.location}   "
            f"tau={jac.tau} delta={jac.delta}"
        )
        if r.reversible is not None:
            line += f"  reversible={r.reversible}"
        if r.nilpotent is not None:
            nil = r.nilpotent
            n_text = "inf" if nil.n is None else nil.n
            line += f"  k={nil.k} m={nil.m} a_k={nil.a_k} b_n={nil.b_n} n={n_text}"
        print(line)
        profile = r.profile
        print(
            f"        sectors: e={profile.e} h={profile.h} p={profile.p}"
            f"{' (rotational)' if profile.rotational else ''}"
            f"   index={r.index} (Bendixson {r.bendixson})"
        )
