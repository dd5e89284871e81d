"""Why no smooth planar field can realize a fingerprint delta.

A delta looks like an equilibrium with three hyperbolic sectors.  The sector
parity law (e and h share parity, equivalently the Bendixson index
1 + (e-h)/2 is an integer) rules that out: three all-hyperbolic sectors
would carry the half-integer index -1/2.  The winding number machinery makes
the same indices measurable along contours, and the Poincare index theorem
turns them into a global feasibility test for assembling singularities on a
closed surface.
"""

from phaseprint import (
    ContourSpec,
    ClassificationLabel,
    connexion_check,
    delta_feasibility,
    enclosed_index_sum,
    parse_field,
    sector_profile,
    template,
    winding_index,
)
from phaseprint.index import bendixson_index

print("--- The delta obstruction")
for h in (2, 3, 4, 5):
    verdict = delta_feasibility(h, all_hyperbolic=True)
    print(
        f"    {h} all-hyperbolic sectors: Bendixson index {verdict.bendixson}"
        f" -> {'feasible' if verdict.feasible else 'IMPOSSIBLE'}"
    )

print("\n--- Winding numbers agree with sector counts")
for text, name in [
    ("x ; -y", "linear saddle"),
    ("y ; x^2", "cusp"),
    ("x^2 ; y", "saddle-node"),
    ("y ; -x^3 + 4*x*y", "elliptic-domain point"),
]:
    field = parse_field(text)
    profile = sector_profile(field, (0, 0))
    widx = winding_index(field, ContourSpec.circle(0, 0, 0.1))
    print(
        f"    {name:22s} e={profile.e} h={profile.h} p={profile.p}"
        f"  Bendixson={bendixson_index(profile).value}  winding={int(widx)}"
    )

print("\n--- Boundary winding equals the sum of enclosed indices")
whorl, _ = template("whorl")
report = enclosed_index_sum(
    whorl, ContourSpec.rectangle(-2, 2, -2, 2), [(-1, 0), (0, 0), (1, 0)]
)
print(f"    whorl on [-2,2]^2: boundary {report.boundary_index}"
      f" = sum{report.point_indices}")

print("\n--- Connexion feasibility on closed surfaces")
cases = [
    (["node", "node", "focus", "saddle"], 0),
    (["center", "cusp", "cusp"], 0),
    (["node", "saddle"], 1),
    ([ClassificationLabel.ELLIPTIC_DOMAIN_POINT, "node"], 0),
]
for entries, genus in cases:
    result = connexion_check(entries, genus)
    names = ",".join(
        e.value if isinstance(e, ClassificationLabel) else str(e) for e in entries
    )
    print(
        f"    genus {genus}: {{{names}}} -> total index {result.total_index}"
        f" vs Euler {result.euler}: "
        f"{'feasible' if result.feasible else 'infeasible'}"
    )
print("    (the whorl's {center, 2 cusps} sums to 1, so it can live on a"
      " bounded patch but never on the sphere)")
