"""Synthesizing normal forms as Hermite interpolation problems.

To put a center at the origin and cusps at (+-1, 0), it is enough to choose
the ridge profile f with a simple root at 0 (f'(0) = -1 keeps the rotation
direction) and double roots at +-1 whose second derivatives have prescribed
signs.  The solver pins the free constants from the equality constraints in
exact rational arithmetic and then verifies the inequalities; the resulting
system (y, f(x)) is certified post hoc against its prescribed singularity
data.
"""

from fractions import Fraction

from phaseprint import (
    DomainU,
    HermiteConstraint,
    PI_APPROX,
    assemble_field,
    conserved_energy,
    hermite_solve,
    verify_conditions,
)
from phaseprint.normalform import ExpectedPoint, check_derivative_constraints

print("--- The whorl ridge profile")
constraints = [
    HermiteConstraint(0, 1, ((1, "=", -1),)),
    HermiteConstraint(1, 2, ((2, "<", 0),)),
    HermiteConstraint(-1, 2, ((2, ">", 0),)),
]
profile = hermite_solve(constraints)
print(f"    f(x) = {profile.to_text()}")
for check in check_derivative_constraints(profile, constraints):
    print(f"    {check}  [{'ok' if check.satisfied else 'VIOLATED'}]")

field = assemble_field(profile)
print(f"    field: ({field.p.to_text()}, {field.q.to_text()})")
report = verify_conditions(
    field,
    DomainU(-2, 2, -2, 2),
    [
        ExpectedPoint((0, 0), "center"),
        ExpectedPoint((1, 0), "cusp"),
        ExpectedPoint((-1, 0), "cusp"),
    ],
)
for check in report.checks:
    print(f"    {'PASS' if check.passed else 'FAIL'}  {check.description}")
print(f"    conserved energy: {conserved_energy(field).to_text()}")

print("\n--- A polynomial pendulum (centers and saddles, pi as 355/113)")
p = PI_APPROX
pendulum = hermite_solve(
    [
        HermiteConstraint(0, 1, ((1, "=", -1),)),
        HermiteConstraint(p, 1, ((1, ">", 0),)),
        HermiteConstraint(-p, 1, ((1, ">", 0),)),
    ]
)
print(f"    f(x) = {pendulum.to_text()}")
print(f"         = x (x^2 - pi^2)/pi^2 with pi ~ {p} = {float(p):.9f}")
report = verify_conditions(
    assemble_field(pendulum),
    DomainU(-4, 4, -4, 4),
    [
        ExpectedPoint((0, 0), "center"),
        ExpectedPoint((float(p), 0), "saddle"),
        ExpectedPoint((-float(p), 0), "saddle"),
    ],
)
print(f"    conditions (vanishing set + Jacobian signs): "
      f"{'all pass' if report.all_passed else 'FAILED'}")

print("\n--- Contradictory sign constraints are reported, not forced")
from phaseprint.errors import InfeasibleInequalities

try:
    hermite_solve(
        [
            HermiteConstraint(0, 1, ((1, "=", -1),)),
            HermiteConstraint(1, 2, ((2, ">", Fraction(0)),)),
        ]
    )
except InfeasibleInequalities as exc:
    print(f"    InfeasibleInequalities: {exc}")
