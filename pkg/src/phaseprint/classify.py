"""Classification of singular points and empirical sector profiles.

Three layers, from cheapest to most general:

* ``classify_linear`` reads the trace-determinant diagram off an exact
  Jacobian (first-species points).
* ``classify_nilpotent`` applies the Andronov normal-form case table for a
  doubly-degenerate Jacobian on systems of the shape (y, Q(x, y)),
  extracting the leading exponents of Q = F(x) + y G(x) + y^2 R(x, y).
* ``sector_profile`` measures the hyperbolic/parabolic/elliptic sector
  decomposition empirically, by launching short test orbits from a ring of
  seeds and reading off the arcs of equal orbit fate.

Everything that feeds a sign test (Jacobian entries, leading coefficients,
characteristic-direction polynomials) is computed in exact rational
arithmetic; floating point only appears inside the test-orbit integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .errors import (
    JacobianNotNilpotent,
    NotInNormalForm,
    TooManyNearMisses,
    ZeroF,
)
from .flow import (
    FATE_BUDGET,
    FATE_EXIT,
    FATE_REACH,
    FATE_ROTATES,
    probe_ring,
    snap_to_exact,
)
from .polyfield import (
    BivariatePolynomial,
    JacobianData,
    PlanarVectorField,
    X,
    Y,
    split_xy,
)

__all__ = [
    "ClassificationLabel",
    "NilpotentData",
    "SectorProfile",
    "SectorConfig",
    "classify_linear",
    "classify_reversible",
    "classify_nilpotent",
    "characteristic_directions",
    "sector_profile",
    "exact_singular_point",
]


class ClassificationLabel(str, Enum):
    SADDLE = "Saddle"
    STABLE_NODE = "StableNode"
    UNSTABLE_NODE = "UnstableNode"
    IMPROPER_NODE_STABLE = "ImproperNodeStable"
    IMPROPER_NODE_UNSTABLE = "ImproperNodeUnstable"
    STABLE_FOCUS = "StableFocus"
    UNSTABLE_FOCUS = "UnstableFocus"
    CENTER = "Center"
    FOCUS_OR_CENTER = "FocusOrCenter"
    SADDLE_NODE = "SaddleNode"
    CUSP = "Cusp"
    ELLIPTIC_DOMAIN_POINT = "EllipticDomainPoint"
    DEGENERATE_UNRESOLVED = "DegenerateUnresolved"
    NON_SINGULAR = "NonSingular"


# Labels whose punctured neighborhood is a single rotational region: no
# characteristic orbit reaches the point, so the sector counts are e = h = 0.
ROTATIONAL_LABELS = frozenset(
    {
        ClassificationLabel.STABLE_FOCUS,
        ClassificationLabel.UNSTABLE_FOCUS,
        ClassificationLabel.CENTER,
        ClassificationLabel.FOCUS_OR_CENTER,
    }
)


def classify_linear(j: JacobianData) -> ClassificationLabel:
    """Trace-determinant classification of a nondegenerate linear part.

    The boundary parabola tau^2 = 4*delta distinguishes the star node
    (diagonalizable, J = (tau/2) I) from the improper node (a single
    eigendirection); both arise there, and only the star keeps the plain
    node label.  delta = 0 defers to the nilpotent classifier.
    """
    if j.delta < 0:
        return ClassificationLabel.SADDLE
    if j.delta == 0:
        return ClassificationLabel.DEGENERATE_UNRESOLVED
    if j.tau == 0:
        return ClassificationLabel.FOCUS_OR_CENTER
    if j.discriminant < 0:
        return (
            ClassificationLabel.UNSTABLE_FOCUS
            if j.tau > 0
            else ClassificationLabel.STABLE_FOCUS
        )
    if j.discriminant > 0:
        return (
            ClassificationLabel.UNSTABLE_NODE
            if j.tau > 0
            else ClassificationLabel.STABLE_NODE
        )
    (a, b), (c, d) = j.entries
    half_tau = j.tau / 2
    if b == 0 and c == 0 and a == half_tau and d == half_tau:
        return (
            ClassificationLabel.UNSTABLE_NODE
            if j.tau > 0
            else ClassificationLabel.STABLE_NODE
        )
    return (
        ClassificationLabel.IMPROPER_NODE_UNSTABLE
        if j.tau > 0
        else ClassificationLabel.IMPROPER_NODE_STABLE
    )


def exact_singular_point(
    field: PlanarVectorField, point
) -> tuple[Fraction, Fraction]:
    """Resolve `point` to an exact rational singular point of the field.

    Accepts exact rationals directly; floats are snapped to a nearby exact
    rational zero when one exists.  Raises ValueError otherwise, since the
    exact classifiers are meaningless at an inexact center.
    """
    x, y = point
    if isinstance(x, (int, Fraction)) and isinstance(y, (int, Fraction)):
        exact = (Fraction(x), Fraction(y))
        if not field.is_singular_at(exact):
            raise ValueError(f"{point} is not a singular point of the field")
        return exact
    snapped = snap_to_exact(field, (float(x), float(y)))
    if snapped is None:
        raise ValueError(
            f"{point} could not be identified with an exact rational zero"
        )
    return snapped


def classify_reversible(field: PlanarVectorField, point) -> bool:
    """Certificate that the recentered system is time-reversible.

    True when, after recentering at the singular point, either component
    symmetry holds coefficient-wise:

    * invariance under (t, y) -> (-t, -y):  P odd in y and Q even in y
      (which subsumes the pure form x' = y, y' = F(x)); or
    * invariance under (t, x) -> (-t, -x):  P even in x and Q odd in x.

    Either symmetry forces orbits to close around a linear center, so a
    FocusOrCenter label can be promoted to Center when this returns True.
    """
    center = exact_singular_point(field, point)
    local = field.recenter(center)

    def parity(poly: BivariatePolynomial, axis: int, want_odd: bool) -> bool:
        return all(
            (key[axis] % 2 == 1) == want_odd for key in poly.terms
        )

    y_symmetry = parity(local.p, 1, True) and parity(local.q, 1, False)
    x_symmetry = parity(local.p, 0, False) and parity(local.q, 0, True)
    return y_symmetry or x_symmetry


@dataclass(frozen=True)
class NilpotentData:
    """Leading data of the normal form y' = a_k x^k (1 + h) + b_n x^n y (1 + g) + y^2 R.

    ``n`` is None when G vanishes identically (the b_n = 0 case; the paper's
    +infinity sentinel).  ``lam`` is b_n^2 + 4 (m + 1) a_k, only defined for
    odd k = 2m + 1.
    """

    k: int
    m: int
    a_k: Fraction
    n: int | None
    b_n: Fraction
    lam: Fraction | None


def classify_nilpotent(
    field: PlanarVectorField, point
) -> tuple[ClassificationLabel, NilpotentData]:
    """Classify a doubly-degenerate singular point via the normal-form table.

    Requires the recentered field to read exactly (y, Q(x, y)) with a
    nilpotent nonzero Jacobian.  The label follows the case distinction on
    (sign of a_k, parity of k, b_n, n versus m, lambda); in the Node case
    the stability is decided by the sign of b_n.

    Raises
    ------
    NotInNormalForm
        If the recentered first component is not exactly y; the reduction
        of a general nilpotent linear part is out of scope and must be done
        by the caller.
    JacobianNotNilpotent
        If the recentered Jacobian has a nonzero eigenvalue.
    ZeroF
        If Q(x, 0) is identically zero (outside the a_k != 0 hypothesis).
    """
    center = exact_singular_point(field, point)
    local = field.recenter(center)
    if local.p != Y:
        raise NotInNormalForm(
            "recentered x' component must be exactly y; pre-rotate the field"
        )
    jac = local.jacobian_at((0, 0))
    if not jac.is_nilpotent():
        raise JacobianNotNilpotent(
            f"Jacobian has tau={jac.tau}, delta={jac.delta}; expected both zero"
        )
    f_part, g_part, _ = split_xy(local.q)
    if f_part.is_zero():
        raise ZeroF("Q(x, 0) vanishes identically; leading coefficient a_k undefined")

    k = f_part.lowest_degree
    a_k = f_part.coefficient(k, 0)
    if g_part.is_zero():
        n: int | None = None
        b_n = Fraction(0)
    else:
        n = g_part.lowest_degree
        b_n = g_part.coefficient(n, 0)

    if k % 2 == 0:
        m = k // 2
        data = NilpotentData(k=k, m=m, a_k=a_k, n=n, b_n=b_n, lam=None)
        if b_n == 0 or (n is not None and n >= m):
            return ClassificationLabel.CUSP, data
        return ClassificationLabel.SADDLE_NODE, data

    m = (k - 1) // 2
    lam = b_n * b_n + 4 * (m + 1) * a_k
    data = NilpotentData(k=k, m=m, a_k=a_k, n=n, b_n=b_n, lam=lam)
    if a_k > 0:
        return ClassificationLabel.SADDLE, data
    if b_n == 0 or (n is not None and (n > m or (n == m and lam < 0))):
        return ClassificationLabel.FOCUS_OR_CENTER, data
    # remaining: b_n != 0 with n < m, or n == m and lam >= 0
    if n % 2 == 0:
        return (
            ClassificationLabel.STABLE_NODE
            if b_n < 0
            else ClassificationLabel.UNSTABLE_NODE
        ), data
    return ClassificationLabel.ELLIPTIC_DOMAIN_POINT, data


# ---------------------------------------------------------------------------
# Characteristic directions
# ---------------------------------------------------------------------------
#
# Directions along which an orbit may reach the singular point are the real
# zero directions of the homogeneous polynomial
#
#     H(x, y) = x * Q_m(x, y) - y * P_m(x, y)
#
# built from the lowest-degree homogeneous parts of the recentered field
# ("standard" ordering).  The complementary "paper" ordering swaps the two
# components; the built-in template suite only behaves correctly (cusps show
# two hyperbolic sectors) under the standard ordering, which is therefore
# the default.  Roots are isolated exactly: an exact square-free reduction
# over the rationals removes multiple roots (tangential zeros that a plain
# sign-change scan on a grid would miss entirely), after which companion
# roots polish to full precision by Newton.


def _uni_trim(c: list[Fraction]) -> list[Fraction]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _uni_deriv(c: list[Fraction]) -> list[Fraction]:
    return [c[k] * k for k in range(1, len(c))]


def _uni_divmod(a: list[Fraction], b: list[Fraction]):
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    r = list(a)
    while len(r) >= len(b) and _uni_trim(r):
        shift = len(r) - len(b)
        factor = r[-1] / b[-1]
        q[shift] = factor
        for i, coeff in enumerate(b):
            r[i + shift] -= factor * coeff
        _uni_trim(r)
    return _uni_trim(q), r


def _uni_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = _uni_trim(list(a))
    b = _uni_trim(list(b))
    while b:
        _, r = _uni_divmod(a, b)
        a, b = b, _uni_trim(r)
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def _uni_square_free(c: list[Fraction]) -> list[Fraction]:
    c = _uni_trim(list(c))
    if len(c) <= 2:
        return c
    g = _uni_gcd(c, _uni_deriv(list(c)))
    if len(g) <= 1:
        return c
    q, _ = _uni_divmod(c, g)
    return q


def characteristic_directions(
    local_field: PlanarVectorField, ordering: str = "standard"
) -> list[float] | None:
    """Angles in [0, 2*pi) of candidate orbit-approach directions at the origin.

    `local_field` must already be recentered at the singular point.  Returns
    None when the direction polynomial vanishes identically (isotropic case,
    e.g. a star node), and an empty list when it has no real zero (focus or
    center behavior).
    """
    if ordering not in ("standard", "paper"):
        raise ValueError("ordering must be 'standard' or 'paper'")
    lows = [d for d in (local_field.p.lowest_degree, local_field.q.lowest_degree) if d >= 0]
    if not lows:
        raise ValueError("zero field has no direction structure")
    m0 = min(lows)
    if m0 == 0:
        raise ValueError("field does not vanish at the origin")
    p_m = local_field.p.homogeneous_part(m0)
    q_m = local_field.q.homogeneous_part(m0)
    if ordering == "standard":
        h_poly = X * q_m - Y * p_m
    else:
        h_poly = X * p_m - Y * q_m
    if h_poly.is_zero():
        return None

    d = m0 + 1
    # H(1, t) as a univariate polynomial in t = tan(theta)
    coeffs = [h_poly.coefficient(d - k, k) for k in range(d + 1)]
    half_angles: list[float] = []
    if coeffs[d] == 0:
        # the vertical direction (0, 1) lies in the zero set
        half_angles.append(math.pi / 2)
    square_free = _uni_square_free(coeffs)
    floats = np.array([float(c) for c in square_free])
    if len(floats) > 1:
        roots = np.roots(floats[::-1])
        desc = floats[::-1]
        desc_deriv = np.polyder(desc)
        for root in roots:
            if abs(root.imag) > 1e-7 * (1 + abs(root.real)):
                continue
            t = float(root.real)
            for _ in range(60):
                denom = np.polyval(desc_deriv, t)
                if denom == 0:
                    break
                step = np.polyval(desc, t) / denom
                t -= step
                if abs(step) <= 1e-15 * (1 + abs(t)):
                    break
            half_angles.append(math.atan(t) % math.pi)

    half_angles.sort()
    merged: list[float] = []
    for angle in half_angles:
        if not merged or angle - merged[-1] > 1e-9:
            merged.append(angle)
    if merged and merged[0] < 1e-9 and math.pi - merged[-1] < 1e-9:
        merged.pop()
    return sorted(merged + [a + math.pi for a in merged])


# ---------------------------------------------------------------------------
# Sector profile
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SectorProfile:
    """Observed sector decomposition around an isolated singular point.

    ``rotational`` marks focus/center behavior: a single rotational region
    without characteristic orbits, reported with e = h = p = 0 (its
    Bendixson index is 1).  For any profile measured by `sector_profile`,
    e and h have equal parity.
    """

    e: int
    h: int
    p: int
    directions: tuple[float, ...] = ()
    rotational: bool = False

    @property
    def parity_ok(self) -> bool:
        return (self.e - self.h) % 2 == 0

    @property
    def sectors(self) -> int:
        return self.e + self.h + self.p


@dataclass(frozen=True)
class SectorConfig:
    """Tolerances for the empirical sector census.

    A ring of `n_cells` seeds at the probe radius is integrated both ways;
    "reaches the singularity" means entering the disk of radius
    ``radius * reach_factor`` within the arclength budget
    ``radius * arclength_factor``, "exits" means leaving the disk of radius
    ``radius * exit_factor``.  Orbits that turn by more than `winding_limit`
    around the point are rotational evidence.
    """

    n_cells: int = 180
    reach_factor: float = 1 / 50
    exit_factor: float = 4.0
    arclength_factor: float = 20.0
    winding_limit: float = 2.2 * math.pi
    max_ambiguous_fraction: float = 0.25
    ordering: str = "standard"
    analytic_screen: bool = True
    rel_tol: float = 1e-8
    abs_tol: float = 1e-11
    angle_offset: float = 0.0123456


_ROTATIONAL_PROFILE = SectorProfile(e=0, h=0, p=0, directions=(), rotational=True)


def sector_profile(
    field: PlanarVectorField,
    point,
    radius: float = 0.1,
    config: SectorConfig = SectorConfig(),
) -> SectorProfile:
    """Count elliptic, hyperbolic and parabolic sectors around a singular point.

    The probe disk (``radius * exit_factor``) must contain no other singular
    point.  Points whose exact local data certify focus/center behavior
    (rotational neighborhoods) are screened analytically, since arbitrarily
    degenerate foci spiral too slowly for any finite orbit budget; all other
    points are measured by the ring census.

    Known limitation: sectors are separated either by a change of orbit fate
    along the ring or by a characteristic direction, so distinct sectors of
    the same type stacked on one tangent direction (e.g. the four sectors of
    a nilpotent saddle) are under-counted.  Every profile the classification
    table can name (cusp, saddle-node, elliptic domain, linear saddle, node,
    focus/center) is measured correctly.

    Raises
    ------
    TooManyNearMisses
        When too many test orbits stay ambiguous at the given tolerances, or
        rotational and sector-like behavior are mixed; the caller should
        shrink `radius` (or raise `n_cells`).
    """
    center = exact_singular_point(field, point)
    local = field.recenter(center)

    if config.analytic_screen and _screens_rotational(local):
        return _ROTATIONAL_PROFILE

    directions = characteristic_directions(local, config.ordering)
    if directions is not None and not directions:
        # no real characteristic direction: focus/center (NoDirections)
        return _ROTATIONAL_PROFILE
    isotropic = directions is None
    dir_tuple = () if isotropic else tuple(directions)

    n = config.n_cells
    angles = (2 * math.pi * (np.arange(n) + 0.5) / n + config.angle_offset) % (
        2 * math.pi
    )
    fates = probe_ring(
        field,
        (float(center[0]), float(center[1])),
        angles,
        radius,
        reach_radius=radius * config.reach_factor,
        exit_radius=radius * config.exit_factor,
        max_arclength=radius * config.arclength_factor,
        winding_limit=config.winding_limit,
        rel_tol=config.rel_tol,
        abs_tol=config.abs_tol,
    )

    cells = _cell_classes(fates)
    n_rot = cells.count("O")
    n_amb = cells.count("A")
    if n_rot:
        if n_rot + n_amb == n:
            return _ROTATIONAL_PROFILE
        raise TooManyNearMisses(
            "rotational and sector-like orbits mixed; shrink the probe radius"
        )
    if n_amb > config.max_ambiguous_fraction * n:
        raise TooManyNearMisses(
            f"{n_amb}/{n} test orbits stayed ambiguous; shrink the probe radius"
        )

    e, h, p = _count_sectors(
        cells, angles, [] if isotropic else list(directions), margin=1.5 * 2 * math.pi / n
    )
    profile = SectorProfile(e=e, h=h, p=p, directions=dir_tuple)
    if not profile.parity_ok:
        raise TooManyNearMisses(
            f"measured sector counts e={e}, h={h} violate the parity law; "
            "shrink the probe radius"
        )
    return profile


def _screens_rotational(local: PlanarVectorField) -> bool:
    """Exact certificate that the origin is focus/center-like."""
    jac = local.jacobian_at((0, 0))
    if jac.delta > 0 and (jac.tau == 0 or jac.discriminant < 0):
        return True
    if jac.is_nilpotent() and local.p == Y:
        try:
            label, _ = classify_nilpotent(
                PlanarVectorField(local.p, local.q), (0, 0)
            )
        except (NotInNormalForm, ZeroF, JacobianNotNilpotent):
            return False
        return label in ROTATIONAL_LABELS
    return False


def _cell_classes(fates: np.ndarray) -> list[str]:
    """Map (forward, backward) fates to sector classes per ring cell."""
    out = []
    for fwd, bwd in zip(fates[0], fates[1]):
        if FATE_ROTATES in (fwd, bwd):
            out.append("O")
        elif FATE_BUDGET in (fwd, bwd):
            out.append("A")
        elif fwd == FATE_REACH and bwd == FATE_REACH:
            out.append("E")
        elif fwd == FATE_EXIT and bwd == FATE_EXIT:
            out.append("H")
        else:
            out.append("P")
    return out


def _count_sectors(
    cells: list[str],
    angles: np.ndarray,
    directions: list[float],
    margin: float,
) -> tuple[int, int, int]:
    """Collapse ring cells into sectors.

    Maximal circular runs of one class are single sectors; ambiguous cells
    act as glue; single-cell runs are measurement noise and are demoted to
    ambiguous.  Hyperbolic and elliptic runs are additionally split at each
    characteristic direction lying at least `margin` inside the run, because
    a separatrix (or the shared boundary orbit of two petals) reaches the
    point along such a direction without changing the fate class on either
    side.  Parabolic runs never split: a characteristic direction inside a
    parabolic fan is an interior orbit, not a boundary.
    """
    n = len(cells)
    known = [i for i in range(n) if cells[i] != "A"]
    if not known:
        raise TooManyNearMisses("every test orbit stayed ambiguous")

    # circular run-length encoding over non-ambiguous cells
    runs: list[list] = []  # [class, first_idx, last_idx]
    for i in known:
        if runs and runs[-1][0] == cells[i]:
            runs[-1][2] = i
        else:
            runs.append([cells[i], i, i])
    if len(runs) > 1 and runs[0][0] == runs[-1][0]:
        runs[0][1] = runs[-1][1]  # wrapped run: starts at the tail block
        runs.pop()

    # single-cell runs are noise: demote and re-merge neighbors
    def cell_count(run) -> int:
        first, last = run[1], run[2]
        return (last - first) % n + 1

    filtered = [r for r in runs if cell_count(r) > 1]
    if not filtered:
        raise TooManyNearMisses("sector runs too fragmented to count")
    merged: list[list] = []
    for run in filtered:
        if merged and merged[-1][0] == run[0]:
            merged[-1][2] = run[2]
        else:
            merged.append(run)
    if len(merged) > 1 and merged[0][0] == merged[-1][0]:
        merged[0][1] = merged[-1][1]
        merged.pop()

    two_pi = 2 * math.pi
    counts = {"E": 0, "H": 0, "P": 0}
    full_circle = len(merged) == 1
    for run in merged:
        cls = run[0]
        sectors = 1
        if cls in ("E", "H") and directions:
            if full_circle:
                sectors = max(1, len(directions))
            else:
                start = angles[run[1]]
                span = (angles[run[2]] - start) % two_pi
                interior = 0
                for theta in directions:
                    offset = (theta - start) % two_pi
                    if margin <= offset <= span - margin:
                        interior += 1
                sectors = 1 + interior
        counts[cls] += sectors
    return counts["E"], counts["H"], counts["P"]
