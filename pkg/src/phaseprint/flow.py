"""Numerical flow machinery: singularity finding, trajectory integration,
seeded phase portraits and orientation-field sampling.

The integrator is an embedded Dormand-Prince 5(4) pair with adaptive steps.
Arclength is carried as a third state component, so arclength budgets and
back-and-forth reversibility checks stop at exact arclength values.  Event
locations (domain exit, approach to a known singular point, first return to
the seed) are refined by bisection over a single re-taken Runge-Kutta step.

A portrait in this package is seed-relative: it is the union of the
trajectories through an explicit seed list clipped to a compact rectangle,
and seeds may individually be excluded to delete chosen trajectories (the
oblique-stria idiom).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import NonIsolatedZeroSet, NumericalError
from .polyfield import PlanarVectorField

__all__ = [
    "DomainU",
    "Seed",
    "PortraitSpec",
    "Termination",
    "Polyline",
    "IntegrationSettings",
    "OrientationField",
    "find_singularities",
    "snap_to_exact",
    "integrate",
    "phase_portrait",
    "orientation_field",
    "portrait_to_svg",
    "portrait_to_csv",
    "orientation_to_csv",
    "orientation_to_pgm",
]

Point = tuple


@dataclass(frozen=True)
class DomainU:
    """Compact axis-aligned rectangle acting as the restricted phase space."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self) -> None:
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("domain rectangle must have nonempty interior")

    def contains(self, x: float, y: float, slack: float = 0.0) -> bool:
        return (
            self.x_min - slack <= x <= self.x_max + slack
            and self.y_min - slack <= y <= self.y_max + slack
        )

    def boundary_distance(self, x: float, y: float) -> float:
        """Signed distance to the boundary: positive inside, negative outside."""
        return min(
            x - self.x_min, self.x_max - x, y - self.y_min, self.y_max - y
        )

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x_min, self.x_max, self.y_min, self.y_max)


class Termination(str, Enum):
    """Why a trajectory stopped.

    STEP_UNDERFLOW is reported on the polyline rather than raised, so one bad
    trajectory never aborts a whole portrait.
    """

    EXITED_DOMAIN = "ExitedDomain"
    REACHED_SINGULARITY = "ReachedSingularity"
    ARCLENGTH_BUDGET = "ArclengthBudget"
    CLOSED_ORBIT = "ClosedOrbit"
    STEP_UNDERFLOW = "StepUnderflow"


@dataclass(frozen=True)
class Seed:
    point: tuple[float, float]
    direction: str = "both"  # forward | backward | both
    include: bool = True
    tag: str = ""

    def __post_init__(self) -> None:
        if self.direction not in ("forward", "backward", "both"):
            raise ValueError(f"unknown direction {self.direction!r}")


@dataclass(frozen=True)
class IntegrationSettings:
    """Tolerances and stopping rules for trajectory integration."""

    rel_tol: float = 1e-9
    abs_tol: float = 1e-9
    max_arclength: float = 40.0
    max_step: float | None = None  # None: domain-derived
    max_steps: int = 200_000
    singularity_radius: float = 1e-6
    closed_orbit_tol: float | None = 1e-6  # None disables first-return detection
    closed_orbit_min_arclength: float = 1e-2
    boundary_tol: float = 1e-10


@dataclass(frozen=True)
class PortraitSpec:
    """Seed set (with per-seed direction and inclusion flag) plus domain."""

    seeds: tuple[Seed, ...]
    domain: DomainU
    settings: IntegrationSettings = IntegrationSettings()

    def __post_init__(self) -> None:
        object.__setattr__(self, "seeds", tuple(self.seeds))
        if not any(s.include for s in self.seeds):
            raise ValueError("portrait spec needs at least one included seed")
        for s in self.seeds:
            if not self.domain.contains(*s.point, slack=1e-12):
                raise ValueError(f"seed {s.point} lies outside the domain")


@dataclass(frozen=True)
class Polyline:
    """Ordered trajectory vertices with the stopping reason at each end.

    For a two-sided trajectory, ``termination`` is the forward-time end and
    ``termination_start`` the backward-time end; for one-sided trajectories
    ``termination_start`` is None.
    """

    vertices: np.ndarray  # (n, 2)
    termination: Termination
    termination_start: Termination | None = None
    seed_index: int | None = None
    arclength: float = 0.0

    def __len__(self) -> int:
        return len(self.vertices)


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) tableau
# ---------------------------------------------------------------------------

_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# difference between 5th- and 4th-order weights, for the error estimate
_DP_E = (
    35 / 384 - 5179 / 57600,
    0.0,
    500 / 1113 - 7571 / 16695,
    125 / 192 - 393 / 640,
    -2187 / 6784 + 92097 / 339200,
    11 / 84 - 187 / 2100,
    -1 / 40,
)


def _rhs_factory(field: PlanarVectorField, sign: float):
    """Right-hand side of the augmented system (x, y, arclength)."""

    p, q = field.p, field.q

    def rhs(state: np.ndarray) -> np.ndarray:
        x, y = state[0], state[1]
        fx = sign * p(x, y)
        fy = sign * q(x, y)
        return np.array([fx, fy, math.hypot(fx, fy)])

    return rhs


def _dp_step(rhs, state: np.ndarray, h: float) -> tuple[np.ndarray, float]:
    """One Dormand-Prince step; returns the 5th-order result and error norm."""
    k = [rhs(state)]
    for row in _DP_A[1:6]:
        acc = state + h * sum(a * ki for a, ki in zip(row, k))
        k.append(rhs(acc))
    new = state + h * sum(a * ki for a, ki in zip(_DP_A[6], k))
    k.append(rhs(new))
    err = h * sum(e * ki for e, ki in zip(_DP_E, k))
    return new, float(np.max(np.abs(err)))


def _one_shot(rhs, state: np.ndarray, h: float) -> np.ndarray:
    new, _ = _dp_step(rhs, state, h)
    return new


def _bisect_event(rhs, state: np.ndarray, h: float, crossed) -> np.ndarray:
    """Largest sub-step of the accepted step before `crossed` becomes true.

    `crossed(point)` must be False at the step start and True at the step
    end; returns the event-side point, located to the bisection limit of the
    step parameter (far below any position tolerance in use).
    """
    lo, hi = 0.0, h
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if crossed(_one_shot(rhs, state, mid)):
            hi = mid
        else:
            lo = mid
        if hi - lo <= abs(h) * 1e-15:
            break
    return _one_shot(rhs, state, hi)


def integrate(
    field: PlanarVectorField,
    seed: tuple[float, float],
    direction: str = "both",
    settings: IntegrationSettings = IntegrationSettings(),
    domain: DomainU | None = None,
    known_singularities: Sequence[tuple[float, float]] = (),
) -> Polyline:
    """Integrate the trajectory through `seed` and clip it to `domain`.

    Parameters
    ----------
    direction
        "forward" follows x' = f(x), "backward" follows x' = -f(x), and
        "both" glues the two half-trajectories through the seed.
    domain
        Stopping rectangle.  None integrates until another stopping rule
        (arclength budget, singularity approach, closed orbit) fires.
    known_singularities
        Points whose ``singularity_radius'' neighborhoods stop the orbit.

    Returns
    -------
    Polyline
        Vertices in time order (backward part reversed for "both"), with
        termination reasons for each end.
    """
    if direction == "both":
        back = _integrate_one(field, seed, -1.0, settings, domain, known_singularities)
        fwd = _integrate_one(field, seed, +1.0, settings, domain, known_singularities)
        vertices = np.vstack([back.vertices[::-1], fwd.vertices[1:]])
        return Polyline(
            vertices=vertices,
            termination=fwd.termination,
            termination_start=back.termination,
            arclength=back.arclength + fwd.arclength,
        )
    sign = +1.0 if direction == "forward" else -1.0
    return _integrate_one(field, seed, sign, settings, domain, known_singularities)


def _integrate_one(
    field: PlanarVectorField,
    seed: tuple[float, float],
    sign: float,
    settings: IntegrationSettings,
    domain: DomainU | None,
    known_singularities: Sequence[tuple[float, float]],
) -> Polyline:
    rhs = _rhs_factory(field, sign)
    state = np.array([seed[0], seed[1], 0.0])
    singular = [np.array([float(p[0]), float(p[1])]) for p in known_singularities]
    f_seed = np.asarray(rhs(state)[:2])
    seed_speed = math.hypot(*f_seed)

    if domain is not None and settings.max_step is None:
        max_step_len = min(domain.width, domain.height) / 50.0
    else:
        max_step_len = settings.max_step if settings.max_step is not None else 0.1

    scale = 1.0 + abs(seed[0]) + abs(seed[1])
    h = min(1e-3 * scale / (seed_speed + 1e-12), 1.0)
    vertices = [state[:2].copy()]
    termination: Termination | None = None

    def outside(st: np.ndarray) -> bool:
        return domain is not None and not domain.contains(st[0], st[1])

    def near_singularity(st: np.ndarray) -> bool:
        return any(
            math.hypot(st[0] - p[0], st[1] - p[1]) <= settings.singularity_radius
            for p in singular
        )

    def over_budget(st: np.ndarray) -> bool:
        return st[2] >= settings.max_arclength

    return_tol = settings.closed_orbit_tol

    def returned_to_seed(st: np.ndarray) -> bool:
        return math.hypot(st[0] - seed[0], st[1] - seed[1]) <= return_tol

    steps = 0
    while termination is None:
        steps += 1
        if steps > settings.max_steps:
            raise NumericalError("integration step cap exceeded")
        if h < 1e-14 * max(1.0, float(np.max(np.abs(state[:2])))):
            termination = Termination.STEP_UNDERFLOW
            break

        # cap the spatial extent of a step so events cannot be overflown
        speed = math.hypot(*rhs(state)[:2])
        cap = max_step_len
        if singular:
            nearest = min(
                math.hypot(state[0] - p[0], state[1] - p[1]) for p in singular
            )
            if nearest < 10 * settings.singularity_radius:
                cap = min(cap, settings.singularity_radius / 2)
            else:
                cap = min(cap, max(nearest / 4, settings.singularity_radius / 2))
        armed = (
            return_tol is not None
            and state[2] > settings.closed_orbit_min_arclength
        )
        if armed:
            # steps shrink on approach to the seed, so a first return cannot
            # be stepped over
            d_seed = math.hypot(state[0] - seed[0], state[1] - seed[1])
            cap = min(cap, max(return_tol / 2, d_seed / 4))
        if speed > 0:
            h = min(h, cap / speed)

        new, err = _dp_step(rhs, state, h)
        tol = settings.abs_tol + settings.rel_tol * float(np.max(np.abs(new)))
        if err > tol:
            h *= max(0.2, 0.9 * (tol / err) ** 0.2)
            continue

        if over_budget(new):
            new = _bisect_event(rhs, state, h, over_budget)
            termination = Termination.ARCLENGTH_BUDGET
        elif outside(new):
            new = _bisect_event(rhs, state, h, outside)
            termination = Termination.EXITED_DOMAIN
        elif near_singularity(new):
            new = _bisect_event(rhs, state, h, near_singularity)
            termination = Termination.REACHED_SINGULARITY
        elif armed and returned_to_seed(new):
            tangent = rhs(new)[:2]
            denom = math.hypot(*tangent) * seed_speed
            if denom > 0 and float(np.dot(tangent, f_seed)) / denom > 0.9:
                termination = Termination.CLOSED_ORBIT
            # opposite tangent: passing the seed on the reversed branch of a
            # figure-type orbit; keep going
        state = new
        vertices.append(state[:2].copy())
        if termination is None and err > 0:
            h = min(h * min(5.0, 0.9 * (tol / err) ** 0.2), 10.0)

    return Polyline(
        vertices=np.array(vertices),
        termination=termination,
        arclength=float(state[2]),
    )


def phase_portrait(
    field: PlanarVectorField,
    spec: PortraitSpec,
    known_singularities: Sequence[tuple[float, float]] | None = None,
) -> list[Polyline]:
    """Union of trajectories over the included seeds, in seed order.

    Seeds with ``include=False`` are skipped, which is how deleted-separatrix
    portraits are expressed.  Trajectories stop at the domain boundary, at an
    epsilon-ball around any singular point of the field in the domain, on
    closing up, or at the arclength budget.
    """
    if known_singularities is None:
        found = find_singularities(field, spec.domain)
        known_singularities = [(float(x), float(y)) for x, y in found]
    polylines: list[Polyline] = []
    for i, seed in enumerate(spec.seeds):
        if not seed.include:
            continue
        line = integrate(
            field,
            seed.point,
            seed.direction,
            spec.settings,
            spec.domain,
            known_singularities,
        )
        polylines.append(replace(line, seed_index=i))
    return polylines


# ---------------------------------------------------------------------------
# Batched integration for sector probing
# ---------------------------------------------------------------------------

FATE_ACTIVE = 0
FATE_REACH = 1
FATE_EXIT = 2
FATE_BUDGET = 3
FATE_ROTATES = 4


def probe_ring(
    field: PlanarVectorField,
    center: tuple[float, float],
    angles: np.ndarray,
    radius: float,
    *,
    reach_radius: float,
    exit_radius: float,
    max_arclength: float,
    winding_limit: float = 2.2 * math.pi,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-11,
    max_steps: int = 20_000,
) -> np.ndarray:
    """Fate of short test orbits seeded on a circle around `center`.

    For every angle, one orbit is run forward and one backward until it
    either enters the reach disk, leaves the exit disk, accumulates more
    than `winding_limit` of turning around the center (rotational behavior:
    focus-like spiralling or a surrounding closed orbit), or exhausts the
    arclength budget (ambiguous).

    Returns
    -------
    fates : int array of shape (2, len(angles))
        Row 0 holds forward fates, row 1 backward fates, with values
        FATE_REACH, FATE_EXIT, FATE_BUDGET or FATE_ROTATES.
    """
    angles = np.asarray(angles, dtype=float)
    n = len(angles)
    cx, cy = float(center[0]), float(center[1])
    seeds_x = cx + radius * np.cos(angles)
    seeds_y = cy + radius * np.sin(angles)

    m = 2 * n
    state = np.empty((m, 3))
    state[:n, 0] = seeds_x
    state[n:, 0] = seeds_x
    state[:n, 1] = seeds_y
    state[n:, 1] = seeds_y
    state[:, 2] = 0.0
    signs = np.concatenate([np.ones(n), -np.ones(n)])

    p, q = field.p, field.q

    def rhs(st: np.ndarray, sgn: np.ndarray) -> np.ndarray:
        fx = sgn * p(st[:, 0], st[:, 1])
        fy = sgn * q(st[:, 0], st[:, 1])
        out = np.empty_like(st)
        out[:, 0] = fx
        out[:, 1] = fy
        out[:, 2] = np.hypot(fx, fy)
        return out

    fates = np.zeros(m, dtype=int)
    winding = np.zeros(m)
    theta_prev = np.arctan2(state[:, 1] - cy, state[:, 0] - cx)

    speed0 = np.hypot(*field.evaluate_array(state[:, 0], state[:, 1]))
    h = np.minimum(0.05 * radius / (speed0 + 1e-30), 1.0)

    for _ in range(max_steps):
        active = fates == FATE_ACTIVE
        if not active.any():
            break
        idx = np.flatnonzero(active)
        st = state[idx]
        sgn = signs[idx]
        ha = h[idx]

        # keep single-step displacement below the reach-disk scale
        dist = np.hypot(st[:, 0] - cx, st[:, 1] - cy)
        speed = np.hypot(*field.evaluate_array(st[:, 0], st[:, 1])) + 1e-30
        cap = np.where(dist < 3 * reach_radius, reach_radius / 2, radius / 6)
        ha = np.minimum(ha, cap / speed)

        # one vectorized Dormand-Prince step for all live orbits
        k = [rhs(st, sgn)]
        for row in _DP_A[1:6]:
            acc = st + ha[:, None] * sum(a * ki for a, ki in zip(row, k))
            k.append(rhs(acc, sgn))
        new = st + ha[:, None] * sum(a * ki for a, ki in zip(_DP_A[6], k))
        k.append(rhs(new, sgn))
        err_vec = ha[:, None] * sum(e * ki for e, ki in zip(_DP_E, k))
        err = np.max(np.abs(err_vec), axis=1)
        tol = abs_tol + rel_tol * np.max(np.abs(new), axis=1)

        accept = err <= tol
        factor = 0.9 * (tol / np.maximum(err, 1e-300)) ** 0.2
        h[idx] = ha * np.clip(factor, 0.2, 5.0)

        if accept.any():
            acc_idx = idx[accept]
            new_acc = new[accept]
            theta_new = np.arctan2(new_acc[:, 1] - cy, new_acc[:, 0] - cx)
            dtheta = theta_new - theta_prev[acc_idx]
            dtheta = (dtheta + math.pi) % (2 * math.pi) - math.pi
            winding[acc_idx] += dtheta
            theta_prev[acc_idx] = theta_new
            state[acc_idx] = new_acc

            dist_new = np.hypot(new_acc[:, 0] - cx, new_acc[:, 1] - cy)
            reached = dist_new <= reach_radius
            exited = dist_new >= exit_radius
            rotated = np.abs(winding[acc_idx]) >= winding_limit
            budget = new_acc[:, 2] >= max_arclength
            fate = np.zeros(len(acc_idx), dtype=int)
            fate[budget] = FATE_BUDGET
            fate[rotated] = FATE_ROTATES
            fate[exited] = FATE_EXIT
            fate[reached] = FATE_REACH
            fates[acc_idx] = fate
    else:
        fates[fates == FATE_ACTIVE] = FATE_BUDGET

    fates[fates == FATE_ACTIVE] = FATE_BUDGET
    return fates.reshape(2, n)


# ---------------------------------------------------------------------------
# Singularity finding
# ---------------------------------------------------------------------------


def snap_to_exact(
    field: PlanarVectorField,
    point: tuple[float, float],
    snap_radius: float = 1e-2,
    max_denominator: int = 10**12,
) -> tuple[Fraction, Fraction] | None:
    """Try to replace a numeric zero by a nearby exact rational zero.

    Candidate rationals come from continued-fraction truncations of both
    coordinates with increasing denominator caps; the first candidate within
    `snap_radius` at which both components vanish exactly wins.  Returns
    None when no exact rational zero is found, e.g. for irrational zeros.
    """
    x, y = float(point[0]), float(point[1])
    cap = 1
    seen: set[tuple[Fraction, Fraction]] = set()
    while cap <= max_denominator:
        cand = (
            Fraction(x).limit_denominator(cap),
            Fraction(y).limit_denominator(cap),
        )
        if cand not in seen:
            seen.add(cand)
            if (
                abs(float(cand[0]) - x) <= snap_radius
                and abs(float(cand[1]) - y) <= snap_radius
                and field.is_singular_at(cand)
            ):
                return cand
        cap *= 10
    return None


def find_singularities(
    field: PlanarVectorField,
    domain: DomainU,
    grid: tuple[int, int] = (256, 256),
    refine_tol: float = 1e-12,
    merge_tol: float = 1e-8,
    max_points: int = 60,
) -> list[tuple]:
    """Locate the zero set of the field inside a rectangle.

    Grid scan for sign changes and small magnitudes, then damped Newton
    refinement to ``|f| < refine_tol``, followed by rational snapping and
    lexicographic sorting.  Points are returned as coordinate pairs whose
    entries are exact ``Fraction`` values when a nearby exact rational zero
    was verified, plain floats otherwise.

    Raises
    ------
    NonIsolatedZeroSet
        If refinement keeps producing distinct zeros (more than
        `max_points`), the tell-tale of a shared polynomial factor.
    """
    nx, ny = grid
    xs = np.linspace(domain.x_min, domain.x_max, nx)
    ys = np.linspace(domain.y_min, domain.y_max, ny)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    pv = np.asarray(field.p(xx, yy), dtype=float)
    qv = np.asarray(field.q(xx, yy), dtype=float)

    def sign_change(v: np.ndarray) -> np.ndarray:
        cells_min = np.minimum(
            np.minimum(v[:-1, :-1], v[1:, :-1]), np.minimum(v[:-1, 1:], v[1:, 1:])
        )
        cells_max = np.maximum(
            np.maximum(v[:-1, :-1], v[1:, :-1]), np.maximum(v[:-1, 1:], v[1:, 1:])
        )
        return (cells_min <= 0) & (cells_max >= 0)

    candidates = sign_change(pv) & sign_change(qv)

    # tangential zeros (no sign change) show up as small-magnitude dips;
    # "small" means below one grid increment of the component's variation
    def grid_increment(v: np.ndarray) -> float:
        steps = 0.0
        if v.shape[0] > 1:
            steps = max(steps, float(np.max(np.abs(np.diff(v, axis=0)))))
        if v.shape[1] > 1:
            steps = max(steps, float(np.max(np.abs(np.diff(v, axis=1)))))
        return max(steps, 1e-30)

    tiny = (np.abs(pv) <= grid_increment(pv)) & (np.abs(qv) <= grid_increment(qv))
    tiny_cells = tiny[:-1, :-1] | tiny[1:, :-1] | tiny[:-1, 1:] | tiny[1:, 1:]
    candidates |= tiny_cells

    cell_i, cell_j = np.nonzero(candidates)
    if len(cell_i) > nx * ny // 8:
        raise NonIsolatedZeroSet(
            "zero set touches a large fraction of the grid; the components "
            "likely share a polynomial factor"
        )

    px_ = field.p.partial_x()
    py_ = field.p.partial_y()
    qx_ = field.q.partial_x()
    qy_ = field.q.partial_y()

    def newton(x0: float, y0: float) -> tuple[float, float] | None:
        x, y = x0, y0
        fx, fy = float(field.p(x, y)), float(field.q(x, y))
        fnorm = max(abs(fx), abs(fy))
        for _ in range(120):
            if fnorm < refine_tol:
                return (x, y)
            jac = np.array(
                [
                    [float(px_(x, y)), float(py_(x, y))],
                    [float(qx_(x, y)), float(qy_(x, y))],
                ]
            )
            rhs_vec = np.array([fx, fy])
            step, *_ = np.linalg.lstsq(jac, -rhs_vec, rcond=None)
            lam = 1.0
            for _ in range(25):
                xn, yn = x + lam * step[0], y + lam * step[1]
                fxn, fyn = float(field.p(xn, yn)), float(field.q(xn, yn))
                fn = max(abs(fxn), abs(fyn))
                if fn < fnorm:
                    x, y, fx, fy, fnorm = xn, yn, fxn, fyn, fn
                    break
                lam *= 0.5
            else:
                return (x, y) if fnorm < refine_tol else None
        return (x, y) if fnorm < refine_tol else None

    dx = xs[1] - xs[0] if nx > 1 else 0.0
    dy = ys[1] - ys[0] if ny > 1 else 0.0
    raw: list[tuple[float, float]] = []
    for i, j in zip(cell_i, cell_j):
        start = (xs[i] + dx / 2, ys[j] + dy / 2)
        result = newton(*start)
        if result is None:
            continue
        x, y = result
        if domain.contains(x, y, slack=1e-9):
            raw.append((x, y))

    # snap, then merge duplicates (exact points merge exactly)
    merged: list[tuple] = []
    for x, y in raw:
        snapped = snap_to_exact(field, (x, y))
        pt = snapped if snapped is not None else (x, y)
        duplicate = False
        for existing in merged:
            if isinstance(existing[0], Fraction) and snapped is not None:
                duplicate = existing == pt
            else:
                duplicate = (
                    math.hypot(float(existing[0]) - float(pt[0]),
                               float(existing[1]) - float(pt[1]))
                    <= max(merge_tol, 2e-2 if snapped is None else merge_tol)
                )
            if duplicate:
                break
        if not duplicate:
            merged.append(pt)

    if len(merged) > max_points:
        raise NonIsolatedZeroSet(
            f"{len(merged)} distinct zeros found; zero set appears non-isolated"
        )
    merged.sort(key=lambda p: (float(p[0]), float(p[1])))
    return merged


# ---------------------------------------------------------------------------
# Orientation field
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrientationField:
    """Per-cell flow direction modulo pi on a regular grid.

    ``theta`` holds angles in [0, pi) indexed [i, j] with i along x; the
    doubled representation (cos 2*theta, sin 2*theta) erases the head/tail
    ambiguity and has unit magnitude off the mask.
    """

    xs: np.ndarray
    ys: np.ndarray
    theta: np.ndarray
    mask: np.ndarray
    doubled: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.theta.shape

    @property
    def spacing(self) -> tuple[float, float]:
        dx = self.xs[1] - self.xs[0] if len(self.xs) > 1 else 0.0
        dy = self.ys[1] - self.ys[0] if len(self.ys) > 1 else 0.0
        return (float(dx), float(dy))


def orientation_field(
    field: PlanarVectorField,
    domain: DomainU,
    grid: tuple[int, int] = (64, 64),
    doubled: bool = False,
    mask_tol: float = 1e-6,
) -> OrientationField:
    """Sample the field's direction (mod pi) at the centers of a grid.

    The angle convention is atan2(Q, P) reduced modulo pi: the angle the
    vector makes with the x-axis, as an undirected orientation.  Cells where
    the field magnitude drops below `mask_tol` are masked.
    """
    nx, ny = grid
    xs = domain.x_min + (np.arange(nx) + 0.5) * domain.width / nx
    ys = domain.y_min + (np.arange(ny) + 0.5) * domain.height / ny
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    fx = np.asarray(field.p(xx, yy), dtype=float)
    fy = np.asarray(field.q(xx, yy), dtype=float)
    magnitude = np.hypot(fx, fy)
    mask = magnitude < mask_tol
    theta = np.mod(np.arctan2(fy, fx), math.pi)
    theta[mask] = 0.0
    doubled_pair = None
    if doubled:
        with np.errstate(invalid="ignore", divide="ignore"):
            cos2 = np.where(mask, 0.0, (fx * fx - fy * fy) / magnitude**2)
            sin2 = np.where(mask, 0.0, 2 * fx * fy / magnitude**2)
        doubled_pair = (cos2, sin2)
    return OrientationField(xs=xs, ys=ys, theta=theta, mask=mask, doubled=doubled_pair)


# ---------------------------------------------------------------------------
# Exporters
# ---------------------------------------------------------------------------

_SVG_FMT = "{:.9g}"  # all SVG floats carry exactly 9 significant digits


def portrait_to_svg(
    polylines: Iterable[Polyline],
    domain: DomainU,
    stroke_width: float = 0.01,
) -> str:
    """Render a portrait as an SVG document, one path per polyline.

    The viewBox is the domain; the y-axis is flipped when writing
    coordinates so that mathematical "up" is screen "up".
    """
    fmt = _SVG_FMT.format
    flip = domain.y_min + domain.y_max
    header = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{fmt(domain.x_min)} '
        f'{fmt(domain.y_min)} {fmt(domain.width)} {fmt(domain.height)}">\n'
    )
    paths = []
    for line in polylines:
        coords = " L ".join(
            f"{fmt(x)} {fmt(flip - y)}" for x, y in line.vertices
        )
        paths.append(
            f'  <path d="M {coords}" fill="none" stroke="black" '
            f'stroke-width="{fmt(stroke_width)}"/>\n'
        )
    return header + "".join(paths) + "</svg>\n"


def portrait_to_csv(polylines: Iterable[Polyline]) -> str:
    rows = ["trajectory_id,vertex_index,x,y"]
    for tid, line in enumerate(polylines):
        for vid, (x, y) in enumerate(line.vertices):
            rows.append(f"{tid},{vid},{float(x)!r},{float(y)!r}")
    return "\n".join(rows) + "\n"


def orientation_to_csv(of: OrientationField) -> str:
    rows = ["i,j,x,y,theta,masked"]
    nx, ny = of.shape
    for i in range(nx):
        for j in range(ny):
            rows.append(
                f"{i},{j},{float(of.xs[i])!r},{float(of.ys[j])!r},"
                f"{float(of.theta[i, j])!r},{int(of.mask[i, j])}"
            )
    return "\n".join(rows) + "\n"


def orientation_to_pgm(of: OrientationField) -> bytes:
    """8-bit binary PGM: theta mapped linearly [0, pi) -> [0, 255].

    Masked cells are written as 255.  Rows run top to bottom in decreasing
    y, image convention.
    """
    nx, ny = of.shape
    levels = np.minimum((of.theta / math.pi * 255.0).round().astype(int), 255)
    levels = np.where(of.mask, 255, levels).astype(np.uint8)
    header = f"P5\n{nx} {ny}\n255\n".encode("ascii")
    # rows: y descending; columns: x ascending
    image = levels.T[::-1, :]
    return header + image.tobytes()
