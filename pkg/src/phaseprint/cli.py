"""Command-line front end.

Subcommands: classify, index, connexion, synth, portrait, orient.  Every
command is deterministic for a fixed invocation (fixed grids, fixed seed
tables, no randomness), outputs are written atomically, and exit codes
follow one contract:

    0  success
    1  input error (unparseable field text, bad flags, bad files)
    2  mathematical infeasibility (infeasible connexion, contradictory
       constraints, unresolved classification)
    3  numerical non-convergence

Field sources are one of ``--template NAME`` or ``--field "P ; Q"``; the
synth command instead reads a Hermite constraint file (see the README for
the line grammar).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction

from . import flow
from .classify import SectorConfig
from .errors import InputError, MathError, NumericalError, PhaseprintError
from .flow import DomainU, IntegrationSettings, PortraitSpec, Seed
from .index import ContourSpec, connexion_check, winding_index
from .normalform import (
    HermiteConstraint,
    TemplateId,
    assemble_field,
    hermite_solve,
    template,
)
from .polyfield import PlanarVectorField, parse_field, parse_polynomial
from .report import SurveyReport, survey_field

__all__ = ["main"]


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - map argparse failures to exit 1
        raise _ArgError(message)


def _add_shared(parser: argparse.ArgumentParser, formats: list[str]) -> None:
    parser.add_argument("--template", help="built-in field name")
    parser.add_argument("--field", help="field text 'P ; Q'")
    parser.add_argument(
        "--domain",
        help="xmin,xmax,ymin,ymax (default: template domain, else -2,2,-2,2); "
        "use --domain=-2,2,-2,2 syntax for negative bounds",
        default=None,
    )
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--format", choices=formats, default=formats[0])
    parser.add_argument(
        "--tol",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="tolerance override (repeatable); see --dump-config for keys",
    )
    parser.add_argument(
        "--dump-config",
        action="store_true",
        help="print the resolved configuration and exit",
    )


_TOL_KEYS = {
    "rel_tol": float,
    "abs_tol": float,
    "max_arclength": float,
    "max_step": float,
    "singularity_radius": float,
    "closed_orbit_tol": float,
    "probe_radius": float,
    "n_cells": int,
    "exit_factor": float,
    "reach_factor": float,
    "arclength_factor": float,
    "zero_tol": float,
    "residual_tol": float,
    "grid": int,
    "mask_tol": float,
    "ordering": str,
}

_TOL_DEFAULTS = {
    "rel_tol": 1e-9,
    "abs_tol": 1e-9,
    "max_arclength": 40.0,
    "max_step": None,
    "singularity_radius": 1e-6,
    "closed_orbit_tol": 1e-6,
    "probe_radius": 0.1,
    "n_cells": 180,
    "exit_factor": 4.0,
    "reach_factor": 1 / 50,
    "arclength_factor": 20.0,
    "zero_tol": 1e-9,
    "residual_tol": 1e-6,
    "grid": 256,
    "mask_tol": 1e-6,
    "ordering": "standard",
}


def _parse_tols(pairs: list[str]) -> dict:
    resolved = dict(_TOL_DEFAULTS)
    for pair in pairs:
        if "=" not in pair:
            raise InputError(f"--tol expects KEY=VALUE, got {pair!r}")
        key, _, raw = pair.partition("=")
        key = key.strip()
        if key not in _TOL_KEYS:
            raise InputError(f"unknown tolerance key {key!r}")
        try:
            resolved[key] = _TOL_KEYS[key](raw)
        except ValueError as exc:
            raise InputError(f"bad value for --tol {key}: {raw!r}") from exc
    return resolved


def _parse_domain(text: str) -> DomainU:
    try:
        x0, x1, y0, y1 = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise InputError(f"bad --domain {text!r}") from exc
    return DomainU(x0, x1, y0, y1)


def _effective_domain(args, spec: PortraitSpec | None) -> DomainU:
    if args.domain is not None:
        return _parse_domain(args.domain)
    if spec is not None:
        return spec.domain
    return DomainU(-2.0, 2.0, -2.0, 2.0)


def _resolve_field(args) -> tuple[PlanarVectorField, PortraitSpec | None, str]:
    if bool(args.template) == bool(args.field):
        raise InputError("give exactly one field source: --template or --field")
    if args.template:
        try:
            tid = TemplateId(args.template)
        except ValueError as exc:
            names = ", ".join(t.value for t in TemplateId)
            raise InputError(
                f"unknown template {args.template!r} (choose from {names})"
            ) from exc
        field, spec = template(tid)
        return field, spec, f"template:{tid.value}"
    field = parse_field(args.field)
    return field, None, field.to_text()


def _write_output(args, text: str | bytes) -> None:
    if args.out is None:
        if isinstance(text, bytes):
            sys.stdout.buffer.write(text)
        else:
            sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(args.out))
    mode = "wb" if isinstance(text, bytes) else "w"
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".phaseprint-")
    try:
        with os.fdopen(fd, mode) as handle:
            handle.write(text)
        os.replace(tmp_path, args.out)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _dump_config(args, tols: dict, extra: dict | None = None) -> int:
    payload = {
        "command": args.command,
        "domain": args.domain,
        "format": args.format,
        "tolerances": {k: tols[k] for k in sorted(tols)},
    }
    if extra:
        payload.update(extra)
    _write_output(args, _json_text(payload))
    return 0


def _settings_from(tols: dict) -> IntegrationSettings:
    return IntegrationSettings(
        rel_tol=tols["rel_tol"],
        abs_tol=tols["abs_tol"],
        max_arclength=tols["max_arclength"],
        max_step=tols["max_step"],
        singularity_radius=tols["singularity_radius"],
        closed_orbit_tol=tols["closed_orbit_tol"],
    )


def _sector_config_from(tols: dict) -> SectorConfig:
    return SectorConfig(
        n_cells=tols["n_cells"],
        reach_factor=tols["reach_factor"],
        exit_factor=tols["exit_factor"],
        arclength_factor=tols["arclength_factor"],
        ordering=tols["ordering"],
    )


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------


def _cmd_classify(args) -> int:
    tols = _parse_tols(args.tol)
    if args.dump_config:
        return _dump_config(args, tols)
    field, spec, label = _resolve_field(args)
    domain = _effective_domain(args, spec)
    reports = survey_field(
        field,
        domain,
        config=_sector_config_from(tols),
        base_radius=tols["probe_radius"],
    )
    survey = SurveyReport(
        field_text=label,
        domain=domain,
        ordering=tols["ordering"],
        points=tuple(reports),
    )
    _write_output(args, _json_text(survey.to_dict()))
    return 2 if survey.has_issues else 0


def _cmd_index(args) -> int:
    tols = _parse_tols(args.tol)
    if args.dump_config:
        return _dump_config(args, tols, {"circle": args.circle, "rect": args.rect})
    field, spec, label = _resolve_field(args)
    if args.circle:
        try:
            cx, cy, radius = (float(v) for v in args.circle.split(","))
        except ValueError as exc:
            raise InputError(f"bad --circle {args.circle!r}") from exc
        contour = ContourSpec.circle(cx, cy, radius)
    elif args.rect:
        try:
            x0, x1, y0, y1 = (float(v) for v in args.rect.split(","))
        except ValueError as exc:
            raise InputError(f"bad --rect {args.rect!r}") from exc
        contour = ContourSpec.rectangle(x0, x1, y0, y1)
    else:
        contour = ContourSpec.from_domain(_effective_domain(args, spec))
    value = winding_index(
        field,
        contour,
        zero_tol=tols["zero_tol"],
        residual_tol=tols["residual_tol"],
    )
    payload = {
        "field": label,
        "contour": {"kind": contour.kind, "params": list(contour.params)},
        "index": int(value),
        "method": value.method.value,
        "residual": value.residual,
    }
    _write_output(args, _json_text(payload))
    return 0


def _cmd_connexion(args) -> int:
    tols = _parse_tols(args.tol)
    if args.dump_config:
        return _dump_config(args, tols, {"genus": args.genus})
    if bool(args.points) == bool(args.points_file):
        raise InputError("give exactly one of --points or --points-file")
    if args.points:
        raw_entries = [p.strip() for p in args.points.split(",") if p.strip()]
    else:
        try:
            with open(args.points_file, encoding="utf-8") as handle:
                raw_entries = [
                    line.split("#", 1)[0].strip()
                    for line in handle
                    if line.split("#", 1)[0].strip()
                ]
        except OSError as exc:
            raise InputError(f"cannot read {args.points_file!r}: {exc}") from exc
    entries: list = []
    for raw in raw_entries:
        try:
            entries.append(int(raw))
        except ValueError:
            entries.append(raw)
    result = connexion_check(entries, args.genus)
    payload = {
        "genus": result.genus,
        "euler_characteristic": result.euler,
        "points": [
            {"entry": str(entry), "index": str(ix)}
            for entry, ix in zip(result.singularities, result.indices)
        ],
        "total_index": str(result.total_index),
        "feasible": result.feasible,
    }
    if result.corollary is not None:
        payload["hyperbolic_identity"] = result.corollary
    _write_output(args, _json_text(payload))
    return 0 if result.feasible else 2


def _parse_constraint_file(path: str):
    """Line grammar: `root X mult M`, `deriv X order D {=|<|>} VALUE`,
    `scale VALUE`, `yfactor POLY`; '#' starts a comment."""
    roots: dict[Fraction, int] = {}
    derivs: dict[Fraction, list] = {}
    scale = None
    y_factor = None
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise InputError(f"cannot read {path!r}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        try:
            if parts[0] == "root" and len(parts) == 4 and parts[2] == "mult":
                roots[Fraction(parts[1])] = int(parts[3])
            elif parts[0] == "deriv" and len(parts) == 6 and parts[2] == "order":
                location = Fraction(parts[1])
                derivs.setdefault(location, []).append(
                    (int(parts[3]), parts[4], Fraction(parts[5]))
                )
            elif parts[0] == "scale" and len(parts) == 2:
                scale = Fraction(parts[1])
            elif parts[0] == "yfactor" and len(parts) >= 2:
                y_factor = parse_polynomial(body.split(None, 1)[1])
            else:
                raise ValueError("unrecognized directive")
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
    for location in derivs:
        roots.setdefault(location, 1)
    constraints = [
        HermiteConstraint(loc, mult, tuple(derivs.get(loc, ())))
        for loc, mult in sorted(roots.items())
    ]
    if not constraints:
        raise InputError(f"{path}: no constraints found")
    return constraints, scale, y_factor


def _cmd_synth(args) -> int:
    tols = _parse_tols(args.tol)
    if args.dump_config:
        return _dump_config(args, tols, {"constraints": args.constraints})
    constraints, scale, y_factor = _parse_constraint_file(args.constraints)
    profile = hermite_solve(constraints, scale=scale)
    if y_factor is not None:
        field = assemble_field(y_factor=y_factor, w=profile)
    else:
        field = assemble_field(profile)
    if args.format == "json":
        payload = {
            "profile": profile.to_text(),
            "field": field.to_text(),
        }
        _write_output(args, _json_text(payload))
    else:
        _write_output(args, field.to_text() + "\n")
    return 0


_FALLBACK_SEED_GRID = 4


def _cmd_portrait(args) -> int:
    tols = _parse_tols(args.tol)
    if args.dump_config:
        return _dump_config(args, tols)
    field, spec, _ = _resolve_field(args)
    settings = _settings_from(tols)
    if spec is None:
        domain = _effective_domain(args, None)
        n = _FALLBACK_SEED_GRID
        seeds = tuple(
            Seed(
                (
                    domain.x_min + (i + 0.5) * domain.width / n,
                    domain.y_min + (j + 0.5) * domain.height / n,
                ),
                direction="both",
                tag="grid",
            )
            for i in range(n)
            for j in range(n)
        )
        spec = PortraitSpec(seeds, domain, settings)
    elif args.tol:
        spec = PortraitSpec(spec.seeds, spec.domain, settings)
    polylines = flow.phase_portrait(field, spec)
    if args.format == "svg":
        _write_output(args, flow.portrait_to_svg(polylines, spec.domain))
    else:
        _write_output(args, flow.portrait_to_csv(polylines))
    return 0


def _cmd_orient(args) -> int:
    tols = _parse_tols(args.tol)
    if args.dump_config:
        return _dump_config(args, tols, {"grid": args.grid, "doubled": args.doubled})
    field, spec, _ = _resolve_field(args)
    domain = _effective_domain(args, spec)
    try:
        nx, ny = (int(v) for v in args.grid.split(","))
    except ValueError as exc:
        raise InputError(f"bad --grid {args.grid!r}") from exc
    of = flow.orientation_field(
        field, domain, grid=(nx, ny), doubled=args.doubled, mask_tol=tols["mask_tol"]
    )
    if args.format == "pgm":
        _write_output(args, flow.orientation_to_pgm(of))
    else:
        _write_output(args, flow.orientation_to_csv(of))
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="phaseprint", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_classify = sub.add_parser("classify", help="find and classify singular points")
    _add_shared(p_classify, ["json"])
    p_classify.set_defaults(run=_cmd_classify)

    p_index = sub.add_parser("index", help="winding index along a contour")
    _add_shared(p_index, ["json"])
    p_index.add_argument("--circle", help="cx,cy,radius")
    p_index.add_argument("--rect", help="xmin,xmax,ymin,ymax")
    p_index.set_defaults(run=_cmd_index)

    p_conn = sub.add_parser("connexion", help="index-sum feasibility on a surface")
    _add_shared(p_conn, ["json"])
    p_conn.add_argument("--genus", type=int, required=True)
    p_conn.add_argument("--points", help="comma list of labels or integer indices")
    p_conn.add_argument("--points-file", help="file with one label/index per line")
    p_conn.set_defaults(run=_cmd_connexion)

    p_synth = sub.add_parser("synth", help="solve a Hermite constraint file")
    _add_shared(p_synth, ["text", "json"])
    p_synth.add_argument("--constraints", required=True, help="constraint file")
    p_synth.set_defaults(run=_cmd_synth)

    p_portrait = sub.add_parser("portrait", help="render a seeded phase portrait")
    _add_shared(p_portrait, ["svg", "csv"])
    p_portrait.set_defaults(run=_cmd_portrait)

    p_orient = sub.add_parser("orient", help="sample the orientation field")
    _add_shared(p_orient, ["csv", "pgm"])
    p_orient.add_argument("--grid", default="64,64", help="nx,ny")
    p_orient.add_argument("--doubled", action="store_true")
    p_orient.set_defaults(run=_cmd_orient)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.run(args)
    except (_ArgError, InputError) as exc:
        print(f"phaseprint: input error: {exc}", file=sys.stderr)
        return 1
    except MathError as exc:
        print(f"phaseprint: infeasible: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"phaseprint: no convergence: {exc}", file=sys.stderr)
        return 3
    except PhaseprintError as exc:  # pragma: no cover - safety net
        print(f"phaseprint: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
