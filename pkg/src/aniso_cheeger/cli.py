"""Command-line front end.

Every subcommand writes to ``--out`` (default stdout).  Failures print a JSON
error object on stderr and exit with a stable code:

    0  success
    1  unexpected internal error
    2  usage error (bad flags)
    3  ParseError: input file missing or not valid polygon JSON
    4  ValidationError: degenerate geometry or out-of-range parameters
    5  SolverError: root bracketing or tolerance failure
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

from . import anisotropy_optimizer as opt
from . import disc_regular_polygon as drp
from .cheeger_solver import EPS_ROOT, functionals, mahler_volume, solve_cheeger
from .errors import AnisoCheegerError, GeometryError, SolverError
from .planar_convex import (
    DISC_RESOLUTION,
    Anisotropy,
    ConvexPolygon,
    circumscribed_polygon,
    disc,
    make_polygon,
    polar_body,
)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_VALIDATION = 4
EXIT_SOLVER = 5

COMMANDS = ("polar", "mahler", "cheeger", "functionals", "table1", "bounds",
            "optimize", "probe-divergence")
FORMATS = ("json", "csv", "tsv", "table")
TABLE1_COLUMNS = ("n", "x_bar", "J", "x_lower", "x_upper", "J_lower", "J_upper")


class ParseError(AnisoCheegerError):
    code = EXIT_PARSE


class ValidationError(AnisoCheegerError):
    code = EXIT_VALIDATION


class _UsageError(Exception):
    pass


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass
class RunConfig:
    command: str
    omega: Optional[str] = None
    k: Optional[str] = None
    out: Optional[str] = None
    m: int = DISC_RESOLUTION
    eps_root: float = EPS_ROOT
    seed: int = 0
    starts: int = opt.DEFAULT_STARTS
    budget: int = opt.DEFAULT_BUDGET
    pairs: int = 2
    format: str = "json"
    n: List[int] = field(default_factory=lambda: list(drp.TABLE1_N))
    aspects: Optional[List[float]] = None
    threshold: float = 100.0
    plot_dir: Optional[str] = None
    trace: Optional[str] = None
    with_limit: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        if self.m < 64 or self.m % 2:
            raise ValidationError(f"--m must be an even integer >= 64, got {self.m}")
        if not self.eps_root > 0:
            raise ValidationError(f"--eps-root must be positive, got {self.eps_root}")
        if self.format not in FORMATS:
            raise ValidationError(f"unknown format {self.format!r}")


def parse_polygon_json(text: str) -> ConvexPolygon:
    """``{"vertices": [[x, y], ...]}`` -> re-hulled :class:`ConvexPolygon`."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("vertices"), list):
        raise ParseError('expected an object with a "vertices" array')
    pts = data["vertices"]
    if not all(isinstance(p, list) and len(p) == 2
               and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in p)
               for p in pts):
        raise ParseError("each vertex must be a pair of numbers")
    if len({(float(x), float(y)) for x, y in pts}) < 3:
        raise ValidationError("a polygon needs at least 3 distinct points")
    try:
        return make_polygon(pts)
    except GeometryError as exc:
        raise ValidationError(str(exc)) from exc


def polygon_json(P: ConvexPolygon) -> str:
    return json.dumps({"vertices": P.to_list()})


def resolve_body(spec: Optional[str], m: int, flag: str) -> ConvexPolygon:
    """Named body (``disc``, ``square``, ``pgon:<n>``) or path to polygon JSON."""
    if not spec:
        raise ValidationError(f"{flag} is required for this command")
    if spec == "disc":
        return disc(m)
    if spec == "square":
        return make_polygon([[1, 1], [-1, 1], [-1, -1], [1, -1]])
    if spec.startswith("pgon:"):
        try:
            n = int(spec[5:])
        except ValueError as exc:
            raise ValidationError(f"bad polygon name {spec!r}") from exc
        return circumscribed_polygon(n)
    try:
        text = Path(spec).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {spec}: {exc}") from exc
    return parse_polygon_json(text)


def _anisotropy(cfg: RunConfig) -> Anisotropy:
    K = Anisotropy.from_polygon(resolve_body(cfg.k, cfg.m, "--k"), warn=False)
    if K.symmetrized:
        # refuse rather than silently answer for hull(K, -K)
        raise ValidationError("--k must be centrally symmetric about the origin")
    return K


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _dump_rows(rows: Sequence[dict], columns: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        return _dump_json([{c: r[c] for c in columns} for r in rows])
    if fmt == "table":
        lines = ["  ".join(f"{c:>9}" for c in columns)]
        for r in rows:
            cells = [drp.truncate(r[c]) if isinstance(r[c], float) else str(r[c]) for c in columns]
            lines.append("  ".join(f"{c:>9}" for c in cells))
        return "\n".join(lines) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="," if fmt == "csv" else "\t", lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in columns])
    return buf.getvalue()


def write_plot_data(directory: str, count: int = 100) -> List[Path]:
    """Two-column text files ``n x_bar`` and ``n J`` for the first ``count`` even n."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    series = drp.figure_series(count)
    paths = [d / "xbar_vs_n.dat", d / "J_vs_n.dat"]
    paths[0].write_text("".join(f"{r.n} {r.x_bar!r}\n" for r in series))
    paths[1].write_text("".join(f"{r.n} {r.J!r}\n" for r in series))
    return paths


def _cmd_polar(cfg):
    return _dump_json({"vertices": polar_body(_anisotropy(cfg).body).to_list()})


def _cmd_mahler(cfg):
    K = _anisotropy(cfg)
    return _dump_json({"mahler": mahler_volume(K), "area": K.area_body, "area_polar": K.area_polar})


def _cmd_cheeger(cfg):
    omega = resolve_body(cfg.omega, cfg.m, "--omega")
    return _dump_json(solve_cheeger(omega, _anisotropy(cfg), cfg.eps_root).to_dict())


def _cmd_functionals(cfg):
    omega = resolve_body(cfg.omega, cfg.m, "--omega")
    return _dump_json(functionals(omega, _anisotropy(cfg), cfg.eps_root).to_dict())


def _cmd_table1(cfg):
    rows = [r.as_dict() for r in drp.table1(cfg.n)]
    if cfg.plot_dir:
        write_plot_data(cfg.plot_dir)
    if cfg.with_limit and cfg.format == "json":
        return _dump_json({"rows": rows, "limit": drp.limit_row()})
    return _dump_rows(rows, TABLE1_COLUMNS, cfg.format)


def _cmd_bounds(cfg):
    cols = ("n", "x_lower", "x_upper", "J_lower", "J_upper")
    rows = [dict(zip(cols, (n, *drp.bounds(n)))) for n in cfg.n]
    return _dump_rows(rows, cols, cfg.format)


def _cmd_optimize(cfg):
    omega = resolve_body(cfg.omega, cfg.m, "--omega")
    trace = opt.minimize(omega, cfg.pairs, cfg.starts, cfg.budget, cfg.seed, eps_root=cfg.eps_root)
    if cfg.trace:
        lines = []
        for start in trace.starts:
            for k, (prm, j) in enumerate(start.iterates):
                lines.append(json.dumps({"start_seed": start.seed, "eval": k, "J": j if math.isfinite(j) else None,
                                         **prm.to_dict()}))
        Path(cfg.trace).write_text("\n".join(lines) + "\n")
    return _dump_json(trace.to_dict())


def _cmd_probe(cfg):
    omega = resolve_body(cfg.omega, cfg.m, "--omega")
    if cfg.aspects:
        pairs = opt.divergence_probe(omega, cfg.aspects, cfg.eps_root)
    else:
        pairs = opt.divergence_sweep(omega, cfg.threshold, eps_root=cfg.eps_root)
    rows = [{"aspect": a, "J": j} for a, j in pairs]
    return _dump_rows(rows, ("aspect", "J"), cfg.format)


_HANDLERS = {
    "polar": _cmd_polar,
    "mahler": _cmd_mahler,
    "cheeger": _cmd_cheeger,
    "functionals": _cmd_functionals,
    "table1": _cmd_table1,
    "bounds": _cmd_bounds,
    "optimize": _cmd_optimize,
    "probe-divergence": _cmd_probe,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgParser(prog="aniso-cheeger", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgParser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--omega", help="disc | square | pgon:<n> | path to polygon JSON")
        p.add_argument("--k", help="anisotropy: disc | square | pgon:<n> | path to polygon JSON")
        p.add_argument("--m", type=int, default=DISC_RESOLUTION, help="vertices of the disc polygon")
        p.add_argument("--eps-root", type=float, default=EPS_ROOT)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--starts", type=int, default=opt.DEFAULT_STARTS)
        p.add_argument("--budget", type=int, default=opt.DEFAULT_BUDGET)
        p.add_argument("--pairs", type=int, default=2)
        p.add_argument("--format", choices=FORMATS, default="json")
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--n", type=int, nargs="*", default=list(drp.TABLE1_N))
        p.add_argument("--aspects", type=float, nargs="*")
        p.add_argument("--threshold", type=float, default=100.0)
        p.add_argument("--plot-dir", help="table1: also write plot data files here")
        p.add_argument("--trace", help="optimize: write every evaluation as JSON lines here")
        p.add_argument("--with-limit", action="store_true", help="table1 json: add the n = inf row")
    return parser


def _error(code: int, kind: str, message: str, stream) -> int:
    stream.write(json.dumps({"error": {"code": code, "type": kind, "message": message}}) + "\n")
    return code


def run(config: RunConfig) -> str:
    """Execute ``config`` and return the rendered output text."""
    return _HANDLERS[config.command](config)


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = RunConfig(**{k: v for k, v in vars(args).items()})
        text = run(cfg)
        if cfg.out:
            Path(cfg.out).write_text(text, encoding="utf-8")
        else:
            stdout.write(text)
        return EXIT_OK
    except _UsageError as exc:
        return _error(EXIT_USAGE, "UsageError", str(exc), stderr)
    except (ParseError, ValidationError) as exc:
        return _error(exc.code, type(exc).__name__, str(exc), stderr)
    except GeometryError as exc:
        return _error(EXIT_VALIDATION, "ValidationError", f"{type(exc).__name__}: {exc}", stderr)
    except SolverError as exc:
        return _error(EXIT_SOLVER, "SolverError", f"{type(exc).__name__}: {exc}", stderr)
    except OSError as exc:
        return _error(EXIT_PARSE, "ParseError", str(exc), stderr)
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to exit code 1
        return _error(EXIT_INTERNAL, "InternalError", f"{type(exc).__name__}: {exc}", stderr)


if __name__ == "__main__":
    sys.exit(main())
