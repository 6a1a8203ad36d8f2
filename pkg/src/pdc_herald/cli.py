"""Command-line front end: sweeps, figure data, optimisation and multiplexing.

Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 infeasible
optimisation, 4 numeric budget exceeded.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .detector_povm import CLICK, PNR, DetectorModel
from .errors import BudgetExceeded, Infeasible, ModeTailTooHeavy, PDCError, TruncationCapExceeded, Unreachable
from .fock_core import TruncationPolicy, mean_photon_number, squeezing_db
from .herald_multimode import DEFAULT_B_MAX, DEFAULT_MODE_TAIL, build_modes, mu_from_schmidt, multimode_frontier, schmidt_number
from .herald_single_mode import frontier, optimal_r
from .multiplex import sources_needed, switched_probability
from .tables import FRONTIER_COLUMNS, MULTIPLEX_COLUMNS, write_table

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_BUDGET = 4

JOBS_ENV = "PDC_HERALD_JOBS"
FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig6")
FIGURE_ETAS = (0.25, 0.5, 0.75, 1.0)
FIGURE_MODE_NUMBERS = (1, 2, 5, 10)
FIGURE_MULTIPLEX = (1, 2, 5, 10, 17)
OPTIMIZE_TARGETS = (0.9, 0.99, 0.999)

DEFAULT_CONFIG = {
    "source": {
        "kind": "single_mode",
        "r_grid": {"start": 0.01, "stop": 3.0, "num": 300, "spacing": "log"},
        "mu": None,
        "K": None,
        "B_grid": {"start": DEFAULT_B_MAX / 200, "stop": DEFAULT_B_MAX, "num": 200, "spacing": "linear"},
        "K_max": None,
        "mode_tail_tol": DEFAULT_MODE_TAIL,
    },
    "detector": {"family": PNR, "efficiency": 1.0, "dark_count": 0.0, "herald_n": 1, "coefficients": None},
    "policy": {"tolerance": 1e-12, "hard_cap": 4096},
    "output": {"path": "-", "format": "csv"},
}


class ConfigError(PDCError):
    """Invalid configuration; the message names the offending field."""


@dataclass(frozen=True)
class SweepSpec:
    kind: str
    detector: DetectorModel
    policy: TruncationPolicy
    r_grid: tuple[float, ...] = ()
    mu: float | None = None
    b_grid: tuple[float, ...] = ()
    k_max: int | None = None
    mode_tail_tol: float = DEFAULT_MODE_TAIL
    output_path: str = "-"
    output_format: str = "csv"


def parse_grid(value, field: str) -> tuple[float, ...]:
    """Explicit list, ``{start, stop, num[, spacing]}`` or ``{start, stop, step}``."""
    if isinstance(value, str):
        value = _grid_from_flag(value, field)
    if isinstance(value, (list, tuple)):
        try:
            grid = [float(v) for v in value]
        except (TypeError, ValueError) as err:
            raise ConfigError(f"{field}: grid entries must be numbers ({err})") from None
    elif isinstance(value, dict):
        unknown = set(value) - {"start", "stop", "num", "step", "spacing"}
        if unknown:
            raise ConfigError(f"{field}: unknown grid keys {sorted(unknown)}")
        try:
            start, stop = float(value["start"]), float(value["stop"])
        except KeyError as err:
            raise ConfigError(f"{field}: missing {err.args[0]!r}") from None
        if "step" in value:
            step = float(value["step"])
            if step <= 0:
                raise ConfigError(f"{field}.step: must be positive")
            num = int(round((stop - start) / step)) + 1
        elif "num" in value:
            num = int(value["num"])
        else:
            raise ConfigError(f"{field}: give either 'num' or 'step'")
        spacing = value.get("spacing", "linear")
        if num < 1:
            grid = []
        elif spacing == "linear":
            grid = np.linspace(start, stop, num).tolist()
        elif spacing == "log":
            if start <= 0:
                raise ConfigError(f"{field}.start: log spacing needs a positive start")
            grid = np.geomspace(start, stop, num).tolist()
        else:
            raise ConfigError(f"{field}.spacing: expected 'linear' or 'log', got {spacing!r}")
    else:
        raise ConfigError(f"{field}: expected a list or a grid object")
    if not grid:
        raise ConfigError(f"{field}: grid is empty")
    if any(not math.isfinite(g) for g in grid):
        raise ConfigError(f"{field}: grid values must be finite")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError(f"{field}: grid must be strictly increasing")
    return tuple(grid)


def _grid_from_flag(text: str, field: str):
    # "a,b,c" is an explicit list; "start:stop:num[:log]" a generated grid
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise ConfigError(f"{field}: expected start:stop:num[:log], got {text!r}")
        try:
            grid = {"start": float(parts[0]), "stop": float(parts[1]), "num": int(parts[2])}
        except ValueError as err:
            raise ConfigError(f"{field}: {err}") from None
        if len(parts) == 4:
            grid["spacing"] = parts[3]
        return grid
    if not text.strip():
        return []
    try:
        return [float(t) for t in text.split(",")]
    except ValueError as err:
        raise ConfigError(f"{field}: {err}") from None


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"{where}: unknown field")
        if isinstance(base[key], dict) and key not in ("r_grid", "B_grid"):
            if not isinstance(val, dict):
                raise ConfigError(f"{where}: expected an object")
            out[key] = _merge(base[key], val, where + ".")
        else:
            out[key] = val
    return out


def load_config(path) -> dict:
    """Read a JSON config and merge it over :data:`DEFAULT_CONFIG`."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: line {err.lineno}, column {err.colno}: {err.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return _merge(DEFAULT_CONFIG, doc)


def detector_from_config(cfg: dict) -> DetectorModel:
    try:
        return DetectorModel(
            family=cfg["family"],
            efficiency=float(cfg["efficiency"]),
            dark_count=float(cfg["dark_count"]),
            herald_n=int(cfg["herald_n"]),
            coefficients=tuple(cfg["coefficients"]) if cfg.get("coefficients") else None,
        )
    except (TypeError, ValueError) as err:
        raise ConfigError(f"detector: {err}") from None


def policy_from_config(cfg: dict) -> TruncationPolicy:
    try:
        return TruncationPolicy(float(cfg["tolerance"]), int(cfg["hard_cap"]))
    except (TypeError, ValueError) as err:
        raise ConfigError(f"policy: {err}") from None


def spec_from_config(cfg: dict) -> SweepSpec:
    src = cfg["source"]
    det = detector_from_config(cfg["detector"])
    policy = policy_from_config(cfg["policy"])
    out = cfg["output"]
    if out["format"] not in ("csv", "json"):
        raise ConfigError(f"output.format: expected 'csv' or 'json', got {out['format']!r}")
    if src["kind"] == "single_mode":
        return SweepSpec("single_mode", det, policy, r_grid=parse_grid(src["r_grid"], "source.r_grid"),
                         output_path=str(out["path"]), output_format=out["format"])
    if src["kind"] != "multimode":
        raise ConfigError(f"source.kind: expected 'single_mode' or 'multimode', got {src['kind']!r}")
    if (src["mu"] is None) == (src["K"] is None):
        raise ConfigError("source: give exactly one of 'mu' or 'K' for a multimode source")
    try:
        mu = float(src["mu"]) if src["mu"] is not None else mu_from_schmidt(float(src["K"]))
    except ValueError as err:
        raise ConfigError(f"source.K: {err}") from None
    if not 0 <= mu < 1:
        raise ConfigError(f"source.mu: must lie in [0, 1), got {mu!r}")
    k_max = src["K_max"]
    if k_max is not None and (int(k_max) != k_max or k_max < 1):
        raise ConfigError(f"source.K_max: must be a positive integer, got {k_max!r}")
    grid = parse_grid(src["B_grid"], "source.B_grid")
    if grid[0] < 0:
        raise ConfigError("source.B_grid: gains must be >= 0")
    return SweepSpec("multimode", det, policy, mu=mu, b_grid=grid,
                     k_max=None if k_max is None else int(k_max),
                     mode_tail_tol=float(src["mode_tail_tol"]),
                     output_path=str(out["path"]), output_format=out["format"])


def _detector_cells(det: DetectorModel) -> dict:
    return {"eta": det.efficiency, "dark": det.dark_count, "detector": det.label}


def sweep_rows(spec: SweepSpec, jobs: int = 1) -> list[dict]:
    """One row per grid point; failed points carry their error name in ``status``."""
    cells = _detector_cells(spec.detector)
    rows = []
    if spec.kind == "single_mode":
        for pt in frontier(spec.detector, spec.r_grid, spec.policy, strict=False, jobs=jobs):
            rows.append({"r": pt.r, **cells, "fidelity": pt.fidelity, "herald_prob": pt.herald_prob,
                         "status": pt.status})
        return rows
    # mode truncation depends only on mu and k_max; fail once rather than per point
    k_eff = schmidt_number(build_modes(spec.mu, 1.0, spec.k_max, spec.mode_tail_tol))
    pts = multimode_frontier(spec.mu, spec.b_grid, spec.detector, spec.policy, spec.k_max,
                             spec.mode_tail_tol, strict=False, jobs=jobs)
    for pt in pts:
        rows.append({"B": pt.r, "mu": spec.mu, "K_eff": k_eff, **cells, "fidelity": pt.fidelity,
                     "herald_prob": pt.herald_prob, "status": pt.status})
    return rows


def run_sweep(spec: SweepSpec, jobs: int = 1) -> tuple[list[dict], int]:
    rows = sweep_rows(spec, jobs)
    try:
        write_table(rows, spec.output_path, spec.output_format)
    except OSError as err:
        print(f"error: cannot write {spec.output_path}: {err}", file=sys.stderr)
        return rows, EXIT_IO
    return rows, EXIT_OK


def figure_tables(fig: str, jobs: int = 1, policy: TruncationPolicy | None = None) -> dict:
    """Curve tables for one figure, keyed by output file stem.

    Each value is ``(columns, rows)``; ``"<fig>_meta"`` maps to a metadata dict.
    """
    if fig not in FIGURES:
        raise ConfigError(f"figure: expected one of {FIGURES}, got {fig!r}")
    policy = policy or TruncationPolicy()
    r_grid = np.geomspace(0.01, 3.0, 300)
    b_grid = np.linspace(DEFAULT_B_MAX / 200, DEFAULT_B_MAX, 200)
    tables = {}
    meta = {"figure": fig, "policy": {"tolerance": policy.tolerance, "hard_cap": policy.hard_cap}}

    def single(det):
        spec = SweepSpec("single_mode", det, policy, r_grid=tuple(r_grid))
        return FRONTIER_COLUMNS, sweep_rows(spec, jobs)

    if fig in ("fig2", "fig3"):
        family = CLICK if fig == "fig2" else PNR
        for eta in FIGURE_ETAS:
            tables[f"{fig}_eta{eta:g}"] = single(DetectorModel(family, eta))
        meta.update(detector=family, etas=list(FIGURE_ETAS),
                    r_grid={"start": 0.01, "stop": 3.0, "num": 300, "spacing": "log"},
                    note="efficiency set is a reproduction convention; the source figure does not list it")
    elif fig in ("fig4", "fig5"):
        family = CLICK if fig == "fig4" else PNR
        det = DetectorModel(family, 1.0)
        for k in FIGURE_MODE_NUMBERS:
            spec = SweepSpec("multimode", det, policy, mu=mu_from_schmidt(k), b_grid=tuple(b_grid))
            tables[f"{fig}_K{k}"] = (FRONTIER_COLUMNS, sweep_rows(spec, jobs))
        meta.update(detector=family, eta=1.0, K=list(FIGURE_MODE_NUMBERS),
                    B_grid={"start": DEFAULT_B_MAX / 200, "stop": DEFAULT_B_MAX, "num": 200})
    else:
        tables["fig6_binary"] = single(DetectorModel(CLICK, 1.0))
        cols, pnr_rows = single(DetectorModel(PNR, 1.0))
        tables["fig6_pnr"] = (cols, pnr_rows)
        mux = []
        for n in FIGURE_MULTIPLEX:
            for row in pnr_rows:
                nu = row["herald_prob"]
                mux.append({"r": row["r"], "fidelity": row["fidelity"], "nu": nu, "n_sources": n,
                            "switched_prob": None if nu is None else switched_probability(nu, n)})
        tables["fig6_multiplex"] = (MULTIPLEX_COLUMNS, mux)
        meta.update(detector="click and pnr1", eta=1.0, n_sources=list(FIGURE_MULTIPLEX),
                    r_grid={"start": 0.01, "stop": 3.0, "num": 300, "spacing": "log"})
    tables[f"{fig}_meta"] = meta
    return tables


def run_figure(fig: str, outdir, jobs: int = 1, fmt: str = "csv") -> list[Path]:
    outdir = Path(outdir)
    written = []
    for stem, payload in figure_tables(fig, jobs).items():
        if stem.endswith("_meta"):
            path = outdir / f"{stem}.json"
            outdir.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        else:
            columns, rows = payload
            path = outdir / f"{stem}.{fmt}"
            write_table(rows, path, fmt, columns)
        written.append(path)
    return written


def optimize_report(det: DetectorModel, f_min: float | None, policy: TruncationPolicy | None = None) -> dict:
    """Best heralding rate at ``F >= f_min`` and the derived source figures."""
    policy = policy or TruncationPolicy()
    opt = optimal_r(det, 0.0 if f_min is None else f_min, policy)
    needed = {}
    for t in OPTIMIZE_TARGETS:
        needed[repr(t)] = sources_needed(opt.herald_prob, t) if 0 < opt.herald_prob < 1 else None
    return {
        "detector": det.label,
        "eta": det.efficiency,
        "dark": det.dark_count,
        "f_min": f_min,
        "r": opt.r,
        "x": opt.x,
        "herald_prob": opt.herald_prob,
        "fidelity": opt.fidelity,
        "squeezing_db": squeezing_db(opt.r),
        "mean_photons": mean_photon_number(opt.r),
        "unbounded": opt.unbounded,
        "sources_needed": needed,
    }


def _default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"{JOBS_ENV}: expected an integer, got {raw!r}") from None


def _add_detector_flags(p, defaults=True):
    p.add_argument("--detector", choices=["click", "noclick", "pnr", "custom"], default=None,
                   help="detector family")
    p.add_argument("--eta", type=float, default=None, help="detection efficiency")
    p.add_argument("--dark", type=float, default=None, help="dark-count probability")
    p.add_argument("--herald-n", type=int, default=None, help="photon number heralded on (pnr)")
    p.add_argument("--tolerance", type=float, default=None, help="series tail tolerance")
    p.add_argument("--hard-cap", type=int, default=None, help="largest photon-number cutoff")


def _flag_overrides(args) -> dict:
    over = {"source": {}, "detector": {}, "policy": {}, "output": {}}
    pairs = [
        ("detector", "family", "detector"), ("detector", "efficiency", "eta"),
        ("detector", "dark_count", "dark"), ("detector", "herald_n", "herald_n"),
        ("policy", "tolerance", "tolerance"), ("policy", "hard_cap", "hard_cap"),
        ("source", "kind", "source"), ("source", "r_grid", "r_grid"), ("source", "B_grid", "b_grid"),
        ("source", "mu", "mu"), ("source", "K", "K"), ("source", "K_max", "k_max"),
        ("output", "path", "output"), ("output", "format", "format"),
    ]
    for section, key, attr in pairs:
        val = getattr(args, attr, None)
        if val is not None:
            over[section][key] = val
    return {k: v for k, v in over.items() if v}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdc-herald", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="rate/fidelity sweep over a squeezing or gain grid")
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--source", choices=["single_mode", "multimode"], default=None)
    p.add_argument("--r-grid", default=None, help="'a,b,c' or 'start:stop:num[:log]'")
    p.add_argument("--b-grid", default=None, help="gain grid, same syntax as --r-grid")
    p.add_argument("--mu", type=float, default=None, help="mode decay parameter")
    p.add_argument("--K", type=float, default=None, help="effective mode number (sets mu)")
    p.add_argument("--k-max", type=int, default=None, help="number of retained modes")
    p.add_argument("--output", "-o", default=None, help="output path, '-' for stdout")
    p.add_argument("--format", choices=["csv", "json"], default=None)
    p.add_argument("--jobs", type=int, default=None, help=f"worker threads (default ${JOBS_ENV} or 1)")
    p.add_argument("--print-config", action="store_true", help="print the effective config and exit")
    _add_detector_flags(p)

    p = sub.add_parser("figure", help="curve data for one of the standard figures (fig2..fig6)")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--outdir", default=".", help="directory for the CSV files")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--jobs", type=int, default=None)

    p = sub.add_parser("optimize", help="maximise the heralding rate under a fidelity floor")
    p.add_argument("--f-min", type=float, default=None, help="minimum fidelity (default: none)")
    p.add_argument("--json", default=None, help="also write the report to this JSON file")
    _add_detector_flags(p)

    p = sub.add_parser("multiplex", help="switched-source probability or source count")
    p.add_argument("--nu", type=float, required=True, help="per-source heralding probability")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=int, help="number of sources")
    g.add_argument("--target", type=float, help="required overall probability (strict >)")

    sub.add_parser("print-config", help="print the default sweep config")
    return parser


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config) if args.config else copy.deepcopy(DEFAULT_CONFIG)
    cfg = _merge(cfg, _flag_overrides(args))
    if args.print_config:
        print(json.dumps(cfg, indent=2))
        return EXIT_OK
    spec = spec_from_config(cfg)
    jobs = args.jobs if args.jobs is not None else _default_jobs()
    return run_sweep(spec, jobs)[1]


def _cmd_figure(args) -> int:
    jobs = args.jobs if args.jobs is not None else _default_jobs()
    try:
        paths = run_figure(args.figure, args.outdir, jobs, args.format)
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO
    for path in paths:
        print(path)
    return EXIT_OK


def _cmd_optimize(args) -> int:
    cfg = _merge(DEFAULT_CONFIG, _flag_overrides(args))
    det = detector_from_config(cfg["detector"])
    policy = policy_from_config(cfg["policy"])
    if args.f_min is not None and not 0 <= args.f_min <= 1:
        raise ConfigError(f"--f-min: must lie in [0, 1], got {args.f_min}")
    rep = optimize_report(det, args.f_min, policy)
    print(f"detector       {rep['detector']} (eta={rep['eta']:g}, dark={rep['dark']:g})")
    print(f"r*             {rep['r']:.10f}")
    print(f"x* = tanh^2 r  {rep['x']:.10f}")
    print(f"p*             {rep['herald_prob']:.10f}")
    print(f"F*             {rep['fidelity']:.10f}")
    print(f"squeezing      {rep['squeezing_db']:.4f} dB")
    print(f"<n>            {rep['mean_photons']:.10f}")
    if rep["unbounded"]:
        print("note           rate still rising at the largest supported squeezing")
    for t, n in rep["sources_needed"].items():
        print(f"sources(>{t})  {n if n is not None else '-'}")
    if args.json:
        try:
            Path(args.json).write_text(json.dumps(rep, indent=2) + "\n", encoding="utf-8")
        except OSError as err:
            print(f"error: cannot write {args.json}: {err}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK


def _cmd_multiplex(args) -> int:
    try:
        if args.n is not None:
            print(repr(switched_probability(args.nu, args.n)))
        else:
            n = sources_needed(args.nu, args.target)
            print(n)
            print(repr(switched_probability(args.nu, n)))
    except ValueError as err:
        raise ConfigError(str(err)) from None
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "sweep": _cmd_sweep,
        "figure": _cmd_figure,
        "optimize": _cmd_optimize,
        "multiplex": _cmd_multiplex,
        "print-config": lambda a: print(json.dumps(DEFAULT_CONFIG, indent=2)) or EXIT_OK,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (Infeasible, Unreachable) as err:
        print(f"infeasible: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (TruncationCapExceeded, BudgetExceeded, ModeTailTooHeavy) as err:
        print(f"numeric budget exceeded: {err}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
