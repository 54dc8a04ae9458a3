"""Command-line front end.

    olgland simulate <config> -o <dir>
    olgland diagnose <config> -o <dir>
    olgland reproduce <fig1|fig2> -o <dir>
    olgland sweep <config> -o <dir>

``-o`` defaults to ``$OLGLAND_OUTPUT_DIR`` (or ``./output``).  Exit codes:
0 success, 2 equilibrium cannot be constructed, 3 I/O failure, 4 usage.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from . import __version__
from .config import ConfigError, config_to_dict, dump_config, load_config, parse_config, preset, sweep_points, with_params
from .diagnostics import DiagnosticsReport, diagnose
from .equilibrium import EquilibriumPath, ScenarioConfig, build
from .errors import ConstructionError
from .welfare import ImprovementReport, improvement_search

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONSTRUCTION, EXIT_IO, EXIT_USAGE = 0, 2, 3, 4
OUTPUT_ENV = "OLGLAND_OUTPUT_DIR"

SIMULATE_COLUMNS = ("t", "w", "r", "P", "e_y", "c_y", "c_o", "R", "log_q", "savings_per_capita")


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    s = f"{float(x):.12g}"
    return "0" if s == "-0" else s


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def path_rows(path: EquilibriumPath) -> List[tuple]:
    return list(
        zip(path.t.astype(int), path.w, path.r, path.P, path.e_y, path.y, path.z, path.R, path.log_q, path.savings)
    )


def write_manifest(out_dir: Path, scenario_id: str, cfg: Optional[ScenarioConfig], outputs: List[Path], started: float, **extra) -> Path:
    manifest = {
        "scenario_id": scenario_id,
        "config": None if cfg is None else config_to_dict(cfg),
        "config_text": None if cfg is None else dump_config(cfg),
        "versions": {"olgland": __version__, "numpy": np.__version__},
        "outputs": [str(p) for p in outputs],
        "wall_clock_seconds": time.perf_counter() - started,
        **extra,
    }
    target = out_dir / "manifest.json"
    target.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return target


def diagnostics_document(scenario_id: str, cfg: ScenarioConfig, report: DiagnosticsReport, welfare: ImprovementReport) -> dict:
    return {
        "scenario_id": scenario_id,
        "kind": cfg.price.kind.value,
        "diagnostics": report.to_dict(),
        "improvement": welfare.to_dict(),
        "notes": (
            "efficiency_evidence requires the Cass criterion and a positive curvature bound mu; "
            "a failed improvement search within the young-tax/old-transfer family does not certify efficiency"
        ),
    }


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _load(config_path: str) -> ScenarioConfig:
    try:
        cfg, _ = load_config(config_path)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {config_path}") from None
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def cmd_simulate(config_path: str, out_dir: Path) -> Path:
    started = time.perf_counter()
    cfg = _load(config_path)
    path = build(cfg)
    scenario_id = Path(config_path).stem
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = write_csv(out_dir / f"{scenario_id}.csv", SIMULATE_COLUMNS, path_rows(path))
    write_manifest(out_dir, scenario_id, cfg, [csv_path], started, t0=path.t0)
    return csv_path


def run_diagnostics(cfg: ScenarioConfig, scenario_id: str) -> dict:
    path = build(cfg)
    report = diagnose(path, cfg)
    welfare = improvement_search(path, cfg.pref, cfg.demo)
    return diagnostics_document(scenario_id, cfg, report, welfare)


def cmd_diagnose(config_path: str, out_dir: Path) -> Path:
    started = time.perf_counter()
    cfg = _load(config_path)
    scenario_id = Path(config_path).stem
    doc = run_diagnostics(cfg, scenario_id)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / f"{scenario_id}_report.json"
    target.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    write_manifest(out_dir, scenario_id, cfg, [target], started)
    return target


FIGURE_PANELS = {
    "a_young": ("t", "endowment", "consumption", "e_y", "w", "savings"),
    "b_old": ("t", "endowment", "consumption"),
    "c_rent_price": ("t", "rent", "price"),
    "d_interest": ("t", "R"),
}


def cmd_reproduce(figure: str, out_dir: Path) -> List[Path]:
    started = time.perf_counter()
    try:
        cfg = preset(figure)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    path = build(cfg)
    t = path.t.astype(int)
    old_endowment = np.full(len(t), cfg.e_o)
    series = {
        "a_young": zip(t, path.e_y + path.w, path.y, path.e_y, path.w, path.savings),
        "b_old": zip(t, old_endowment, path.z),
        "c_rent_price": zip(t, path.r, path.P),
        "d_interest": zip(t, path.R),
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = [write_csv(out_dir / f"{figure}_{name}.csv", FIGURE_PANELS[name], rows) for name, rows in series.items()]
    write_manifest(out_dir, figure, cfg, outputs, started)
    return outputs


SUMMARY_SCALARS = (
    "has_bubble",
    "bubble_verdict",
    "cass_verdict",
    "cass_holds",
    "asymptotically_bubbly",
    "detrended_price_inf",
    "natural_rate",
    "rent_growth",
    "growth",
    "necessity_holds",
    "eo_bound",
    "p_bound",
    "necessity2_bound",
    "p_star",
    "pv_endowment_verdict",
    "mu",
    "mu_degenerate",
    "efficiency_evidence",
    "improvement",
    "improvement_T_start",
)


def _summary_row(doc: dict) -> Dict:
    d = doc["diagnostics"]
    return {
        "has_bubble": d["has_bubble"],
        "bubble_verdict": d["bubble"]["verdict"],
        "cass_verdict": d["cass"]["verdict"],
        "cass_holds": d["cass_holds"],
        "asymptotically_bubbly": d["asymptotically_bubbly"],
        "detrended_price_inf": d["detrended_price_inf"],
        "natural_rate": d["natural_rate"],
        "rent_growth": d["rent_growth"],
        "growth": d["growth"],
        "necessity_holds": d["necessity_holds"],
        **{k: d["thresholds"][k] for k in ("eo_bound", "p_bound", "necessity2_bound", "p_star")},
        "pv_endowment_verdict": d["pv_endowment"]["verdict"],
        "mu": d["mu"],
        "mu_degenerate": d["mu_degenerate"],
        "efficiency_evidence": d["efficiency_evidence"],
        "improvement": doc["improvement"]["verdict"],
        "improvement_T_start": doc["improvement"]["T_start"],
    }


def cmd_sweep(config_path: str, out_dir: Path) -> Path:
    started = time.perf_counter()
    try:
        text = Path(config_path).read_text()
    except FileNotFoundError:
        raise UsageError(f"config file not found: {config_path}") from None
    try:
        base = parse_config(text)
        _, grid = load_config(config_path)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None

    out_dir.mkdir(parents=True, exist_ok=True)
    keys = list(grid)
    header = ["point", *keys, "status", "error", *SUMMARY_SCALARS]
    rows, outputs = [], []
    for n, point in enumerate(sweep_points(grid)):
        point_id = f"point_{n:03d}"
        row = {"point": point_id, **point, "status": "ok", "error": ""}
        try:
            cfg = with_params(base, **point)
            doc = run_diagnostics(cfg, point_id)
        except (ConstructionError, ConfigError) as exc:
            row.update(status="failed", error=str(exc))
            log.warning("%s failed: %s", point_id, exc)
        else:
            doc["point"] = point
            target = out_dir / f"{point_id}_report.json"
            target.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
            outputs.append(target)
            row.update(_summary_row(doc))
        rows.append([row.get(k) for k in header])
    summary = write_csv(out_dir / "summary.csv", header, rows)
    write_manifest(out_dir, Path(config_path).stem, base, [summary, *outputs], started, grid=grid)
    return summary


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="olgland", description="OLG land-economy equilibria: build, diagnose, reproduce, sweep.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    default_out = os.environ.get(OUTPUT_ENV, "output")
    for name, target, help_ in (
        ("simulate", "config", "write the equilibrium path as CSV"),
        ("diagnose", "config", "write bubble/Cass/welfare diagnostics as JSON"),
        ("reproduce", "figure", "write the four panel series of fig1 or fig2"),
        ("sweep", "config", "diagnose every point of the [sweep] grid"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument(target)
        p.add_argument("-o", "--output", default=default_out, type=Path)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    commands = {
        "simulate": lambda: cmd_simulate(args.config, args.output),
        "diagnose": lambda: cmd_diagnose(args.config, args.output),
        "reproduce": lambda: cmd_reproduce(args.figure, args.output),
        "sweep": lambda: cmd_sweep(args.config, args.output),
    }
    try:
        result = commands[args.command]()
    except UsageError as exc:
        print(f"olgland: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConstructionError as exc:
        print(f"olgland: cannot construct equilibrium: {exc} [bound: {exc.bound_name}]", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except OSError as exc:
        print(f"olgland: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for item in result if isinstance(result, list) else [result]:
        print(item)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
