"""Batch front end: ``run``, ``verify`` and ``report`` subcommands.

Exit codes: 0 success, 2 configuration or missing-artifact error, 3 the
evolution produced non-finite values, 4 a selected check failed.

Artifacts written to ``output.dir``:

``energies.csv``
    ``field, s, order_I, order_j, EH, ET, EP, EK, total``; one row per
    field, slice and ``(|I|, j)`` group up to ``energy.order``.
``snapshots/t_<time>.csv``
    ``t, x, u, ut, v, vt`` at each ``snapshot.times`` entry.
``run_meta.json``
    Resolved configuration, package versions, CFL ratio, domain sizing
    (``t_max`` of the sizing rule, ``t_end`` of the last stored level) and
    the measured data constant ``C0``.
``report.json``
    One record per check (``verify``).
"""
from __future__ import annotations

import argparse
import csv
import json
import platform
import sys
from importlib import metadata
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .config import ConfigError, Settings, load_config, settings_from_dict
from .energy import CSV_COLUMNS, high_order_energy, write_energy_csv
from .solver import (DomainTooSmall, NonFiniteField, RunRecord, SupportTruncated, WeightNotIntegrable,
                     run, t_max_for)
from .verify.bootstrap import measure_C0
from .verify.report import write_report
from .verify.suite import RUN_GROUPS, RunRequired, parse_groups, run_checks

__all__ = ["main", "cmd_run", "cmd_verify", "cmd_report", "EXIT_CONFIG", "EXIT_NUMERIC", "EXIT_CHECK"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_CHECK = 4

META_NAME = "run_meta.json"
ENERGY_NAME = "energies.csv"
REPORT_NAME = "report.json"
DIAGNOSTICS_NAME = "diagnostics.json"


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _versions() -> Dict[str, str]:
    out = {"python": platform.python_version()}
    for dist in ("artifact", "numpy", "scipy", "sympy"):
        try:
            out[dist] = metadata.version(dist)
        except metadata.PackageNotFoundError:
            out[dist] = "unknown"
    return out


def _dump_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _evolve(settings: Settings) -> RunRecord:
    try:
        return run(settings.run_config())
    except (DomainTooSmall, SupportTruncated, WeightNotIntegrable) as exc:
        raise ConfigError(str(exc)) from None


def _energy_rows(record: RunRecord, settings: Settings):
    p = record.params
    order = settings["energy.order"]
    s_list = sorted(settings["slices.s_list"])
    s0 = s_list[0]
    for s in s_list:
        yield "u", high_order_energy(record.u, s, order, p.gamma, 0.0, s0=s0)
        yield "v", high_order_energy(record.v, s, order, p.gamma, p.c, s0=s0)


def _write_snapshots(record: RunRecord, out: Path) -> None:
    if not record.snapshots:
        return
    snap_dir = out / "snapshots"
    snap_dir.mkdir(exist_ok=True)
    for st in record.snapshots:
        with (snap_dir / f"t_{st.t:.6f}.csv").open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("t", "x", "u", "ut", "v", "vt"))
            for row in zip(st.x, st.u, st.ut, st.v, st.vt):
                w.writerow((repr(float(st.t)),) + tuple(repr(float(v)) for v in row))


def cmd_run(config_path) -> int:
    """Evolve, sweep the slice energies and write the run artifacts."""
    try:
        settings = load_config(config_path)
        params = settings.params()
    except (ConfigError, ValueError) as exc:
        _err(str(exc))
        return EXIT_CONFIG
    out = settings.output_dir
    out.mkdir(parents=True, exist_ok=True)
    try:
        record = _evolve(settings)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    except NonFiniteField as exc:
        _dump_json(out / DIAGNOSTICS_NAME, {"error": "NonFiniteField", "message": str(exc),
                                            "config": settings.as_dict()})
        _err(f"{exc} (diagnostics in {out / DIAGNOSTICS_NAME})")
        return EXIT_NUMERIC
    write_energy_csv(out / ENERGY_NAME, _energy_rows(record, settings))
    _write_snapshots(record, out)
    c0 = measure_C0(record, min(settings["slices.s_list"]))
    resolved = settings.as_dict()
    meta = {
        "config": resolved,
        "halfwidth_mode": "auto" if settings["domain.halfwidth"] is None else "fixed",
        "halfwidth": record.halfwidth,
        "support_radius": record.support,
        "t_max": t_max_for(settings.run_config()),
        "t_end": record.t_end,
        "cfl": record.cfl,
        "dt": record.dt,
        "grid_points": int(record.x.size),
        "C0": c0,
        "C1": settings["bootstrap.c1_factor"] * c0,
        "data_norms": dict(sorted(record.data_norms.items())),
        "final_edge_ratio": record.final_edge_ratio,
        "versions": _versions(),
    }
    _dump_json(out / META_NAME, meta)
    print(f"run complete: {out / ENERGY_NAME}, {out / META_NAME}")
    return EXIT_OK


def _load_meta(run_dir: Path) -> Optional[dict]:
    path = run_dir / META_NAME
    if not path.is_file():
        return None
    return json.loads(path.read_text())


def cmd_verify(config_path) -> int:
    """Run the selected check groups and write ``report.json``; exit 4 on any failure."""
    try:
        settings = load_config(config_path)
        groups = parse_groups(settings["verify.checks"])
    except (ConfigError, KeyError) as exc:
        _err(str(exc.args[0]) if isinstance(exc, KeyError) else str(exc))
        return EXIT_CONFIG
    out = settings.output_dir
    record = config = None
    if any(g in RUN_GROUPS for g in groups):
        meta = _load_meta(out)
        if meta is None:
            _err(f"checks {sorted(RUN_GROUPS & set(groups))} need a run directory: no {META_NAME} in "
                 f"{out}; run the 'run' subcommand with this config first")
            return EXIT_CONFIG
        stored = settings_from_dict(meta["config"], settings.base_dir)
        config = stored.run_config()
        try:
            record = _evolve(stored)
        except (ConfigError, NonFiniteField) as exc:
            _err(str(exc))
            return EXIT_CONFIG
    try:
        results = run_checks(groups, record, config)
    except RunRequired as exc:
        _err(str(exc))
        return EXIT_CONFIG
    out.mkdir(parents=True, exist_ok=True)
    doc = write_report(out / REPORT_NAME, results)
    for r in results:
        print(r.line())
    return EXIT_OK if doc["all_passed"] else EXIT_CHECK


def _read_energies(path: Path) -> Dict[float, Dict[str, float]]:
    table: Dict[float, Dict[str, float]] = {}
    with path.open() as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path} does not have the columns {CSV_COLUMNS}")
        for row in reader:
            s = float(row["s"])
            entry = table.setdefault(s, {})
            for key in ("EH", "ET", "EP", "EK"):
                name = f"{row['field']}_{key}"
                entry[name] = entry.get(name, 0.0) + float(row[key])
    return dict(sorted(table.items()))


def cmd_report(run_dir) -> int:
    """Print per-slice energies and, when present, the verification verdicts."""
    run_dir = Path(run_dir)
    energy_path = run_dir / ENERGY_NAME
    meta = _load_meta(run_dir) if run_dir.is_dir() else None
    if meta is None or not energy_path.is_file():
        _err(f"{run_dir} lacks {ENERGY_NAME} or {META_NAME}; run the 'run' subcommand first")
        return EXIT_CONFIG
    try:
        table = _read_energies(energy_path)
    except (ValueError, KeyError) as exc:
        _err(str(exc))
        return EXIT_CONFIG
    lines: List[str] = []
    lines.append(f"run: C0 = {meta['C0']:.6g}, C1 = {meta['C1']:.6g}, cfl = {meta['cfl']:g}, "
                 f"halfwidth = {meta['halfwidth']:.6g}")
    lines.append("")
    lines.append("slice energies, summed over |I| + j <= energy.order "
                 "[claim: energy on F_s splits into hyperbolic, transition and flat parts]")
    head = ("s", "u_EH", "u_ET", "u_EP", "u_EK", "v_EH", "v_ET", "v_EP", "v_EK")
    lines.append("  ".join(f"{h:>12}" for h in head))
    for s, e in table.items():
        vals = [e.get(k, 0.0) for k in head[1:]]
        lines.append("  ".join([f"{s:>12.6g}"] + [f"{v:>12.5e}" for v in vals]))
    report_path = run_dir / REPORT_NAME
    if report_path.is_file():
        doc = json.loads(report_path.read_text())
        lines.append("")
        lines.append("checks")
        for rec in doc["checks"]:
            verdict = "PASS" if rec["passed"] else "FAIL"
            val = rec.get("value")
            val_s = "" if val is None or isinstance(val, str) else f" value={val:.6g}"
            lines.append(f"  [{verdict}] {rec['name']}:{val_s} [claim: {rec['claim']}]")
            if rec["name"] == "kg_decay":
                lines.append(f"      fitted exponent {val:.4f} +- {rec['details']['stderr']:.4f}")
            if rec["name"] == "bootstrap_ledger":
                for row, fit in sorted(rec["details"]["fits"].items()):
                    exp = fit["exponent"]
                    exp_s = "n/a" if exp is None else f"{exp:.4f}"
                    lines.append(f"      {row:<9} growth exponent {exp_s} (ceiling {fit['ceiling']:g})")
    else:
        lines.append("")
        lines.append("no report.json yet; run the 'verify' subcommand for check verdicts")
    print("\n".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="combfol", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="evolve and write energies.csv, snapshots and run_meta.json")
    p_run.add_argument("config", help="key=value configuration file")
    p_ver = sub.add_parser("verify", help="run the checks selected by verify.checks")
    p_ver.add_argument("config", help="key=value configuration file")
    p_rep = sub.add_parser("report", help="print a summary of a run directory")
    p_rep.add_argument("run_dir", help="directory holding energies.csv and run_meta.json")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args.config)
    if args.command == "verify":
        return cmd_verify(args.config)
    return cmd_report(args.run_dir)


if __name__ == "__main__":
    sys.exit(main())
