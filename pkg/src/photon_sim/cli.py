"""``photon-sim``: run experiments, sweeps and the reproduction suite.

    photon-sim run dsv --r 0.36 --format csv
    photon-sim sweep eta --points 51 --out eta.csv
    photon-sim reproduce-all

Output goes to ``--out`` (relative paths resolve against $PHOTON_SIM_OUTPUT_DIR
when it is set), to ``$PHOTON_SIM_OUTPUT_DIR/<name>.<format>`` when only the
variable is set, and to stdout otherwise.

Exit codes: 0 success, 1 reproduce-all failure, 2 invalid parameters,
3 leakage above the numerical contract.  Errors are written to stderr as a
one-line JSON record ``{"error": ..., "message": ..., "exit_code": ...}``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from . import closed_form as cf
from .detection import DetectorModel
from .schemes import (
    LEAKAGE_BOUND,
    SWEEP_KINDS,
    ThreeCopyConfig,
    default_grid,
    max_three_copy_probability,
    optimize_herald,
    run_dsv_source,
    run_perturbed_bs,
    run_three_copy,
    squeezed_coherent_study,
    sweep,
)
from .sources import QubitAmplitudes

OUTPUT_DIR_ENV = "PHOTON_SIM_OUTPUT_DIR"
EXPERIMENTS = ("dsv", "perturbed", "three-copy", "three-copy-max", "squeezed-coherent", "optimize")
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LEAKAGE = 0, 1, 2, 3
N_OUTPUT_COLUMNS = 6


class LeakageError(RuntimeError):
    pass


@dataclass
class RunConfig:
    experiment: str
    params: dict[str, Any] = field(default_factory=dict)
    out: str | None = None
    format: str = "csv"


@dataclass
class Table:
    columns: list[str]
    rows: list[dict[str, Any]]
    metadata: dict[str, Any] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# formatting


def _cell(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_cell(row.get(c, "")) for c in table.columns])
    return buf.getvalue()


def _jsonable(v: Any) -> Any:
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None  # JSON has no NaN
    return v


def to_json(table: Table, config: RunConfig, kind: str) -> str:
    doc = {
        "schema": "photon-sim/sweep-result/v1",
        "kind": kind,
        "config": asdict(config),
        "columns": table.columns,
        "rows": table.rows,
        "metadata": table.metadata,
    }
    return json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"


# ---------------------------------------------------------------------------
# experiments


def _output_columns(dist: np.ndarray | None) -> dict[str, float]:
    return {f"p_out_{k}": (float(dist[k]) if dist is not None and k < dist.size else math.nan)
            for k in range(N_OUTPUT_COLUMNS)}


def _check_leakage(leakage: float) -> None:
    if leakage > LEAKAGE_BOUND:
        raise LeakageError(f"truncation leakage {leakage:.3g} exceeds the bound {LEAKAGE_BOUND:g}; raise --cutoff")


def _source_table(res, closed_herald: float, closed_purity: float) -> Table:
    _check_leakage(res.leakage)
    pur = res.purity
    diff = abs(res.herald_prob - closed_herald)
    if not math.isnan(pur) and not math.isnan(closed_purity):
        diff = max(diff, abs(pur - closed_purity))
    row = {**res.params, "herald_prob": res.herald_prob, "purity": pur,
           "closed_form_herald_prob": closed_herald, "closed_form_purity": closed_purity,
           "abs_diff": diff, "leakage": res.leakage, **_output_columns(res.output_distribution)}
    return Table(list(row), [row])


def _run_dsv(p: dict[str, Any]) -> Table:
    r, eta, pd = p["r"], p["eta"], p["p_dark"]
    res = run_dsv_source(r, p["varphi"], p["cutoff"], DetectorModel(eta, pd))
    click = cf.dark_click_prob_cf(r, eta, pd)
    purity = abs(cf.dark_purity_cf(r, eta, pd)) if click > 0 else math.nan
    return _source_table(res, click, purity)


def _run_perturbed(p: dict[str, Any]) -> Table:
    r, varphi, d1, d2 = p["r"], p["varphi"], p["delta1"], p["delta2"]
    res = run_perturbed_bs(r, varphi, d1, d2, p["cutoff"])
    amps = cf.perturbed_amplitudes(r, varphi, d1, d2)
    pur = cf.perturbed_purity(amps)
    return _source_table(res, abs(amps.A1) ** 2 / pur if amps.A1 != 0 else 0.0,
                         pur if amps.A1 != 0 else math.nan)


def _run_three_copy(p: dict[str, Any]) -> Table:
    config = ThreeCopyConfig(QubitAmplitudes.from_beta(p["beta"]), p["phi"], p["nu"])
    out = run_three_copy(config, cutoff=p["cutoff"] or 3)
    if out.state is not None:
        _check_leakage(out.state.leakage)
    dist = out.output_distribution
    row = {**config.metadata(), "herald_prob": out.probability,
           "purity": float(dist[1]) if dist is not None else math.nan,
           **_output_columns(dist)}
    layout = row.pop("layout")
    return Table(list(row), [row], {"layout": layout})


def _run_three_copy_max(p: dict[str, Any]) -> Table:
    res = max_three_copy_probability(p["beta"], points=p["points"] or 61)
    row = {**res, "claim_16_beta3_over_81": cf.stated_three_copy_max(p["beta"])}
    return Table(list(row), [row])


def _run_squeezed_coherent(p: dict[str, Any]) -> Table:
    grid = p["r_grid"] or [p["r"]]
    res = squeezed_coherent_study(grid)
    return Table(res.columns, res.rows, res.metadata)


def _run_optimize(p: dict[str, Any]) -> Table:
    r_star, p_star = optimize_herald(p["r_lo"], p["r_hi"], p["tol"])
    row = {"r_star": r_star, "herald_prob": p_star, "r_lo": p["r_lo"], "r_hi": p["r_hi"], "tol": p["tol"]}
    return Table(list(row), [row])


_RUNNERS = {
    "dsv": _run_dsv,
    "perturbed": _run_perturbed,
    "three-copy": _run_three_copy,
    "three-copy-max": _run_three_copy_max,
    "squeezed-coherent": _run_squeezed_coherent,
    "optimize": _run_optimize,
}


# ---------------------------------------------------------------------------
# commands


def _destination(out: str | None, default_name: str) -> Path | None:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if out is None:
        return Path(base) / default_name if base else None
    path = Path(out)
    return Path(base) / path if base and not path.is_absolute() else path


def _emit(text: str, dest: Path | None) -> None:
    if dest is None:
        sys.stdout.write(text)
        return
    dest.parent.mkdir(parents=True, exist_ok=True)
    with open(dest, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _render(table: Table, config: RunConfig, kind: str) -> str:
    return to_csv(table) if config.format == "csv" else to_json(table, config, kind)


def cmd_run(config: RunConfig) -> int:
    if config.experiment not in _RUNNERS:
        raise ValueError(f"unknown experiment {config.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    with warnings.catch_warnings():
        # leakage is enforced explicitly below via exit code 3
        warnings.simplefilter("ignore")
        table = _RUNNERS[config.experiment](config.params)
    _emit(_render(table, config, config.experiment),
          _destination(config.out, f"{config.experiment}.{config.format}"))
    return EXIT_OK


def cmd_sweep(config: RunConfig) -> int:
    kind = config.experiment
    if kind not in SWEEP_KINDS:
        raise ValueError(f"unknown sweep kind {kind!r}; choose from {', '.join(SWEEP_KINDS)}")
    p = config.params
    fixed = {"r": p["r"], "varphi": p["varphi"]}
    if p.get("cutoff"):
        fixed["cutoff"] = p["cutoff"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = sweep(kind, default_grid(kind, p["points"]), fixed, workers=p.get("workers"))
    _check_leakage(res.metadata["leakage_max"])
    table = Table(res.columns, res.rows, {**res.metadata, "axes": res.axes, "grid": res.grid})
    _emit(_render(table, config, f"sweep-{kind}"), _destination(config.out, f"sweep_{kind}.{config.format}"))
    return EXIT_OK


def cmd_reproduce_all(out: str | None = None) -> int:
    from .acceptance import run_all

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        checks = run_all(echo=None)
    header = f"{'status':6}  {'crit':4}  {'check':58}  {'reference':>14}  {'computed':>16}  {'tol':>8}"
    lines = [header, "-" * len(header)]
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        lines.append(f"{status:6}  C{c.criterion:<3}  {c.name[:58]:58}  {_cell(c.reference):>14}  "
                     f"{_cell(c.computed):>16}  {_cell(c.tolerance):>8}")
        if c.note:
            lines.append(f"{'':14}{c.note}")
    failed = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - failed} passed, {failed} failed")
    print("\n".join(lines))
    dest = _destination(out, "reproduce_all.csv") if out or os.environ.get(OUTPUT_DIR_ENV) else None
    if dest is not None:
        rows = [asdict(c) for c in checks]
        _emit(to_csv(Table(list(rows[0]), rows)), dest)
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help=f"output file (relative to ${OUTPUT_DIR_ENV} if set); stdout if omitted")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="photon-sim", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one named experiment")
    run.add_argument("experiment", choices=EXPERIMENTS)
    run.add_argument("--r", type=float, default=cf.R_MAX, help="squeezing parameter (default: arcsinh 1)")
    run.add_argument("--varphi", type=float, default=0.0, help="squeezing phase")
    run.add_argument("--eta", type=float, default=1.0, help="detector efficiency")
    run.add_argument("--p-dark", type=float, default=0.0, help="dark-count probability")
    run.add_argument("--delta1", type=float, default=0.0, help="splitter angle perturbation")
    run.add_argument("--delta2", type=float, default=0.0, help="splitter phase perturbation")
    run.add_argument("--phi", type=float, default=math.pi / 2, help="three-copy first splitter phase")
    run.add_argument("--nu", type=float, default=math.pi / 4, help="three-copy second splitter phase")
    run.add_argument("--beta", type=float, default=1.0, help="|1> amplitude of the three-copy qubit")
    run.add_argument("--cutoff", type=int, default=None, help="Fock cutoff per mode (default: tail policy)")
    run.add_argument("--points", type=int, default=None, help="grid points for three-copy-max")
    run.add_argument("--r-grid", type=_float_list, default=None, help="comma-separated r values (squeezed-coherent)")
    run.add_argument("--r-lo", type=float, default=0.5)
    run.add_argument("--r-hi", type=float, default=1.2)
    run.add_argument("--tol", type=float, default=1e-6)
    _add_output(run)

    sw = sub.add_parser("sweep", help="tabulate a parameter sweep")
    sw.add_argument("kind", choices=SWEEP_KINDS)
    sw.add_argument("--points", type=int, default=51, help="grid points per axis")
    sw.add_argument("--r", type=float, default=cf.R_MAX)
    sw.add_argument("--varphi", type=float, default=0.0)
    sw.add_argument("--cutoff", type=int, default=None)
    sw.add_argument("--workers", type=int, default=None, help="processes for the perturbed sweep")
    _add_output(sw)

    rep = sub.add_parser("reproduce-all", help="run every acceptance check and print a table")
    rep.add_argument("--out", help="also write the table as CSV")
    return parser


def _error(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


_RUN_KEYS = ("r", "varphi", "eta", "p_dark", "delta1", "delta2", "phi", "nu", "beta",
             "cutoff", "points", "r_grid", "r_lo", "r_hi", "tol")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return int(exc.code or 0)
    try:
        if args.command == "reproduce-all":
            return cmd_reproduce_all(args.out)
        if args.command == "run":
            params = {k: getattr(args, k) for k in _RUN_KEYS}
            return cmd_run(RunConfig(args.experiment, params, args.out, args.format))
        if args.points < 2:
            raise ValueError("--points must be >= 2")
        params = {k: getattr(args, k) for k in ("r", "varphi", "cutoff", "points", "workers")}
        return cmd_sweep(RunConfig(args.kind, params, args.out, args.format))
    except LeakageError as exc:
        return _error("leakage", str(exc), EXIT_LEAKAGE)
    except ValueError as exc:
        return _error("invalid-parameter", str(exc), EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
