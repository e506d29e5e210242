"""Command-line entry point.

    clocksync scan     --config run.json [--out curve.csv] [--plot-script dip.gp]
    clocksync estimate --config run.json
    clocksync sweep    --config run.json [--parameter tau --values -1e-9,0,1e-9]
    clocksync belt     --config run.json
    clocksync budget   --config run.json

Exit codes: 0 ok, 2 configuration error, 3 engine error, 4 estimation or
protocol error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import belt as belt_mod
from .config import RunConfig, load_config
from .counting import CountCurve, CountingConfig, sample_counts
from .engine import ScanCurve, ScanGrid, scan
from .errors import ConfigError, EngineError, EstimationError, TransientRegion
from .estimator import error_budget, locate_dip
from .model import MediumConfig, ProtocolConfig, SpectralDensity

EXIT_OK, EXIT_CONFIG, EXIT_ENGINE, EXIT_ESTIMATE = 0, 2, 3, 4
SWEEP_PARAMETERS = ("tau", "v", "delta_omega", "c2_mismatch", "c3_mismatch")


def fmt(x) -> str:
    return format(float(x), ".17g")


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _require(run: RunConfig, *names):
    for name in names:
        if getattr(run, name) is None:
            raise ConfigError(f"config field {name}: required for this command")


def spectral_width(spectrum: SpectralDensity) -> float:
    return spectrum.rms_width()


def measure(protocol: ProtocolConfig, grid: ScanGrid, counting: CountingConfig | None, workers=1):
    curve = scan(protocol, grid, workers=workers)
    if counting is None:
        return curve, curve
    return curve, sample_counts(curve, counting)


def estimate_dict(protocol: ProtocolConfig, fitted, delta_v: float) -> dict:
    report = locate_dip(fitted, protocol)
    budget = error_budget(spectral_width(protocol.spectrum), protocol.v, delta_v, report.tau_hat, protocol.c)
    return {
        "dl0_hat_m": report.dl0_hat,
        "tau_hat_s": report.tau_hat,
        "width_hat_m": report.width_hat,
        "baseline_hat": report.baseline_hat,
        "tau_sigma_s": report.tau_sigma,
        "delta_tau_s": budget.delta_tau,
        "term_dip_s": budget.term_dip,
        "term_velocity_s": budget.term_velocity,
        "converged": report.converged,
        "iterations": report.iterations,
    }


def scan_csv(curve: ScanCurve, counts: CountCurve | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if counts is None:
        w.writerow(["delta_l_m", "p_c"])
        for x, y in zip(curve.dl, curve.p_c):
            w.writerow([fmt(x), fmt(y)])
    else:
        w.writerow(["delta_l_m", "p_c", "counts"])
        for x, y, n in zip(curve.dl, curve.p_c, counts.counts):
            w.writerow([fmt(x), fmt(y), int(n)])
    return buf.getvalue()


def read_scan_csv(path, config: ProtocolConfig | None = None):
    """Load a scan CSV back into a ScanCurve, or a CountCurve if it has counts."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    dl = np.array([float(r[0]) for r in body])
    pc = np.array([float(r[1]) for r in body])
    curve = ScanCurve(dl, pc, config)
    if "counts" in header:
        counts = np.array([int(r[2]) for r in body], dtype=np.int64)
        return CountCurve(dl, counts, pc, config)
    return curve


def plot_script(csv_path: str) -> str:
    return (
        "# gnuplot script for a coincidence-dip scan\n"
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set xlabel 'delta l (m)'\n"
        "set ylabel 'P_c (relative)'\n"
        f"plot '{csv_path}' using 1:2 with lines\n"
    )


def cmd_scan(run: RunConfig, out=None, plot=None, workers=1) -> int:
    _require(run, "protocol", "grid")
    curve, fitted = measure(run.protocol, run.grid, run.counting, workers)
    text = scan_csv(curve, fitted if run.counting is not None else None)
    _emit(text, out)
    if plot:
        with open(plot, "w") as fh:
            fh.write(plot_script(out or "scan.csv"))
    return EXIT_OK


def cmd_estimate(run: RunConfig, out=None, workers=1) -> int:
    _require(run, "protocol", "grid")
    _, fitted = measure(run.protocol, run.grid, run.counting, workers)
    try:
        result = estimate_dict(run.protocol, fitted, run.delta_v)
    except EstimationError as exc:
        _emit(_dump_json({"error": type(exc).__name__, "message": str(exc)}), out)
        return EXIT_ESTIMATE
    _emit(_dump_json(result), out)
    return EXIT_OK


def sweep_config(base: ProtocolConfig, parameter: str, value: float) -> ProtocolConfig:
    """Copy of ``base`` with one swept quantity replaced."""
    if parameter == "tau":
        return dataclasses.replace(base, t0b=base.t0a + value)
    if parameter == "v":
        return dataclasses.replace(base, v=value)
    if parameter == "delta_omega":
        if base.spectrum.kind != "gaussian":
            raise ConfigError("delta_omega sweep needs a gaussian spectrum")
        return dataclasses.replace(base, spectrum=SpectralDensity.gaussian(value))
    if parameter in ("c2_mismatch", "c3_mismatch"):
        order = 2 if parameter == "c2_mismatch" else 3
        m = base.medium
        coeffs = list(m.kappa_to_signal.coeffs) + [0.0] * max(0, order + 1 - len(m.kappa_to_signal.coeffs))
        coeffs[order] = value
        return dataclasses.replace(base, medium=MediumConfig.from_coeffs(
            base.omega0, coeffs, m.kappa_from_signal.coeffs, m.kappa_to_idler.coeffs, m.kappa_from_idler.coeffs))
    raise ConfigError(f"unknown sweep parameter {parameter!r}; expected one of {', '.join(SWEEP_PARAMETERS)}")


def cmd_sweep(run: RunConfig, parameter=None, values=None, out=None, workers=1) -> int:
    _require(run, "protocol", "grid")
    parameter = parameter or run.sweep_parameter
    values = run.sweep_values if values is None else tuple(values)
    if parameter is None:
        raise ConfigError("config field sweep.parameter: required for sweep")
    if parameter not in SWEEP_PARAMETERS:
        raise ConfigError(f"unknown sweep parameter {parameter!r}; expected one of {', '.join(SWEEP_PARAMETERS)}")
    configs = []
    for v in values:
        try:
            configs.append(sweep_config(run.protocol, parameter, v))
        except ConfigError as exc:
            raise ConfigError(f"sweep {parameter}={v!r}: {exc}") from exc
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["value", "tau_hat_s", "delta_tau_s", "dl0_hat_m", "width_hat_m", "converged", "error"])
    for v, cfg in zip(values, configs):
        _, fitted = measure(cfg, run.grid, run.counting, workers)
        try:
            r = estimate_dict(cfg, fitted, run.delta_v)
        except EstimationError as exc:
            w.writerow([fmt(v), "nan", "nan", "nan", "nan", "false", type(exc).__name__])
            continue
        w.writerow([fmt(v), fmt(r["tau_hat_s"]), fmt(r["delta_tau_s"]), fmt(r["dl0_hat_m"]),
                    fmt(r["width_hat_m"]), str(r["converged"]).lower(), ""])
    _emit(buf.getvalue(), out)
    return EXIT_OK


def cmd_belt(run: RunConfig, out=None) -> int:
    _require(run, "belt")
    cfg = run.belt
    span = Fraction(cfg.T_ab) + Fraction(cfg.T_ba)
    times = run.belt_times or tuple(float(cfg.settle_time + span * i) for i in range(11))
    values, skipped = [], 0
    for t in times:
        try:
            values.append(belt_mod.quantity_at_M(cfg, t))
        except TransientRegion:
            skipped += 1
    if not values:
        _emit(_dump_json({"error": "TransientRegion",
                          "message": "every read-out time lies inside the initial transient"}), out)
        return EXIT_ESTIMATE
    q = values[0]
    result = {
        "quantity": float(q),
        "constant_in_time": all(x == q for x in values),
        "tau_hat_s": float(belt_mod.infer_tau_from_M(q, cfg)),
        "tau_true_s": float(cfg.tau),
        "bias_quantity": float(belt_mod.asymmetry_bias(cfg)),
        "times_evaluated": len(values),
        "times_skipped": skipped,
        "period": cfg.period,
    }
    _emit(_dump_json(result), out)
    return EXIT_OK


def cmd_budget(run: RunConfig, out=None) -> int:
    _require(run, "protocol")
    p = run.protocol
    b = error_budget(spectral_width(p.spectrum), p.v, run.delta_v, p.tau, p.c)
    _emit(_dump_json({"delta_tau_s": b.delta_tau, "term_dip_s": b.term_dip, "term_velocity_s": b.term_velocity}), out)
    return EXIT_OK


def _apply_overrides(run: RunConfig, args) -> RunConfig:
    if args.seed is not None:
        if run.counting is None:
            raise ConfigError("--seed given but the config has no counting section")
        try:
            run = dataclasses.replace(run, counting=dataclasses.replace(run.counting, master_seed=args.seed))
        except ValueError as exc:
            raise ConfigError(f"--seed: {exc}") from exc
    if args.points is not None:
        if run.grid is None:
            raise ConfigError("--points given but the config has no grid section")
        try:
            run = dataclasses.replace(run, grid=dataclasses.replace(run.grid, n_points=args.points))
        except ValueError as exc:
            raise ConfigError(f"--points: {exc}") from exc
    return run


def build_parser():
    parser = argparse.ArgumentParser(prog="clocksync", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("scan", "estimate", "sweep", "belt", "budget"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out")
        p.add_argument("--seed", type=int)
        p.add_argument("--points", type=int)
        p.add_argument("--workers", type=int)
        if name == "scan":
            p.add_argument("--plot-script", help="also write a gnuplot script for the CSV")
        if name == "sweep":
            p.add_argument("--parameter", help=f"one of {', '.join(SWEEP_PARAMETERS)}")
            p.add_argument("--values", help="comma-separated values; empty string for none")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = _apply_overrides(load_config(args.config), args)
        out = args.out or run.output
        workers = args.workers or run.workers
        if args.command == "scan":
            return cmd_scan(run, out, args.plot_script, workers)
        if args.command == "estimate":
            return cmd_estimate(run, out, workers)
        if args.command == "sweep":
            values = None
            if args.values is not None:
                try:
                    values = [float(x) for x in args.values.split(",") if x.strip()]
                except ValueError as exc:
                    raise ConfigError(f"--values: {exc}") from exc
            return cmd_sweep(run, args.parameter, values, out, workers)
        if args.command == "belt":
            return cmd_belt(run, out)
        return cmd_budget(run, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EngineError as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
