"""``uavmmw`` command-line tool.

Commands::

    uavmmw pattern       gain cuts of the actual / approximate / sectorized patterns
    uavmmw distribution  PDF and CDF of the SNR mixture over an SNR grid
    uavmmw outage        outage probability sweeps
    uavmmw validate      Monte Carlo vs analytical CDF check (JSON report)
    uavmmw optimize      outage-optimal (N_t, N_r) grid search

Configuration comes from an INI file (``--config``), then ``--set
section.key=value`` overrides, then the dedicated flags; later sources win.
Exit codes: 0 success, 1 usage, 2 domain, 3 accuracy / validation failure,
4 I/O.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import replace

import numpy as np

from . import __version__, antenna, montecarlo, optimize
from .channel import build_mixture, mixture_cdf, mixture_pdf, outage_probability
from .config import RunConfig, apply_override, load_config
from .errors import AccuracyError, DomainError, UsageError, ValidationFailure

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_ACCURACY, EXIT_IO = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    """argparse that reports bad arguments as :class:`UsageError` (exit 1)."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------
# Output helpers
# --------------------------------------------------------------------------

def _metadata(cfg: RunConfig, command: str) -> list[str]:
    return [f"# uavmmw {__version__}", f"# command: {command}",
            f"# config_sha256: {cfg.digest()}", f"# seed: {cfg.simulation.seed}"]


def render_csv(cfg: RunConfig, command: str, header, rows, extra_meta=()) -> str:
    buf = io.StringIO()
    for line in list(_metadata(cfg, command)) + list(extra_meta):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _db(g: float) -> float:
    return 10.0 * math.log10(g) if g > 0 else -math.inf


def _grid(lo: float, hi: float, points: int, name: str) -> np.ndarray:
    if points < 2 or not hi > lo:
        raise UsageError(f"{name}: need points >= 2 and max > min")
    return np.linspace(lo, hi, points)


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------

def cmd_pattern(cfg: RunConfig) -> tuple[str, str]:
    """Gain cuts along theta_x at each configured theta_y, plus the ring table.

    Returns ``(cuts_csv, sectors_csv)``.  The pattern is that of the
    transmitter's array size ``[tx] n``.
    """
    p = cfg.pattern
    if not p.theta_y_deg:
        raise UsageError("pattern.theta_y_deg is empty")
    array = cfg.array_config(cfg.tx.n)
    sectors = antenna.sectorize(array, cfg.model.d_param, cfg.model.lobes, cfg.model.sector0)
    tx_deg = _grid(p.theta_x_min_deg, p.theta_x_max_deg, p.points, "pattern")
    rows = []
    for ty_deg in p.theta_y_deg:
        if isinstance(ty_deg, str):
            raise UsageError(f"pattern.theta_y_deg entries must be numbers, got {ty_deg!r}")
        tx = np.radians(tx_deg)
        ty = np.full_like(tx, math.radians(ty_deg))
        curves = {
            "actual": antenna.actual_gain(array, tx, ty),
            "approximate": antenna.approx_gain(array, tx, ty),
            "sectorized": sectors.gain(np.hypot(tx, ty)),
        }
        for model, gains in curves.items():
            rows.extend((model, float(x), ty_deg, _db(float(g)), float(g))
                        for x, g in zip(tx_deg, gains))
    meta = [f"# n: {array.n}"]
    cuts = render_csv(cfg, "pattern", ["model", "theta_x_deg", "theta_y_deg", "gain_dbi",
                                       "gain_linear"], rows, meta)
    sector_rows = [(i, math.degrees(u), float(g), _db(float(g)))
                   for i, (u, g) in enumerate(sectors.levels)]
    table = render_csv(cfg, "pattern", ["sector_index", "upper_angle_deg", "gain_linear",
                                        "gain_dbi"], sector_rows, meta)
    return cuts, table


def cmd_distribution(cfg: RunConfig) -> str:
    """PDF (per dB of SNR) and CDF of the mixture model, one block per D."""
    d = cfg.distribution
    snr_db = _grid(d.snr_min_db, d.snr_max_db, d.points, "distribution")
    snr = 10.0 ** (snr_db / 10.0)
    d_values = d.d_values or (cfg.model.d_param,)
    rows = []
    for dv in d_values:
        if isinstance(dv, str) or dv != int(dv) or dv < 2:
            raise UsageError(f"distribution.d_values must be integers, got {dv!r}")
        link = replace(cfg.link_budget(), d_param=int(dv))
        model = build_mixture(link)
        pdf_db = np.asarray(mixture_pdf(model, snr)) * snr * math.log(10.0) / 10.0
        cdf = np.asarray(mixture_cdf(model, snr, cfg.model.residual))
        rows.extend((int(dv), float(x), float(f), float(c))
                    for x, f, c in zip(snr_db, pdf_db, cdf))
    return render_csv(cfg, "distribution", ["d_param", "snr_db", "pdf", "cdf"], rows)


def sweep_values(cfg: RunConfig) -> list[float]:
    o = cfg.outage
    if not o.step > 0 or o.stop < o.start:
        raise UsageError("outage sweep is empty: need step > 0 and stop >= start")
    count = int(math.floor((o.stop - o.start) / o.step + 1e-9)) + 1
    return [o.start + k * o.step for k in range(count)]


def _with_variable(cfg: RunConfig, name: str, value) -> RunConfig:
    if name in ("tx_power_dbm", "distance_m", "noise_power_dbm", "snr_threshold_db"):
        return cfg.with_value("link", name, float(value))
    if name == "link_type":
        return cfg.with_value("link", "type", str(value))
    if name == "sigma_deg":
        return cfg.with_value("tx", "sigma_deg", float(value)).with_value(
            "rx", "sigma_deg", float(value))
    if name in ("n", "nt", "nr"):
        if isinstance(value, str) or float(value) != int(value):
            raise UsageError(f"array size must be an integer, got {value!r}")
        if name in ("n", "nt"):
            cfg = cfg.with_value("tx", "n", int(value))
        if name in ("n", "nr"):
            cfg = cfg.with_value("rx", "n", int(value))
        return cfg
    raise UsageError(f"unknown sweep variable {name!r}")


def cmd_outage(cfg: RunConfig) -> str:
    o = cfg.outage
    values = sweep_values(cfg)
    series = [None] if o.series_variable == "none" else list(o.series)
    if not series:
        raise UsageError("outage.series is empty")
    rows = []
    for s in series:
        base = cfg if s is None else _with_variable(cfg, o.series_variable, s)
        label = "all" if s is None else f"{o.series_variable}={_label(s)}"
        for v in values:
            link = _with_variable(base, o.variable, v).link_budget()
            if o.method == "analytical":
                p = outage_probability(link)
            else:
                p = montecarlo.estimate_outage(link, cfg.simulation_spec(),
                                               cfg.simulation.workers).p_hat
            rows.append((label, o.variable, v, p))
    return render_csv(cfg, "outage", ["series", "sweep_variable", "value",
                                      "outage_probability"], rows)


def _label(v) -> str:
    if isinstance(v, float) and v == int(v):
        return str(int(v))
    return str(v)


def validation_report(cfg: RunConfig) -> dict:
    """Compare the analytical CDF with the Monte Carlo empirical CDF."""
    v = cfg.validate
    link = cfg.link_budget()
    spec = cfg.simulation_spec()
    snr_db = _grid(v.snr_min_db, v.snr_max_db, v.points, "validate")
    grid = 10.0 ** (snr_db / 10.0)
    empirical, mc = montecarlo.cdf_and_outage(link, spec, grid, cfg.simulation.workers)
    analytical = np.asarray(mixture_cdf(build_mixture(link), grid, cfg.model.residual))
    probe = empirical >= v.min_cdf
    rel = np.abs(analytical[probe] - empirical[probe]) / empirical[probe]
    worst = int(np.argmax(rel)) if rel.size else -1
    max_rel = float(rel[worst]) if rel.size else math.nan
    p_model = outage_probability(link)
    passed = bool(rel.size) and max_rel <= v.cdf_rel_tol
    return {
        "status": "PASS" if passed else "FAIL",
        "version": __version__,
        "config_sha256": cfg.digest(),
        "seed": spec.seed,
        "n": spec.num_samples,
        "cdf": {
            "probe_points": int(probe.sum()),
            "max_rel_error": max_rel,
            "worst_snr_db": float(snr_db[probe][worst]) if rel.size else None,
            "rel_tol": v.cdf_rel_tol,
            "min_cdf": v.min_cdf,
        },
        "outage": {
            "p_hat": mc.p_hat,
            "std_err": mc.std_err,
            "events": mc.events,
            "analytical": p_model,
            "delta": p_model - mc.p_hat,
            "delta_std_errs": (p_model - mc.p_hat) / mc.std_err if mc.std_err > 0 else None,
        },
    }


def cmd_validate(cfg: RunConfig) -> str:
    """Deterministic JSON validation report (sorted keys, no timings)."""
    return json.dumps(validation_report(cfg), indent=2, sort_keys=True) + "\n"


def cmd_optimize(cfg: RunConfig, include_timing: bool = False) -> tuple[str, str]:
    """Grid search; returns ``(grid_csv, summary_json)``."""
    o = cfg.optimize
    link = cfg.link_budget()
    if o.symmetric:
        if o.method != "analytical":
            raise UsageError("symmetric search is analytical only")
        result = optimize.optimize_symmetric(link, o.n_max)
    else:
        result = optimize.optimize_array_sizes(
            link, o.n_max, o.method,
            cfg.simulation_spec() if o.method == "monte_carlo" else None,
            cfg.simulation.workers)
    meta = [f"# best: nt={result.best_nt} nr={result.best_nr} outage={result.best_outage!r}",
            f"# method: {result.method}",
            f"# link: type={link.link_type.value} distance_m={link.distance_m!r} "
            f"tx_power_dbm={link.tx_power_dbm!r}"]
    table = render_csv(cfg, "optimize", ["nt", "nr", "outage"], result.evaluations, meta)
    summary = result.summary(include_timing)
    summary["config_sha256"] = cfg.digest()
    return table, json.dumps(summary, indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------------------
# Argument handling
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="INI configuration file")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, help="Monte Carlo seed (unsigned 64-bit)")
    common.add_argument("--samples", type=int, help="Monte Carlo sample count")
    common.add_argument("--workers", type=int, help="threads for Monte Carlo / optimisation")
    common.add_argument("--d-param", type=int, help="rings per lobe, D")
    common.add_argument("--lobes", type=int, choices=(1, 2), help="modelled lobes, j")
    common.add_argument("--sector0", choices=antenna.SECTOR0_VARIANTS,
                        help="innermost ring gain convention")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override one config value (repeatable)")
    common.add_argument("--echo-config", metavar="PATH",
                        help="also write the effective configuration as INI")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="uavmmw", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"uavmmw {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("pattern", parents=[common], help="antenna gain cuts")
    p.add_argument("--sectors-out", help="ring table CSV (default: <out>.sectors.csv)")
    sub.add_parser("distribution", parents=[common], help="SNR PDF / CDF")
    sub.add_parser("outage", parents=[common], help="outage sweeps")
    sub.add_parser("validate", parents=[common], help="Monte Carlo validation report")
    p = sub.add_parser("optimize", parents=[common], help="optimal array sizes")
    p.add_argument("--summary-out", help="summary JSON file (default: stdout or stderr)")
    p.add_argument("--timing", action="store_true", help="include elapsed time in summary")
    return parser


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config)
    for assignment in args.set:
        cfg = apply_override(cfg, assignment)
    flags = [("simulation", "seed", args.seed), ("simulation", "samples", args.samples),
             ("simulation", "workers", args.workers), ("model", "d_param", args.d_param),
             ("model", "lobes", args.lobes), ("model", "sector0", args.sector0)]
    for section, key, value in flags:
        if value is not None:
            cfg = cfg.with_value(section, key, value)
    # re-run cross-field checks on the final values
    return replace(cfg)


def run(args) -> int:
    cfg = resolve_config(args)
    if args.echo_config:
        _emit(cfg.to_ini(), args.echo_config)
    if args.command == "pattern":
        cuts, table = cmd_pattern(cfg)
        _emit(cuts, args.out)
        target = args.sectors_out or (f"{args.out}.sectors.csv"
                                      if args.out not in (None, "-") else None)
        if target:
            _emit(table, target)
        else:
            sys.stdout.write("\n" + table)
    elif args.command == "distribution":
        _emit(cmd_distribution(cfg), args.out)
    elif args.command == "outage":
        _emit(cmd_outage(cfg), args.out)
    elif args.command == "validate":
        report = cmd_validate(cfg)
        _emit(report, args.out)
        if json.loads(report)["status"] != "PASS":
            raise ValidationFailure("analytical CDF outside tolerance; see report")
    elif args.command == "optimize":
        table, summary = cmd_optimize(cfg, args.timing)
        _emit(table, args.out)
        if args.summary_out:
            _emit(summary, args.summary_out)
        elif args.out in (None, "-"):
            sys.stderr.write(summary)
        else:
            sys.stdout.write(summary)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except DomainError as exc:
        sys.stderr.write(f"domain error: {exc}\n")
        return EXIT_DOMAIN
    except (AccuracyError, ValidationFailure) as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_ACCURACY
    except OSError as exc:
        sys.stderr.write(f"I/O error: {exc}\n")
        return EXIT_IO
