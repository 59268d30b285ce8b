"""Command-line front end.

Subcommands: simulate, check, estimate, gamma, verify-clt, verify-fclt,
ned-decay. Exit codes: 0 all requested verdicts pass, 1 a verdict failed
or a premise was flagged, 2 usage or configuration error, 3 numeric abort
inside a recursion.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import replace

import numpy as np

from . import asymptotics, conditions, config, estimators, harness, models
from .config import ConfigError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="augarch",
        description="simulation and verification toolkit for augmented "
        "conditional-volatility processes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, config_required=True):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="path to a key-value configuration file")
        sp.add_argument("--seed", type=int, help="override experiment.seed")
        sp.add_argument("--out", help="write the primary CSV to this path")
        sp.add_argument("--threads", type=int, help="worker thread count")
        sp.add_argument(
            "--scaling",
            choices=("literal", "prefix"),
            help="scaled-error convention for the verification commands",
        )
        sp.set_defaults(func=func, config_required=config_required)
        return sp

    add("simulate", _cmd_simulate, "simulate one path and emit t,x,sigma2 CSV")
    sp_check = add(
        "check",
        _cmd_check,
        "evaluate the stationarity/moment premises for the configured model",
        config_required=False,
    )
    sp_check.add_argument(
        "--table2",
        action="store_true",
        help="regenerate the benchmark contraction table instead",
    )
    sp_est = add("estimate", _cmd_estimate, "quantile/moment estimates on a path")
    sp_est.add_argument("--data", help="CSV of observations instead of simulating")
    sp_gam = add("gamma", _cmd_gamma, "assemble the 2x2 asymptotic covariance")
    sp_gam.add_argument("--data", help="CSV of observations instead of simulating")
    add("verify-clt", _cmd_verify_clt, "replicated check of the joint limit law")
    add(
        "verify-fclt",
        _cmd_verify_fclt,
        "replicated check of covariance scaling across prefix fractions",
    )
    add("ned-decay", _cmd_ned, "gap between the recursion and windowed surrogates")
    return parser


def _load_cfg(args) -> config.RunConfig:
    if args.config:
        cfg = config.load_config(args.config)
    elif getattr(args, "config_required", True):
        raise ConfigError("--config is required for this command")
    else:
        cfg = config.parse_config("")
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.threads is not None:
        cfg = replace(cfg, threads=args.threads)
    if args.scaling is not None:
        cfg = replace(cfg, scaling=args.scaling)
    if args.out is not None:
        cfg = replace(cfg, out_csv=args.out)
    return cfg


def _need(value, key):
    if value is None:
        raise ConfigError(f"{key} is required for this command")
    return value


def _need_spec(cfg) -> models.ModelSpec:
    if cfg.spec is None:
        raise ConfigError("a model block (model.family = ...) is required")
    return cfg.spec


def _fmt(value, precision: int) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return "%.*g" % (precision, value)
    return str(value)


def _write_csv(path, header, rows, precision):
    formatted = [[_fmt(v, precision) for v in row] for row in rows]
    if path is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(formatted)
    else:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(formatted)
        print(f"wrote {path}")


def _load_series(path) -> np.ndarray:
    try:
        with open(path) as fh:
            first = fh.readline()
    except OSError as exc:
        raise ConfigError(f"cannot read data file {path!r}: {exc}") from exc
    tokens = [tok.strip() for tok in first.strip().split(",")]
    has_header = any(tok and not _is_number(tok) for tok in tokens)
    if has_header:
        data = np.genfromtxt(path, delimiter=",", names=True)
        names = data.dtype.names or ()
        col = "x" if "x" in names else (names[0] if names else None)
        if col is None:
            raise ConfigError(f"data file {path!r} has no usable columns")
        xs = np.asarray(data[col], dtype=np.float64)
    else:
        arr = np.loadtxt(path, delimiter=",", ndmin=2)
        xs = np.asarray(arr[:, 0], dtype=np.float64)
    if xs.size == 0 or not np.isfinite(xs).all():
        raise ConfigError(f"data file {path!r} is empty or has non-finite entries")
    return xs


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _obtain_series(cfg, args) -> np.ndarray:
    data = getattr(args, "data", None)
    if data:
        return _load_series(data)
    spec = _need_spec(cfg)
    n = _need(cfg.n, "experiment.n")
    path = models.simulate_path(spec, cfg.dist, n, burn_in=cfg.burn_in, seed=cfg.seed)
    return path.x


# -- subcommand handlers ------------------------------------------------------

def _cmd_simulate(args) -> int:
    cfg = _load_cfg(args)
    spec = _need_spec(cfg)
    n = _need(cfg.n, "experiment.n")
    path = models.simulate_path(spec, cfg.dist, n, burn_in=cfg.burn_in, seed=cfg.seed)
    rows = (
        (t + 1, float(path.x[t]), float(path.sigma2[t])) for t in range(n)
    )
    _write_csv(cfg.out_csv, ("t", "x", "sigma2"), rows, cfg.precision)
    return 0


def _cmd_check(args) -> int:
    cfg = _load_cfg(args)
    if args.table2:
        rows = conditions.table2_rows(cfg.dist)
        header = (
            "family",
            "r",
            "printed_exponent",
            "closed_value",
            "mc_value",
            "mc_stderr",
            "verdict_exponent",
            "verdict_value",
            "verdict",
            "published_variant",
            "flagged",
            "note",
        )
        data = [
            (
                row.family,
                row.r,
                row.printed_exponent,
                row.closed_value,
                row.mc_value,
                row.mc_stderr,
                row.verdict_exponent,
                row.verdict_value,
                row.verdict,
                row.published_variant,
                row.flagged,
                row.note,
            )
            for row in rows
        ]
        _write_csv(cfg.out_csv, header, data, cfg.precision)
        return 0
    spec = _need_spec(cfg)
    r = _need(cfg.r, "experiment.r")
    reports = conditions.check_all(spec, cfg.dist, r)
    failed = False
    for rep in reports:
        tag = " (diagnostic)" if rep.diagnostic else ""
        se = f" stderr={_fmt(rep.lhs_stderr, 6)}" if rep.lhs_stderr else ""
        print(
            f"{rep.condition:<20} {rep.verdict:<14} lhs={_fmt(rep.lhs_value, 6)}"
            f" threshold={_fmt(rep.threshold, 6)}{se}{tag}"
        )
        if rep.detail:
            print(f"{'':<20} {rep.detail}")
        if rep.verdict == conditions.NOT_SATISFIED and not rep.diagnostic:
            failed = True
    if cfg.out_csv:
        header = (
            "condition",
            "verdict",
            "lhs_value",
            "lhs_stderr",
            "threshold",
            "r",
            "s",
            "method",
            "norm_sum",
            "diagnostic",
            "detail",
        )
        data = [
            (
                rep.condition,
                rep.verdict,
                rep.lhs_value,
                rep.lhs_stderr,
                rep.threshold,
                rep.r,
                rep.s,
                rep.method,
                rep.norm_sum,
                rep.diagnostic,
                rep.detail,
            )
            for rep in reports
        ]
        _write_csv(cfg.out_csv, header, data, cfg.precision)
    return 1 if failed else 0


def _cmd_estimate(args) -> int:
    cfg = _load_cfg(args)
    xs = _obtain_series(cfg, args)
    p = _need(cfg.p, "experiment.p")
    r = _need(cfg.r, "experiment.r")
    q = estimators.sample_quantile(xs, p)
    m = estimators.centred_abs_moment(xs, r)
    f = asymptotics.estimate_density_at_quantile(xs, p)
    a = estimators.signed_power_coeff(xs, r, float(np.mean(xs)))
    print(f"n            = {xs.size}")
    print(f"quantile     = {_fmt(q, 10)}   (p = {p:g})")
    print(f"abs_moment   = {_fmt(m, 10)}   (r = {r:g})")
    print(f"f_at_q       = {_fmt(f, 10)}")
    print(f"a_coeff      = {_fmt(a, 10)}")
    if cfg.out_csv:
        _write_csv(
            cfg.out_csv,
            ("n", "p", "r", "quantile", "abs_moment", "f_at_q", "a_coeff"),
            [(xs.size, p, r, q, m, f, a)],
            cfg.precision,
        )
    return 0


def _cmd_gamma(args) -> int:
    cfg = _load_cfg(args)
    xs = _obtain_series(cfg, args)
    p = _need(cfg.p, "experiment.p")
    r = _need(cfg.r, "experiment.r")
    lag = cfg.lag if cfg.lag is not None else asymptotics.default_lag(xs.size)
    tc = asymptotics.estimate_tricov(xs, p, r, lag=lag)
    a = estimators.signed_power_coeff(xs, r, float(np.mean(xs)))
    gm = asymptotics.assemble_gamma(tc, a, r)
    print(f"lag window   = {lag}")
    print(f"g11          = {_fmt(gm.g11, 10)}")
    print(f"g12 = g21    = {_fmt(gm.g12, 10)}")
    print(f"g22          = {_fmt(gm.g22, 10)}")
    if gm.psd_warning:
        print("warning: assembled matrix is not positive semidefinite")
    if cfg.out_csv:
        _write_csv(
            cfg.out_csv,
            (
                "g11",
                "g12",
                "g22",
                "var_u",
                "var_v",
                "var_w",
                "cov_uv",
                "cov_uw",
                "cov_vw",
                "f_at_q",
                "q_p",
                "a_coeff",
                "lag",
            ),
            [
                (
                    gm.g11,
                    gm.g12,
                    gm.g22,
                    tc.var_u,
                    tc.var_v,
                    tc.var_w,
                    tc.cov_uv,
                    tc.cov_uw,
                    tc.cov_vw,
                    tc.f_at_q,
                    tc.q_p,
                    a,
                    lag,
                )
            ],
            cfg.precision,
        )
    return 0


def _experiment_config(cfg, grid=None) -> harness.ExperimentConfig:
    spec = _need_spec(cfg)
    kwargs = dict(
        spec=spec,
        dist=cfg.dist,
        p=_need(cfg.p, "experiment.p"),
        r=_need(cfg.r, "experiment.r"),
        n=_need(cfg.n, "experiment.n"),
        replications=_need(cfg.replications, "experiment.m"),
        master_seed=cfg.seed,
        burn_in=cfg.burn_in,
        scaling=cfg.scaling,
        threads=cfg.threads,
        tolerance_rel=cfg.tolerance_rel,
        tolerance_fclt=cfg.tolerance_fclt,
    )
    if cfg.lag is not None:
        kwargs["lag"] = cfg.lag
    if grid is not None:
        kwargs["t_grid"] = grid
    try:
        return harness.ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _print_report(report: harness.ExperimentReport) -> None:
    print("premises:")
    for rep in report.premises:
        tag = " (diagnostic)" if rep.diagnostic else ""
        print(f"  {rep.condition:<20} {rep.verdict}{tag}")
    t = report.truths
    print(f"target gamma    g11={_fmt(t.g11, 8)} g12={_fmt(t.g12, 8)} g22={_fmt(t.g22, 8)}  [{t.source}]")
    e = report.empirical_gamma
    print(f"empirical gamma g11={_fmt(e[0,0], 8)} g12={_fmt(e[0,1], 8)} g22={_fmt(e[1,1], 8)}")
    rel = report.relative_errors
    print(f"relative errors {_fmt(rel[0,0], 4)} {_fmt(rel[0,1], 4)} {_fmt(rel[1,1], 4)}")
    if report.fclt_grid_errors:
        worst = max(report.fclt_grid_errors.values())
        print(f"prefix-grid max relative error {_fmt(worst, 4)}")
        for (s, u), errv in sorted(report.fclt_grid_errors.items()):
            print(f"  block ({s:g}, {u:g}): {_fmt(errv, 4)}")
    for name, (stat, crit) in report.anderson.items():
        print(f"normality[{name}] stat={_fmt(stat, 6)} critical(1%)={_fmt(crit, 6)}")
    print("verdicts: " + " ".join(f"{k}={v}" for k, v in report.verdicts.items()))
    print(f"runtime {report.runtime_seconds:.1f} s over {report.config.replications} replications")


def _write_samples(report: harness.ExperimentReport, path, precision) -> None:
    rows = []
    for m in range(report.samples.shape[0]):
        for idx, t in enumerate(report.config.t_grid):
            rows.append(
                (m, t, report.samples[m, idx, 0], report.samples[m, idx, 1])
            )
    _write_csv(path, ("replication", "t", "quantile_err_scaled", "moment_err_scaled"), rows, precision)


def _cmd_verify_clt(args) -> int:
    cfg = _load_cfg(args)
    ecfg = _experiment_config(cfg, grid=(1.0,))
    report = harness.run_clt(ecfg)
    _print_report(report)
    if cfg.out_csv:
        _write_samples(report, cfg.out_csv, cfg.precision)
    return 0 if report.passed else 1


def _cmd_verify_fclt(args) -> int:
    cfg = _load_cfg(args)
    grid = cfg.t_grid if cfg.t_grid else (0.25, 0.5, 1.0)
    ecfg = _experiment_config(cfg, grid=grid)
    report = harness.run_fclt(ecfg)
    _print_report(report)
    if cfg.out_csv:
        _write_samples(report, cfg.out_csv, cfg.precision)
    return 0 if report.passed else 1


def _cmd_ned(args) -> int:
    cfg = _load_cfg(args)
    spec = _need_spec(cfg)
    n = _need(cfg.n, "experiment.n")
    grid = cfg.delta_grid if cfg.delta_grid else tuple(range(1, 21))
    result = harness.ned_decay(spec, cfg.dist, grid, n, seed=cfg.seed, burn_in=cfg.burn_in)
    for d, g in zip(result.deltas, result.gaps):
        print(f"delta={d:<4d} gap={_fmt(g, 10)}")
    if result.slope is not None:
        print(f"log-gap slope {_fmt(result.slope, 6)} r_squared {_fmt(result.r_squared, 6)}")
    else:
        print("log-gap fit not available (gaps vanish or too few points)")
    if cfg.out_csv:
        rows = list(zip(result.deltas, result.gaps))
        _write_csv(cfg.out_csv, ("delta", "gap"), rows, cfg.precision)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if code is not None else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except models.NumericAbortError as exc:
        print(f"numeric abort: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
