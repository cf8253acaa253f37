"""Command-line front end.

Subcommands: cycle, sweep, spacings, delta-minus, predict, estimate, compare,
replay, bench.  Exit codes: 0 success, 2 usage error, 3 numeric-failure
threshold exceeded.  Artifacts embed their config; ``replay`` re-runs one and
must reproduce it byte-for-byte.
"""

import argparse
import math
import sys
import time

import numpy as np

from . import analytics, artifacts
from ._version import __version__
from .basis import enumerate_basis, build_hamiltonian, HamiltonianParams
from .competitors import compare_worst_case, run_equal_disorder
from .cycle import CycleParams, sample_trials
from .ensemble import RunConfig, make_realizations, run_ensemble
from .errors import NumericError, ParameterError, ResourceError, StatisticsError
from .spectra import (collect_spacings, eigenvalues_only, estimate_delta_minus,
                      mean_gap, spacing_distances, spacing_histogram, unfold)


def _beta(text):
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def _grid(text):
    """Comma list of floats, or logspace:lo:hi:n (log10 endpoints)."""
    if text.startswith("logspace:"):
        try:
            _, lo, hi, n = text.split(":")
            return [float(v) for v in np.logspace(float(lo), float(hi), int(n))]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad logspace grid {text!r}") from exc
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from exc


def _add_engine_args(p):
    p.add_argument("--sites", type=int, default=10)
    p.add_argument("--h-eth", type=float, default=2.0)
    p.add_argument("--h-mbl", type=float, default=20.0)
    p.add_argument("--wb-frac", type=float, default=0.0625,
                   help="cold-bath bandwidth as a fraction of the mean gap")
    p.add_argument("--wb-abs", type=float, default=None,
                   help="cold-bath bandwidth in absolute energy units")
    p.add_argument("--beta-c", type=_beta, default=math.inf)
    p.add_argument("--beta-h", type=float, default=0.0)
    p.add_argument("--realizations", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--speed", type=float, default=0.0,
                   help="tuning speed in energy^2; 0 = adiabatic")
    p.add_argument("--dt-factor", type=float, default=0.405)
    p.add_argument("--variant", choices=("standard", "equal_disorder", "bandwidth"),
                   default="standard")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--timing", action="store_true",
                   help="attach wall-clock provenance (breaks byte reproducibility)")


def _config_from_args(args, sweep_param=None, sweep_grid=None):
    return RunConfig(
        sites=args.sites, realizations=args.realizations, master_seed=args.seed,
        h_eth=args.h_eth, h_mbl=args.h_mbl,
        wb_frac=args.wb_frac, wb_abs=args.wb_abs,
        beta_c=args.beta_c, beta_h=args.beta_h,
        speed=args.speed, dt_factor=args.dt_factor,
        sweep_param=sweep_param, sweep_grid=tuple(sweep_grid) if sweep_grid else None,
        engine_variant=args.variant, threads=args.threads,
        keep_records=getattr(args, "csv_out", None) is not None,
    )


def _emit_summary(summary, args):
    t0 = time.perf_counter()
    payload = artifacts.summary_artifact(summary)
    timing = None
    if args.timing:
        stamp, _ = artifacts.now()
        timing = (stamp, time.perf_counter() - t0)
    text = artifacts.dump_json(payload, path=args.out, timing=timing)
    if args.out is None:
        sys.stdout.write(text)
    if getattr(args, "csv_out", None):
        artifacts.write_csv(
            args.csv_out,
            [f"config: {artifacts.compact_json(summary.metadata['config'])}"],
            ["realization_id", "W1", "Q2", "W3", "Q4", "Wtot"],
            artifacts.records_rows(summary),
        )


def cmd_cycle(args):
    summary = run_ensemble(_config_from_args(args))
    _emit_summary(summary, args)
    return 0


def cmd_sweep(args):
    summary = run_ensemble(_config_from_args(args, args.param, args.grid))
    if args.out and args.out.endswith(".csv"):
        cols = ["grid_value", "wb", "speed", "beta_h",
                "W1_mean", "W1_stderr", "Q2_mean", "Q2_stderr",
                "W3_mean", "W3_stderr", "Q4_mean", "Q4_stderr",
                "Wtot_mean", "Wtot_stderr", "eta_mean", "eta_stderr"]
        rows = []
        for pt in summary.points:
            rows.append([pt["grid_value"], pt["wb"], pt["speed"], pt["beta_h"],
                         pt["w1"]["mean"], pt["w1"]["stderr"],
                         pt["q2"]["mean"], pt["q2"]["stderr"],
                         pt["w3"]["mean"], pt["w3"]["stderr"],
                         pt["q4"]["mean"], pt["q4"]["stderr"],
                         pt["w_tot"]["mean"], pt["w_tot"]["stderr"],
                         pt["eta"]["mean"], pt["eta"]["stderr"]])
        artifacts.write_csv(
            args.out,
            [f"sweep of {args.param}",
             f"config: {artifacts.compact_json(summary.metadata['config'])}"],
            cols, rows)
    else:
        _emit_summary(summary, args)
    return 0


def _spectral_ensemble(args):
    """Eigenvalues of an ensemble pinned at one disorder strength."""
    basis = enumerate_basis(args.sites)
    reals = make_realizations(args.seed, args.realizations, args.sites,
                              h_eth=args.h, h_mbl=args.h)
    energy_sets = []
    for dr in reals:
        ham = build_hamiltonian(basis, dr, HamiltonianParams(alpha=1.0))
        energy_sets.append(eigenvalues_only(ham, seed_tag=dr.seed_tag))
    return energy_sets


def cmd_spacings(args):
    energy_sets = _spectral_ensemble(args)
    spac = collect_spacings(energy_sets, window=args.window)
    stats = spacing_distances(unfold(spac))
    report = {
        "schema": "mbl-otto/spacings-v1",
        "version": __version__,
        "sites": args.sites, "h": args.h, "realizations": args.realizations,
        "seed": args.seed, "window": args.window,
        "n_spacings": int(spac.size),
        "mean_gap_dos": mean_gap(energy_sets, window=1.0),
        "mean_spacing_window": float(spac.mean()),
        "ks_poisson": stats["ks_poisson"],
        "ks_wigner": stats["ks_wigner"],
    }
    sys.stdout.write(artifacts.dump_json(report))
    if args.out:
        rows = spacing_histogram(spac, bins=args.bins)
        artifacts.write_csv(
            args.out,
            [f"spacing histogram: sites={args.sites} h={args.h} "
             f"realizations={args.realizations} seed={args.seed} window={args.window}"],
            ["bin_left", "bin_right", "count", "density"],
            rows.tolist())
    return 0


def cmd_delta_minus(args):
    energy_sets = _spectral_ensemble(args)
    spac = collect_spacings(energy_sets, window=args.window)
    mg = float(spac.mean())
    dm = estimate_delta_minus(spac, bins=args.bins, mean_gap=mg)
    report = {
        "schema": "mbl-otto/delta-minus-v1",
        "version": __version__,
        "sites": args.sites, "h": args.h, "realizations": args.realizations,
        "seed": args.seed, "window": args.window, "bins": args.bins,
        "n_spacings": int(spac.size),
        "mean_spacing_window": mg,
        "delta_minus": dm,
        "delta_minus_over_mean": dm / mg,
    }
    text = artifacts.dump_json(report, path=args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def cmd_predict(args):
    pred = analytics.predicted_cycle(args.wb, args.beta_c, args.beta_h,
                                     args.mean_gap, sites=args.sites, eps=args.eps)
    probs = analytics.cold_bath_probabilities(args.wb, args.beta_c, args.mean_gap)
    worst = analytics.worst_case_analytic(args.wb, args.mean_gap)
    report = {
        "schema": "mbl-otto/predict-v1",
        "version": __version__,
        "wb": args.wb,
        "beta_c": "inf" if math.isinf(args.beta_c) else args.beta_c,
        "beta_h": args.beta_h, "mean_gap": args.mean_gap,
        "sites": args.sites, "eps": args.eps,
        "q2": pred.q2, "q4": pred.q4, "w_tot": pred.w_tot, "eta": pred.eta,
        "regime_ok": pred.regime_ok, "violations": list(pred.violations),
        "p_cold": probs["p_cold"], "p_bar_cold": probs["p_bar_cold"],
        "p_worst": worst["p_worst"], "p_worst_tilde": worst["p_worst_tilde"],
    }
    text = artifacts.dump_json(report, path=args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def cmd_estimate(args):
    est = analytics.power_estimate(
        preset=args.preset, eps=args.eps, subengine_sites=args.subengine_sites,
        spacing_nm=args.spacing_nm, wb_fraction=args.wb_fraction)
    report = {"schema": "mbl-otto/estimate-v1", "version": __version__,
              "preset": args.preset}
    report.update(est)
    text = artifacts.dump_json(report, path=args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def cmd_compare(args):
    basis = enumerate_basis(args.sites)
    std_reals = make_realizations(args.seed, args.realizations, args.sites,
                                  args.h_eth, args.h_mbl)
    eq_reals = make_realizations(args.seed + 1, 2 * args.realizations, args.sites,
                                 args.h_mbl, args.h_mbl)
    # resolve wb from the MBL-side mean gap of the standard ensemble
    energy_sets = []
    for dr in std_reals:
        ham = build_hamiltonian(basis, dr, HamiltonianParams(alpha=1.0))
        energy_sets.append(eigenvalues_only(ham, seed_tag=dr.seed_tag))
    mg = mean_gap(energy_sets, window=1.0)
    wb = args.wb_frac * mg
    params = CycleParams(wb=wb, beta_c=args.beta_c, beta_h=args.beta_h)

    per_real = args.trials // args.realizations
    std_samples = []
    for k, dr in enumerate(std_reals):
        std_samples.append(sample_trials(basis, dr, params, per_real,
                                         seed=args.seed, realization_id=k))
    eq_samples = []
    for k in range(args.realizations):
        pair = (eq_reals[2 * k], eq_reals[2 * k + 1])
        eq_samples.append(run_equal_disorder(basis, pair, params, per_real,
                                             seed=args.seed + 1, stream=k))
    report = compare_worst_case(np.concatenate(std_samples),
                                np.concatenate(eq_samples),
                                n_bootstrap=args.bootstrap, seed=args.seed)
    payload = {
        "schema": "mbl-otto/compare-v1",
        "version": __version__,
        "sites": args.sites, "wb": wb, "wb_frac": args.wb_frac,
        "mean_gap": mg, "trials_per_engine": per_real * args.realizations,
        "labels": list(report.labels),
        "p_worst": report.p_worst,
        "variance": report.variance,
        "ordered": report.ordered,
        "intervals_disjoint": report.intervals_disjoint,
        "variance_ordered_confidence": report.variance_ordered_confidence,
        "bootstrap_resamples": report.bootstrap_resamples,
    }
    text = artifacts.dump_json(payload, path=args.out)
    if args.out is None:
        sys.stdout.write(text)
    if args.csv_out:
        rows = [[w] for w in np.concatenate(std_samples)]
        artifacts.write_csv(args.csv_out + ".standard.csv",
                            ["standard-engine work samples"], ["w_tot"], rows)
        rows = [[w] for w in np.concatenate(eq_samples)]
        artifacts.write_csv(args.csv_out + ".equal_disorder.csv",
                            ["equal-disorder-engine work samples"], ["w_tot"], rows)
    return 0


def cmd_replay(args):
    source = artifacts.load_json(args.artifact)
    cfg = source["metadata"]["config"]
    beta_c = math.inf if cfg["beta_c"] == "inf" else cfg["beta_c"]
    config = RunConfig(
        sites=cfg["sites"], realizations=cfg["realizations"],
        master_seed=cfg["master_seed"], h_eth=cfg["h_eth"], h_mbl=cfg["h_mbl"],
        wb_frac=cfg["wb_frac"], wb_abs=cfg["wb_abs"],
        beta_c=beta_c, beta_h=cfg["beta_h"], speed=cfg["speed"],
        dt_factor=cfg["dt_factor"], energy_unit=cfg["energy_unit"],
        sweep_param=cfg["sweep_param"],
        sweep_grid=tuple(cfg["sweep_grid"]) if cfg["sweep_grid"] else None,
        engine_variant=cfg["engine_variant"], threads=args.threads or 1,
    )
    summary = run_ensemble(config)
    text = artifacts.dump_json(artifacts.summary_artifact(summary), path=args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def cmd_bench(args):
    from .bench import run_benchmarks

    run_benchmarks(sites=args.sites, trials=args.trials, steps=args.steps,
                   stream=sys.stdout)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mbl-otto",
        description="Level-statistics Otto engine: simulation and analytics")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cycle", help="run one disorder-averaged engine point")
    _add_engine_args(p)
    p.add_argument("--out", default=None)
    p.add_argument("--csv-out", default=None,
                   help="also write per-realization records as CSV")
    p.set_defaults(fn=cmd_cycle)

    p = sub.add_parser("sweep", help="sweep one parameter over a grid")
    _add_engine_args(p)
    p.add_argument("--param", choices=("wb", "beta_c", "beta_h", "speed"),
                   required=True)
    p.add_argument("--grid", type=_grid, required=True,
                   help="comma list or logspace:lo:hi:n")
    p.add_argument("--out", default=None, help=".csv for a grid table, else JSON")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("spacings", help="level-spacing statistics at fixed disorder")
    p.add_argument("--sites", type=int, default=8)
    p.add_argument("--h", type=float, default=20.0)
    p.add_argument("--realizations", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window", type=float, default=0.5)
    p.add_argument("--bins", type=int, default=40)
    p.add_argument("--out", default=None, help="histogram CSV path")
    p.set_defaults(fn=cmd_spacings)

    p = sub.add_parser("delta-minus", help="estimate the level-repulsion scale")
    p.add_argument("--sites", type=int, default=8)
    p.add_argument("--h", type=float, default=20.0)
    p.add_argument("--realizations", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window", type=float, default=0.5)
    p.add_argument("--bins", type=int, default=40)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_delta_minus)

    p = sub.add_parser("predict", help="closed-form cycle predictions")
    p.add_argument("--wb", type=float, required=True)
    p.add_argument("--beta-c", type=_beta, default=math.inf)
    p.add_argument("--beta-h", type=float, default=0.0)
    p.add_argument("--mean-gap", type=float, required=True)
    p.add_argument("--sites", type=int, default=12)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_predict)

    p = sub.add_parser("estimate", help="order-of-magnitude power estimates")
    p.add_argument("--preset", choices=sorted(analytics.PRESETS), default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--subengine-sites", type=int, default=None)
    p.add_argument("--spacing-nm", type=float, default=None)
    p.add_argument("--wb-fraction", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_estimate)

    p = sub.add_parser("compare", help="standard vs equal-disorder engine")
    p.add_argument("--sites", type=int, default=10)
    p.add_argument("--h-eth", type=float, default=2.0)
    p.add_argument("--h-mbl", type=float, default=20.0)
    p.add_argument("--wb-frac", type=float, default=0.125)
    p.add_argument("--beta-c", type=_beta, default=math.inf)
    p.add_argument("--beta-h", type=float, default=0.0)
    p.add_argument("--realizations", type=int, default=50)
    p.add_argument("--trials", type=int, default=100000)
    p.add_argument("--bootstrap", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--csv-out", default=None)
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("replay", help="re-run an artifact's embedded config")
    p.add_argument("artifact")
    p.add_argument("--out", default=None)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(fn=cmd_replay)

    p = sub.add_parser("bench", help="time the numba kernels against numpy")
    p.add_argument("--sites", type=int, default=10)
    p.add_argument("--trials", type=int, default=200000)
    p.add_argument("--steps", type=int, default=400)
    p.set_defaults(fn=cmd_bench)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ParameterError, StatisticsError, ResourceError) as exc:
        parser.exit(2, f"error: {exc}\n")
    except NumericError as exc:
        sys.stderr.write(f"numeric failure: {exc} (seed_tag={exc.seed_tag})\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
