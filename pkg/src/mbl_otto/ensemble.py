"""Disorder ensembles: seeded generation, parallel cycles, aggregation.

Every observable is a deterministic function of the run configuration.
Realization k draws its fields from counter-RNG stream k of the master seed,
workers only ever write to slot k of preallocated result arrays, and
statistics are reduced in index order, so summaries are bit-identical across
thread counts.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from ._version import __version__
from .basis import DisorderRealization, HamiltonianParams, build_hamiltonian, enumerate_basis
from .cycle import CycleParams, adiabatic_records, stroke_steps
from .errors import NumericError, ParameterError, StatisticsError
from .rng import DOMAIN_FIELDS, RNG_NAME, uniform_symmetric
from .spectra import (collect_spacings, diagonalize, eigenvalues_only,
                      estimate_delta_minus, mean_gap)
from .backend import BACKEND

SWEEPABLE = ("wb", "beta_c", "beta_h", "speed")
VARIANTS = ("standard", "equal_disorder", "bandwidth")
QUANTITIES = ("w1", "q2", "w3", "q4", "w_tot")


@dataclass(frozen=True)
class RunConfig:
    """Full specification of one disorder-averaged engine run."""

    sites: int
    realizations: int
    master_seed: int
    h_eth: float = 2.0
    h_mbl: float = 20.0
    wb_frac: float = 0.0625
    wb_abs: float = None
    beta_c: float = math.inf
    beta_h: float = 0.0
    speed: float = 0.0
    dt_factor: float = 0.405
    energy_unit: float = 1.0
    sweep_param: str = None
    sweep_grid: tuple = None
    engine_variant: str = "standard"
    threads: int = 1
    keep_records: bool = False

    def __post_init__(self):
        if self.realizations < 1:
            raise ParameterError("need at least one realization")
        if self.engine_variant not in VARIANTS:
            raise ParameterError(f"unknown engine variant {self.engine_variant!r}")
        if self.sweep_param is not None:
            if self.sweep_param not in SWEEPABLE:
                raise ParameterError(f"cannot sweep {self.sweep_param!r}")
            if not self.sweep_grid:
                raise ParameterError("sweep grid must be nonempty")
        if self.engine_variant == "standard" and not self.h_mbl > self.h_eth > 0:
            raise ParameterError("standard runs need h_mbl > h_eth > 0")
        if self.engine_variant == "equal_disorder" and (
                self.speed > 0 or self.sweep_param == "speed"):
            raise ParameterError("the equal-disorder engine is adiabatic only")
        if self.threads < 1:
            raise ParameterError("threads must be >= 1")

    def to_dict(self):
        d = asdict(self)
        # execution details, not physics: results must not depend on them
        d.pop("threads")
        d.pop("keep_records")
        d["sweep_grid"] = list(self.sweep_grid) if self.sweep_grid else None
        d["beta_c"] = "inf" if math.isinf(self.beta_c) else self.beta_c
        return d


@dataclass
class EnsembleSummary:
    """Disorder-averaged observables per grid point, plus run metadata."""

    points: list
    metadata: dict
    records: list = field(default_factory=list)

    def to_dict(self):
        return {"points": self.points, "metadata": self.metadata}


def make_realizations(master_seed, n, sites, h_eth=2.0, h_mbl=20.0):
    """n seeded disorder realizations, one counter-RNG stream each.

    Identical arguments reproduce identical fields bit-exactly, in any order
    and on any number of threads.
    """
    if n < 1:
        raise ParameterError("need n >= 1 realizations")
    out = []
    for k in range(n):
        fields = uniform_symmetric(master_seed, DOMAIN_FIELDS, k, sites)
        out.append(DisorderRealization(fields=fields, h_eth=h_eth, h_mbl=h_mbl,
                                       seed_tag=(master_seed, k)))
    return out


def _parallel_map(fn, n, threads):
    """Evaluate fn(k) for k in range(n); results land in index order."""
    results = [None] * n
    errors = []

    def _run(k):
        try:
            results[k] = fn(k)
        except NumericError as exc:
            errors.append((k, exc))

    if threads <= 1:
        for k in range(n):
            _run(k)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(_run, range(n)))
    return results, errors


def _endpoint_energy_sets(config, basis, realizations, need_vectors):
    """Eigen-solve both stroke-boundary Hamiltonians for every realization."""
    rescale = config.engine_variant != "bandwidth"
    eps = config.energy_unit

    def _solve(k):
        if config.engine_variant == "equal_disorder":
            dr_a, dr_b = realizations[2 * k], realizations[2 * k + 1]
            p1 = HamiltonianParams(alpha=1.0, energy_unit=eps, rescale=rescale)
            h0 = build_hamiltonian(basis, dr_a, p1)
            h1 = build_hamiltonian(basis, dr_b, p1)
            tag = dr_a.seed_tag
        else:
            dr = realizations[k]
            h0 = build_hamiltonian(
                basis, dr, HamiltonianParams(alpha=0.0, energy_unit=eps, rescale=rescale))
            h1 = build_hamiltonian(
                basis, dr, HamiltonianParams(alpha=1.0, energy_unit=eps, rescale=rescale))
            tag = dr.seed_tag
        if need_vectors:
            s0 = diagonalize(h0, alpha=0.0, seed_tag=tag)
            s1 = diagonalize(h1, alpha=1.0, seed_tag=tag)
            return s0, s1
        return (eigenvalues_only(h0, seed_tag=tag),
                eigenvalues_only(h1, seed_tag=tag))

    return _parallel_map(_solve, config.realizations, config.threads)


def _resolve_grid(config):
    if config.sweep_param is None:
        return None, [None]
    return config.sweep_param, list(config.sweep_grid)


def _mean_stderr(values):
    values = np.asarray(values, dtype=np.float64)
    m = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return m, se


def _eta_ratio_of_means(w_tot, q4, eps):
    """Efficiency as ratio of means with a delta-method standard error."""
    w = np.asarray(w_tot)
    q = np.asarray(q4)
    mw, mq = w.mean(), q.mean()
    if abs(mw) < 1e-9 * eps or mq == 0.0:
        return None, None
    eta = mw / mq
    n = w.size
    if n < 2:
        return float(eta), 0.0
    var_w = w.var(ddof=1) / n
    var_q = q.var(ddof=1) / n
    cov = float(np.cov(w, q, ddof=1)[0, 1]) / n
    var_eta = (var_w / mq**2 + mw**2 * var_q / mq**4 - 2.0 * mw * cov / mq**3)
    return float(eta), math.sqrt(max(var_eta, 0.0))


def run_ensemble(config):
    """Run the configured ensemble and aggregate disorder averages.

    Realizations that fail numerically are excluded and reported (the run
    aborts if more than 1% fail).  Efficiency is the ratio of the averaged
    work to the averaged hot heat, never the average of per-realization
    ratios.
    """
    basis = enumerate_basis(config.sites)
    n_fields = (2 * config.realizations
                if config.engine_variant == "equal_disorder" else config.realizations)
    realizations = make_realizations(config.master_seed, n_fields, config.sites,
                                     config.h_eth, config.h_mbl)
    diabatic = config.speed > 0 or config.sweep_param == "speed"
    pairs, errors = _endpoint_energy_sets(config, basis, realizations,
                                          need_vectors=diabatic)
    good = [k for k in range(config.realizations) if pairs[k] is not None]
    if len(good) < config.realizations * 0.99:
        raise NumericError(
            f"{config.realizations - len(good)} of {config.realizations} "
            "realizations failed (> 1%)",
            seed_tag=(config.master_seed, errors[0][0] if errors else -1),
        )

    if diabatic:
        e1_set = [pairs[k][1].energies for k in good]
    else:
        e1_set = [pairs[k][1] for k in good]
    mg = mean_gap(e1_set, window=1.0)
    wb = config.wb_abs if config.wb_abs is not None else config.wb_frac * mg

    delta_minus = None
    spacings = collect_spacings(e1_set, window=0.5)
    if spacings.size >= 1000:
        delta_minus = estimate_delta_minus(spacings, mean_gap=float(spacings.mean()))

    param, grid = _resolve_grid(config)
    points = []
    all_records = []
    for value in grid:
        wb_point, beta_c, beta_h, speed = wb, config.beta_c, config.beta_h, config.speed
        if param == "wb":
            wb_point = value * mg if config.wb_abs is None else value
        elif param == "beta_c":
            beta_c = value
        elif param == "beta_h":
            beta_h = value
        elif param == "speed":
            speed = value
        records = _grid_point_records(config, basis, realizations, pairs, good,
                                      wb_point, beta_c, beta_h, speed, mg)
        point = {"grid_value": value if param else None,
                 "wb": wb_point,
                 "beta_c": "inf" if math.isinf(beta_c) else beta_c,
                 "beta_h": beta_h, "speed": speed}
        for name in QUANTITIES:
            m, se = _mean_stderr([getattr(r, name) for r in records])
            point[name] = {"mean": m, "stderr": se}
        eta, eta_se = _eta_ratio_of_means([r.w_tot for r in records],
                                          [r.q4 for r in records],
                                          config.energy_unit)
        point["eta"] = {"mean": eta, "stderr": eta_se}
        points.append(point)
        if config.keep_records:
            all_records.append(records)

    metadata = {
        "config": config.to_dict(),
        "seed": config.master_seed,
        "mean_gap": mg,
        "delta_minus": delta_minus,
        "excluded": {"count": config.realizations - len(good),
                     "seed_tags": [[config.master_seed, k] for k, _ in errors]},
        "rng": RNG_NAME,
        "backend": BACKEND,
        "version": __version__,
    }
    return EnsembleSummary(points=points, metadata=metadata,
                           records=all_records if config.keep_records else [])


def _grid_point_records(config, basis, realizations, pairs, good,
                        wb, beta_c, beta_h, speed, mg):
    eps = config.energy_unit
    if speed == 0.0:
        records = []
        for k in good:
            e0, e1 = pairs[k]
            if hasattr(e0, "energies"):
                e0, e1 = e0.energies, e1.energies
            records.append(adiabatic_records(e0, e1, wb, beta_c, beta_h,
                                             realization_id=k))
        return records

    params = CycleParams(wb=wb, beta_c=beta_c, beta_h=beta_h, speed=speed,
                         dt_factor=config.dt_factor, mode="diabatic",
                         energy_unit=eps,
                         rescale=config.engine_variant != "bandwidth")
    # fail fast on absurd step counts before touching any realization
    stroke_steps(realizations[good[0]], params, mg)

    results = [None] * config.realizations

    def _one(k):
        from .cycle import _diabatic_cycle

        results[k] = _diabatic_cycle(basis, realizations[k], params,
                                     pairs[k][0], pairs[k][1], mg, k)

    if config.threads <= 1:
        for k in good:
            _one(k)
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            list(pool.map(_one, good))
    return [results[k] for k in good]


def fit_diabatic(summary, delta_minus=None, p_grid=None):
    """Fit W(v) = W0 - W1 (v d-)^p / wb over a speed sweep.

    Solves (W0, W1) linearly on a grid of exponents and returns the
    best-fitting p alongside the fixed-p = 1/3 coefficients.  Needs at least
    four finite-speed points.
    """
    points = [p for p in summary.points if p["speed"] is not None]
    speeds = np.array([p["speed"] for p in points], dtype=float)
    w = np.array([p["w_tot"]["mean"] for p in points], dtype=float)
    if np.count_nonzero(speeds > 0) < 4:
        raise ParameterError("need >= 4 grid points with v > 0")
    if delta_minus is None:
        delta_minus = summary.metadata.get("delta_minus")
    if not delta_minus or delta_minus <= 0:
        raise ParameterError("need a positive delta_minus scale")
    wb = points[0]["wb"]

    def _solve(p):
        x = (speeds * delta_minus) ** p / wb
        design = np.column_stack([np.ones_like(x), -x])
        if np.linalg.matrix_rank(design) < 2:
            raise StatisticsError("singular design matrix: speeds are degenerate")
        coef, residual, _, _ = np.linalg.lstsq(design, w, rcond=None)
        sse = float(residual[0]) if residual.size else float(
            np.sum((design @ coef - w) ** 2))
        return coef, sse

    if p_grid is None:
        p_grid = np.linspace(0.05, 1.2, 231)
    sse = np.empty(p_grid.size)
    for i, p in enumerate(p_grid):
        _, sse[i] = _solve(p)
    best = int(np.argmin(sse))
    # golden-section refinement inside the bracketing interval
    lo = p_grid[max(best - 1, 0)]
    hi = p_grid[min(best + 1, p_grid.size - 1)]
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = _solve(c)[1], _solve(d)[1]
    for _ in range(60):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = _solve(c)[1]
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = _solve(d)[1]
    p_best = 0.5 * (a + b)
    coef, _ = _solve(p_best)
    coef13, _ = _solve(1.0 / 3.0)
    return {
        "exponent": float(p_best),
        "w0": float(coef[0]),
        "w1": float(coef[1]),
        "w0_fixed": float(coef13[0]),
        "w1_fixed": float(coef13[1]),
    }
