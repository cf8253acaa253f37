"""Side-by-side timing of the numba kernels and their numpy fallbacks."""

import math
import time

import numpy as np

from . import _kernels
from .backend import BACKEND, HAS_NUMBA
from .basis import HamiltonianParams, build_hamiltonian, enumerate_basis
from .ensemble import make_realizations
from .rng import DOMAIN_TRIALS, stream_base
from .spectra import eigenvalues_only


def _time(fn, repeats=3):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _bench_pair(name, np_fn, nb_fn, stream, repeats=3):
    t_np = _time(np_fn, repeats)
    line = f"{name:<28s} numpy {1e3 * t_np:10.2f} ms"
    if nb_fn is not None:
        nb_fn()  # warm the JIT cache outside the timed region
        t_nb = _time(nb_fn, repeats)
        line += f"   numba {1e3 * t_nb:10.2f} ms   speedup {t_np / t_nb:6.2f}x"
    stream.write(line + "\n")


def run_benchmarks(sites=10, trials=200_000, steps=400, stream=None):
    import sys

    stream = stream or sys.stdout
    stream.write(f"active backend: {BACKEND} (numba available: {HAS_NUMBA})\n")

    basis = enumerate_basis(sites)
    dr = make_realizations(7, 1, sites)[0]
    e0 = eigenvalues_only(build_hamiltonian(basis, dr, HamiltonianParams(alpha=0.0)))
    e1 = eigenvalues_only(build_hamiltonian(basis, dr, HamiltonianParams(alpha=1.0)))
    mg = 2.0 * math.sqrt(math.pi * e1.var()) / basis.dim
    wb = mg / 8.0

    base = stream_base(11, DOMAIN_TRIALS, 0)

    _bench_pair(
        f"uniform draws (n=2e6)",
        lambda: _kernels.uniform_symmetric_np(base, 2_000_000),
        (lambda: _kernels.uniform_symmetric_nb(base, 2_000_000)) if HAS_NUMBA else None,
        stream)

    pops = np.full(basis.dim, 1.0 / basis.dim)
    _bench_pair(
        f"cold redistribute (x2000)",
        lambda: [_kernels.cold_redistribute_np(pops, e1, wb, 5.0) for _ in range(2000)],
        (lambda: [_kernels.cold_redistribute_nb(pops, e1, wb, 5.0) for _ in range(2000)])
        if HAS_NUMBA else None,
        stream)

    tables = _kernels.trial_tables(e0, e1, wb, math.inf, 0.0)
    _bench_pair(
        f"trial sampler (n={trials})",
        lambda: _kernels.trial_work_np(e0, e1, *tables, True, base, trials),
        (lambda: _kernels.trial_work_nb(e0, e1, *tables, True, base, trials))
        if HAS_NUMBA else None,
        stream)

    small = enumerate_basis(8)
    dr8 = make_realizations(7, 1, 8)[0]
    field_diag = small.z.astype(np.float64) @ dr8.fields
    n = small.dim
    args = (small.hop_rows, small.hop_cols, small.zz_diag, field_diag,
            small.sites, dr8.h_eth, dr8.h_mbl, 1.0, True,
            steps * 0.02, 0.02, steps, False)
    _bench_pair(
        f"stroke propagator (K={steps})",
        lambda: _kernels.stroke_propagate_np(*args, np.eye(n), np.zeros((n, n))),
        (lambda: _kernels.stroke_propagate_nb(*args, np.eye(n), np.zeros((n, n))))
        if HAS_NUMBA else None,
        stream)
