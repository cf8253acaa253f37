"""Hot numeric kernels, each in a numba @njit and a pure-numpy variant.

The active variant is chosen at import time by :mod:`mbl_otto.backend`
(``MBL_OTTO_BACKEND``); both stay importable so the benchmark and the
equivalence tests can run them side by side.  Random draws are bit-identical
across the two paths (same counter indexing); floating-point reductions agree
to rounding.  Within one backend every kernel is exactly deterministic.
"""

import math

import numpy as np

from .backend import HAS_NUMBA, USE_NUMBA, njit
from . import rng

_U64 = np.uint64
_GOLD = rng._GOLD
_M1 = rng._M1
_M2 = rng._M2
_R30 = _U64(30)
_R27 = _U64(27)
_R31 = _U64(31)
_R11 = _U64(11)
_TWO_NEG53 = rng.TWO_NEG53
_TWO_NEG52 = rng.TWO_NEG52


# ---------------------------------------------------------------------------
# counter RNG
# ---------------------------------------------------------------------------

def uniform_symmetric_np(base, n, offset=0):
    """[-1, 1) uniforms for draws offset..offset+n-1 of one stream."""
    draws = np.arange(offset, offset + n, dtype=np.uint64)
    return (rng.mix64(_U64(base) ^ draws) >> _R11) * _TWO_NEG52 - 1.0


@njit()
def _mix64_nb(z):
    z = (z ^ (z >> _R30)) * _M1
    z = (z ^ (z >> _R27)) * _M2
    return z ^ (z >> _R31)


@njit()
def uniform_symmetric_nb(base, n, offset=0):
    out = np.empty(n)
    for i in range(n):
        h = _mix64_nb(_U64(base) ^ _U64(offset + i))
        out[i] = (h >> _R11) * _TWO_NEG52 - 1.0
    return out


# ---------------------------------------------------------------------------
# cold-bath clusters
# ---------------------------------------------------------------------------

def cluster_arrays(energies, wb):
    """Per-level first/last indices of the maximal small-gap clusters.

    Levels i and i+1 belong to the same cluster iff E[i+1] - E[i] < wb
    (strict, so wb = 0 yields all singletons).
    """
    n = energies.size
    new = np.empty(n, dtype=bool)
    new[0] = True
    if n > 1:
        new[1:] = np.diff(energies) >= wb
    starts = np.flatnonzero(new)
    ids = np.cumsum(new) - 1
    start_of = starts[ids]
    ends = np.append(starts[1:] - 1, n - 1)
    end_of = ends[ids]
    return start_of.astype(np.int64), end_of.astype(np.int64)


def cold_redistribute_np(populations, energies, wb, beta_c):
    """Within-cluster Gibbs redistribution of the level populations."""
    start_of, _ = cluster_arrays(energies, wb)
    starts = np.flatnonzero(np.r_[True, start_of[1:] != start_of[:-1]])
    totals = np.add.reduceat(populations, starts)
    if math.isinf(beta_c):
        out = np.zeros_like(populations)
        out[start_of[starts]] = totals
        return out
    ids = np.cumsum(np.r_[True, start_of[1:] != start_of[:-1]]) - 1
    w = np.exp(-beta_c * (energies - energies[start_of]))
    denom = np.add.reduceat(w, starts)
    return totals[ids] * w / denom[ids]


@njit()
def _cold_redistribute_loop(populations, energies, wb, beta_c, beta_c_inf):
    n = populations.size
    out = np.zeros(n)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and energies[j + 1] - energies[j] < wb:
            j += 1
        total = 0.0
        for k in range(i, j + 1):
            total += populations[k]
        if beta_c_inf or i == j:
            out[i] += total
        else:
            denom = 0.0
            for k in range(i, j + 1):
                denom += math.exp(-beta_c * (energies[k] - energies[i]))
            for k in range(i, j + 1):
                out[k] = total * math.exp(-beta_c * (energies[k] - energies[i])) / denom
        i = j + 1
    return out


def cold_redistribute_nb(populations, energies, wb, beta_c):
    return _cold_redistribute_loop(
        populations, energies, wb, 0.0 if math.isinf(beta_c) else beta_c,
        math.isinf(beta_c),
    )


# ---------------------------------------------------------------------------
# trial sampler
# ---------------------------------------------------------------------------

def trial_tables(e0, e1, wb, beta_c, beta_h):
    """Lookup tables shared by both trial-sampler variants.

    Returns (hot_cdf, start_of, end_of, gibbs_cdf); gibbs_cdf[i] is the
    cumulative within-cluster Gibbs probability of relaxing to level <= i,
    hitting exactly 1.0 at each cluster end.
    """
    n = e0.size
    if beta_h == 0.0:
        hot_cdf = np.arange(1, n + 1, dtype=np.float64) / n
    else:
        logw = -beta_h * (e0 - e0.min())
        w = np.exp(logw)
        hot_cdf = np.cumsum(w)
        hot_cdf /= hot_cdf[-1]
    start_of, end_of = cluster_arrays(e1, wb)
    if math.isinf(beta_c):
        gibbs_cdf = np.ones(n)
    else:
        w = np.exp(-beta_c * (e1 - e1[start_of]))
        new = np.r_[True, start_of[1:] != start_of[:-1]]
        starts = np.flatnonzero(new)
        ids = np.cumsum(new) - 1
        denom = np.add.reduceat(w, starts)[ids]
        cw = np.cumsum(w)
        # cumulative weight within each cluster, exactly 1.0 at cluster ends
        gibbs_cdf = (cw - cw[start_of] + w[start_of]) / denom
        gibbs_cdf[end_of] = 1.0
    return hot_cdf, start_of, end_of, gibbs_cdf


def trial_work_np(e0, e1, hot_cdf, start_of, end_of, gibbs_cdf, beta_c_inf, base, n_trials):
    draws = np.arange(2 * n_trials, dtype=np.uint64)
    u = (rng.mix64(_U64(base) ^ draws) >> _R11) * _TWO_NEG53
    u1 = u[0::2]
    u2 = u[1::2]
    j = np.searchsorted(hot_cdf, u1, side="right")
    if beta_c_inf:
        k = start_of[j]
    else:
        ids = np.cumsum(np.r_[True, start_of[1:] != start_of[:-1]]) - 1
        key = ids[j] + u2
        gkey = ids + gibbs_cdf
        gkey[end_of] = ids[end_of] + 1.0
        k = np.searchsorted(gkey, key, side="left")
        # a u2 of exactly 0 would otherwise land on the previous cluster's end
        k = np.clip(k, start_of[j], end_of[j])
    return (e0[j] - e0[k]) - (e1[j] - e1[k])


@njit()
def _trial_work_loop(e0, e1, hot_cdf, start_of, end_of, gibbs_cdf, beta_c_inf, base, n_trials):
    out = np.empty(n_trials)
    for t in range(n_trials):
        h1 = _mix64_nb(_U64(base) ^ _U64(2 * t))
        u1 = (h1 >> _R11) * _TWO_NEG53
        j = np.searchsorted(hot_cdf, u1, side="right")
        h2 = _mix64_nb(_U64(base) ^ _U64(2 * t + 1))
        u2 = (h2 >> _R11) * _TWO_NEG53
        if beta_c_inf:
            k = start_of[j]
        else:
            k = start_of[j]
            stop = end_of[j]
            while k < stop and gibbs_cdf[k] < u2:
                k += 1
        out[t] = (e0[j] - e0[k]) - (e1[j] - e1[k])
    return out


def trial_work_nb(e0, e1, hot_cdf, start_of, end_of, gibbs_cdf, beta_c_inf, base, n_trials):
    return _trial_work_loop(
        e0, e1, hot_cdf, start_of, end_of, gibbs_cdf, beta_c_inf, _U64(base), n_trials
    )


# ---------------------------------------------------------------------------
# stepwise stroke propagator
# ---------------------------------------------------------------------------
# H(alpha) = (eps/Q(h)) [hops + diag(zz + h * field)], alpha stepping on a
# staircase of K steps; the product of per-step exponentials is accumulated
# onto the (real, imaginary) matrix pair passed in.

def _step_coeffs(k, steps_total, total_time, dt, reverse, h_eth, h_mbl, eps, sites, rescale):
    a = k * dt / total_time
    if reverse:
        a = 1.0 - a
    h = (1.0 - a) * h_eth + a * h_mbl
    if rescale:
        q = math.sqrt(3.0 * sites - 2.0 + (sites - 2.0) / (sites - 1.0) + sites * h * h / 3.0)
    else:
        q = 1.0
    return eps / q, h


def stroke_propagate_np(hop_rows, hop_cols, zz_diag, field_diag, sites, h_eth, h_mbl,
                        eps, rescale, total_time, dt, steps, reverse, wr, wi):
    n = zz_diag.size
    ham = np.empty((n, n))
    idx = np.arange(n)
    for k in range(steps):
        c, h = _step_coeffs(k, steps, total_time, dt, reverse, h_eth, h_mbl, eps, sites, rescale)
        ham[:, :] = 0.0
        ham[hop_rows, hop_cols] = 2.0 * c
        ham[hop_cols, hop_rows] = 2.0 * c
        ham[idx, idx] = c * (zz_diag + h * field_diag)
        evals, evecs = np.linalg.eigh(ham)
        vt = np.ascontiguousarray(evecs.T)
        a = vt @ wr
        b = vt @ wi
        theta = evals * dt
        co = np.cos(theta)[:, None]
        si = np.sin(theta)[:, None]
        cr = co * a + si * b
        ci = co * b - si * a
        wr = evecs @ cr
        wi = evecs @ ci
    return wr, wi


@njit()
def _stroke_propagate_loop(hop_rows, hop_cols, zz_diag, field_diag, sites, h_eth, h_mbl,
                           eps, rescale, total_time, dt, steps, reverse, wr, wi):
    n = zz_diag.size
    ham = np.empty((n, n))
    for k in range(steps):
        a_t = k * dt / total_time
        if reverse:
            a_t = 1.0 - a_t
        h = (1.0 - a_t) * h_eth + a_t * h_mbl
        if rescale:
            q = math.sqrt(3.0 * sites - 2.0 + (sites - 2.0) / (sites - 1.0) + sites * h * h / 3.0)
        else:
            q = 1.0
        c = eps / q
        for i in range(n):
            for j in range(n):
                ham[i, j] = 0.0
        for p in range(hop_rows.size):
            ham[hop_rows[p], hop_cols[p]] = 2.0 * c
            ham[hop_cols[p], hop_rows[p]] = 2.0 * c
        for i in range(n):
            ham[i, i] = c * (zz_diag[i] + h * field_diag[i])
        evals, evecs = np.linalg.eigh(ham)
        vt = np.ascontiguousarray(evecs.T)
        a = np.dot(vt, wr)
        b = np.dot(vt, wi)
        cr = np.empty((n, n))
        ci = np.empty((n, n))
        for i in range(n):
            co = math.cos(evals[i] * dt)
            si = math.sin(evals[i] * dt)
            for j in range(n):
                cr[i, j] = co * a[i, j] + si * b[i, j]
                ci[i, j] = co * b[i, j] - si * a[i, j]
        wr = np.dot(evecs, cr)
        wi = np.dot(evecs, ci)
    return wr, wi


def stroke_propagate_nb(hop_rows, hop_cols, zz_diag, field_diag, sites, h_eth, h_mbl,
                        eps, rescale, total_time, dt, steps, reverse, wr, wi):
    return _stroke_propagate_loop(
        hop_rows, hop_cols, zz_diag, field_diag, float(sites), h_eth, h_mbl,
        eps, rescale, total_time, dt, steps, reverse, wr, wi,
    )


# ---------------------------------------------------------------------------
# backend dispatch
# ---------------------------------------------------------------------------

if USE_NUMBA:
    uniform_symmetric = uniform_symmetric_nb
    cold_redistribute = cold_redistribute_nb
    trial_work = trial_work_nb
    stroke_propagate = stroke_propagate_nb
else:
    uniform_symmetric = uniform_symmetric_np
    cold_redistribute = cold_redistribute_np
    trial_work = trial_work_np
    stroke_propagate = stroke_propagate_np
