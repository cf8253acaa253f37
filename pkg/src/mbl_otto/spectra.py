"""Diagonalization and level statistics.

Gap statistics follow the standard playbook for disordered spectra: restrict
to the central fraction of each spectrum (the band edges obey neither limit
law), pool consecutive gaps across the disorder ensemble, and unfold by the
pooled mean gap so distributions are compared at unit mean.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ParameterError, StatisticsError

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class Spectrum:
    """Full eigendecomposition of one sector Hamiltonian.

    ``energies`` ascend; column j of ``vectors`` is the eigenvector of
    ``energies[j]``.  ``alpha`` records the tuning value the Hamiltonian was
    built at.
    """

    energies: np.ndarray
    vectors: np.ndarray
    alpha: float = 0.0


@dataclass(frozen=True)
class GapStatistics:
    """Pooled consecutive gaps from the central window of an ensemble."""

    spacings: np.ndarray
    mean_gap: float
    delta_minus: float
    window: float


def diagonalize(ham, alpha=0.0, seed_tag=None, symmetry_tol=1e-12):
    """Full eigendecomposition of a dense real symmetric matrix.

    Eigenvalues ascend and the output is deterministic for identical input.
    Raises :class:`ParameterError` for non-symmetric input and
    :class:`NumericError` (carrying ``seed_tag``) if the eigensolver fails.
    """
    ham = np.asarray(ham, dtype=np.float64)
    scale = np.abs(ham).max() or 1.0
    if np.abs(ham - ham.T).max() > symmetry_tol * scale:
        raise ParameterError("matrix is not symmetric")
    try:
        energies, vectors = np.linalg.eigh(ham)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed: {exc}", seed_tag=seed_tag) from exc
    return Spectrum(energies=energies, vectors=vectors, alpha=alpha)


def eigenvalues_only(ham, seed_tag=None):
    """Ascending eigenvalues of a symmetric matrix (no eigenvectors)."""
    try:
        return np.linalg.eigvalsh(ham)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed: {exc}", seed_tag=seed_tag) from exc


def _as_energy_arrays(spectra):
    out = []
    for s in spectra:
        out.append(s.energies if isinstance(s, Spectrum) else np.asarray(s, float))
    return out


def central_slice(n, window):
    """Index slice selecting the central ``window`` fraction of n levels."""
    if not 0.0 < window <= 1.0:
        raise ParameterError(f"window must lie in (0, 1], got {window}")
    keep = max(2, int(round(n * window)))
    start = (n - keep) // 2
    return slice(start, start + keep)


def mean_gap(spectra, window=1.0):
    """Ensemble mean gap from the Gaussian density-of-states inversion.

    <delta> = 2 sqrt(pi) sigma / N, with sigma^2 the disorder average of the
    per-spectrum eigenvalue variance (population normalization) over the
    central ``window`` fraction.  With the full window and the rescaled chain,
    sigma is the energy unit by construction.
    """
    arrays = _as_energy_arrays(spectra)
    if not arrays:
        raise ParameterError("mean_gap needs at least one spectrum")
    n = arrays[0].size
    sel = central_slice(n, window)
    var = np.mean([a[sel].var() for a in arrays])
    return 2.0 * SQRT_PI * math.sqrt(var) / n


def mean_gap_analytic(sites, eps, dim):
    """<delta> = 2 sqrt(pi L) eps / N for a Gaussian band of variance L eps^2."""
    return 2.0 * math.sqrt(math.pi * sites) * eps / dim


def collect_spacings(spectra, window=0.5):
    """Pool consecutive gaps from the central window of each spectrum."""
    arrays = _as_energy_arrays(spectra)
    if not arrays:
        raise ParameterError("no spectra supplied")
    sel = central_slice(arrays[0].size, window)
    return np.concatenate([np.diff(a[sel]) for a in arrays])


def unfold(spacings):
    """Rescale spacings to unit mean."""
    spacings = np.asarray(spacings, float)
    m = spacings.mean()
    if m <= 0.0:
        raise ParameterError("spacings must have positive mean")
    return spacings / m


def poisson_cdf(s):
    """CDF of the unit-mean Poisson spacing law, 1 - exp(-s)."""
    return 1.0 - np.exp(-s)


def wigner_cdf(s):
    """CDF of the unit-mean Wigner surmise, 1 - exp(-pi s^2 / 4)."""
    return 1.0 - np.exp(-0.25 * math.pi * np.square(s))


def _ks_distance(sorted_sample, cdf):
    n = sorted_sample.size
    f = cdf(sorted_sample)
    i = np.arange(1, n + 1)
    return max(np.max(f - (i - 1) / n), np.max(i / n - f))


def spacing_distances(spacings):
    """Kolmogorov-Smirnov distances of unfolded spacings to both limit laws.

    Input must be unfolded (unit mean).  Raises :class:`StatisticsError`
    below 100 spacings, where the KS statistic is unreliable.
    """
    spacings = np.asarray(spacings, float)
    if spacings.size < 100:
        raise StatisticsError(f"need >= 100 spacings, got {spacings.size}")
    s = np.sort(spacings)
    return {
        "ks_poisson": _ks_distance(s, poisson_cdf),
        "ks_wigner": _ks_distance(s, wigner_cdf),
    }


def estimate_delta_minus(spacings, bins=40, mean_gap=None, min_samples=1000,
                         floor_fraction=0.2):
    """Automated estimate of the level-repulsion scale.

    Histograms the spacings on logarithmic bins over [1e-4 <delta>, <delta>]
    and returns the left edge of the first bin from which the
    per-unit-spacing density is nonincreasing across three consecutive bins,
    i.e. the turnover out of the repulsion-suppressed region.  Two noise
    guards keep shot noise from firing the rule inside the suppressed flank:
    the run must end at a populated bin and must start at a density of at
    least ``floor_fraction`` of the histogram maximum.  Falls back to the
    density-argmax bin edge when no qualifying run exists.
    """
    spacings = np.asarray(spacings, float)
    if spacings.size < min_samples:
        raise StatisticsError(
            f"delta_minus estimate needs >= {min_samples} spacings, got {spacings.size}"
        )
    if mean_gap is None:
        mean_gap = float(spacings.mean())
    if mean_gap <= 0.0:
        raise ParameterError("mean gap must be positive")
    edges = np.geomspace(1e-4 * mean_gap, mean_gap, bins + 1)
    counts, _ = np.histogram(spacings, bins=edges)
    density = counts / (spacings.size * np.diff(edges))
    populated = counts >= 3  # a 1-count bin is a shot-noise spike, not a turnover
    floor = floor_fraction * (density[populated].max() if populated.any()
                              else density.max())
    for i in range(bins - 2):
        if (populated[i] and density[i] >= floor
                and density[i] >= density[i + 1] >= density[i + 2] > 0.0):
            return float(edges[i])
    return float(edges[int(np.argmax(density))])


def gap_statistics(spectra, window=0.5, bins=40):
    """Pooled central-window gaps with mean and repulsion-scale estimates."""
    spacings = collect_spacings(spectra, window)
    mg = float(spacings.mean())
    dm = estimate_delta_minus(spacings, bins=bins, mean_gap=mg)
    return GapStatistics(spacings=spacings, mean_gap=mg, delta_minus=dm, window=window)


def spacing_histogram(spacings, bins=40, lo=None, hi=None, log=True):
    """Histogram rows (bin_left, bin_right, count, density) for CSV export."""
    spacings = np.asarray(spacings, float)
    if spacings.size == 0:
        raise ParameterError("no spacings to histogram")
    positive = spacings[spacings > 0]
    if lo is None:
        lo = float(positive.min()) if log else float(spacings.min())
    if hi is None:
        hi = float(spacings.max())
    edges = np.geomspace(lo, hi, bins + 1) if log else np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(spacings, bins=edges)
    density = counts / (spacings.size * np.diff(edges))
    return np.column_stack([edges[:-1], edges[1:], counts.astype(float), density])
