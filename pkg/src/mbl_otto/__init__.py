"""Exact-diagonalization simulator and analytics for an MBL Otto engine.

A random-field Heisenberg chain is tuned between weak and strong disorder at
fixed density-of-states width, cold-thermalized through a narrow-bandwidth
bath, and reset against a hot bath; the package runs the cycle over seeded
disorder ensembles and evaluates every closed-form prediction for it.
"""

from ._version import __version__
from .backend import BACKEND, HAS_NUMBA, USE_NUMBA
from .basis import (DisorderRealization, HamiltonianParams, SectorBasis,
                    build_hamiltonian, disorder_strength, enumerate_basis,
                    rescale_factor, sector_traces)
from .cycle import (CycleParams, CycleRecord, adiabatic_map, adiabatic_records,
                    cold_thermalize, dephase, diabatic_unitary, hot_thermalize,
                    partial_swap, run_cycle, sample_trials)
from .competitors import (ComparisonReport, bandwidth_engine_estimate,
                          compare_worst_case, run_equal_disorder, wilson_interval)
from .ensemble import (EnsembleSummary, RunConfig, fit_diabatic,
                       make_realizations, run_ensemble)
from .errors import (NumericError, ParameterError, ResourceError, StateError,
                     StatisticsError)
from .spectra import (GapStatistics, Spectrum, collect_spacings, diagonalize,
                      estimate_delta_minus, gap_statistics, mean_gap,
                      mean_gap_analytic, spacing_distances, spacing_histogram,
                      unfold)
from . import analytics

__all__ = [
    "__version__", "BACKEND", "HAS_NUMBA", "USE_NUMBA",
    "SectorBasis", "DisorderRealization", "HamiltonianParams",
    "enumerate_basis", "rescale_factor", "build_hamiltonian",
    "disorder_strength", "sector_traces",
    "Spectrum", "GapStatistics", "diagonalize", "mean_gap",
    "mean_gap_analytic", "collect_spacings", "unfold", "spacing_distances",
    "estimate_delta_minus", "gap_statistics", "spacing_histogram",
    "CycleParams", "CycleRecord", "adiabatic_map", "adiabatic_records",
    "dephase", "cold_thermalize", "hot_thermalize", "partial_swap",
    "diabatic_unitary", "run_cycle", "sample_trials",
    "RunConfig", "EnsembleSummary", "make_realizations", "run_ensemble",
    "fit_diabatic",
    "ComparisonReport", "run_equal_disorder", "compare_worst_case",
    "bandwidth_engine_estimate", "wilson_interval",
    "analytics",
    "ParameterError", "StateError", "StatisticsError", "NumericError",
    "ResourceError",
]
