"""One Otto cycle: tune, cold-thermalize, tune back, hot reset.

Sign conventions, fixed once for the whole package: work output counts
positive and absorbed heat counts positive, with strokes on
[t0,t1], [t1,t2], [t2,t3], [t3,t4] and

    W1 = E(t0) - E(t1)    Q2 = E(t2) - E(t1)
    W3 = E(t2) - E(t3)    Q4 = E(t4) - E(t3)    W_tot = W1 + W3.

E(t) = Tr(H rho) with H fixed at the stroke-boundary Hamiltonian, so the
first law W1 + W3 = Q2 + Q4 closes exactly because E(t4) is recomputed from
the reset state rather than assumed.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .basis import HamiltonianParams, build_hamiltonian, disorder_strength
from .errors import ParameterError, ResourceError, StateError
from .spectra import Spectrum, diagonalize, eigenvalues_only

MAX_STROKE_STEPS = 1_000_000


@dataclass(frozen=True)
class CycleParams:
    """Bath and tuning parameters for one cycle.

    ``wb`` is the cold-bath bandwidth in absolute energy units; ``beta_c``
    may be ``math.inf`` and ``beta_h`` may be 0 (both handled as exact
    limits).  ``speed`` is the tuning speed in energy^2; zero if and only if
    the mode is adiabatic.  ``dt_factor`` sets the stepwise-tuning time step
    as a multiple of the mean gap.
    """

    wb: float
    beta_c: float = math.inf
    beta_h: float = 0.0
    speed: float = 0.0
    dt_factor: float = 0.405
    mode: str = "adiabatic"
    energy_unit: float = 1.0
    rescale: bool = True

    def __post_init__(self):
        if self.wb <= 0.0:
            raise ParameterError("cold-bath bandwidth must be positive")
        if self.beta_c <= 0.0:
            raise ParameterError("beta_c must be positive (may be inf)")
        if self.beta_h < 0.0 or math.isinf(self.beta_h):
            raise ParameterError("beta_h must be finite and nonnegative")
        if self.dt_factor <= 0.0:
            raise ParameterError("dt_factor must be positive")
        if self.mode not in ("adiabatic", "diabatic"):
            raise ParameterError(f"unknown mode {self.mode!r}")
        if (self.speed == 0.0) != (self.mode == "adiabatic"):
            raise ParameterError("speed must be 0 exactly when mode is adiabatic")
        if self.speed < 0.0:
            raise ParameterError("speed must be nonnegative")


@dataclass(frozen=True)
class CycleRecord:
    """Stroke-boundary energies and the work/heat ledger of one cycle."""

    boundary_energies: tuple
    w1: float
    q2: float
    w3: float
    q4: float
    w_tot: float
    realization_id: int = 0


def _check_density_matrix(rho, trace_tol=1e-6):
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise StateError(f"density matrix trace {tr} deviates from 1")
    if np.abs(rho - rho.conj().T).max() > 1e-9 * max(1.0, np.abs(rho).max()):
        raise StateError("density matrix is not Hermitian")


def hot_gibbs_weights(energies, beta_h):
    """Gibbs populations on the given levels; exactly uniform at beta_h = 0."""
    n = energies.size
    if beta_h == 0.0:
        return np.full(n, 1.0 / n)
    w = np.exp(-beta_h * (energies - energies.min()))
    return w / w.sum()


def hot_thermalize(spectrum, beta_h):
    """Gibbs state exp(-beta_h H)/Z in the computational basis."""
    if beta_h < 0:
        raise ParameterError("beta_h must be nonnegative")
    n = spectrum.energies.size
    if beta_h == 0.0:
        return np.eye(n) / n
    g = hot_gibbs_weights(spectrum.energies, beta_h)
    v = spectrum.vectors
    return (v * g) @ v.T


def adiabatic_map(rho, spec_from, spec_to):
    """Transport rho through an infinitely slow tuning.

    Applies U with U[l, m] = sum_j <s_l|E_j(to)><E_j(from)|s_m>, which moves
    each instantaneous eigenlevel occupation to the same level index of the
    target spectrum.
    """
    if rho.shape != spec_from.vectors.shape or rho.shape != spec_to.vectors.shape:
        raise ParameterError("dimension mismatch between state and spectra")
    _check_density_matrix(rho)
    u = spec_to.vectors @ spec_from.vectors.T
    return u @ rho @ u.T


def dephase(rho, spectrum):
    """Project onto the diagonal ensemble of the given spectrum.

    Keeps only the energy-eigenbasis populations; preserves the trace and the
    energy expectation value.
    """
    if rho.shape != spectrum.vectors.shape:
        raise ParameterError("dimension mismatch between state and spectrum")
    v = spectrum.vectors
    pops = np.einsum("ij,jk,ki->i", v.T, rho, v)
    return (v * pops.real) @ v.T


def eigenbasis_populations(rho, spectrum):
    """Diagonal of rho in the spectrum's eigenbasis."""
    v = spectrum.vectors
    return np.einsum("ij,jk,ki->i", v.T, rho, v).real


def cold_thermalize(rho_diag, spectrum, wb, beta_c, diag_tol=1e-10):
    """Gibbs-redistribute weight inside each small-gap cluster.

    Levels connected by chains of gaps < wb form clusters; each cluster's
    total weight is reapportioned proportionally to exp(-beta_c E), with the
    beta_c = inf limit dropping everything to the cluster's lowest level.
    Weight never crosses cluster boundaries.  The input must already be
    diagonal in the spectrum's eigenbasis (dephase first).
    """
    if wb < 0.0:
        raise ParameterError("bandwidth must be nonnegative")
    v = spectrum.vectors
    p = np.einsum("ij,jk,ki->i", v.T, rho_diag, v)
    off = rho_diag - (v * p.real) @ v.T
    if np.abs(off).max() > diag_tol * max(1.0, np.abs(rho_diag).max()):
        raise StateError("state is not diagonal in the eigenbasis; dephase first")
    p_new = _kernels.cold_redistribute(p.real.copy(), spectrum.energies, wb, beta_c)
    return (v * p_new) @ v.T


def partial_swap(p, gibbs):
    """Probabilistic-swap channel M_p = (1-p) I + p g 1^T on populations.

    Doubly stochastic in the p = 1 limit used for full thermalization; the
    Gibbs vector g is its fixed point and the two-level transition
    probabilities obey detailed balance.
    """
    if not 0.0 <= p <= 1.0:
        raise ParameterError("swap probability must lie in [0, 1]")
    g = np.asarray(gibbs, dtype=np.float64)
    if g.ndim != 1 or np.any(g <= 0.0) or abs(g.sum() - 1.0) > 1e-12:
        raise ParameterError("gibbs must be a positive vector summing to 1")
    return (1.0 - p) * np.eye(g.size) + p * np.outer(g, np.ones(g.size))


def stroke_steps(dr, params, mean_gap, v=None, dt=None):
    """Step count and step size of one stepwise tuning stroke.

    The stroke lasts T = eps (h_mbl - h_eth) / v and advances alpha on a
    staircase with time step dt = dt_factor * mean_gap.  ``v`` and ``dt``
    override the values implied by ``params``.
    """
    v = params.speed if v is None else v
    if v <= 0.0:
        raise ParameterError("stepwise tuning needs speed > 0")
    if dt is None:
        dt = params.dt_factor * mean_gap
    if dt <= 0.0:
        raise ParameterError("time step must be positive")
    total_time = params.energy_unit * (dr.h_mbl - dr.h_eth) / v
    if total_time <= 0.0:
        raise ParameterError("tuning time must be positive; check h_mbl > h_eth")
    steps = int(math.ceil(total_time / dt))
    if steps > MAX_STROKE_STEPS:
        raise ResourceError(
            f"stroke needs {steps} steps (> {MAX_STROKE_STEPS}); "
            "speed too small for stepwise mode, use adiabatic mode"
        )
    return steps, dt, total_time


def _propagate(basis, dr, params, direction, mean_gap, w0r, w0i, v=None, dt=None):
    steps, dt, total_time = stroke_steps(dr, params, mean_gap, v=v, dt=dt)
    return _kernels.stroke_propagate(
        basis.hop_rows, basis.hop_cols,
        basis.zz_diag, basis.z.astype(np.float64) @ dr.fields,
        basis.sites, dr.h_eth, dr.h_mbl,
        params.energy_unit, params.rescale,
        total_time, dt, steps, direction == "reverse",
        w0r, w0i,
    )


def diabatic_unitary(basis, dr, params, direction, mean_gap, v=None, dt=None,
                     unitarity_tol=1e-9):
    """Time-ordered product of per-step exponentials for one tuning stroke.

    ``direction`` is "forward" (alpha 0 -> 1) or "reverse" (alpha 1 -> 0);
    ``v`` and ``dt`` override the speed and time step carried by ``params``.
    Each step's exponential is exact (built from that step's
    eigendecomposition); the product is checked to be unitary.
    """
    if direction not in ("forward", "reverse"):
        raise ParameterError(f"direction must be forward or reverse, got {direction!r}")
    n = basis.dim
    wr, wi = _propagate(basis, dr, params, direction, mean_gap,
                        np.eye(n), np.zeros((n, n)), v=v, dt=dt)
    u = wr + 1j * wi
    err = np.abs(u.conj().T @ u - np.eye(n)).max()
    if err > unitarity_tol:
        raise StateError(f"stroke product lost unitarity: {err:.3e}")
    return u


def _boundary_record(e_t0, e_t1, e_t2, e_t3, e_t4, realization_id):
    w1 = e_t0 - e_t1
    q2 = e_t2 - e_t1
    w3 = e_t2 - e_t3
    q4 = e_t4 - e_t3
    return CycleRecord(
        boundary_energies=(e_t0, e_t1, e_t2, e_t3, e_t4),
        w1=w1, q2=q2, w3=w3, q4=q4, w_tot=w1 + w3,
        realization_id=realization_id,
    )


def adiabatic_records(e0, e1, wb, beta_c, beta_h, realization_id=0):
    """Cycle accounting in the adiabatic limit, from endpoint eigenvalues only.

    Adiabatic tuning preserves level-index occupations exactly, so the whole
    cycle reduces to population bookkeeping on the two eigenvalue ladders.
    """
    g = hot_gibbs_weights(e0, beta_h)
    q = _kernels.cold_redistribute(g.copy(), e1, wb, beta_c)
    e_t0 = float(g @ e0)
    e_t1 = float(g @ e1)
    e_t2 = float(q @ e1)
    e_t3 = float(q @ e0)
    e_t4 = float(g @ e0)
    return _boundary_record(e_t0, e_t1, e_t2, e_t3, e_t4, realization_id)


def _endpoint_hamiltonians(basis, dr_pair, params):
    """Stroke-boundary Hamiltonians for a single realization or a pair.

    A single realization is tuned between its two disorder strengths; a pair
    keeps the strength at h_mbl and swaps the realization instead.
    """
    if isinstance(dr_pair, (tuple, list)):
        dr_a, dr_b = dr_pair
        if dr_a.h_mbl != dr_b.h_mbl:
            raise ParameterError("paired realizations must share h_mbl")
        h0 = build_hamiltonian(
            basis, dr_a, HamiltonianParams(alpha=1.0, energy_unit=params.energy_unit,
                                           rescale=params.rescale))
        h1 = build_hamiltonian(
            basis, dr_b, HamiltonianParams(alpha=1.0, energy_unit=params.energy_unit,
                                           rescale=params.rescale))
        return dr_a, h0, h1
    h0 = build_hamiltonian(
        basis, dr_pair, HamiltonianParams(alpha=0.0, energy_unit=params.energy_unit,
                                          rescale=params.rescale))
    h1 = build_hamiltonian(
        basis, dr_pair, HamiltonianParams(alpha=1.0, energy_unit=params.energy_unit,
                                          rescale=params.rescale))
    return dr_pair, h0, h1


def run_cycle(basis, dr_pair, params, realization_id=0, mean_gap=None):
    """Execute one full cycle and account all work and heat.

    ``dr_pair`` is one realization (standard engine: tuned between its two
    disorder strengths) or a pair of realizations (equal-disorder variant:
    both endpoints at h_mbl).  Stepwise-tuned cycles need ``mean_gap`` to set
    the time step.
    """
    dr, h0, h1 = _endpoint_hamiltonians(basis, dr_pair, params)
    if params.mode == "adiabatic":
        e0 = eigenvalues_only(h0, seed_tag=dr.seed_tag)
        e1 = eigenvalues_only(h1, seed_tag=dr.seed_tag)
        return adiabatic_records(e0, e1, params.wb, params.beta_c, params.beta_h,
                                 realization_id)
    if isinstance(dr_pair, (tuple, list)):
        raise ParameterError("stepwise tuning supports single realizations only")
    spec0 = diagonalize(h0, alpha=0.0, seed_tag=dr.seed_tag)
    spec1 = diagonalize(h1, alpha=1.0, seed_tag=dr.seed_tag)
    if mean_gap is None:
        mean_gap = 2.0 * math.sqrt(math.pi * spec1.energies.var()) / basis.dim
    return _diabatic_cycle(basis, dr, params, spec0, spec1, mean_gap, realization_id)


def _diabatic_cycle(basis, dr, params, spec0, spec1, mean_gap, realization_id):
    n = basis.dim
    e0, e1 = spec0.energies, spec1.energies
    g = hot_gibbs_weights(e0, beta_h=params.beta_h)
    e_t0 = float(g @ e0)

    if params.beta_h == 0.0:
        # any unitary fixes the maximally mixed state, so stroke 1 is free
        p1 = g.copy()
    else:
        wr, wi = _propagate(basis, dr, params, "forward", mean_gap,
                            spec0.vectors.copy(), np.zeros((n, n)))
        # level populations after the stroke: p1 = |V1^T U V0|^2 g
        m = spec1.vectors.T @ (wr + 1j * wi)
        p1 = (m.real ** 2 + m.imag ** 2) @ g
    e_t1 = float(p1 @ e1)

    q = _kernels.cold_redistribute(p1, e1, params.wb, params.beta_c)
    e_t2 = float(q @ e1)

    wr, wi = _propagate(basis, dr, params, "reverse", mean_gap,
                        spec1.vectors.copy(), np.zeros((n, n)))
    u = wr + 1j * wi
    err = np.abs(u.conj().T @ u - np.eye(n)).max()
    if err > 1e-9:
        raise StateError(f"reverse stroke lost unitarity: {err:.3e}")
    m = spec0.vectors.T @ u  # m[l, j] = <E_l(0)|U|E_j(1)>
    p3 = (m.real ** 2 + m.imag ** 2) @ q
    e_t3 = float(p3 @ e0)

    e_t4 = float(g @ e0)
    return _boundary_record(e_t0, e_t1, e_t2, e_t3, e_t4, realization_id)


def sample_trials(basis, dr_pair, params, n_trials, seed, realization_id=0,
                  energies=None):
    """Trial-resolved work samples of the adiabatic cycle.

    Each trial starts in one hot-Gibbs-drawn level j, rides it to the second
    spectrum, relaxes stochastically inside j's small-gap cluster with Gibbs
    probabilities, and rides the final level k back, outputting

        W_tot = (E_j(0) - E_k(0)) - (E_j(1) - E_k(1)),

    the hot-side gap descended minus the cold-side gap sacrificed.  The
    sample mean converges to the density-matrix cycle's <W_tot>.
    """
    if n_trials < 1:
        raise ParameterError("n_trials must be >= 1")
    if params.mode != "adiabatic":
        raise ParameterError("trial sampling is defined for the adiabatic mode")
    if energies is None:
        dr, h0, h1 = _endpoint_hamiltonians(basis, dr_pair, params)
        e0 = eigenvalues_only(h0, seed_tag=dr.seed_tag)
        e1 = eigenvalues_only(h1, seed_tag=dr.seed_tag)
    else:
        e0, e1 = energies
    return trial_work_samples(e0, e1, params.wb, params.beta_c, params.beta_h,
                              n_trials, seed, realization_id)


def trial_work_samples(e0, e1, wb, beta_c, beta_h, n_trials, seed, stream):
    """Kernel-backed trial sampler on a pair of eigenvalue ladders."""
    from .rng import DOMAIN_TRIALS, stream_base

    hot_cdf, start_of, end_of, gibbs_cdf = _kernels.trial_tables(
        e0, e1, wb, beta_c, beta_h)
    base = stream_base(seed, DOMAIN_TRIALS, stream)
    return _kernels.trial_work(e0, e1, hot_cdf, start_of, end_of, gibbs_cdf,
                               math.isinf(beta_c), base, n_trials)
