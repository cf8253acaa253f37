"""Closed-form predictions, bounds and order-of-magnitude estimates.

Everything here is a pure function of its arguments with hbar = k_B = 1,
except :func:`power_estimate`, which bridges to SI units.  Quantities taken
from scaling arguments (localization scales, time bounds, the power
estimator, worst-case probabilities) carry tilde-level accuracy: they are
meaningful to order of magnitude and as monotone trends, not as point values.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

LN2 = math.log(2.0)
HBAR_EV_S = 6.582e-16  # eV s
EV_TO_J = 1.602176634e-19

# regime thresholds: each "<<" in the small-parameter hierarchy is taken as
# a ratio below 0.3
REGIME_RATIO = 0.3


@dataclass(frozen=True)
class EnginePrediction:
    """Closed-form per-cycle heats, work and efficiency."""

    q2: float
    q4: float
    w_tot: float
    eta: float
    regime_ok: bool
    violations: tuple = ()


@dataclass(frozen=True)
class DiabaticModel:
    """Scales entering the finite-speed corrections."""

    v: float
    delta_minus: float
    wb: float
    theta: float = 0.5
    xi_deep: float = 1.0
    xi_shallow: float = 10.0
    sites: int = 10

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ParameterError("theta must lie in [0, 1]")
        if self.xi_deep >= self.xi_shallow:
            raise ParameterError("xi_deep must be smaller than xi_shallow")


def gap_densities(delta, mean_gap):
    """Poisson and GOE gap densities at gap size delta.

    P_MBL = exp(-d/<d>)/<d>;  P_GOE = (pi/2) (d/<d>^2) exp(-pi d^2 / 4<d>^2).
    """
    if mean_gap <= 0.0:
        raise ParameterError("mean gap must be positive")
    delta = np.asarray(delta, dtype=np.float64)
    if np.any(delta < 0):
        raise ParameterError("gaps must be nonnegative")
    x = delta / mean_gap
    p_mbl = np.exp(-x) / mean_gap
    p_goe = 0.5 * math.pi * delta / mean_gap**2 * np.exp(-0.25 * math.pi * x * x)
    if np.isscalar(delta) or delta.ndim == 0:
        return {"p_mbl": float(p_mbl), "p_goe": float(p_goe)}
    return {"p_mbl": p_mbl, "p_goe": p_goe}


def classical_efficiencies(r, gamma, omega, big_omega, d_goe, d_mbl):
    """Benchmark efficiencies of the textbook engines.

    eta_otto = 1 - r^(1-gamma) for compression ratio r and heat-capacity
    ratio gamma; eta_qho = 1 - omega/Omega for an oscillator tuned between
    angular frequencies; eta_qubit = 1 - d_mbl/d_goe with per-cycle work
    (d_goe - d_mbl)/2 for a two-level engine riding one shrinking gap.
    """
    if r <= 1.0 or gamma <= 1.0:
        raise ParameterError("need compression ratio r > 1 and gamma > 1")
    if not 0.0 < omega < big_omega:
        raise ParameterError("need Omega > omega > 0")
    if not 0.0 < d_mbl < d_goe:
        raise ParameterError("need d_goe > d_mbl > 0")
    return {
        "eta_otto": 1.0 - r ** (1.0 - gamma),
        "eta_qho": 1.0 - omega / big_omega,
        "eta_qubit": 1.0 - d_mbl / d_goe,
        "w_qubit": 0.5 * (d_goe - d_mbl),
    }


def predicted_cycle(wb, beta_c, beta_h, mean_gap, sites=12, eps=1.0):
    """Leading-order per-cycle heats, work and efficiency.

    Q2 = (-wb^2/2<d> + pi^2 T_c^2 / 6<d>) exp(-L (beta_h eps)^2 / 4)
    Q4 = wb - 2 ln2 T_c + wb^2/2<d> + 4 ln2 wb T_c / <d>
    W  = wb - 2 ln2 T_c + 4 ln2 wb T_c / <d>      (orders retained)
    eta = 1 - (wb/2<d> + ln2 T_c/<d> - 2 ln2 (wb/<d>)(T_c/<d>))

    W keeps only the orders retained by the expansion, so it differs from
    Q2 + Q4 by the dropped higher-order pieces (< wb^2/<d> in the operating
    regime).  ``regime_ok`` flags T_c << wb << <d> and sqrt(L) beta_h eps << 1.
    """
    if wb < 0.0 or mean_gap <= 0.0:
        raise ParameterError("need wb >= 0 and mean_gap > 0")
    t_c = 0.0 if math.isinf(beta_c) else 1.0 / beta_c
    hot = math.exp(-sites * (beta_h * eps) ** 2 / 4.0)
    q2 = (-wb * wb / (2.0 * mean_gap)
          + math.pi**2 / 6.0 * t_c * t_c / mean_gap) * hot
    q4 = (wb - 2.0 * LN2 * t_c + wb * wb / (2.0 * mean_gap)
          + 4.0 * LN2 * wb * t_c / mean_gap)
    w_tot = wb - 2.0 * LN2 * t_c + 4.0 * LN2 * wb * t_c / mean_gap
    phi = (wb / (2.0 * mean_gap) + LN2 * t_c / mean_gap
           - 2.0 * LN2 * (wb / mean_gap) * (t_c / mean_gap))
    eta = 1.0 - phi

    violations = []
    if wb > 0 and t_c / wb >= REGIME_RATIO:
        violations.append("cold bath not cold: T_c/wb >= 0.3")
    if wb / mean_gap >= REGIME_RATIO:
        violations.append("bandwidth not small: wb/mean_gap >= 0.3")
    if math.sqrt(sites) * beta_h * eps >= REGIME_RATIO:
        violations.append("hot bath not hot: sqrt(L) beta_h eps >= 0.3")
    return EnginePrediction(
        q2=q2, q4=q4, w_tot=w_tot, eta=eta,
        regime_ok=not violations, violations=tuple(violations),
    )


def cold_bath_probabilities(wb, beta_c, mean_gap):
    """Per-cycle probabilities of relaxing down / hopping up in the cold bath.

    p_cold = (wb - T_c ln2)/<d>;  p_bar_cold = T_c ln2 / <d>.
    """
    if wb < 0.0 or mean_gap <= 0.0:
        raise ParameterError("need wb >= 0 and mean_gap > 0")
    t_c = 0.0 if math.isinf(beta_c) else 1.0 / beta_c
    return {
        "p_cold": (wb - t_c * LN2) / mean_gap,
        "p_bar_cold": t_c * LN2 / mean_gap,
    }


def diabatic_predictions(model, eps=1.0):
    """Finite-speed corrections and the speed window they imply.

    Returns the fractional-Landau-Zener excitation probability as a callable
    of the starting and final gap (it diverges as the gap closes, so callers
    clamp at delta_minus), the (v d-)^(1/3) work cost, the speed ceilings
    from the fractional-LZ and perturbative criteria, the resonance length
    l_v, the speed-independent Landau-Zener plateau (1-theta) wb, and the
    speed floor that keeps neighboring subengines out of contact.
    """
    v = model.v
    dm = model.delta_minus
    if v < 0 or dm <= 0 or model.wb <= 0 or eps <= 0:
        raise ParameterError("all scales must be positive (v may be 0)")

    def p_frac_lz(delta, big_delta=None):
        if delta <= 0 or (big_delta is not None and big_delta <= 0):
            raise ParameterError(
                "fractional-LZ probability diverges at zero gap; clamp at delta_minus")
        out = v * v * dm * dm / (16.0 * delta**6)
        if big_delta is not None:
            out += v * v * dm * dm / (16.0 * big_delta**6)
        return out

    # analytic mean gap of an L-site subengine sets the ergodic-side ceiling
    mean_gap = 2.0 * math.sqrt(math.pi * model.sites) * eps / math.comb(
        model.sites, model.sites // 2)
    sites1 = model.sites + 1
    return {
        "p_frac_lz": p_frac_lz,
        "w_diab_frac_lz": (v * dm) ** (1.0 / 3.0) if v > 0 else 0.0,
        "v_max_frac_lz": model.wb**3 / dm,
        "l_v": (math.log(eps * eps / v) / (2.0 * (LN2 + 1.0 / model.xi_deep))
                if v > 0 else math.inf),
        "lz_correction": (1.0 - model.theta) * model.wb if v > 0 else 0.0,
        "v_max_apt": mean_gap * mean_gap,
        "v_min_communication": eps * eps * 2.0 ** (-2.0 * sites1)
        * math.exp(-2.0 * sites1 / model.xi_shallow),
    }


def localization_scales(xi, zeta, length, eps=1.0, h=None):
    """Matrix-element and localization-length relations of the insulating chain.

    j_far  = eps exp(-L/xi) 2^-L   (rearrangement across L >> xi)
    j_near = eps 2^-L              (L <~ xi; random-matrix-like)
    xi_from_zeta = 1/(1/zeta - ln2), requiring zeta < 1/ln2 for stability
    zeta_from_xi = 1/(1/xi + ln2)
    xi_anderson  = 1/ln(h) at strong single-particle disorder
    """
    if xi <= 0 or length <= 0 or eps <= 0:
        raise ParameterError("scales must be positive")
    if zeta is not None:
        if zeta <= 0:
            raise ParameterError("zeta must be positive")
        if zeta >= 1.0 / LN2:
            raise ParameterError(
                "zeta must be < 1/ln2; larger values destabilize the localized phase")
        xi_from_zeta = 1.0 / (1.0 / zeta - LN2)
    else:
        xi_from_zeta = None
    out = {
        "j_far": eps * math.exp(-length / xi) * 2.0 ** (-length),
        "j_near": eps * 2.0 ** (-length),
        "xi_from_zeta": xi_from_zeta,
        "zeta_from_xi": 1.0 / (1.0 / xi + LN2),
        "xi_anderson": None,
    }
    if h is not None:
        if h <= 1.0:
            raise ParameterError("anderson length needs disorder strength h > 1")
        out["xi_anderson"] = 1.0 / math.log(h)
    return out


def time_bounds(wb, delta_minus, eps, mean_gap, xi_shallow, xi_deep):
    """Cold-thermalization time floors from coupling-strength ceilings.

    With L = max(<d>/wb, xi_shallow) levels' worth of rearrangement:
      g_max           = eps (d-/eps)^(1/(L-1))      (higher-order suppression)
      tau_th          = wb (eps / g_max d-)^2       (golden rule at g = g_max)
      tau_markov      = eps^2 / (wb d-^2)           (Markovian bath, g < wb)
      tau_high_order  = (wb/d-^2) (eps/d-)^(1/(L-1))
      tau_markov_deep = (10/eps) e^(2 xi>/xi<) 2^(3 xi>)
      tau_c5          = (1/10 eps) e^(2 xi>/xi<) 2^(2 xi>)
    tau_c5 is the looser (smaller) of the two deeply-localized floors.
    """
    if min(wb, delta_minus, eps, mean_gap, xi_shallow, xi_deep) <= 0:
        raise ParameterError("all scales must be positive")
    length = max(mean_gap / wb, xi_shallow)
    if length <= 1.0:
        raise ParameterError("effective rearrangement length must exceed 1")
    g_max = eps * (delta_minus / eps) ** (1.0 / (length - 1.0))
    return {
        "g_max": g_max,
        "tau_th": wb * (eps / (g_max * delta_minus)) ** 2,
        "tau_markov": eps * eps / (wb * delta_minus * delta_minus),
        "tau_high_order": wb / delta_minus**2 * (eps / delta_minus) ** (1.0 / (length - 1.0)),
        "tau_markov_deep": 10.0 / eps * math.exp(2.0 * xi_shallow / xi_deep)
        * 2.0 ** (3.0 * xi_shallow),
        "tau_c5": 1.0 / (10.0 * eps) * math.exp(2.0 * xi_shallow / xi_deep)
        * 2.0 ** (2.0 * xi_shallow),
    }


PRESETS = {
    # phosphorus donors in silicon: electronic energies, ~10 nm impurity
    # spacing, 10-site subengines on a 100 nm pitch
    "si-p": {"eps": 1.0, "subengine_sites": 10, "spacing_nm": 100.0,
             "wb_fraction": 0.1},
}


def power_estimate(preset=None, eps=None, subengine_sites=None, spacing_nm=None,
                   wb_fraction=None):
    """Order-of-magnitude power and power density of one subengine.

    <d> = eps sqrt(L)/C(L, L/2); wb = wb_fraction <d>; the cycle time is the
    Markovian floor hbar eps^2 / wb^3 (repulsion scale taken comparable to
    wb), and each cycle outputs ~wb.  ``eps`` in eV, ``spacing_nm`` is the
    subengine pitch; returns SI watts and watts per cubic meter.
    """
    if preset is not None:
        if preset not in PRESETS:
            raise ParameterError(f"unknown preset {preset!r}; have {sorted(PRESETS)}")
        cfg = PRESETS[preset]
        eps = cfg["eps"] if eps is None else eps
        subengine_sites = cfg["subengine_sites"] if subengine_sites is None else subengine_sites
        spacing_nm = cfg["spacing_nm"] if spacing_nm is None else spacing_nm
        wb_fraction = cfg["wb_fraction"] if wb_fraction is None else wb_fraction
    if None in (eps, subengine_sites, spacing_nm, wb_fraction):
        raise ParameterError("need eps, subengine_sites, spacing_nm and wb_fraction")
    if eps <= 0 or subengine_sites < 2 or spacing_nm <= 0 or wb_fraction < 0:
        raise ParameterError("estimator inputs out of range")
    dim = math.comb(subengine_sites, subengine_sites // 2)
    mean_gap = eps * math.sqrt(subengine_sites) / dim
    wb = wb_fraction * mean_gap
    if wb == 0.0:
        tau = math.inf
        power = 0.0
    else:
        tau = HBAR_EV_S * eps * eps / wb**3
        power = wb * EV_TO_J / tau
    volume = (spacing_nm * 1e-9) ** 3
    return {
        "mean_gap": mean_gap,
        "wb": wb,
        "tau_cycle": tau,
        "power": power,
        "power_density": power / volume,
    }


def worst_case_analytic(wb, mean_gap):
    """Scaling of the negative-work probability for both engine flavors.

    p_worst ~ (wb/<d>)^3 when the wide-gap side repels levels;
    p_worst ~ (wb/<d>)^2 when both sides are Poissonian.
    """
    if not 0.0 <= wb < mean_gap:
        raise ParameterError("need 0 <= wb < mean_gap")
    x = wb / mean_gap
    return {"p_worst": x**3, "p_worst_tilde": x**2}
