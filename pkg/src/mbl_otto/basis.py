"""Half-filling sector basis and the rescaled random-field Heisenberg chain.

The chain carries a Heisenberg bond on every nearest-neighbor pair (open
boundaries) plus a random longitudinal field, and conserves total
magnetization; everything here lives in the zero-magnetization (half-filling)
sector.  Site ``j`` maps to bit ``j - 1`` of the basis pattern, with a set bit
meaning spin up, and basis states are ordered by ascending pattern value.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

MAX_SITES = 16  # dense-matrix practicality bound


@dataclass(frozen=True)
class SectorBasis:
    """Ordered half-filling configurations of an L-site chain.

    Attributes
    ----------
    sites : int
        Chain length L (even).
    states : ndarray of int64
        All C(L, L/2) bit patterns with exactly L/2 set bits, strictly
        ascending.
    dim : int
        Sector dimension, C(L, L/2).
    z : ndarray, shape (dim, L)
        sigma^z eigenvalues (+1 up, -1 down) per state and site.
    zz_diag : ndarray, shape (dim,)
        sum_j z_j z_{j+1} per state (open boundaries).
    hop_rows, hop_cols : ndarray
        Index pairs (row < col) coupled by a nearest-neighbor spin flip.
    index_of : ndarray, shape (2**L,)
        Pattern -> basis index lookup (-1 for patterns outside the sector).
    """

    sites: int
    states: np.ndarray
    dim: int
    z: np.ndarray = field(repr=False)
    zz_diag: np.ndarray = field(repr=False)
    hop_rows: np.ndarray = field(repr=False)
    hop_cols: np.ndarray = field(repr=False)
    index_of: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class DisorderRealization:
    """One draw of the random fields plus the endpoint disorder strengths."""

    fields: np.ndarray
    h_eth: float
    h_mbl: float
    seed_tag: tuple = (0, 0)

    def __post_init__(self):
        fields = np.asarray(self.fields, dtype=np.float64)
        object.__setattr__(self, "fields", fields)
        if fields.ndim != 1:
            raise ParameterError("fields must be a 1-d vector")
        if np.any(np.abs(fields) > 1.0):
            raise ParameterError("random fields must lie in [-1, 1]")
        if self.h_eth < 0 or self.h_mbl < 0:
            raise ParameterError("disorder strengths must be nonnegative")


@dataclass(frozen=True)
class HamiltonianParams:
    """Energy unit, tuning parameter and rescaling switch."""

    alpha: float
    energy_unit: float = 1.0
    rescale: bool = True

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ParameterError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.energy_unit <= 0.0:
            raise ParameterError("energy_unit must be positive")


def enumerate_basis(L):
    """Enumerate the half-filling sector of an L-site chain.

    Returns a :class:`SectorBasis` whose patterns are strictly increasing.
    Raises :class:`ParameterError` for odd L or L outside [2, 16].
    """
    if L % 2 != 0 or not 2 <= L <= MAX_SITES:
        raise ParameterError(f"sites must be even and within [2, {MAX_SITES}], got {L}")
    half = L // 2
    patterns = np.arange(1 << L, dtype=np.int64)
    bits = (patterns[:, None] >> np.arange(L, dtype=np.int64)) & 1
    states = patterns[bits.sum(axis=1) == half]
    dim = math.comb(L, half)
    assert states.size == dim

    z = (2 * ((states[:, None] >> np.arange(L, dtype=np.int64)) & 1) - 1).astype(np.int8)
    zf = z.astype(np.float64)
    zz_diag = np.einsum("ij,ij->i", zf[:, :-1], zf[:, 1:])

    index_of = np.full(1 << L, -1, dtype=np.int64)
    index_of[states] = np.arange(dim, dtype=np.int64)

    rows, cols = [], []
    for bond in range(L - 1):
        mask = np.int64((1 << bond) | (1 << (bond + 1)))
        movable = z[:, bond] != z[:, bond + 1]
        src = states[movable]
        dst = src ^ mask
        r = index_of[src]
        c = index_of[dst]
        keep = r < c  # record each unordered pair once
        rows.append(r[keep])
        cols.append(c[keep])
    hop_rows = np.concatenate(rows)
    hop_cols = np.concatenate(cols)

    return SectorBasis(
        sites=L,
        states=states,
        dim=dim,
        z=z,
        zz_diag=zz_diag,
        hop_rows=hop_rows,
        hop_cols=hop_cols,
        index_of=index_of,
    )


def disorder_strength(dr, alpha):
    """Interpolated disorder strength h(alpha) = (1-alpha) h_eth + alpha h_mbl."""
    return (1.0 - alpha) * dr.h_eth + alpha * dr.h_mbl


def rescale_factor(h, L):
    """Bandwidth-fixing factor Q(h) = sqrt(3L - 2 + (L-2)/(L-1) + L h^2 / 3).

    Q^2 is the disorder average of the sector variance of the unrescaled
    chain, so dividing by Q pins the rescaled density-of-states width to the
    energy unit for every disorder strength.
    """
    if L < 2:
        raise ParameterError("rescale factor needs L >= 2")
    if h < 0:
        raise ParameterError("disorder strength must be nonnegative")
    return math.sqrt(3.0 * L - 2.0 + (L - 2.0) / (L - 1.0) + L * h * h / 3.0)


def build_hamiltonian(basis, dr, params):
    """Assemble the dense, exactly symmetric sector Hamiltonian.

    H = (eps / Q) [ sum_j sigma_j . sigma_{j+1} + h(alpha) sum_j h_j sigma_j^z ]
    with open boundaries; the Q division is skipped when ``params.rescale`` is
    off (the accordion/bandwidth variant).
    """
    if dr.fields.size != basis.sites:
        raise ParameterError(
            f"realization has {dr.fields.size} fields for {basis.sites} sites"
        )
    h = disorder_strength(dr, params.alpha)
    q = rescale_factor(h, basis.sites) if params.rescale else 1.0
    c = params.energy_unit / q

    n = basis.dim
    ham = np.zeros((n, n))
    ham[basis.hop_rows, basis.hop_cols] = 2.0 * c
    ham[basis.hop_cols, basis.hop_rows] = 2.0 * c
    diag = c * (basis.zz_diag + h * (basis.z.astype(np.float64) @ dr.fields))
    ham[np.arange(n), np.arange(n)] = diag
    return ham


def sector_traces(L):
    """Closed-form sector traces of the operators entering H^2.

    Returns exact integers for
    ``zz``        : Tr(sigma^z_j sigma^z_{j+1})             = -N/(L-1)
    ``hop``       : Tr((sigma^+ sigma^-)(sigma^- sigma^+))  =  N L / (4(L-1))
    ``four_point``: Tr(sigma^z_j sigma^z_{j+1} sigma^z_j' sigma^z_{j'+1})
                    for disjoint bonds                      =  3N/((L-1)(L-3))
    """
    if L % 2 != 0 or L < 4:
        raise ParameterError(f"sector traces need even L >= 4, got {L}")
    dim = math.comb(L, L // 2)
    zz = -dim // (L - 1)
    if zz * (L - 1) != -dim:  # pragma: no cover - divisibility holds for even L
        raise ParameterError(f"non-integer trace at L={L}")
    hop = dim * L // (4 * (L - 1))
    four = dim * 3 // ((L - 1) * (L - 3))
    return {"zz": zz, "hop": hop, "four_point": four}
