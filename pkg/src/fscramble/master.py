"""Exact operator-height master equations and the nonlocal size ODE.

The height generator acts on probability vectors indexed by the 2^L
occupation patterns of the L-site height vector (bit i of the index is
site i+1).  Rates: 4*A_ij between patterns related by exchanging sites i, j
when their occupations differ, and 4*B_ijkl for complementing sites
i, j, k, l when they hold odd parity.  The local chain is the
nearest-neighbor specialization with periodic wrap and the interaction
pinned to sites 1-4.

The nonlocal size ODE acts on the size distribution f(h), h = 1..L, with a
pentadiagonal generator whose entries are hypergeometric occupancy
probabilities p(h, i) = C(4,i) C(L-4,h-i) / C(L,h).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
import scipy.sparse as sp

from .series import SizeSeries


class DimensionTooLarge(ValueError):
    """Height space 2^L above the exact-solver guard."""


class ShapeMismatch(ValueError):
    """Coupling arrays inconsistent with the site count."""


class StiffnessGuard(RuntimeError):
    """Probability conservation lost during integration."""


class NotNormalized(ValueError):
    """Initial distribution does not sum to one."""


_MAX_EXACT_L = 14


@dataclass
class DistributionState:
    """A probability vector over heights or sizes at one instant."""

    time: float
    probs: np.ndarray

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        s = self.probs.sum()
        if abs(s - 1.0) > 1e-9:
            raise NotNormalized(f"probabilities sum to {s!r}")
        if self.probs.min() < -1e-9:
            raise ValueError("negative probability entry")


def popcounts(dim: int) -> np.ndarray:
    """Bit weights of 0..dim-1 (sizes of the height patterns)."""
    idx = np.arange(dim, dtype=np.int64)
    w = np.zeros(dim, dtype=np.int64)
    while idx.any():
        w += idx & 1
        idx >>= 1
    return w


def build_local_generator(L, A, B) -> sp.csr_matrix:
    """Nearest-neighbor hopping at rate 4A plus the four-site source at 4B."""
    if not 5 <= L <= _MAX_EXACT_L:
        raise DimensionTooLarge(f"need 5 <= L <= {_MAX_EXACT_L}, got {L}")
    if A < 0 or B < 0:
        raise ValueError("rates must be nonnegative")
    A_mat = np.zeros((L, L))
    for i in range(L):
        j = (i + 1) % L
        A_mat[i, j] = A_mat[j, i] = A
    return build_generic_generator(L, A_mat, {(1, 2, 3, 4): B})


def build_generic_generator(L, A_matrix, B_tensor) -> sp.csr_matrix:
    """Generator for arbitrary pair couplings A_ij and quartic couplings
    B_ijkl (B_tensor maps 1-based tuples i<j<k<l to rates)."""
    if L > _MAX_EXACT_L:
        raise DimensionTooLarge(f"need L <= {_MAX_EXACT_L}, got {L}")
    A_matrix = np.asarray(A_matrix, dtype=float)
    if A_matrix.shape != (L, L):
        raise ShapeMismatch(f"A matrix must be {L}x{L}")
    if not np.allclose(A_matrix, A_matrix.T) or np.any(np.diag(A_matrix)):
        raise ShapeMismatch("A matrix must be symmetric with zero diagonal")
    dim = 1 << L
    states = np.arange(dim, dtype=np.int64)
    rows, cols, vals = [], [], []
    diag = np.zeros(dim)

    def add_flip(mask, parity_mask, rate):
        par = popcounts_of_masked(states, parity_mask)
        active = (par % 2 == 1)
        src = states[active]
        dst = src ^ mask
        rows.append(dst)
        cols.append(src)
        vals.append(np.full(len(src), 4.0 * rate))
        diag[src] -= 4.0 * rate

    for i in range(L):
        for j in range(i + 1, L):
            if A_matrix[i, j] != 0.0:
                mask = (1 << i) | (1 << j)
                add_flip(mask, mask, A_matrix[i, j])
    for key, rate in B_tensor.items():
        i, j, k, l = key
        if not (1 <= i < j < k < l <= L):
            raise ShapeMismatch(f"quartic indices must satisfy i<j<k<l, "
                                f"got {key}")
        if rate != 0.0:
            mask = (1 << (i - 1)) | (1 << (j - 1)) | (1 << (k - 1)) \
                | (1 << (l - 1))
            add_flip(mask, mask, rate)

    rows.append(states)
    cols.append(states)
    vals.append(diag)
    gen = sp.coo_matrix(
        (np.concatenate(vals),
         (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
    return gen.tocsr()


def popcounts_of_masked(states, mask) -> np.ndarray:
    v = states & mask
    out = np.zeros(len(states), dtype=np.int64)
    while v.any():
        out += v & 1
        v >>= 1
    return out


def occupancy_fraction(L, h, i) -> float:
    """p(h, i): probability that i of the first four sites are occupied when
    h particles sit on L sites uniformly at random."""
    denom = comb(L, h)
    if denom == 0:
        return 0.0
    if h - i < 0 or h - i > L - 4:
        return 0.0
    return comb(4, i) * comb(L - 4, h - i) / denom


def build_size_generator(L, B) -> np.ndarray:
    """Pentadiagonal generator of the nonlocal size distribution, indexed by
    size h = 1..L (entry [h-1, h'-1])."""
    if L < 5:
        raise ValueError("need L >= 5")
    gen = np.zeros((L, L))
    for h in range(1, L + 1):
        gen[h - 1, h - 1] = -4.0 * B * (occupancy_fraction(L, h, 1)
                                        + occupancy_fraction(L, h, 3))
        if h - 2 >= 1:
            gen[h - 1, h - 3] = 4.0 * B * occupancy_fraction(L, h - 2, 1)
        if h + 2 <= L:
            gen[h - 1, h + 1] = 4.0 * B * occupancy_fraction(L, h + 2, 3)
    return gen


def integrate(gen, f0: DistributionState, t_grid,
              max_correction=1e-8) -> list[DistributionState]:
    """Fixed-step RK4 integration of df/dt = gen @ f.

    The internal step obeys dt <= 0.1 / max|diagonal rate|.  After every
    internal step the state is renormalized; if the correction ever exceeds
    `max_correction` the run aborts with StiffnessGuard.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if len(t_grid) and np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    if sp.issparse(gen):
        diag_max = np.abs(gen.diagonal()).max() if gen.shape[0] else 0.0
    else:
        gen = np.asarray(gen, dtype=float)
        diag_max = np.abs(np.diag(gen)).max()
    dt_max = 0.1 / diag_max if diag_max > 0 else np.inf

    f = f0.probs.astype(float).copy()
    t = f0.time
    out = []
    for target in t_grid:
        if target < t - 1e-12:
            raise ValueError("t_grid starts before the initial time")
        while t < target - 1e-12:
            dt = min(dt_max, target - t)
            k1 = gen @ f
            k2 = gen @ (f + 0.5 * dt * k1)
            k3 = gen @ (f + 0.5 * dt * k2)
            k4 = gen @ (f + dt * k3)
            f = f + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            s = f.sum()
            if abs(s - 1.0) > max_correction:
                raise StiffnessGuard(
                    f"normalization drifted by {s - 1.0:.3e} in one step")
            f /= s
            t += dt
        out.append(DistributionState(target, np.clip(f, 0.0, None)
                                     / np.clip(f, 0.0, None).sum()))
    return out


def early_time_mean(t, L, B) -> np.ndarray:
    """Early-time mean size exp(32 B t / L) of the nonlocal model (h(0)=1)."""
    return np.exp(32.0 * B * np.asarray(t, dtype=float) / L)


def exact_mean_series(gen, f0: DistributionState, t_grid,
                      sizes=None) -> SizeSeries:
    """Mean size over time; `sizes` gives the size of each component
    (defaults to bit weights for height generators)."""
    dim = gen.shape[0]
    if sizes is None:
        sizes = popcounts(dim)
    sizes = np.asarray(sizes, dtype=float)
    states = integrate(gen, f0, t_grid)
    mean = np.array([s.probs @ sizes for s in states])
    return SizeSeries(t_grid, mean, np.zeros(len(mean)),
                      dict(method="master"))


def uniform_weight1_f0(L) -> DistributionState:
    """Initial height distribution: one particle on a uniformly random site."""
    f = np.zeros(1 << L)
    for i in range(L):
        f[1 << i] = 1.0 / L
    return DistributionState(0.0, f)


def size_delta_f0(L, h0=1) -> DistributionState:
    """Initial size distribution concentrated at size h0."""
    f = np.zeros(L)
    f[h0 - 1] = 1.0
    return DistributionState(0.0, f)


def master_series_csv(series: SizeSeries, L, A, B) -> str:
    return series.to_csv([
        ("t", series.times),
        ("mean_size", series.mean),
        ("method", series.meta.get("method", "master")),
        ("L", L),
        ("A", float(A)),
        ("B", float(B)),
    ])
