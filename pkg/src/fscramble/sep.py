"""Classical stochastic particle dynamics: exclusion process with a four-site
source (local model) and reshuffle dynamics (nonlocal model).

One period of the dynamics advances time by delta_t and consists of the
source sub-step followed by the transport sub-step (nearest-neighbor hops for
the local variant, a uniform permutation of all sites for the nonlocal one).
The particle count recorded after period N is the operator size at
t = N * delta_t.

Rate conventions.  The source complements the occupancy of sites 1-4 with
probability p_B = 4*B*delta_t whenever those sites hold an odd number of
particles, so the source fires at rate 4B.  Each particle attempts a hop
with probability min(2*p_A, 1) (p_A = 4*A*delta_t) and then picks a
direction uniformly, so each directed move onto an empty neighbor has
probability p_A per period: the per-direction hop rate is 4A and a free
particle diffuses with mean-square displacement 8*A*t.  (An attempt
probability of p_A itself would halve the hop rate relative to the exact
height master equation.)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .rng import next_below, next_uniform, stream_state
from .series import SizeSeries, ensemble_series


class TooSmall(ValueError):
    """Lattice shorter than the four-site source."""


LOCAL = 0
NONLOCAL = 1
_VARIANTS = {"local": LOCAL, "nonlocal": NONLOCAL}


@dataclass
class SepConfig:
    L: int
    A: float
    B: float
    delta_t: float = 1.0
    periods: int = 100
    trajectories: int = 1000
    seed: int = 0
    variant: str = "local"
    record_every: int = 1

    p_A: float = field(init=False)
    p_B: float = field(init=False)

    def __post_init__(self):
        if self.L < 5:
            raise TooSmall("source needs four sites plus at least one more")
        if self.variant not in _VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        self.p_A = 4.0 * self.A * self.delta_t
        self.p_B = 4.0 * self.B * self.delta_t
        if not 0.0 <= self.p_B <= 1.0:
            raise ValueError("p_B = 4*B*delta_t must lie in [0, 1]")
        if not 0.0 <= self.p_A <= 1.0:
            raise ValueError("p_A = 4*A*delta_t must lie in [0, 1]")

    @property
    def record_times(self):
        n_rec = self.periods // self.record_every
        return self.delta_t * self.record_every * np.arange(n_rec + 1)


# ---------------------------------------------------------------------------
# single-step operations (reference implementations; the ensemble runner
# inlines the same logic in a numba kernel)


def init_single_particle(L, rng) -> np.ndarray:
    """Occupancy with one particle on a uniformly random site."""
    if L < 5:
        raise TooSmall("need L >= 5")
    occ = np.zeros(L, dtype=np.uint8)
    occ[rng.integers(L)] = 1
    return occ


def step_source(occ, p_B, rng) -> np.ndarray:
    """Complement sites 1-4 with probability p_B if their parity is odd."""
    occ = occ.copy()
    if int(occ[:4].sum()) % 2 == 1 and rng.random() < p_B:
        occ[:4] ^= 1
    return occ


def step_hop(occ, p_A, rng) -> np.ndarray:
    """Hop each particle (random order) with per-direction probability p_A."""
    occ = occ.copy()
    L = len(occ)
    pos = np.flatnonzero(occ)
    rng.shuffle(pos)
    p_attempt = min(2.0 * p_A, 1.0)
    for s in pos:
        if rng.random() < p_attempt:
            d = 1 if rng.random() < 0.5 else -1
            t = (s + d) % L
            if not occ[t]:
                occ[s] = 0
                occ[t] = 1
    return occ


def step_shuffle(occ, rng) -> np.ndarray:
    """Permute all site occupancies uniformly at random."""
    return occ[rng.permutation(len(occ))]


def run_trajectory(cfg: SepConfig, trajectory_index: int) -> SizeSeries:
    """One trajectory; deterministic given (cfg.seed, trajectory_index)."""
    counts = _sep_kernel(
        cfg.L, cfg.periods, cfg.p_B, min(2.0 * cfg.p_A, 1.0),
        _VARIANTS[cfg.variant], cfg.record_every,
        np.uint64(cfg.seed), trajectory_index, trajectory_index + 1,
    )
    meta = dict(L=cfg.L, seed=cfg.seed, variant=cfg.variant,
                delta_t=cfg.delta_t)
    return SizeSeries(cfg.record_times, counts[0].astype(float),
                      np.zeros(counts.shape[1]), meta)


def run_ensemble(cfg: SepConfig) -> SizeSeries:
    """Ensemble mean size; per-trajectory streams keyed by (seed, index)."""
    counts = _sep_kernel(
        cfg.L, cfg.periods, cfg.p_B, min(2.0 * cfg.p_A, 1.0),
        _VARIANTS[cfg.variant], cfg.record_every,
        np.uint64(cfg.seed), 0, cfg.trajectories,
    )
    meta = dict(L=cfg.L, seed=cfg.seed, variant=cfg.variant,
                delta_t=cfg.delta_t, A=cfg.A, B=cfg.B)
    return ensemble_series(cfg.record_times, counts, meta)


def run_msd(L, A, delta_t, periods, trajectories, seed) -> SizeSeries:
    """Mean-square displacement of a single free particle (B = 0)."""
    p_attempt = min(8.0 * A * delta_t, 1.0)
    sq = _msd_kernel(L, periods, p_attempt, np.uint64(seed), trajectories)
    times = delta_t * np.arange(periods + 1)
    return ensemble_series(times, sq, dict(L=L, A=A, delta_t=delta_t,
                                           seed=seed))


def series_csv(series: SizeSeries) -> str:
    m = series.meta
    return series.to_csv([
        ("t", series.times),
        ("mean_size", series.mean),
        ("stderr", series.stderr),
        ("L", m["L"]),
        ("trajectories", m.get("trajectories", 1)),
        ("seed", m["seed"]),
        ("variant", m["variant"]),
    ])


# ---------------------------------------------------------------------------
# kernels


@numba.njit(cache=True, parallel=True)
def _sep_kernel(L, periods, p_src, p_attempt, variant, record_every,
                master_seed, traj_lo, traj_hi):
    n_traj = traj_hi - traj_lo
    n_rec = periods // record_every
    out = np.empty((n_traj, n_rec + 1), dtype=np.int64)
    for tr in numba.prange(n_traj):
        state = stream_state(master_seed, np.uint64(traj_lo + tr))
        occ = np.zeros(L, dtype=np.uint8)
        start, state = next_below(L, state)
        occ[start] = 1
        n = 1
        pos = np.empty(L, dtype=np.int64)
        out[tr, 0] = n
        rec = 1
        for period in range(1, periods + 1):
            # source on sites 1-4
            k = int(occ[0]) + int(occ[1]) + int(occ[2]) + int(occ[3])
            if k % 2 == 1:
                u, state = next_uniform(state)
                if u < p_src:
                    for j in range(4):
                        occ[j] ^= 1
                    n += 4 - 2 * k
            if variant == NONLOCAL:
                # Fisher-Yates shuffle of all site occupancies
                for i in range(L - 1, 0, -1):
                    j, state = next_below(i + 1, state)
                    tmp = occ[i]
                    occ[i] = occ[j]
                    occ[j] = tmp
            else:
                # hops in a fresh uniform particle order
                m = 0
                for s in range(L):
                    if occ[s]:
                        pos[m] = s
                        m += 1
                for i in range(m - 1, 0, -1):
                    j, state = next_below(i + 1, state)
                    tmp = pos[i]
                    pos[i] = pos[j]
                    pos[j] = tmp
                for i in range(m):
                    u, state = next_uniform(state)
                    if u < p_attempt:
                        u, state = next_uniform(state)
                        s = pos[i]
                        t = s + 1 if u < 0.5 else s - 1
                        if t == L:
                            t = 0
                        elif t == -1:
                            t = L - 1
                        if occ[t] == 0:
                            occ[s] = 0
                            occ[t] = 1
            if period % record_every == 0:
                out[tr, rec] = n
                rec += 1
    return out


@numba.njit(cache=True, parallel=True)
def _msd_kernel(L, periods, p_attempt, master_seed, n_traj):
    out = np.empty((n_traj, periods + 1), dtype=np.float64)
    for tr in numba.prange(n_traj):
        state = stream_state(master_seed, np.uint64(tr))
        disp = 0
        out[tr, 0] = 0.0
        for period in range(1, periods + 1):
            u, state = next_uniform(state)
            if u < p_attempt:
                u, state = next_uniform(state)
                disp += 1 if u < 0.5 else -1
            out[tr, period] = float(disp) ** 2
    return out
