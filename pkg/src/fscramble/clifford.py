"""Majorana-mode stabilizer simulation.

States of L qubits are tracked as L commuting Majorana strings over 2L
modes (the stabilizer tableau).  Dynamics are built from three Clifford
primitives:

  * braids exp(i pi/4 (i g_a g_b)), sending g_a -> g_b and g_b -> -g_a;
  * uniformly random two-qubit Clifford gates on qubits 1 and 2, acting on
    Majorana modes 1-4 through the Jordan-Wigner correspondence;
  * mode permutations (for the all-to-all variant), realized as braids so
    signs stay well-defined.

A two-qubit gate conjugates a general Majorana string as follows: split the
string into its modes-1-4 head and the rest; the Jordan-Wigner image of the
rest contributes an extra X1 X2 factor (= the modes-1-4 parity string
g1 g2 g3 g4 up to sign) when the rest has odd weight.  Head plus parity
factor form a two-qubit Pauli, which the gate maps to another two-qubit
Pauli; converting back and reattaching the untouched rest gives the image.
Consequently only the modes-1-4 support can change, and only by an even
amount of total weight.

Entanglement entropy of a stabilizer state is the binary rank of the
generators restricted to the subsystem's modes minus the number of qubits
in the subsystem; it is independent of the Renyi index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numba
import numpy as np

from .rng import next_below, next_uniform, stream_state
from .series import SizeSeries, ensemble_series
from .strings import MajoranaString, PauliString, jw_inverse, jw_map

_LOCAL, _NONLOCAL, _FLOQUET = 0, 1, 2
_VARIANTS = {"local-random": _LOCAL, "nonlocal": _NONLOCAL,
             "floquet": _FLOQUET}

N_SYMPLECTIC = 720
N_CLIFFORD_2Q = 11520  # 720 symplectic images x 16 sign choices


# ---------------------------------------------------------------------------
# two-qubit Clifford group

def _pauli_from_code(code: int) -> PauliString:
    """Decode the 4-bit Pauli code (x1, z1, x2, z2) used in the tables."""
    x = (code & 1) | (((code >> 2) & 1) << 1)
    z = ((code >> 1) & 1) | (((code >> 3) & 1) << 1)
    return PauliString(2, x, z)


def _code_from_pauli(p: PauliString) -> int:
    return ((p.x & 1) | (((p.z & 1)) << 1)
            | (((p.x >> 1) & 1) << 2) | (((p.z >> 1) & 1) << 3))


def _codes_commute(a: int, b: int) -> bool:
    ax, az = a & 0b0101, (a >> 1) & 0b0101
    bx, bz = b & 0b0101, (b >> 1) & 0b0101
    return (bin(ax & bz).count("1") + bin(az & bx).count("1")) % 2 == 0


@lru_cache(maxsize=1)
def symplectic_table() -> np.ndarray:
    """All 720 sign-free two-qubit Clifford actions, as the 4-bit codes of
    the images of (X1, Z1, X2, Z2)."""
    X1, Z1, X2, Z2 = 0b0001, 0b0010, 0b0100, 0b1000
    rows = []
    nonid = [c for c in range(1, 16)]
    for ix1 in nonid:
        for iz1 in nonid:
            if _codes_commute(ix1, iz1):
                continue
            for ix2 in nonid:
                if not (_codes_commute(ix1, ix2)
                        and _codes_commute(iz1, ix2)):
                    continue
                for iz2 in nonid:
                    if (_codes_commute(ix2, iz2)
                            or not _codes_commute(ix1, iz2)
                            or not _codes_commute(iz1, iz2)):
                        continue
                    rows.append((ix1, iz1, ix2, iz2))
    table = np.array(rows, dtype=np.uint8)
    assert table.shape == (N_SYMPLECTIC, 4)
    return table


@lru_cache(maxsize=1)
def pauli_mode_tables():
    """(pauli_to_modes, modes_to_pauli): 4-bit Pauli code <-> modes-1-4
    support mask, both linear over F2."""
    p2m = np.zeros(16, dtype=np.uint8)
    for code in range(16):
        p2m[code] = jw_map(_pauli_from_code(code)).modes
    m2p = np.zeros(16, dtype=np.uint8)
    for code in range(16):
        m2p[p2m[code]] = code
    return p2m, m2p


@dataclass(frozen=True)
class TwoQubitClifford:
    """A two-qubit Clifford element, as the signed images of X1, Z1, X2, Z2."""

    images: tuple  # four PauliStrings on 2 qubits, phases in {0, 2}

    def __post_init__(self):
        if len(self.images) != 4:
            raise ValueError("need images of X1, Z1, X2, Z2")

    @classmethod
    def identity(cls):
        return cls((PauliString(2, 1, 0), PauliString(2, 0, 1),
                    PauliString(2, 2, 0), PauliString(2, 0, 2)))

    def image_of(self, p: PauliString) -> PauliString:
        """Conjugation image of an arbitrary two-qubit Pauli."""
        if p.n_qubits != 2:
            raise ValueError("gate acts on two qubits")
        acc = PauliString(2, 0, 0,
                          (p.phase + bin(p.x & p.z).count("1")) % 4)
        gens = [(self.images[0], p.x & 1), (self.images[1], p.z & 1),
                (self.images[2], (p.x >> 1) & 1),
                (self.images[3], (p.z >> 1) & 1)]
        for img, bit in gens:
            if bit:
                acc = acc * img
        return acc

    def image_codes(self) -> np.ndarray:
        return np.array([_code_from_pauli(p) for p in self.images],
                        dtype=np.uint8)


def sample_two_qubit_clifford(rng) -> TwoQubitClifford:
    """Uniform draw from the 11,520-element two-qubit Clifford group
    (modulo global phase): uniform symplectic action x uniform signs."""
    table = symplectic_table()
    row = table[int(rng.integers(N_SYMPLECTIC))]
    signs = rng.integers(2, size=4)
    images = tuple(
        PauliString(2, _pauli_from_code(int(c)).x,
                    _pauli_from_code(int(c)).z, 2 * int(s))
        for c, s in zip(row, signs)
    )
    return TwoQubitClifford(images)


# ---------------------------------------------------------------------------
# conjugation of Majorana strings

_PARITY_1234 = 0b1111  # support of X1 X2 = B({1,2,3,4})


def apply_braid_string(s: MajoranaString, a: int, b: int) -> MajoranaString:
    """Conjugate by exp(i pi/4 (i g_a g_b)): g_a -> g_b, g_b -> -g_a."""
    if a == b:
        raise ValueError("braid needs distinct modes")
    mask = (1 << (a - 1)) | (1 << (b - 1))
    overlap = s.modes & mask
    if overlap == 0 or overlap == mask:
        return s
    # anticommuting case: image is (-g_a g_b) * s
    phase = 1 if a < b else 3
    return MajoranaString(s.n_modes, mask, phase) * s


def conjugate_string(s: MajoranaString, gate: TwoQubitClifford
                     ) -> MajoranaString:
    """Image of a Majorana string under a Clifford gate on qubits 1 and 2."""
    if s.n_modes < 4:
        raise ValueError("need at least four modes")
    head = s.modes & _PARITY_1234
    tail = s.modes & ~_PARITY_1234
    tpar = bin(tail).count("1") & 1

    b_head = MajoranaString(s.n_modes, head)
    b_tail = MajoranaString(s.n_modes, tail)
    # s = i^c * B(head) B(tail)
    c = (s.phase - (b_head * b_tail).phase) % 4
    gamma_t = MajoranaString(s.n_modes, _PARITY_1234 if tpar else 0)
    head_plus = b_head * gamma_t          # two-qubit Pauli in disguise
    rest = gamma_t * b_tail               # commutes with the gate

    p12 = jw_inverse(MajoranaString(4, head_plus.modes, head_plus.phase))
    p12_new = gate.image_of(p12)
    hp_new4 = jw_map(p12_new)
    hp_new = MajoranaString(s.n_modes, hp_new4.modes, hp_new4.phase)

    out = hp_new * rest
    return MajoranaString(s.n_modes, out.modes, (out.phase + c) % 4)


# ---------------------------------------------------------------------------
# tableau

class StabilizerTableau:
    """L commuting Majorana-string generators over 2L modes.

    `bits` is an (L, 2L) uint8 support matrix; `phases` holds the i-exponent
    of each generator in the canonical Hermitian convention, or None when
    sign tracking is disabled (sizes and entropies never depend on it).
    """

    def __init__(self, bits, phases=None):
        self.bits = np.ascontiguousarray(bits, dtype=np.uint8)
        self.L = self.bits.shape[0]
        if self.bits.shape != (self.L, 2 * self.L):
            raise ValueError("tableau must be L x 2L")
        self.phases = None if phases is None else np.asarray(
            phases, dtype=np.int8) % 4

    @classmethod
    def paired(cls, L, track_phases=True):
        """Initial product state stabilized by {i g1 g2, i g3 g4, ...}."""
        if L < 2:
            raise ValueError("need L >= 2")
        bits = np.zeros((L, 2 * L), dtype=np.uint8)
        for i in range(L):
            bits[i, 2 * i] = bits[i, 2 * i + 1] = 1
        return cls(bits, np.zeros(L, dtype=np.int8) if track_phases else None)

    def generators(self):
        return [self._row_string(r) for r in range(self.L)]

    def weights(self) -> np.ndarray:
        return self.bits.sum(axis=1)

    def apply_braid(self, a: int, b: int):
        """Braid modes a, b (1-based): g_a -> g_b, g_b -> -g_a."""
        ca, cb = a - 1, b - 1
        if self.phases is not None:
            for r in range(self.L):
                if self.bits[r, ca] != self.bits[r, cb]:
                    self._set_row(r, apply_braid_string(
                        self._row_string(r), a, b))
            return
        hit = (self.bits[:, ca] ^ self.bits[:, cb]) == 1
        tmp = self.bits[hit, ca].copy()
        self.bits[hit, ca] = self.bits[hit, cb]
        self.bits[hit, cb] = tmp

    def braid_layer(self, offset: int, mask):
        """Apply braids on the disjoint pairs (2i-1+offset, 2i+offset)
        selected by `mask` (length L), sign-free fast path (offset 0 or 1,
        periodic wrap)."""
        if self.phases is not None:
            idx = np.flatnonzero(mask)
            M = 2 * self.L
            for i in idx:
                a = (2 * i + offset) % M + 1
                b = (2 * i + 1 + offset) % M + 1
                self.apply_braid(a, b)
            return
        idx = np.flatnonzero(mask)
        M = 2 * self.L
        c0 = (2 * idx + offset) % M
        c1 = (2 * idx + 1 + offset) % M
        tmp = self.bits[:, c0].copy()
        self.bits[:, c0] = self.bits[:, c1]
        self.bits[:, c1] = tmp

    def apply_gate(self, gate: TwoQubitClifford):
        """Conjugate every generator by a Clifford gate on qubits 1, 2."""
        if self.phases is not None:
            for r in range(self.L):
                s = self._row_string(r)
                out = conjugate_string(s, gate)
                self._set_row(r, out)
            return
        p2m, m2p = pauli_mode_tables()
        codes = gate.image_codes()
        head = (self.bits[:, 0].astype(np.int64)
                | (self.bits[:, 1].astype(np.int64) << 1)
                | (self.bits[:, 2].astype(np.int64) << 2)
                | (self.bits[:, 3].astype(np.int64) << 3))
        hw = self.bits[:, :4].sum(axis=1).astype(np.int64)
        tpar = (self.bits.sum(axis=1).astype(np.int64) - hw) & 1
        pcode = m2p[head ^ (tpar * 15)].astype(np.int64)
        im = np.zeros(self.L, dtype=np.int64)
        for k in range(4):
            im ^= np.where((pcode >> k) & 1, np.int64(codes[k]), 0)
        new_head = p2m[im] ^ (tpar * 15)
        for k in range(4):
            self.bits[:, k] = (new_head >> k) & 1

    def permute_modes(self, perm):
        """Relabel modes: new support of each generator is
        {perm[m]: m in support} (perm is 0-based over 2L modes).

        With sign tracking on, the permutation is realized as a product of
        braids (each transposition is one braid), so phases stay those of an
        actual Clifford circuit.
        """
        perm = np.asarray(perm)
        if sorted(perm) != list(range(2 * self.L)):
            raise ValueError("perm must permute 0..2L-1")
        if self.phases is not None:
            seen = np.zeros(len(perm), dtype=bool)
            for start in range(len(perm)):
                if seen[start] or perm[start] == start:
                    seen[start] = True
                    continue
                cycle = [start]
                seen[start] = True
                j = int(perm[start])
                while j != start:
                    cycle.append(j)
                    seen[j] = True
                    j = int(perm[j])
                # (c_{k-1}, c_k), ..., (c0, c1) routes each mode to its image
                for a, b in zip(cycle[-2::-1], cycle[:0:-1]):
                    self.apply_braid(a + 1, b + 1)
            return
        inv = np.argsort(perm)
        self.bits = np.ascontiguousarray(self.bits[:, inv])

    def rank(self) -> int:
        return gf2_rank(self.bits)

    def mutually_commuting(self) -> bool:
        q = self.bits.sum(axis=1) & 1
        overlap = (self.bits.astype(np.int64)
                   @ self.bits.astype(np.int64).T) & 1
        comm = (np.outer(q, q) - overlap) % 2
        return not np.any(comm[np.triu_indices(self.L, 1)])

    def entanglement_entropy(self, qubit_lo: int, qubit_hi: int) -> int:
        """Entropy (bits) of the contiguous subsystem [qubit_lo, qubit_hi]."""
        if not 1 <= qubit_lo <= qubit_hi <= self.L:
            raise ValueError("subsystem outside 1..L")
        cols = slice(2 * (qubit_lo - 1), 2 * qubit_hi)
        n_a = qubit_hi - qubit_lo + 1
        return int(gf2_rank(self.bits[:, cols]) - n_a)

    # -- internals ---------------------------------------------------------

    def _row_string(self, r) -> MajoranaString:
        mask = 0
        for c in np.flatnonzero(self.bits[r]):
            mask |= 1 << int(c)
        ph = 0 if self.phases is None else int(self.phases[r])
        return MajoranaString(2 * self.L, mask, ph)

    def _set_row(self, r, s: MajoranaString):
        self.bits[r] = 0
        m = s.modes
        while m:
            low = m & -m
            self.bits[r, low.bit_length() - 1] = 1
            m ^= low
        if self.phases is not None:
            self.phases[r] = s.phase % 4


def entanglement_entropy(tab: StabilizerTableau, qubit_lo, qubit_hi) -> int:
    return tab.entanglement_entropy(qubit_lo, qubit_hi)


def init_paired_tableau(L, track_phases=True) -> StabilizerTableau:
    return StabilizerTableau.paired(L, track_phases)


# ---------------------------------------------------------------------------
# GF(2) rank

@numba.njit(cache=True)
def _gf2_rank_packed(words):
    n, nw = words.shape
    rank = 0
    for col in range(nw * 64):
        w = col >> 6
        mask = np.uint64(1) << np.uint64(col & 63)
        piv = -1
        for r in range(rank, n):
            if words[r, w] & mask:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            for c in range(nw):
                tmp = words[rank, c]
                words[rank, c] = words[piv, c]
                words[piv, c] = tmp
        for r in range(rank + 1, n):
            if words[r, w] & mask:
                for c in range(nw):
                    words[r, c] ^= words[rank, c]
        rank += 1
        if rank == n:
            break
    return rank


def gf2_rank(bits) -> int:
    """Rank over F2 of a 0/1 matrix."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    if bits.size == 0:
        return 0
    packed = np.packbits(bits, axis=1, bitorder="little")
    pad = (-packed.shape[1]) % 8
    if pad:
        packed = np.pad(packed, ((0, 0), (0, pad)))
    words = packed.view(np.uint64).copy()
    return int(_gf2_rank_packed(words))


# ---------------------------------------------------------------------------
# circuit configuration and reference period evolution

@dataclass
class CircuitConfig:
    L: int
    p: float = 0.5
    periods: int = 100
    variant: str = "local-random"
    seed: int = 0
    interaction: bool = True
    trajectories: int = 100
    subsystem: tuple | None = None
    record_every: int = 1
    initial: str = "pair"  # or "single" for a lone Majorana mode

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("need L >= 2")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.variant not in _VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.initial not in ("pair", "single"):
            raise ValueError("initial must be 'pair' or 'single'")
        if self.subsystem is None:
            lo = self.L // 4 + 2
            hi = 3 * self.L // 4 + 1
            if self.variant == "nonlocal":
                lo, hi = 1, self.L // 2
            self.subsystem = (lo, hi)
        lo, hi = self.subsystem
        if not 1 <= lo <= hi <= self.L:
            raise ValueError("subsystem outside 1..L")

    @property
    def record_times(self):
        n_rec = self.periods // self.record_every
        return float(self.record_every) * np.arange(n_rec + 1)


def evolve_period(target, cfg: CircuitConfig, rng):
    """One period on a StabilizerTableau (reference path, used for EE and
    small-system tests; the size engine uses the compiled kernel)."""
    variant = _VARIANTS[cfg.variant]
    if cfg.interaction:
        target.apply_gate(sample_two_qubit_clifford(rng))
    if variant == _NONLOCAL:
        target.permute_modes(rng.permutation(2 * cfg.L))
        return target
    if variant == _FLOQUET:
        mask1 = np.ones(cfg.L, dtype=bool)
        mask2 = np.ones(cfg.L, dtype=bool)
    else:
        mask1 = rng.random(cfg.L) < cfg.p
        mask2 = rng.random(cfg.L) < cfg.p
    target.braid_layer(0, mask1)
    target.braid_layer(1, mask2)
    return target


def _trajectory_rng(seed, index):
    return np.random.Generator(np.random.Philox(key=np.uint64(seed))
                               .jumped(index))


def ee_series(cfg: CircuitConfig) -> SizeSeries:
    """Ensemble-averaged entanglement entropy of cfg.subsystem over time."""
    lo, hi = cfg.subsystem
    n_rec = cfg.periods // cfg.record_every
    samples = np.zeros((cfg.trajectories, n_rec + 1), dtype=np.int64)
    for tr in range(cfg.trajectories):
        rng = _trajectory_rng(cfg.seed, tr)
        tab = StabilizerTableau.paired(cfg.L, track_phases=False)
        samples[tr, 0] = tab.entanglement_entropy(lo, hi)
        rec = 1
        for period in range(1, cfg.periods + 1):
            evolve_period(tab, cfg, rng)
            if period % cfg.record_every == 0:
                samples[tr, rec] = tab.entanglement_entropy(lo, hi)
                rec += 1
    meta = dict(L=cfg.L, variant=cfg.variant, p=cfg.p, seed=cfg.seed,
                subsys_lo=lo, subsys_hi=hi, interaction=cfg.interaction)
    return ensemble_series(cfg.record_times, samples, meta)


def heisenberg_size_series(cfg: CircuitConfig) -> SizeSeries:
    """Ensemble-averaged Majorana weight of a Heisenberg-evolved initial
    stabilizer pair (or single mode)."""
    symp = symplectic_table()
    p2m, m2p = pauli_mode_tables()
    counts = _heis_kernel(
        cfg.L, cfg.periods, cfg.p, _VARIANTS[cfg.variant],
        1 if cfg.interaction else 0,
        1 if cfg.initial == "single" else 0,
        cfg.record_every, np.uint64(cfg.seed), cfg.trajectories,
        symp, m2p, p2m,
    )
    meta = dict(L=cfg.L, variant=cfg.variant, p=cfg.p, seed=cfg.seed,
                interaction=cfg.interaction)
    return ensemble_series(cfg.record_times, counts, meta)


def size_series_csv(series: SizeSeries) -> str:
    m = series.meta
    return series.to_csv([
        ("t", series.times),
        ("mean_size", series.mean),
        ("stderr", series.stderr),
        ("L", m["L"]),
        ("variant", m["variant"]),
        ("p", float(m["p"])),
        ("seed", m["seed"]),
    ])


def ee_series_csv(series: SizeSeries) -> str:
    m = series.meta
    return series.to_csv([
        ("t", series.times),
        ("mean_ee", series.mean),
        ("stderr", series.stderr),
        ("L", m["L"]),
        ("variant", m["variant"]),
        ("subsys_lo", m["subsys_lo"]),
        ("subsys_hi", m["subsys_hi"]),
        ("seed", m["seed"]),
    ])


@numba.njit(cache=True, parallel=True)
def _heis_kernel(L, periods, p, variant, interact, init_single,
                 record_every, master_seed, n_traj, symp, m2p, p2m):
    M = 2 * L
    n_rec = periods // record_every
    out = np.empty((n_traj, n_rec + 1), dtype=np.int64)
    for tr in numba.prange(n_traj):
        state = stream_state(master_seed, np.uint64(tr))
        sup = np.zeros(M, dtype=np.uint8)
        if init_single:
            k, state = next_below(M, state)
            sup[k] = 1
            w = 1
        else:
            i0, state = next_below(L, state)
            sup[2 * i0] = 1
            sup[2 * i0 + 1] = 1
            w = 2
        out[tr, 0] = w
        rec = 1
        for period in range(1, periods + 1):
            if interact:
                gi, state = next_below(N_SYMPLECTIC, state)
                head = (int(sup[0]) | (int(sup[1]) << 1)
                        | (int(sup[2]) << 2) | (int(sup[3]) << 3))
                hw = int(sup[0]) + int(sup[1]) + int(sup[2]) + int(sup[3])
                tpar = (w - hw) & 1
                pcode = int(m2p[head ^ (15 * tpar)])
                if pcode:
                    im = 0
                    if pcode & 1:
                        im ^= int(symp[gi, 0])
                    if pcode & 2:
                        im ^= int(symp[gi, 1])
                    if pcode & 4:
                        im ^= int(symp[gi, 2])
                    if pcode & 8:
                        im ^= int(symp[gi, 3])
                    nh = int(p2m[im]) ^ (15 * tpar)
                    nw = 0
                    for k in range(4):
                        sup[k] = (nh >> k) & 1
                        nw += (nh >> k) & 1
                    w += nw - hw
            if variant == _NONLOCAL:
                for i in range(M - 1, 0, -1):
                    j, state = next_below(i + 1, state)
                    tmp = sup[i]
                    sup[i] = sup[j]
                    sup[j] = tmp
            elif variant == _FLOQUET:
                for i in range(L):
                    tmp = sup[2 * i]
                    sup[2 * i] = sup[2 * i + 1]
                    sup[2 * i + 1] = tmp
                for i in range(L):
                    a = 2 * i + 1
                    b = (2 * i + 2) % M
                    tmp = sup[a]
                    sup[a] = sup[b]
                    sup[b] = tmp
            else:
                for i in range(L):
                    u, state = next_uniform(state)
                    if u < p:
                        tmp = sup[2 * i]
                        sup[2 * i] = sup[2 * i + 1]
                        sup[2 * i + 1] = tmp
                for i in range(L):
                    u, state = next_uniform(state)
                    if u < p:
                        a = 2 * i + 1
                        b = (2 * i + 2) % M
                        tmp = sup[a]
                        sup[a] = sup[b]
                        sup[b] = tmp
            if period % record_every == 0:
                out[tr, rec] = w
                rec += 1
    return out
