"""Majorana string and Pauli string algebra.

Majorana strings are stored in a canonical Hermitian form: the operator is

    i^phase * B(modes),    B(modes) = i^(q(q-1)/2) g_{i1} g_{i2} ... g_{iq}

with modes i1 < i2 < ... < iq (1-based in text, bit k of the mask is mode
k+1) and q the weight.  The i^(q(q-1)/2) prefactor makes every basis element
B Hermitian, so products of Hermitian strings carry phase in {0, 2}
(signs +1/-1); a bare odd phase only appears transiently in intermediate
products.

Pauli strings use the analogous convention: the operator is

    i^phase * prod_i [ i^(x_i z_i) X_i^{x_i} Z_i^{z_i} ]

so that the Y components are Hermitian as stored.

The qubit <-> Majorana dictionary is X_i = i g_{2i-1} g_{2i} and
Y_i = (prod_{j<i} X_j) g_{2i}, which gives the per-mode images

    g_{2i-1} = X_1 ... X_{i-1} Z_i,
    g_{2i}   = X_1 ... X_{i-1} Y_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class NotNormalized(ValueError):
    """Probability weights do not sum to one."""


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _reorder_sign_exponent(u: int, v: int) -> int:
    """Exponent of (-1) from sorting the concatenation of monomials u, v.

    Counts pairs (a in u, b in v) with a > b: each mode of v moves left past
    the modes of u that exceed it; duplicate modes cancel (g^2 = 1) without
    an extra sign.
    """
    sigma = 0
    b = v
    while b:
        low = b & -b
        k = low.bit_length() - 1
        sigma += _popcount(u >> (k + 1))
        b ^= low
    return sigma & 1


@dataclass(frozen=True)
class MajoranaString:
    """A signed product of Majorana operators over `n_modes` modes."""

    n_modes: int
    modes: int = 0
    phase: int = 0

    def __post_init__(self):
        object.__setattr__(self, "modes", int(self.modes))
        object.__setattr__(self, "phase", int(self.phase) % 4)
        if self.modes >> self.n_modes:
            raise ValueError("mode index outside the declared mode count")

    @property
    def weight(self) -> int:
        return _popcount(self.modes)

    @property
    def sign(self) -> complex:
        return 1j ** self.phase

    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    def height(self) -> np.ndarray:
        """Occupation pattern of the string, one bit per mode."""
        out = np.zeros(self.n_modes, dtype=np.uint8)
        m = self.modes
        while m:
            low = m & -m
            out[low.bit_length() - 1] = 1
            m ^= low
        return out

    def commutes_with(self, other: "MajoranaString") -> bool:
        if self.n_modes != other.n_modes:
            raise ValueError("mode count mismatch")
        qa, qb = self.weight, other.weight
        shared = _popcount(self.modes & other.modes)
        return (qa * qb - shared) % 2 == 0

    def __mul__(self, other: "MajoranaString") -> "MajoranaString":
        if self.n_modes != other.n_modes:
            raise ValueError("mode count mismatch")
        u, v = self.modes, other.modes
        w = u ^ v
        qu, qv, qw = _popcount(u), _popcount(v), _popcount(w)
        exp = (
            self.phase
            + other.phase
            + qu * (qu - 1) // 2
            + qv * (qv - 1) // 2
            - qw * (qw - 1) // 2
            + 2 * _reorder_sign_exponent(u, v)
        )
        return MajoranaString(self.n_modes, w, exp % 4)

    def __str__(self) -> str:
        tok = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.phase]
        if self.modes == 0:
            return tok
        parts = []
        m = self.modes
        while m:
            low = m & -m
            parts.append(f"g{low.bit_length()}")
            m ^= low
        return tok + " " + " ".join(parts)

    @classmethod
    def from_modes(cls, n_modes: int, mode_list, phase: int = 0):
        mask = 0
        for k in mode_list:  # 1-based
            if not 1 <= k <= n_modes:
                raise ValueError(f"mode {k} outside 1..{n_modes}")
            mask |= 1 << (k - 1)
        return cls(n_modes, mask, phase)


@dataclass(frozen=True)
class PauliString:
    """A signed Pauli string on `n_qubits` qubits (x/z bit masks)."""

    n_qubits: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        object.__setattr__(self, "x", int(self.x))
        object.__setattr__(self, "z", int(self.z))
        object.__setattr__(self, "phase", int(self.phase) % 4)
        if (self.x | self.z) >> self.n_qubits:
            raise ValueError("qubit index outside the declared qubit count")

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def sign(self) -> complex:
        return 1j ** self.phase

    def commutes_with(self, other: "PauliString") -> bool:
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit count mismatch")
        sym = _popcount(self.x & other.z) + _popcount(self.z & other.x)
        return sym % 2 == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit count mismatch")
        xw = self.x ^ other.x
        zw = self.z ^ other.z
        exp = (
            self.phase
            + other.phase
            + _popcount(self.x & self.z)
            + _popcount(other.x & other.z)
            - _popcount(xw & zw)
            + 2 * _popcount(self.z & other.x)
        )
        return PauliString(self.n_qubits, xw, zw, exp % 4)

    def __str__(self) -> str:
        tok = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.phase]
        letters = []
        for i in range(self.n_qubits):
            xb = (self.x >> i) & 1
            zb = (self.z >> i) & 1
            letters.append("IXZY"[xb + 2 * zb] if xb + 2 * zb != 3 else "Y")
        return tok + " " + "".join(letters)

    @classmethod
    def from_label(cls, label: str, phase: int = 0):
        x = z = 0
        for i, c in enumerate(label):
            if c == "X":
                x |= 1 << i
            elif c == "Z":
                z |= 1 << i
            elif c == "Y":
                x |= 1 << i
                z |= 1 << i
            elif c != "I":
                raise ValueError(f"bad Pauli letter {c!r}")
        return cls(len(label), x, z, phase)


def height_of(s: MajoranaString) -> np.ndarray:
    """Binary occupation pattern of a Majorana string (sign ignored)."""
    return s.height()


def size_of(s: MajoranaString) -> int:
    """Operator size: number of Majorana modes in the support."""
    return s.weight


def mean_size(dist) -> float:
    """Mean size of a distribution given as (height, probability) pairs.

    `height` entries may be bit arrays or MajoranaStrings.  Probabilities
    must sum to 1 within 1e-9.
    """
    total = 0.0
    acc = 0.0
    for h, p in dist:
        if isinstance(h, MajoranaString):
            w = h.weight
        else:
            w = int(np.sum(np.asarray(h) != 0))
        total += p
        acc += p * w
    if abs(total - 1.0) > 1e-9:
        raise NotNormalized(f"probabilities sum to {total!r}")
    return acc


# ---------------------------------------------------------------------------
# Jordan-Wigner correspondence


@lru_cache(maxsize=None)
def _gamma_pauli(k: int, n_qubits: int) -> PauliString:
    """Pauli image of the single mode g_k (1-based) on n_qubits qubits."""
    i = (k + 1) // 2  # owning qubit, 1-based
    xmask = (1 << (i - 1)) - 1  # X on qubits 1..i-1
    if k % 2 == 0:  # g_{2i} = X_1..X_{i-1} Y_i
        xmask |= 1 << (i - 1)
    zmask = 1 << (i - 1)
    return PauliString(n_qubits, xmask, zmask, 0)


@lru_cache(maxsize=None)
def _xz_majorana(which: str, i: int, n_qubits: int) -> MajoranaString:
    """Majorana image of X_i or Z_i (1-based qubit) on 2*n_qubits modes."""
    m = 2 * n_qubits
    if which == "X":
        return MajoranaString.from_modes(m, (2 * i - 1, 2 * i))
    # Z_i = (prod_{j<i} X_j) g_{2i-1}
    acc = MajoranaString(m)
    for j in range(1, i):
        acc = acc * _xz_majorana("X", j, n_qubits)
    return acc * MajoranaString.from_modes(m, (2 * i - 1,))


def jw_map(p: PauliString) -> MajoranaString:
    """Majorana string equal (with phase) to the given Pauli string."""
    n = p.n_qubits
    acc = MajoranaString(2 * n, 0, (p.phase + _popcount(p.x & p.z)) % 4)
    for i in range(1, n + 1):
        bit = 1 << (i - 1)
        if p.x & bit:
            acc = acc * _xz_majorana("X", i, n)
        if p.z & bit:
            acc = acc * _xz_majorana("Z", i, n)
    return acc


def jw_inverse(s: MajoranaString) -> PauliString:
    """Pauli string equal (with phase) to the given Majorana string."""
    if s.n_modes % 2:
        raise ValueError("need an even number of modes (whole qubits)")
    n = s.n_modes // 2
    q = s.weight
    acc = PauliString(n, 0, 0, (s.phase + (q * (q - 1) // 2)) % 4)
    m = s.modes
    while m:
        low = m & -m
        acc = acc * _gamma_pauli(low.bit_length(), n)
        m ^= low
    return acc
