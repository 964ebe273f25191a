"""Dense-matrix oracles shared by the test modules.

Everything here is brute force on purpose: explicit Kronecker products of
2x2 matrices, never the bit-level fast paths under test.
"""

import numpy as np

I2 = np.eye(2)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def kron_all(mats):
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def pauli_matrix(p):
    """Dense matrix of a PauliString (qubit 1 = leftmost tensor factor)."""
    mats = []
    for i in range(p.n_qubits):
        xb = (p.x >> i) & 1
        zb = (p.z >> i) & 1
        # SY already carries the i of the stored i^(x_i z_i) X Z convention
        mats.append([I2, SX, SZ, SY][xb + 2 * zb])
    return (1j ** p.phase) * kron_all(mats)


def gamma_matrices(n_modes):
    """Dense Majorana modes g_1..g_n via X_i = i g_{2i-1} g_{2i},
    Y_i = (prod_{j<i} X_j) g_{2i}."""
    n_qubits = (n_modes + 1) // 2
    gammas = []
    for k in range(1, 2 * n_qubits + 1):
        i = (k + 1) // 2
        mats = [SX] * (i - 1)
        mats.append(SZ if k % 2 else SY)
        mats.extend([I2] * (n_qubits - i))
        gammas.append(kron_all(mats))
    return gammas[:n_modes]


def majorana_matrix(s):
    """Dense matrix of a MajoranaString."""
    n_qubits = (s.n_modes + 1) // 2
    gammas = gamma_matrices(2 * n_qubits)
    q = s.weight
    out = np.eye(2 ** n_qubits, dtype=complex)
    m = s.modes
    k = 0
    while m:
        low = m & -m
        out = out @ gammas[low.bit_length() - 1]
        m ^= low
        k += 1
    return (1j ** s.phase) * (1j ** ((q * (q - 1) // 2) % 4)) * out
