import itertools

import numpy as np
import pytest

from fscramble.strings import (
    MajoranaString,
    NotNormalized,
    PauliString,
    height_of,
    jw_inverse,
    jw_map,
    mean_size,
    size_of,
)

from oracles import majorana_matrix, pauli_matrix


def all_majorana_strings(n_modes, phases=(0,)):
    for mask in range(1 << n_modes):
        for ph in phases:
            yield MajoranaString(n_modes, mask, ph)


class TestHeightAndSize:
    def test_identity_height(self):
        s = MajoranaString(6)
        assert height_of(s).tolist() == [0] * 6
        assert size_of(s) == 0

    def test_single_mode(self):
        s = MajoranaString.from_modes(6, (1,))
        assert height_of(s).tolist() == [1, 0, 0, 0, 0, 0]
        assert size_of(s) == 1

    def test_pair(self):
        s = MajoranaString.from_modes(6, (1, 2), phase=1)
        assert height_of(s).tolist() == [1, 1, 0, 0, 0, 0]

    def test_four_modes(self):
        s = MajoranaString.from_modes(6, (1, 2, 3, 4))
        assert size_of(s) == 4


class TestMeanSize:
    def test_delta(self):
        assert mean_size([([1, 0, 0], 1.0)]) == 1.0

    def test_paper_example(self):
        # equal weight on a size-1 and a size-2 configuration
        dist = [([1, 0, 0], 0.5), ([1, 1, 0], 0.5)]
        assert mean_size(dist) == pytest.approx(1.5)

    def test_identity(self):
        assert mean_size([([0, 0, 0], 1.0)]) == 0.0

    def test_not_normalized(self):
        with pytest.raises(NotNormalized):
            mean_size([([1, 0], 0.7)])


class TestMultiply:
    def test_self_inverse(self):
        s = MajoranaString.from_modes(4, (1,))
        p = s * s
        assert p.modes == 0 and p.phase == 0

    def test_anticommutation(self):
        a = MajoranaString.from_modes(4, (1,))
        b = MajoranaString.from_modes(4, (2,))
        ab, ba = a * b, b * a
        assert ab.modes == ba.modes
        assert (ab.phase - ba.phase) % 4 == 2

    def test_dense_oracle_exhaustive_4_modes(self):
        strings = list(all_majorana_strings(4, phases=(0, 1, 2, 3)))
        mats = {(s.modes, s.phase): majorana_matrix(s) for s in strings}
        for a, b in itertools.product(all_majorana_strings(4),
                                      all_majorana_strings(4)):
            c = a * b
            expect = mats[(a.modes, a.phase)] @ mats[(b.modes, b.phase)]
            got = majorana_matrix(c)
            assert np.allclose(got, expect), (str(a), str(b), str(c))

    def test_height_xor(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            a = MajoranaString(10, int(rng.integers(1 << 10)))
            b = MajoranaString(10, int(rng.integers(1 << 10)))
            hx = height_of(a) ^ height_of(b)
            assert (height_of(a * b) == hx).all()

    def test_associative(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            a, b, c = (MajoranaString(8, int(rng.integers(1 << 8)),
                                      int(rng.integers(4)))
                       for _ in range(3))
            assert (a * b) * c == a * (b * c)

    def test_square_is_plus_minus_identity(self):
        for s in all_majorana_strings(6):
            sq = s * s
            assert sq.modes == 0 and sq.phase in (0, 2)

    def test_commutes_with_matches_product_order(self):
        for a, b in itertools.product(all_majorana_strings(4),
                                      all_majorana_strings(4)):
            ab, ba = a * b, b * a
            assert a.commutes_with(b) == (ab.phase == ba.phase)


class TestPauli:
    def test_dense_oracle_multiply_2_qubits(self):
        paulis = [PauliString(2, x, z, ph)
                  for x in range(4) for z in range(4) for ph in range(4)]
        for a, b in itertools.product(paulis[:64], paulis[:64]):
            c = a * b
            assert np.allclose(pauli_matrix(c),
                               pauli_matrix(a) @ pauli_matrix(b))

    def test_hermitian_storage(self):
        y = PauliString.from_label("YI")
        assert np.allclose(pauli_matrix(y), pauli_matrix(y).conj().T)

    def test_commutation(self):
        x = PauliString.from_label("XI")
        z = PauliString.from_label("ZI")
        assert not x.commutes_with(z)
        assert x.commutes_with(PauliString.from_label("IZ"))


class TestJordanWigner:
    def test_x1_image(self):
        m = jw_map(PauliString.from_label("X"))
        # X_1 = i g_1 g_2
        assert m.modes == 0b11 and m.phase == 0
        assert np.allclose(majorana_matrix(m),
                           pauli_matrix(PauliString.from_label("X")))

    def test_identity(self):
        m = jw_map(PauliString(3))
        assert m.modes == 0 and m.phase == 0

    def test_z1_dense(self):
        p = PauliString.from_label("Z")
        m = jw_map(p)
        assert np.allclose(majorana_matrix(m), pauli_matrix(p))

    @pytest.mark.parametrize("n_qubits", [1, 2, 3])
    def test_dense_oracle_all_paulis(self, n_qubits):
        for x in range(1 << n_qubits):
            for z in range(1 << n_qubits):
                for ph in range(4):
                    p = PauliString(n_qubits, x, z, ph)
                    m = jw_map(p)
                    assert np.allclose(majorana_matrix(m), pauli_matrix(p))

    @pytest.mark.parametrize("n_qubits", [1, 2, 3])
    def test_round_trip(self, n_qubits):
        for x in range(1 << n_qubits):
            for z in range(1 << n_qubits):
                p = PauliString(n_qubits, x, z, 0)
                assert jw_inverse(jw_map(p)) == p

    def test_round_trip_majorana_side(self):
        for mask in range(1 << 6):
            for ph in range(4):
                s = MajoranaString(6, mask, ph)
                assert jw_map(jw_inverse(s)) == s

    def test_preserves_commutation_exhaustive_2_qubits(self):
        paulis = [PauliString(2, x, z) for x in range(4) for z in range(4)]
        for a, b in itertools.product(paulis, paulis):
            assert a.commutes_with(b) == jw_map(a).commutes_with(jw_map(b))


class TestRendering:
    def test_grammar(self):
        s = MajoranaString.from_modes(6, (1, 2, 5))
        assert str(s) == "+ g1 g2 g5"

    def test_sign_tokens(self):
        assert str(MajoranaString(2, 0b1, 2)) == "- g1"
        assert str(MajoranaString(2, 0, 0)) == "+"
