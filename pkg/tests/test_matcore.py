import numpy as np
import pytest
from hypothesis import given, strategies as st

from adclab.errors import NotHermitian
from adclab.matcore import (
    I2, X, Y, Z, as_matrix, equal_up_to_phase, herm_eig, is_psd, is_unitary, jacobi_eigh, ket,
    normalize, projector, psd_sqrt_inv, tensor, trace_norm,
)
from conftest import random_density, random_hermitian


class TestTensorAndKets:
    def test_big_endian_ordering(self):
        # qubit 0 is the most significant bit
        assert np.array_equal(ket("01"), tensor(ket("0"), ket("1")))
        assert np.argmax(np.abs(ket("10"))) == 2

    def test_operator_on_top_wire(self):
        op = tensor(X, I2)
        assert np.allclose(op @ ket("00"), ket("10"))

    def test_pauli_algebra(self):
        assert np.allclose(X @ Y, 1j * Z)

    def test_as_matrix_rejects_non_square(self):
        with pytest.raises(ValueError):
            as_matrix(np.zeros((2, 3)))

    def test_normalize_zero(self):
        with pytest.raises(ValueError):
            normalize([0, 0])


class TestJacobi:
    @pytest.mark.parametrize("dim", [1, 2, 3, 8, 16])
    def test_matches_lapack(self, rng, dim):
        h = random_hermitian(rng, dim)
        w, v = jacobi_eigh(h)
        assert np.allclose(w, np.linalg.eigvalsh(h), atol=1e-12)
        assert np.allclose(v @ np.diag(w) @ v.conj().T, h, atol=1e-12)
        assert np.allclose(v.conj().T @ v, np.eye(dim), atol=1e-12)

    def test_degenerate_spectrum(self):
        h = np.diag([1.0, 1.0, -2.0, -2.0]).astype(complex)
        u = tensor(np.array([[1, 1j], [1j, 1]]) / np.sqrt(2), np.array([[1, 1], [1, -1]]) / np.sqrt(2))
        w, _ = jacobi_eigh(u @ h @ u.conj().T)
        assert np.allclose(w, [-2, -2, 1, 1], atol=1e-12)

    def test_already_diagonal(self):
        w, v = jacobi_eigh(np.diag([3.0, -1.0]))
        assert np.allclose(w, [-1, 3])
        assert np.allclose(np.abs(v), [[0, 1], [1, 0]])

    def test_herm_eig_methods_agree(self, rng):
        h = random_hermitian(rng, 6)
        w1, _ = herm_eig(h, method="jacobi")
        w2, _ = herm_eig(h)
        assert np.allclose(w1, w2, atol=1e-12)
        assert np.all(np.diff(w2) <= 0)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            herm_eig(np.array([[0, 1], [0, 0]]))

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            herm_eig(np.eye(2), method="qr")


class TestNorms:
    @given(st.integers(0, 10_000))
    def test_trace_norm_equals_singular_values(self, seed):
        h = random_hermitian(np.random.default_rng(seed), 4)
        assert trace_norm(h) == pytest.approx(np.sum(np.linalg.svd(h, compute_uv=False)), rel=1e-12)

    def test_psd(self, rng):
        assert is_psd(random_density(rng, 4))
        assert not is_psd(np.diag([1.0, -0.1]))

    def test_unitary(self):
        assert is_unitary(X)
        assert not is_unitary(2 * X)

    def test_phase_equivalence(self):
        v = normalize([1, 1j])
        assert equal_up_to_phase(v, np.exp(0.7j) * v)
        assert not equal_up_to_phase(v, normalize([1, -1j]))

    def test_psd_sqrt_inv(self, rng):
        g = random_density(rng, 3)
        s = psd_sqrt_inv(g)
        assert np.allclose(s @ g @ s, np.eye(3), atol=1e-9)

    def test_projector_idempotent(self):
        p = projector(normalize([1, 2j, 3]))
        assert np.allclose(p @ p, p)
