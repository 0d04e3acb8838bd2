"""Kraus channels: the qubit amplitude damping channel and the Z-channel it induces."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, LengthMismatch, OutOfRange
from .matcore import HERM_TOL, as_matrix, is_psd, hermiticity_error


@dataclass(frozen=True)
class KrausChannel:
    kraus_ops: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(as_matrix(k) for k in self.kraus_ops)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        if any(k.shape != (d, d) for k in ops):
            raise DimensionMismatch("Kraus operators must share one square shape")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)
        err = self.completeness_error()
        if err > HERM_TOL:
            raise ValueError(f"Kraus operators are not trace preserving (error {err:.3e})")

    @property
    def input_dim(self) -> int:
        return self.kraus_ops[0].shape[0]

    def completeness_error(self) -> float:
        s = sum(k.conj().T @ k for k in self.kraus_ops)
        return float(np.max(np.abs(s - np.eye(self.input_dim))))

    def __call__(self, rho):
        return apply_channel(self, rho)


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not 0.0 <= gamma <= 1.0:
        raise OutOfRange(f"damping parameter must lie in [0, 1], got {gamma}")
    return gamma


def adc_kraus(gamma: float) -> KrausChannel:
    """Amplitude damping channel: |1> relaxes to |0> with probability ``gamma``."""
    gamma = _check_gamma(gamma)
    e0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
    e1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return KrausChannel((e0, e1))


def num_qubits(rho: np.ndarray) -> int:
    d = rho.shape[0]
    n = d.bit_length() - 1
    if d != 1 << n:
        raise DimensionMismatch(f"dimension {d} is not a power of two")
    return n


def check_density(rho, tol: float = HERM_TOL) -> np.ndarray:
    """Validate a density matrix (Hermitian, unit trace, PSD, 2^n dim) and return it."""
    rho = as_matrix(rho)
    num_qubits(rho)
    if hermiticity_error(rho) > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError(f"density matrix trace is {np.trace(rho).real:.12g}, not 1")
    if not is_psd(rho, tol):
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def apply_channel(ch: KrausChannel, rho) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape[0] != ch.input_dim:
        raise DimensionMismatch(
            f"channel acts on dimension {ch.input_dim}, state has dimension {rho.shape[0]}"
        )
    return sum(k @ rho @ k.conj().T for k in ch.kraus_ops)


def apply_to_qubit(ch: KrausChannel, rho, qubit: int) -> np.ndarray:
    """Apply a single-qubit channel to one qubit of a multi-qubit state."""
    rho = as_matrix(rho)
    if ch.input_dim != 2:
        raise DimensionMismatch("per-qubit application needs a single-qubit channel")
    n = num_qubits(rho)
    if not 0 <= qubit < n:
        raise DimensionMismatch(f"qubit {qubit} out of range for {n} qubits")
    left, right = 2**qubit, 2 ** (n - qubit - 1)
    t = rho.reshape(left, 2, right, left, 2, right)
    out = np.zeros_like(t)
    for k in ch.kraus_ops:
        out += np.einsum("ab,ibjkcl,dc->iajkdl", k, t, k.conj(), optimize=True)
    return out.reshape(rho.shape)


def apply_per_qubit(ch: KrausChannel, rho) -> np.ndarray:
    """Apply ``ch`` independently to every qubit of ``rho``."""
    rho = as_matrix(rho)
    for q in range(num_qubits(rho)):
        rho = apply_to_qubit(ch, rho, q)
    return rho


def z_channel_string_prob(gamma: float, sent, received) -> float:
    """Probability that ``sent`` arrives as ``received`` over the induced Z-channel.

    A 1 decays to 0 with probability ``gamma``; a 0 is never flipped.
    """
    gamma = _check_gamma(gamma)
    sent, received = [int(b) for b in sent], [int(b) for b in received]
    if len(sent) != len(received):
        raise LengthMismatch(f"strings of length {len(sent)} and {len(received)}")
    p = 1.0
    for s, r in zip(sent, received):
        if s == 0:
            p *= 1.0 if r == 0 else 0.0
        else:
            p *= gamma if r == 0 else 1.0 - gamma
    return p
