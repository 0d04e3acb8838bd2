"""Gates, circuits and the two-qubit decoder used for the one-bit scheme.

Qubit 0 is the top wire of a circuit diagram and the most significant bit of
a basis index.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .discrimination import Povm
from .errors import BadIndex, NotUnitary, ParamCountMismatch
from .matcore import I2, X, Z, as_matrix, is_unitary, ket, tensor

SQRT2 = np.sqrt(2.0)
H = np.array([[1, 1], [1, -1]], dtype=complex) / SQRT2
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
# principal square root of H: +1 eigenspace kept, -1 eigenspace picks up i
SQRT_H = 0.5 * (np.eye(2) + H) + 0.5j * (np.eye(2) - H)


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def phase(theta: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * theta)])


class GateKind(enum.Enum):
    H = "H"
    X = "X"
    Z = "Z"
    CNOT = "CNOT"
    CZ = "CZ"
    RY = "RY"
    PHASE = "PHASE"
    SQRT_H = "SQRT_H"
    CUSTOM = "CUSTOM"


_FIXED = {
    GateKind.H: H,
    GateKind.X: X,
    GateKind.Z: Z,
    GateKind.CNOT: CNOT,
    GateKind.CZ: CZ,
    GateKind.SQRT_H: SQRT_H,
}


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    targets: tuple[int, ...]
    angle: float = 0.0
    matrix: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        u = self.unitary()
        if u.shape[0] != 2 ** len(self.targets):
            raise BadIndex(f"{self.kind.value} acts on {u.shape[0].bit_length() - 1} qubits, "
                           f"got targets {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise BadIndex(f"repeated target in {self.targets}")
        if not is_unitary(u):
            raise NotUnitary(f"gate {self.kind.value} is not unitary")

    def unitary(self) -> np.ndarray:
        if self.kind in _FIXED:
            return _FIXED[self.kind]
        if self.kind is GateKind.RY:
            return ry(self.angle)
        if self.kind is GateKind.PHASE:
            return phase(self.angle)
        if self.matrix is None:
            raise ValueError("CUSTOM gate needs a matrix")
        return as_matrix(self.matrix)


def gate(kind: str | GateKind, *targets: int, angle: float = 0.0, matrix=None) -> Gate:
    return Gate(GateKind(kind), targets, angle, matrix)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(not 0 <= t < self.num_qubits for t in g.targets):
                raise BadIndex(f"gate targets {g.targets} outside {self.num_qubits} qubits")

    def then(self, other: "Circuit") -> "Circuit":
        if other.num_qubits != self.num_qubits:
            raise BadIndex("cannot append circuits of different widths")
        return Circuit(self.num_qubits, self.gates + other.gates)


def apply_gate(state: np.ndarray, u: np.ndarray, targets, n: int) -> np.ndarray:
    """Apply ``u`` on ``targets`` to the row index of ``state`` (a vector or matrix)."""
    k = len(targets)
    rest = state.shape[1:]
    t = state.reshape((2,) * n + rest)
    t = np.tensordot(u.reshape((2,) * (2 * k)), t, axes=(list(range(k, 2 * k)), list(targets)))
    # tensordot puts the gate outputs first; move them back to their wires
    t = np.moveaxis(t, list(range(k)), list(targets))
    return t.reshape(state.shape)


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Unitary of the whole circuit; the first gate in ``c.gates`` acts first."""
    d = 2**c.num_qubits
    u = np.eye(d, dtype=complex)
    for g in c.gates:
        u = apply_gate(u, g.unitary(), g.targets, c.num_qubits)
    return u


# decoding basis of the two-copy one-bit scheme
V0 = ket("00") / SQRT2 + (ket("01") + ket("10")) / 2
V1 = ket("11") / SQRT2 + (ket("01") - ket("10")) / 2
ZZ = tensor(Z, Z)


def build_v() -> np.ndarray:
    """Two-qubit unitary with V|v0> = |00>, V|v1> = |01>, V ZZ|v0> = |11>, V ZZ|v1> = |10>."""
    pairs = [("00", V0), ("01", V1), ("11", ZZ @ V0), ("10", ZZ @ V1)]
    return sum(np.outer(ket(out), inp.conj()) for out, inp in pairs)


def v_gate_circuit() -> Circuit:
    """Gate-level form of the decoder: H, CNOT, then H and pi/8 real rotations.

    The pi/8 boxes are read as real rotations by pi/8, i.e. ``ry(-pi/4)``. This
    reproduces the top-qubit measurement of :func:`build_v` exactly but not the
    full basis mapping on the bottom qubit.
    """
    return Circuit(2, (
        gate("H", 0),
        gate("CNOT", 0, 1),
        gate("RY", 0, angle=-np.pi / 4),
        gate("H", 1),
        gate("RY", 1, angle=-np.pi / 4),
    ))


def v_cz_circuit() -> Circuit:
    """The same decoder written with a controlled-phase gate in place of the CNOT."""
    return Circuit(2, (
        gate("H", 0),
        gate("H", 1),
        gate("CZ", 0, 1),
        gate("RY", 0, angle=-np.pi / 4),
        gate("RY", 1, angle=-np.pi / 4),
    ))


def measurement_povm(u, measured_qubit: int = 0) -> Povm:
    """POVM realized by applying ``u`` and reading one qubit in the Z basis."""
    u = as_matrix(u)
    if not is_unitary(u):
        raise NotUnitary("measurement unitary is not unitary")
    n = u.shape[0].bit_length() - 1
    if u.shape[0] != 2**n or not 0 <= measured_qubit < n:
        raise BadIndex(f"cannot measure qubit {measured_qubit} of a {u.shape[0]}-dim unitary")
    elements = []
    for b in (0, 1):
        proj = np.zeros((2, 2), dtype=complex)
        proj[b, b] = 1.0
        ops = [I2] * n
        ops[measured_qubit] = proj
        elements.append(u.conj().T @ tensor(*ops) @ u)
    return Povm(tuple(elements), (0, 1))


class Layout(enum.Enum):
    """Two-qubit, one-bit encoder/decoder ansatz families.

    Every layout acts on the duplicated bit |b>|b>. An entangling block is a
    CNOT (qubit 0 controls qubit 1) between a layer of Y-rotations before it and
    one after it; a local block is a single layer of Y-rotations. DECODER_ONLY
    has a separate local encoding layer for each bit value, so its two
    codewords are arbitrary product states of real amplitudes; the other
    layouts apply one fixed encoder unitary to |b>|b>.
    """

    DECODER_ONLY = "decoder_only"
    ENCODER_AND_DECODER = "encoder_and_decoder"
    ENCODER_ONLY_CNOT = "encoder_only_cnot"
    DECODER_ONLY_CNOT = "decoder_only_cnot"

    @property
    def blocks(self) -> tuple[bool, bool]:
        """(encoder entangles, decoder entangles)."""
        return {
            Layout.DECODER_ONLY: (False, True),
            Layout.ENCODER_AND_DECODER: (True, True),
            Layout.ENCODER_ONLY_CNOT: (True, False),
            Layout.DECODER_ONLY_CNOT: (False, True),
        }[self]

    @property
    def per_bit_encoder(self) -> bool:
        return self is Layout.DECODER_ONLY

    @property
    def encoder_params(self) -> int:
        enc_ent, _ = self.blocks
        return 2 * (2 if self.per_bit_encoder else 1) if not enc_ent else 4

    @property
    def num_params(self) -> int:
        return self.encoder_params + (4 if self.blocks[1] else 2)


@dataclass(frozen=True)
class Ansatz:
    """Encoder circuit per bit value (applied to |b>|b>) and the shared decoder."""

    encoders: tuple[Circuit, Circuit]
    decoder: Circuit


def _block(params, entangling: bool) -> Circuit:
    layers = [gate("RY", 0, angle=params[0]), gate("RY", 1, angle=params[1])]
    if entangling:
        layers += [gate("CNOT", 0, 1), gate("RY", 0, angle=params[2]), gate("RY", 1, angle=params[3])]
    return Circuit(2, tuple(layers))


def ansatz_circuit(layout: Layout | str, params) -> Ansatz:
    """Build the encoder(s) and decoder of an ansatz layout.

    Parameters are consumed encoder first (bit 0 before bit 1 for a per-bit
    encoder), each block in wire order (rotations before the CNOT, then after it).
    """
    layout = Layout(layout)
    params = [float(p) for p in params]
    if len(params) != layout.num_params:
        raise ParamCountMismatch(f"{layout.name} takes {layout.num_params} parameters, got {len(params)}")
    enc_ent, dec_ent = layout.blocks
    split = layout.encoder_params
    if layout.per_bit_encoder:
        encoders = (_block(params[0:2], False), _block(params[2:4], False))
    else:
        enc = _block(params[:split], enc_ent)
        encoders = (enc, enc)
    return Ansatz(encoders, _block(params[split:], dec_ent))
