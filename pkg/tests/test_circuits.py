import numpy as np
import pytest

from adclab.circuits import (
    CNOT, H, SQRT_H, Circuit, Layout, ansatz_circuit, apply_gate, build_v, circuit_unitary, gate,
    measurement_povm, ry, v_cz_circuit, v_gate_circuit,
)
from adclab.errors import BadIndex, NotUnitary, ParamCountMismatch
from adclab.matcore import Z, fidelity, is_unitary, ket, projector, tensor

S = np.sqrt(0.5)
V0 = S * ket("00") + 0.5 * (ket("01") + ket("10"))
V1 = S * ket("11") + 0.5 * (ket("01") - ket("10"))
ZZ = tensor(Z, Z)


class TestGates:
    def test_ry_rotates_zero_to_plus(self):
        assert np.allclose(ry(np.pi / 2) @ ket("0"), np.array([1, 1]) / np.sqrt(2))

    def test_sqrt_h_squares_to_h(self):
        assert np.allclose(SQRT_H @ SQRT_H, H)

    def test_cnot_control_is_top_wire(self):
        c = Circuit(2, (gate("CNOT", 0, 1),))
        assert np.allclose(circuit_unitary(c), CNOT)
        assert np.allclose(circuit_unitary(c) @ ket("10"), ket("11"))

    def test_reversed_cnot(self):
        u = circuit_unitary(Circuit(2, (gate("CNOT", 1, 0),)))
        assert np.allclose(u @ ket("01"), ket("11"))

    def test_first_gate_acts_first(self):
        c = Circuit(1, (gate("H", 0), gate("Z", 0)))
        assert np.allclose(circuit_unitary(c), Z @ H)

    def test_apply_gate_on_middle_wire(self):
        state = apply_gate(ket("000"), np.array([[0, 1], [1, 0]]), (1,), 3)
        assert np.allclose(state, ket("010"))

    def test_bad_target(self):
        with pytest.raises(BadIndex):
            Circuit(2, (gate("H", 2),))
        with pytest.raises(BadIndex):
            gate("CNOT", 0, 0)
        with pytest.raises(BadIndex):
            gate("CNOT", 0)

    def test_custom_must_be_unitary(self):
        with pytest.raises(NotUnitary):
            gate("CUSTOM", 0, matrix=np.diag([1.0, 2.0]))

    def test_then(self):
        a = Circuit(1, (gate("H", 0),))
        assert len(a.then(a).gates) == 2
        with pytest.raises(BadIndex):
            a.then(Circuit(2))


class TestDecoder:
    def test_basis_orthonormal(self):
        basis = np.array([V0, V1, ZZ @ V0, ZZ @ V1])
        assert np.allclose(basis @ basis.conj().T, np.eye(4))

    @pytest.mark.parametrize("vec, label", [(V0, "00"), (V1, "01"), (ZZ @ V0, "11"), (ZZ @ V1, "10")])
    def test_basis_mapping(self, vec, label):
        assert fidelity(build_v() @ vec, ket(label)) >= 1 - 1e-10

    def test_v_is_unitary(self):
        assert is_unitary(build_v())

    def test_top_qubit_povm(self):
        povm = measurement_povm(build_v(), 0)
        assert np.allclose(povm.elements[0], projector(V0) + projector(V1), atol=1e-10)
        assert povm.completeness_error() < 1e-12

    def test_gate_level_circuit_gives_same_measurement(self):
        povm = measurement_povm(circuit_unitary(v_gate_circuit()), 0)
        assert np.allclose(povm.elements[0], projector(V0) + projector(V1), atol=1e-10)

    def test_cz_circuit_is_unitary(self):
        assert is_unitary(circuit_unitary(v_cz_circuit()))


class TestAnsatz:
    @pytest.mark.parametrize("layout, count", [
        (Layout.DECODER_ONLY, 8), (Layout.ENCODER_AND_DECODER, 8),
        (Layout.ENCODER_ONLY_CNOT, 6), (Layout.DECODER_ONLY_CNOT, 6),
    ])
    def test_param_counts(self, layout, count):
        assert layout.num_params == count
        ans = ansatz_circuit(layout, np.zeros(count))
        assert len(ans.encoders) == 2

    def test_wrong_count(self):
        with pytest.raises(ParamCountMismatch):
            ansatz_circuit(Layout.DECODER_ONLY_CNOT, [0.0] * 5)

    def test_per_bit_encoder(self):
        ans = ansatz_circuit(Layout.DECODER_ONLY, [0.1, 0.2, 0.3, 0.4, 0, 0, 0, 0])
        u0, u1 = (circuit_unitary(c) for c in ans.encoders)
        assert not np.allclose(u0, u1)
        assert np.allclose(u0, tensor(ry(0.1), ry(0.2)))

    def test_shared_encoder(self):
        ans = ansatz_circuit(Layout.ENCODER_ONLY_CNOT, np.arange(6.0))
        assert ans.encoders[0] is ans.encoders[1]
        assert len(ans.decoder.gates) == 2
