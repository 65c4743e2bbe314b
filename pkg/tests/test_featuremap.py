"""Feature-map construction tests: exact gate order, parameter wiring, errors."""

import numpy as np
import pytest

from qkflow.featuremap import (
    FeatureMapSpec,
    build_encoding_circuit,
    param_count,
    random_params,
)
from qkflow.statevector import Gate, cnot


def kinds_and_args(circuit):
    return [(g.kind, g.targets, g.params) for g in circuit.gates]


def test_param_count():
    assert param_count(FeatureMapSpec(2, 3)) == 6
    assert param_count(FeatureMapSpec(1, 1)) == 1


def test_single_qubit_transcription():
    spec = FeatureMapSpec(1, 1, data_axis="rx", trainable_axis="rz", entanglement="none")
    circuit = build_encoding_circuit(spec, np.array([0.5]), np.array([0.0]))
    assert kinds_and_args(circuit) == [
        ("rz", (0,), (0.0,)),
        ("rx", (0,), (0.5,)),
    ]


def test_two_qubit_ring_transcription():
    """Per layer: all trainable rotations, all data rotations, then the entangler."""
    a, b, c, d = 0.1, 0.2, 0.3, 0.4
    spec = FeatureMapSpec(2, 1, data_axis="ry", trainable_axis="rz", entanglement="ring")
    circuit = build_encoding_circuit(spec, np.array([a, b]), np.array([c, d]))
    assert kinds_and_args(circuit) == [
        ("rz", (0,), (c,)),
        ("rz", (1,), (d,)),
        ("ry", (0,), (a,)),
        ("ry", (1,), (b,)),
        ("cnot", (0, 1), ()),
        ("cnot", (1, 0), ()),
    ]


def test_linear_chain_omits_wraparound():
    spec = FeatureMapSpec(3, 1, entanglement="linear_chain")
    circuit = build_encoding_circuit(spec, np.ones(3), np.zeros(3))
    entanglers = [g for g in circuit.gates if g.kind == "cnot"]
    assert entanglers == [cnot(0, 1), cnot(1, 2)]


def test_entanglement_skipped_on_single_qubit():
    spec = FeatureMapSpec(1, 2, entanglement="ring")
    circuit = build_encoding_circuit(spec, np.ones(1), np.zeros(2))
    assert all(g.kind != "cnot" for g in circuit.gates)


def test_round_robin_feature_reuse_with_layer_offset():
    """Rotation slot l*n+q reads feature (l*n+q) mod d."""
    spec = FeatureMapSpec(2, 2, data_axis="rx", trainable_axis="ry", entanglement="none")
    point = np.array([10.0, 20.0, 30.0])
    circuit = build_encoding_circuit(spec, point, np.zeros(4))
    data_angles = [g.params[0] for g in circuit.gates if g.kind == "rx"]
    assert data_angles == [10.0, 20.0, 30.0, 10.0]


def test_data_scaling_multiplies_angles():
    spec = FeatureMapSpec(1, 1, data_axis="ry", trainable_axis="p", data_scaling=0.5)
    circuit = build_encoding_circuit(spec, np.array([2.0]), np.array([1.0]))
    assert kinds_and_args(circuit) == [
        ("p", (0,), (1.0,)),
        ("ry", (0,), (1.0,)),
    ]


def test_construction_is_deterministic():
    spec = FeatureMapSpec(3, 2, entanglement="ring")
    point = np.array([0.3, -0.4])
    lam = np.linspace(-1, 1, 6)
    assert build_encoding_circuit(spec, point, lam) == build_encoding_circuit(
        spec, point, lam
    )


def test_gate_count():
    spec = FeatureMapSpec(3, 2, entanglement="ring")
    circuit = build_encoding_circuit(spec, np.ones(2), np.zeros(6))
    # per layer: 3 trainable + 3 data + 3 ring CNOTs
    assert len(circuit.gates) == 2 * (3 + 3 + 3)


def test_random_params_range_and_determinism():
    spec = FeatureMapSpec(4, 3)
    first = random_params(spec, seed=42)
    second = random_params(spec, seed=42)
    assert first.shape == (12,)
    np.testing.assert_array_equal(first, second)
    assert np.all(first >= -np.pi) and np.all(first <= np.pi)
    assert not np.array_equal(first, random_params(spec, seed=43))


def test_param_length_mismatch():
    spec = FeatureMapSpec(2, 2)
    with pytest.raises(ValueError):
        build_encoding_circuit(spec, np.ones(2), np.zeros(3))


def test_empty_data_point():
    with pytest.raises(ValueError):
        build_encoding_circuit(FeatureMapSpec(1, 1), np.array([]), np.zeros(1))


def test_non_finite_rejected():
    spec = FeatureMapSpec(1, 1)
    with pytest.raises(ValueError):
        build_encoding_circuit(spec, np.array([np.nan]), np.zeros(1))
    with pytest.raises(ValueError):
        build_encoding_circuit(spec, np.ones(1), np.array([np.inf]))


def test_spec_validation():
    with pytest.raises(ValueError):
        FeatureMapSpec(0, 1)
    with pytest.raises(ValueError):
        FeatureMapSpec(1, 0)
    with pytest.raises(ValueError):
        FeatureMapSpec(1, 1, data_axis="p")
    with pytest.raises(ValueError):
        FeatureMapSpec(1, 1, trainable_axis="u3")
    with pytest.raises(ValueError):
        FeatureMapSpec(1, 1, entanglement="full")
