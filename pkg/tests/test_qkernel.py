"""Quantum kernel engine tests.

The independent oracle: a 1-qubit, 1-layer RX encoding at lambda = 0 prepares
RX(x)|0>, so k(x, x') = |<0|RX(x - x')|0>|^2 = cos^2((x - x')/2). Without
entanglement the multi-qubit version factorizes into a product over qubits.
"""

import numpy as np
import pytest

from qkflow.featuremap import FeatureMapSpec, param_count, random_params
from qkflow.qkernel import (
    GramMatrix,
    KernelEngineConfig,
    cross_gram,
    describe,
    gram_matrix,
    kernel_value,
    worker_count,
)


def rx_oracle(x, x2):
    return float(np.prod(np.cos((np.asarray(x) - np.asarray(x2)) / 2.0) ** 2))


def one_qubit_cfg(trainable="rz", circuit_kind="inversion", **kwargs):
    spec = FeatureMapSpec(1, 1, data_axis="rx", trainable_axis=trainable, entanglement="none")
    return KernelEngineConfig(spec=spec, params=np.zeros(1), circuit_kind=circuit_kind, **kwargs)


def random_cfg(rng, circuit_kind="inversion", **kwargs):
    spec = FeatureMapSpec(
        n_qubits=int(rng.integers(1, 4)),
        n_layers=int(rng.integers(1, 3)),
        data_axis=str(rng.choice(["rx", "ry", "rz"])),
        trainable_axis=str(rng.choice(["rx", "ry", "rz", "p"])),
        entanglement=str(rng.choice(["none", "linear_chain", "ring"])),
        data_scaling=float(rng.uniform(0.5, 1.5)),
    )
    params = rng.uniform(-np.pi, np.pi, size=param_count(spec))
    return KernelEngineConfig(spec=spec, params=params, circuit_kind=circuit_kind, **kwargs)


# exact values against the closed form


def test_matches_analytic_one_qubit_kernel():
    cfg = one_qubit_cfg()
    grid = np.linspace(-np.pi, np.pi, 9)
    for xa in grid:
        for xb in grid:
            got = kernel_value(cfg, [xa], [xb])
            assert abs(got - rx_oracle([xa], [xb])) <= 1e-10


def test_known_values():
    cfg = one_qubit_cfg()
    assert abs(kernel_value(cfg, [0.0], [np.pi])) <= 1e-12
    assert abs(kernel_value(cfg, [0.0], [np.pi / 2]) - 0.5) <= 1e-12
    assert abs(kernel_value(cfg, [0.7], [0.7]) - 1.0) <= 1e-12


def test_every_trainable_axis_is_identity_at_zero():
    for axis in ("rx", "ry", "rz", "p"):
        cfg = one_qubit_cfg(trainable=axis)
        got = kernel_value(cfg, [1.1], [-0.4])
        assert abs(got - rx_oracle([1.1], [-0.4])) <= 1e-10


def test_product_form_without_entanglement():
    spec = FeatureMapSpec(3, 1, data_axis="rx", trainable_axis="ry", entanglement="none")
    cfg = KernelEngineConfig(spec=spec, params=np.zeros(3))
    rng = np.random.default_rng(7)
    for _ in range(5):
        xa, xb = rng.uniform(-np.pi, np.pi, size=(2, 3))
        assert abs(kernel_value(cfg, xa, xb) - rx_oracle(xa, xb)) <= 1e-10


def test_single_layer_entanglers_cancel():
    """With one layer, U(x')^dag U(x) sandwiches CNOTs back to back."""
    rng = np.random.default_rng(19)
    xa, xb = rng.uniform(-np.pi, np.pi, size=(2, 3))
    for ent in ("none", "linear_chain", "ring"):
        spec = FeatureMapSpec(3, 1, data_axis="rx", trainable_axis="rz", entanglement=ent)
        cfg = KernelEngineConfig(spec=spec, params=np.zeros(3))
        assert abs(kernel_value(cfg, xa, xb) - rx_oracle(xa, xb)) <= 1e-10


def test_inversion_and_swap_agree():
    rng = np.random.default_rng(101)
    for _ in range(20):
        cfg_inv = random_cfg(rng)
        cfg_swap = KernelEngineConfig(
            spec=cfg_inv.spec, params=cfg_inv.params, circuit_kind="swap"
        )
        d = int(rng.integers(1, 4))
        xa, xb = rng.uniform(-np.pi, np.pi, size=(2, d))
        assert abs(kernel_value(cfg_inv, xa, xb) - kernel_value(cfg_swap, xa, xb)) <= 1e-10


def test_data_scaling_zero_gives_flat_kernel():
    spec = FeatureMapSpec(2, 2, data_scaling=0.0)
    rng = np.random.default_rng(3)
    for _ in range(3):
        cfg = KernelEngineConfig(spec=spec, params=rng.uniform(-np.pi, np.pi, 4))
        K = gram_matrix(cfg, rng.normal(size=(4, 2))).values
        np.testing.assert_allclose(K, np.ones((4, 4)), atol=1e-12)


def test_small_parameter_shift_moves_kernel_little():
    rng = np.random.default_rng(23)
    cfg = random_cfg(rng)
    xa, xb = rng.uniform(-np.pi, np.pi, size=(2, 2))
    base = kernel_value(cfg, xa, xb)
    for j in range(cfg.params.size):
        bumped = np.array(cfg.params)
        bumped[j] += 1e-7
        cfg_bumped = KernelEngineConfig(
            spec=cfg.spec, params=bumped, circuit_kind=cfg.circuit_kind
        )
        assert abs(kernel_value(cfg_bumped, xa, xb) - base) <= 1e-5


# Gram assembly


def test_gram_orthogonal_pair():
    cfg = one_qubit_cfg()
    K = gram_matrix(cfg, np.array([[0.0], [np.pi]]))
    np.testing.assert_allclose(K.values, np.eye(2), atol=1e-12)
    assert K.point_count == 2


def test_gram_exact_properties():
    rng = np.random.default_rng(31)
    for _ in range(5):
        cfg = random_cfg(rng, circuit_kind=str(rng.choice(["inversion", "swap"])))
        X = rng.uniform(-np.pi, np.pi, size=(int(rng.integers(2, 9)), 2))
        K = gram_matrix(cfg, X).values
        assert np.max(np.abs(K - K.T)) <= 1e-10
        assert np.all(np.diag(K) == 1.0)
        assert np.all(K >= 0.0) and np.all(K <= 1.0)
        assert np.linalg.eigvalsh((K + K.T) / 2.0).min() >= -1e-8


def test_gram_matches_kernel_value():
    rng = np.random.default_rng(37)
    cfg = random_cfg(rng)
    X = rng.uniform(-np.pi, np.pi, size=(4, 2))
    K = gram_matrix(cfg, X).values
    for i in range(4):
        for j in range(i + 1, 4):
            assert abs(K[i, j] - kernel_value(cfg, X[i], X[j])) <= 1e-12


def test_cross_gram_consistency():
    rng = np.random.default_rng(43)
    for kind in ("inversion", "swap"):
        cfg = random_cfg(rng, circuit_kind=kind)
        X = rng.uniform(-np.pi, np.pi, size=(5, 3))
        K = gram_matrix(cfg, X).values
        C = cross_gram(cfg, X, X)
        assert np.max(np.abs(K - C)) <= 1e-10


def test_cross_gram_shape_and_values():
    cfg = one_qubit_cfg()
    C = cross_gram(cfg, np.array([[0.0], [1.0], [2.0]]), np.array([[0.0], [np.pi]]))
    assert C.shape == (3, 2)
    assert abs(C[0, 0] - 1.0) <= 1e-12
    assert abs(C[0, 1]) <= 1e-12


# shot-sampled estimation


def test_shot_estimates_near_exact():
    rng = np.random.default_rng(53)
    exact_cfg = one_qubit_cfg()
    for kind in ("inversion", "swap"):
        for trial in range(5):
            xa, xb = rng.uniform(-np.pi, np.pi, size=(2, 1))
            sampled_cfg = one_qubit_cfg(
                circuit_kind=kind, mode="shots", shots=10_000, seed=trial
            )
            got = kernel_value(sampled_cfg, xa, xb)
            assert abs(got - kernel_value(exact_cfg, xa, xb)) <= 0.05
            assert 0.0 <= got <= 1.0


def test_shot_gram_is_deterministic():
    rng = np.random.default_rng(59)
    X = rng.uniform(-np.pi, np.pi, size=(4, 1))
    cfg = one_qubit_cfg(mode="shots", shots=300, seed=11)
    first = gram_matrix(cfg, X).values
    second = gram_matrix(cfg, X).values
    np.testing.assert_array_equal(first, second)
    other = gram_matrix(one_qubit_cfg(mode="shots", shots=300, seed=12), X).values
    assert np.max(np.abs(first - other)) > 0.0


def test_shot_gram_evaluates_pairs_independently():
    """Shots mode makes no symmetry assumption, so noise breaks symmetry."""
    X = np.array([[0.0], [1.3], [2.1]])
    cfg = one_qubit_cfg(mode="shots", shots=101, seed=5)
    K = gram_matrix(cfg, X).values
    assert np.max(np.abs(K - K.T)) > 0.0
    np.testing.assert_array_equal(np.diag(K), np.ones(3))


def test_negative_seed_accepted():
    cfg = one_qubit_cfg(mode="shots", shots=100, seed=-3)
    value = kernel_value(cfg, [0.4], [1.0])
    assert 0.0 <= value <= 1.0


# configuration and environment


def test_threaded_gram_matches_sequential(monkeypatch):
    rng = np.random.default_rng(61)
    cfg = random_cfg(rng)
    X = rng.uniform(-np.pi, np.pi, size=(6, 2))
    monkeypatch.delenv("QKFLOW_THREADS", raising=False)
    sequential = gram_matrix(cfg, X).values
    monkeypatch.setenv("QKFLOW_THREADS", "3")
    assert worker_count() == 3
    threaded = gram_matrix(cfg, X).values
    np.testing.assert_array_equal(sequential, threaded)

    shot_cfg = one_qubit_cfg(mode="shots", shots=200, seed=2)
    Xs = rng.uniform(-np.pi, np.pi, size=(4, 1))
    monkeypatch.delenv("QKFLOW_THREADS", raising=False)
    seq = gram_matrix(shot_cfg, Xs).values
    monkeypatch.setenv("QKFLOW_THREADS", "2")
    np.testing.assert_array_equal(seq, gram_matrix(shot_cfg, Xs).values)


def test_worker_count_validation(monkeypatch):
    monkeypatch.setenv("QKFLOW_THREADS", "0")
    assert worker_count() == 1
    monkeypatch.setenv("QKFLOW_THREADS", "four")
    with pytest.raises(ValueError):
        worker_count()
    monkeypatch.setenv("QKFLOW_THREADS", "-2")
    with pytest.raises(ValueError):
        worker_count()


def test_config_validation():
    spec = FeatureMapSpec(2, 1)
    with pytest.raises(ValueError):
        KernelEngineConfig(spec=spec, params=np.zeros(3))
    with pytest.raises(ValueError):
        KernelEngineConfig(spec=spec, params=np.zeros(2), mode="shots")
    with pytest.raises(ValueError):
        KernelEngineConfig(spec=spec, params=np.zeros(2), mode="sampled")
    with pytest.raises(ValueError):
        KernelEngineConfig(spec=spec, params=np.zeros(2), circuit_kind="bell")


def test_template_config_requires_binding():
    cfg = KernelEngineConfig(spec=FeatureMapSpec(1, 1), params=None)
    with pytest.raises(ValueError):
        kernel_value(cfg, [0.1], [0.2])


def test_dimension_mismatch():
    cfg = one_qubit_cfg()
    with pytest.raises(ValueError):
        kernel_value(cfg, [0.1, 0.2], [0.3])
    with pytest.raises(ValueError):
        cross_gram(cfg, np.ones((2, 2)), np.ones((2, 3)))


def test_gram_matrix_type_validation():
    with pytest.raises(ValueError):
        GramMatrix(values=np.ones((2, 3)), kernel_id="k", point_count=2)
    with pytest.raises(ValueError):
        GramMatrix(values=np.ones((2, 2)), kernel_id="k", point_count=3)
    with pytest.raises(ValueError):
        GramMatrix(values=np.array([[1.0, np.nan], [np.nan, 1.0]]), kernel_id="k", point_count=2)


def test_describe_mentions_the_settings():
    cfg = one_qubit_cfg(mode="shots", shots=64)
    text = describe(cfg)
    assert "inversion" in text and "shots=64" in text and "qubits=1" in text


def test_random_params_binds():
    spec = FeatureMapSpec(2, 2)
    cfg = KernelEngineConfig(spec=spec, params=random_params(spec, seed=1))
    assert 0.0 <= kernel_value(cfg, [0.1, 0.2], [0.3, 0.4]) <= 1.0
