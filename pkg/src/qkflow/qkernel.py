"""Quantum kernel evaluation on the statevector simulator.

The kernel of two points is the squared overlap of their encoded states,

    k(x, x') = |<0...0| U(x')^dag U(x) |0...0>|^2,

computed either by the inversion test (run U(x), undo with U(x')^dag, read
the all-zeros probability) or by the swap test (prepare both states and take
the squared inner product; a shot-sampled ancilla gives p0 = 1/2 + k/2, so
the estimate is 2*p0_hat - 1 clamped to [0, 1]).

Exact mode computes probabilities from amplitudes. Shots mode samples the
corresponding measurement with a deterministic stream per (seed, i, j) pair,
so Gram assembly is reproducible regardless of evaluation order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .featuremap import FeatureMapSpec, build_encoding_circuit, param_count
from .statevector import (
    Circuit,
    StateVector,
    adjoint,
    apply_circuit,
    inner_product,
    new_zero_state,
    probability_all_zeros,
    rng_entropy,
    sample_measurements,
)

__all__ = [
    "MODES",
    "CIRCUIT_KINDS",
    "KernelEngineConfig",
    "GramMatrix",
    "kernel_value",
    "gram_matrix",
    "cross_gram",
    "worker_count",
]

MODES = ("exact", "shots")
CIRCUIT_KINDS = ("inversion", "swap")

THREADS_ENV_VAR = "QKFLOW_THREADS"


@dataclass(frozen=True, eq=False)
class KernelEngineConfig:
    """Everything needed to evaluate one quantum kernel family.

    `params` may be left as None for configs that act as templates (the
    aligner binds candidate vectors via dataclasses.replace); evaluation
    requires a bound vector.
    """

    spec: FeatureMapSpec
    params: np.ndarray | None
    mode: str = "exact"
    shots: int | None = None
    seed: int = 0
    circuit_kind: str = "inversion"

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.circuit_kind not in CIRCUIT_KINDS:
            raise ValueError(
                f"circuit_kind must be one of {CIRCUIT_KINDS}, got {self.circuit_kind!r}"
            )
        if self.mode == "shots":
            if self.shots is None or int(self.shots) < 1:
                raise ValueError("shots mode needs a positive shot count")
            object.__setattr__(self, "shots", int(self.shots))
        object.__setattr__(self, "seed", int(self.seed))
        if self.params is not None:
            lam = np.array(self.params, dtype=float).reshape(-1)
            if lam.size != param_count(self.spec):
                raise ValueError(
                    f"params has length {lam.size}, spec needs {param_count(self.spec)}"
                )
            if not np.all(np.isfinite(lam)):
                raise ValueError("params contains non-finite values")
            lam.flags.writeable = False
            object.__setattr__(self, "params", lam)


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Square kernel matrix plus the identity of the kernel that made it."""

    values: np.ndarray
    kernel_id: str
    point_count: int

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"Gram matrix must be square, got shape {values.shape}")
        if values.shape[0] != self.point_count:
            raise ValueError(
                f"point_count {self.point_count} does not match shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("Gram matrix contains non-finite entries")
        object.__setattr__(self, "values", values)


def describe(cfg: KernelEngineConfig) -> str:
    """Stable one-line identifier for kernel provenance fields."""
    spec = cfg.spec
    parts = [
        "quantum",
        cfg.circuit_kind,
        cfg.mode if cfg.mode == "exact" else f"shots={cfg.shots}",
        f"qubits={spec.n_qubits}",
        f"layers={spec.n_layers}",
        f"data={spec.data_axis}",
        f"trainable={spec.trainable_axis}",
        f"entangle={spec.entanglement}",
        f"scale={spec.data_scaling:g}",
    ]
    return ":".join(parts)


def worker_count() -> int:
    """Resolve the Gram evaluation thread cap from QKFLOW_THREADS.

    Unset or 0 means auto; auto currently evaluates sequentially because
    pair evaluation is dominated by small-array work that does not benefit
    from pool fan-out at supported problem sizes.
    """
    raw = os.environ.get(THREADS_ENV_VAR, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}") from exc
    if n < 0:
        raise ValueError(f"{THREADS_ENV_VAR} must be >= 0, got {n}")
    return n if n >= 1 else 1


def _require_params(cfg: KernelEngineConfig) -> np.ndarray:
    if cfg.params is None:
        raise ValueError("kernel evaluation needs a bound parameter vector")
    return cfg.params


def _as_points(data, name: str) -> np.ndarray:
    points = np.asarray(data, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D array of points")
    if not np.all(np.isfinite(points)):
        raise ValueError(f"{name} contains non-finite values")
    return points


def _forward_state(cfg: KernelEngineConfig, point: np.ndarray) -> StateVector:
    circuit = build_encoding_circuit(cfg.spec, point, _require_params(cfg))
    return apply_circuit(new_zero_state(cfg.spec.n_qubits), circuit)


def _adjoint_circuit(cfg: KernelEngineConfig, point: np.ndarray) -> Circuit:
    return adjoint(build_encoding_circuit(cfg.spec, point, _require_params(cfg)))


def _clamp01(value: float) -> float:
    return min(max(value, 0.0), 1.0)


def _pair_seed(seed: int, i: int, j: int) -> int:
    stream = np.random.SeedSequence(rng_entropy(seed), spawn_key=(i, j))
    return int(stream.generate_state(1, np.uint64)[0])


def _inversion_value(
    cfg: KernelEngineConfig, fwd: StateVector, adj: Circuit, seed: int
) -> float:
    final = apply_circuit(fwd, adj)
    if cfg.mode == "exact":
        return _clamp01(probability_all_zeros(final))
    counts = sample_measurements(final, cfg.shots, seed)
    zeros = "0" * cfg.spec.n_qubits
    return counts.get(zeros, 0) / cfg.shots


def _swap_value(
    cfg: KernelEngineConfig, fwd: StateVector, other: StateVector, seed: int
) -> float:
    fidelity = _clamp01(abs(inner_product(other, fwd)) ** 2)
    if cfg.mode == "exact":
        return fidelity
    p_zero = 0.5 + 0.5 * fidelity
    rng = np.random.default_rng(rng_entropy(seed))
    successes = int(rng.binomial(cfg.shots, p_zero))
    return _clamp01(2.0 * successes / cfg.shots - 1.0)


def kernel_value(cfg: KernelEngineConfig, point_a, point_b) -> float:
    """Evaluate k(point_a, point_b) under `cfg`."""
    a = np.asarray(point_a, dtype=float).reshape(-1)
    b = np.asarray(point_b, dtype=float).reshape(-1)
    if a.size != b.size:
        raise ValueError(f"points have different dimensions: {a.size} vs {b.size}")
    if a.size < 1:
        raise ValueError("points must have at least one feature")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("points contain non-finite values")
    fwd = _forward_state(cfg, a)
    if cfg.circuit_kind == "inversion":
        return _inversion_value(cfg, fwd, _adjoint_circuit(cfg, b), cfg.seed)
    return _swap_value(cfg, fwd, _forward_state(cfg, b), cfg.seed)


def _map_rows(tasks, workers):
    if workers == 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(task) for task in tasks]
        return [future.result() for future in futures]


def gram_matrix(cfg: KernelEngineConfig, data) -> GramMatrix:
    """Kernel matrix of a point set against itself.

    Exact mode evaluates only the upper triangle and mirrors it; the
    diagonal is set to 1 without evaluation. Shots mode evaluates every
    pair independently because sampling noise is not symmetric.
    """
    points = _as_points(data, "data")
    m = points.shape[0]
    states = [_forward_state(cfg, points[i]) for i in range(m)]
    inversion = cfg.circuit_kind == "inversion"
    adjoints = [_adjoint_circuit(cfg, points[j]) for j in range(m)] if inversion else None
    values = np.empty((m, m), dtype=float)

    def pair(i: int, j: int, seed: int) -> float:
        if inversion:
            return _inversion_value(cfg, states[i], adjoints[j], seed)
        return _swap_value(cfg, states[i], states[j], seed)

    if cfg.mode == "exact":
        def upper_row(i):
            return lambda: [pair(i, j, cfg.seed) for j in range(i + 1, m)]

        rows = _map_rows([upper_row(i) for i in range(m)], worker_count())
        for i in range(m):
            values[i, i] = 1.0
            for offset, entry in enumerate(rows[i]):
                j = i + 1 + offset
                values[i, j] = entry
                values[j, i] = entry
    else:
        def full_row(i):
            return lambda: [pair(i, j, _pair_seed(cfg.seed, i, j)) for j in range(m)]

        rows = _map_rows([full_row(i) for i in range(m)], worker_count())
        for i in range(m):
            values[i, :] = rows[i]

    return GramMatrix(values=values, kernel_id=describe(cfg), point_count=m)


def cross_gram(cfg: KernelEngineConfig, data_new, data_train) -> np.ndarray:
    """Rectangular kernel block K[i][j] = k(data_new[i], data_train[j])."""
    new_points = _as_points(data_new, "data_new")
    train_points = _as_points(data_train, "data_train")
    if new_points.shape[1] != train_points.shape[1]:
        raise ValueError(
            f"feature dimensions differ: {new_points.shape[1]} vs {train_points.shape[1]}"
        )
    n, m = new_points.shape[0], train_points.shape[0]
    new_states = [_forward_state(cfg, new_points[i]) for i in range(n)]
    inversion = cfg.circuit_kind == "inversion"
    if inversion:
        train_ops = [_adjoint_circuit(cfg, train_points[j]) for j in range(m)]
    else:
        train_ops = [_forward_state(cfg, train_points[j]) for j in range(m)]

    def pair(i: int, j: int) -> float:
        seed = cfg.seed if cfg.mode == "exact" else _pair_seed(cfg.seed, i, j)
        if inversion:
            return _inversion_value(cfg, new_states[i], train_ops[j], seed)
        return _swap_value(cfg, new_states[i], train_ops[j], seed)

    def row(i):
        return lambda: [pair(i, j) for j in range(m)]

    rows = _map_rows([row(i) for i in range(n)], worker_count())
    return np.array(rows, dtype=float)
