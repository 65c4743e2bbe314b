"""Trainable data-encoding circuits.

A feature map turns a classical point x into a circuit U(x; lambda) acting on
|0...0>. Each layer applies one trainable rotation and one data rotation per
qubit and then an optional CNOT entangler:

    for layer l:
        for qubit q:  trainable_axis(lambda[l * n_qubits + q]) on q
        for qubit q:  data_axis(data_scaling * x[(l * n_qubits + q) mod d]) on q
        entangler CNOTs (none / linear_chain / ring)

Features are consumed round-robin with a layer offset, so maps with more
rotation slots than input features reuse coordinates. Data points and
parameter vectors are plain 1-D float arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevector import Circuit, Gate, cnot

__all__ = [
    "DATA_AXES",
    "TRAINABLE_AXES",
    "ENTANGLEMENTS",
    "FeatureMapSpec",
    "param_count",
    "build_encoding_circuit",
    "random_params",
]

DATA_AXES = ("rx", "ry", "rz")
TRAINABLE_AXES = ("rx", "ry", "rz", "p")
ENTANGLEMENTS = ("none", "linear_chain", "ring")


@dataclass(frozen=True)
class FeatureMapSpec:
    """Static description of an encoding circuit family."""

    n_qubits: int
    n_layers: int
    data_axis: str = "rx"
    trainable_axis: str = "ry"
    entanglement: str = "linear_chain"
    data_scaling: float = 1.0

    def __post_init__(self) -> None:
        if int(self.n_qubits) < 1:
            raise ValueError(f"n_qubits must be >= 1, got {self.n_qubits}")
        if int(self.n_layers) < 1:
            raise ValueError(f"n_layers must be >= 1, got {self.n_layers}")
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        object.__setattr__(self, "n_layers", int(self.n_layers))
        object.__setattr__(self, "data_scaling", float(self.data_scaling))
        if self.data_axis not in DATA_AXES:
            raise ValueError(
                f"data_axis must be one of {DATA_AXES}, got {self.data_axis!r}"
            )
        if self.trainable_axis not in TRAINABLE_AXES:
            raise ValueError(
                f"trainable_axis must be one of {TRAINABLE_AXES}, got {self.trainable_axis!r}"
            )
        if self.entanglement not in ENTANGLEMENTS:
            raise ValueError(
                f"entanglement must be one of {ENTANGLEMENTS}, got {self.entanglement!r}"
            )
        if not np.isfinite(self.data_scaling):
            raise ValueError(f"data_scaling must be finite, got {self.data_scaling}")


def param_count(spec: FeatureMapSpec) -> int:
    """Number of trainable parameters: one per qubit per layer."""
    return spec.n_layers * spec.n_qubits


def _entangler_gates(spec: FeatureMapSpec) -> tuple[Gate, ...]:
    n = spec.n_qubits
    if spec.entanglement == "none" or n == 1:
        return ()
    chain = tuple(cnot(q, q + 1) for q in range(n - 1))
    if spec.entanglement == "linear_chain":
        return chain
    return chain + (cnot(n - 1, 0),)


def build_encoding_circuit(
    spec: FeatureMapSpec, data_point: np.ndarray, params: np.ndarray
) -> Circuit:
    """Bind one data point and one parameter vector into a concrete circuit."""
    point = np.asarray(data_point, dtype=float).reshape(-1)
    if point.size < 1:
        raise ValueError("data point must have at least one feature")
    if not np.all(np.isfinite(point)):
        raise ValueError("data point contains non-finite values")
    lam = np.asarray(params, dtype=float).reshape(-1)
    expected = param_count(spec)
    if lam.size != expected:
        raise ValueError(
            f"parameter vector has length {lam.size}, spec needs {expected}"
        )
    if not np.all(np.isfinite(lam)):
        raise ValueError("parameter vector contains non-finite values")

    d = point.size
    entangler = _entangler_gates(spec)
    gates: list[Gate] = []
    for layer in range(spec.n_layers):
        base = layer * spec.n_qubits
        for q in range(spec.n_qubits):
            gates.append(Gate(spec.trainable_axis, (q,), (float(lam[base + q]),)))
        for q in range(spec.n_qubits):
            angle = spec.data_scaling * float(point[(base + q) % d])
            gates.append(Gate(spec.data_axis, (q,), (angle,)))
        gates.extend(entangler)
    return Circuit(spec.n_qubits, tuple(gates))


def random_params(spec: FeatureMapSpec, seed: int) -> np.ndarray:
    """Draw an initial parameter vector uniformly from [-pi, pi]."""
    rng = np.random.default_rng(int(seed) % (1 << 64))
    return rng.uniform(-np.pi, np.pi, size=param_count(spec))
