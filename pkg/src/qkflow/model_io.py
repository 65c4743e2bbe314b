"""Model and embedding persistence.

Everything is one JSON document: top-level fields format_version, kind,
kernel, payload, pretraining (null unless the model came from a pretrained
embedding), and seed. Serialization sorts keys and indents consistently so
save -> load -> save is byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .classical_kernels import (
    ClassicalKernel,
    classical_cross,
    classical_gram,
    describe_classical,
)
from .featuremap import FeatureMapSpec
from .kernel_methods import KpcaModel, TrainedKRR, TrainedSVC, TrainedSVR
from .qkernel import GramMatrix, KernelEngineConfig, cross_gram, describe, gram_matrix
from .training import EmbeddingArtifact

__all__ = [
    "FORMAT_VERSION",
    "MODEL_KINDS",
    "ModelFile",
    "save_model",
    "load_model",
    "kernel_to_json",
    "kernel_from_json",
    "kernel_identifier",
    "evaluate_gram",
    "evaluate_cross",
    "embedding_to_model_file",
    "embedding_from_model_file",
    "svc_to_payload",
    "svc_from_payload",
    "krr_to_payload",
    "krr_from_payload",
    "svr_to_payload",
    "svr_from_payload",
    "kpca_to_payload",
    "kpca_from_payload",
]

FORMAT_VERSION = 1
MODEL_KINDS = ("svc", "krr", "svr", "kpca", "embedding")


@dataclass(frozen=True, eq=False)
class ModelFile:
    format_version: int
    kind: str
    kernel: dict
    payload: dict
    pretraining: dict | None
    seed: int

    def __post_init__(self) -> None:
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"kind must be one of {MODEL_KINDS}, got {self.kind!r}")


def _require(mapping, field: str):
    if not isinstance(mapping, dict) or field not in mapping:
        raise ValueError(f"model file missing field {field!r}")
    return mapping[field]


def save_model(model_file: ModelFile, path) -> None:
    doc = {
        "format_version": model_file.format_version,
        "kind": model_file.kind,
        "kernel": model_file.kernel,
        "payload": model_file.payload,
        "pretraining": model_file.pretraining,
        "seed": model_file.seed,
    }
    text = json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def load_model(path) -> ModelFile:
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: model file must be a JSON object")
    version = _require(doc, "format_version")
    if version != FORMAT_VERSION:
        raise ValueError(
            f"{path}: unsupported format_version {version!r}, this build reads {FORMAT_VERSION}"
        )
    kind = _require(doc, "kind")
    kernel = _require(doc, "kernel")
    payload = _require(doc, "payload")
    pretraining = _require(doc, "pretraining")
    seed = _require(doc, "seed")
    if not isinstance(kernel, dict):
        raise ValueError(f"{path}: field 'kernel' must be an object")
    if not isinstance(payload, dict):
        raise ValueError(f"{path}: field 'payload' must be an object")
    if pretraining is not None and not isinstance(pretraining, dict):
        raise ValueError(f"{path}: field 'pretraining' must be an object or null")
    return ModelFile(
        format_version=version,
        kind=kind,
        kernel=kernel,
        payload=payload,
        pretraining=pretraining,
        seed=int(seed),
    )


# kernel descriptors


def kernel_to_json(kernel) -> dict:
    """Serialize a classical kernel or a bound quantum kernel config."""
    if isinstance(kernel, ClassicalKernel):
        desc = {"type": "classical", "kind": kernel.kind}
        if kernel.kind == "linear":
            desc["c"] = kernel.c
        elif kernel.kind == "polynomial":
            desc["c"] = kernel.c
            desc["degree"] = kernel.degree
        elif kernel.kind == "exponential":
            desc["sigma"] = kernel.sigma
        else:
            desc["gamma"] = kernel.gamma
            desc["transform"] = None if kernel.transform is None else kernel.transform.tolist()
        return desc
    if isinstance(kernel, KernelEngineConfig):
        if kernel.params is None:
            raise ValueError("cannot serialize an unbound quantum kernel template")
        spec = kernel.spec
        return {
            "type": "quantum",
            "n_qubits": spec.n_qubits,
            "n_layers": spec.n_layers,
            "data_axis": spec.data_axis,
            "trainable_axis": spec.trainable_axis,
            "entanglement": spec.entanglement,
            "data_scaling": spec.data_scaling,
            "params": kernel.params.tolist(),
            "mode": kernel.mode,
            "shots": kernel.shots,
            "seed": kernel.seed,
            "circuit_kind": kernel.circuit_kind,
        }
    raise TypeError(f"cannot serialize kernel of type {type(kernel).__name__}")


def kernel_from_json(desc: dict):
    """Rebuild the kernel object a descriptor dict describes."""
    kind = _require(desc, "type")
    if kind == "classical":
        name = _require(desc, "kind")
        if name == "linear":
            return ClassicalKernel.linear(c=float(_require(desc, "c")))
        if name == "polynomial":
            return ClassicalKernel.polynomial(
                c=float(_require(desc, "c")), degree=int(_require(desc, "degree"))
            )
        if name == "exponential":
            return ClassicalKernel.exponential(sigma=float(_require(desc, "sigma")))
        if name == "gaussian_metric":
            transform = _require(desc, "transform")
            return ClassicalKernel.gaussian_metric(
                gamma=float(_require(desc, "gamma")),
                transform=None if transform is None else np.asarray(transform, dtype=float),
            )
        raise ValueError(f"unknown classical kernel kind {name!r}")
    if kind == "quantum":
        spec = FeatureMapSpec(
            n_qubits=int(_require(desc, "n_qubits")),
            n_layers=int(_require(desc, "n_layers")),
            data_axis=_require(desc, "data_axis"),
            trainable_axis=_require(desc, "trainable_axis"),
            entanglement=_require(desc, "entanglement"),
            data_scaling=float(_require(desc, "data_scaling")),
        )
        shots = _require(desc, "shots")
        return KernelEngineConfig(
            spec=spec,
            params=np.asarray(_require(desc, "params"), dtype=float),
            mode=_require(desc, "mode"),
            shots=None if shots is None else int(shots),
            seed=int(_require(desc, "seed")),
            circuit_kind=_require(desc, "circuit_kind"),
        )
    raise ValueError(f"unknown kernel type {kind!r}")


def kernel_identifier(kernel) -> str:
    if isinstance(kernel, ClassicalKernel):
        return describe_classical(kernel)
    return describe(kernel)


def evaluate_gram(kernel, data) -> GramMatrix:
    if isinstance(kernel, ClassicalKernel):
        return classical_gram(kernel, data)
    return gram_matrix(kernel, data)


def evaluate_cross(kernel, data_new, data_train) -> np.ndarray:
    if isinstance(kernel, ClassicalKernel):
        return classical_cross(kernel, data_new, data_train)
    return cross_gram(kernel, data_new, data_train)


# embedding files


def embedding_to_model_file(artifact: EmbeddingArtifact, seed: int) -> ModelFile:
    bound = KernelEngineConfig(spec=artifact.spec, params=artifact.lam)
    return ModelFile(
        format_version=FORMAT_VERSION,
        kind="embedding",
        kernel=kernel_to_json(bound),
        payload={},
        pretraining={
            "task": artifact.task,
            "loss_best": artifact.loss_best,
            "seed": artifact.seed,
            "iterations": artifact.iterations,
        },
        seed=int(seed),
    )


def embedding_from_model_file(model_file: ModelFile) -> EmbeddingArtifact:
    if model_file.kind != "embedding":
        raise ValueError(f"expected an embedding file, got kind {model_file.kind!r}")
    kernel = kernel_from_json(model_file.kernel)
    if not isinstance(kernel, KernelEngineConfig):
        raise ValueError("embedding file must describe a quantum kernel")
    meta = model_file.pretraining or {}
    return EmbeddingArtifact(
        spec=kernel.spec,
        lam=kernel.params,
        loss_best=float(_require(meta, "loss_best")),
        task=str(_require(meta, "task")),
        seed=int(_require(meta, "seed")),
        iterations=int(_require(meta, "iterations")),
    )


# model payloads


def svc_to_payload(model: TrainedSVC, train_features: np.ndarray, normalize: bool) -> dict:
    return {
        "alphas": model.alphas.tolist(),
        "labels": model.labels.tolist(),
        "bias": model.bias,
        "support_indices": [int(i) for i in model.support_indices],
        "C": model.C,
        "dual_objective": model.dual_objective,
        "kernel_id": model.kernel_id,
        "train_features": np.asarray(train_features, dtype=float).tolist(),
        "normalize": bool(normalize),
    }


def svc_from_payload(payload: dict) -> tuple[TrainedSVC, np.ndarray, bool]:
    model = TrainedSVC(
        alphas=np.asarray(_require(payload, "alphas"), dtype=float),
        labels=np.asarray(_require(payload, "labels"), dtype=float),
        bias=float(_require(payload, "bias")),
        support_indices=np.asarray(_require(payload, "support_indices"), dtype=int),
        C=float(_require(payload, "C")),
        kernel_id=str(_require(payload, "kernel_id")),
        dual_objective=float(_require(payload, "dual_objective")),
    )
    train = np.asarray(_require(payload, "train_features"), dtype=float)
    return model, train, bool(_require(payload, "normalize"))


def krr_to_payload(model: TrainedKRR, train_features: np.ndarray, normalize: bool) -> dict:
    return {
        "alphas": model.alphas.tolist(),
        "reg": model.reg,
        "kernel_id": model.kernel_id,
        "train_features": np.asarray(train_features, dtype=float).tolist(),
        "normalize": bool(normalize),
    }


def krr_from_payload(payload: dict) -> tuple[TrainedKRR, np.ndarray, bool]:
    model = TrainedKRR(
        alphas=np.asarray(_require(payload, "alphas"), dtype=float),
        reg=float(_require(payload, "reg")),
        kernel_id=str(_require(payload, "kernel_id")),
    )
    train = np.asarray(_require(payload, "train_features"), dtype=float)
    return model, train, bool(_require(payload, "normalize"))


def svr_to_payload(model: TrainedSVR, train_features: np.ndarray, normalize: bool) -> dict:
    return {
        "coef": model.coef.tolist(),
        "bias": model.bias,
        "epsilon": model.epsilon,
        "C": model.C,
        "kernel_id": model.kernel_id,
        "train_features": np.asarray(train_features, dtype=float).tolist(),
        "normalize": bool(normalize),
    }


def svr_from_payload(payload: dict) -> tuple[TrainedSVR, np.ndarray, bool]:
    model = TrainedSVR(
        coef=np.asarray(_require(payload, "coef"), dtype=float),
        bias=float(_require(payload, "bias")),
        epsilon=float(_require(payload, "epsilon")),
        C=float(_require(payload, "C")),
        kernel_id=str(_require(payload, "kernel_id")),
    )
    train = np.asarray(_require(payload, "train_features"), dtype=float)
    return model, train, bool(_require(payload, "normalize"))


def kpca_to_payload(model: KpcaModel, train_features: np.ndarray, normalize: bool) -> dict:
    return {
        "eigenvalues": model.eigenvalues.tolist(),
        "eigenvectors": model.eigenvectors.tolist(),
        "col_means": model.col_means.tolist(),
        "total_mean": model.total_mean,
        "n_components": model.n_components,
        "train_projections": model.train_projections.tolist(),
        "kernel_id": model.kernel_id,
        "train_features": np.asarray(train_features, dtype=float).tolist(),
        "normalize": bool(normalize),
    }


def kpca_from_payload(payload: dict) -> tuple[KpcaModel, np.ndarray, bool]:
    model = KpcaModel(
        eigenvalues=np.asarray(_require(payload, "eigenvalues"), dtype=float),
        eigenvectors=np.asarray(_require(payload, "eigenvectors"), dtype=float),
        col_means=np.asarray(_require(payload, "col_means"), dtype=float),
        total_mean=float(_require(payload, "total_mean")),
        n_components=int(_require(payload, "n_components")),
        train_projections=np.asarray(_require(payload, "train_projections"), dtype=float),
        kernel_id=str(_require(payload, "kernel_id")),
    )
    train = np.asarray(_require(payload, "train_features"), dtype=float)
    return model, train, bool(_require(payload, "normalize"))
