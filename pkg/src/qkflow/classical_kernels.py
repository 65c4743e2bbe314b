"""Classical kernel functions, including a trainable-metric Gaussian.

Four kernel families over real feature vectors:

    linear            k(x, x') = x . x' + c
    polynomial        k(x, x') = (x . x' + c)^degree
    exponential       k(x, x') = exp(-sigma * sqrt(1 - x . x'))
    gaussian_metric   k(x, x') = exp(-gamma * ||A (x - x')||^2)

The exponential kernel is only defined for x . x' <= 1; callers normalize
points to the unit sphere first (see cli.normalize_unit_sphere). The
gaussian_metric transform A defaults to the identity, which recovers a plain
Gaussian; a learned A is what metric-learning training produces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .qkernel import GramMatrix

__all__ = [
    "CLASSICAL_KINDS",
    "ClassicalKernel",
    "euclidean_distance",
    "eval_classical",
    "classical_gram",
    "classical_cross",
    "describe_classical",
]

CLASSICAL_KINDS = ("linear", "polynomial", "exponential", "gaussian_metric")

_DOT_SLACK = 1e-9  # tolerated float overshoot of x . x' past 1 after normalization


@dataclass(frozen=True, eq=False)
class ClassicalKernel:
    """One classical kernel with its hyperparameters bound."""

    kind: str
    c: float = 0.0
    degree: int = 2
    sigma: float = 1.0
    gamma: float = 1.0
    transform: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind not in CLASSICAL_KINDS:
            raise ValueError(f"kind must be one of {CLASSICAL_KINDS}, got {self.kind!r}")
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "degree", int(self.degree))
        if not math.isfinite(self.c):
            raise ValueError("offset c must be finite")
        if self.kind == "polynomial" and self.degree < 1:
            raise ValueError(f"polynomial degree must be >= 1, got {self.degree}")
        if self.kind == "exponential" and not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.kind == "gaussian_metric" and not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.transform is not None:
            if self.kind != "gaussian_metric":
                raise ValueError("only gaussian_metric takes a transform matrix")
            matrix = np.array(self.transform, dtype=float)
            if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
                raise ValueError(
                    f"transform must be a square matrix, got shape {matrix.shape}"
                )
            if not np.all(np.isfinite(matrix)):
                raise ValueError("transform contains non-finite entries")
            matrix.flags.writeable = False
            object.__setattr__(self, "transform", matrix)

    @classmethod
    def linear(cls, c: float = 0.0) -> "ClassicalKernel":
        return cls(kind="linear", c=c)

    @classmethod
    def polynomial(cls, c: float = 0.0, degree: int = 2) -> "ClassicalKernel":
        return cls(kind="polynomial", c=c, degree=degree)

    @classmethod
    def exponential(cls, sigma: float = 1.0) -> "ClassicalKernel":
        return cls(kind="exponential", sigma=sigma)

    @classmethod
    def gaussian_metric(
        cls, gamma: float = 1.0, transform: np.ndarray | None = None
    ) -> "ClassicalKernel":
        return cls(kind="gaussian_metric", gamma=gamma, transform=transform)


def describe_classical(kernel: ClassicalKernel) -> str:
    if kernel.kind == "linear":
        return f"classical:linear:c={kernel.c:g}"
    if kernel.kind == "polynomial":
        return f"classical:polynomial:c={kernel.c:g}:degree={kernel.degree}"
    if kernel.kind == "exponential":
        return f"classical:exponential:sigma={kernel.sigma:g}"
    size = "identity" if kernel.transform is None else "x".join(map(str, kernel.transform.shape))
    return f"classical:gaussian_metric:gamma={kernel.gamma:g}:transform={size}"


def euclidean_distance(point_a, point_b) -> float:
    """d(x, x') = sqrt(sum_i (x_i - x'_i)^2)."""
    a, b = _pair(point_a, point_b)
    return float(np.sqrt(np.sum((a - b) ** 2)))


def _pair(point_a, point_b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(point_a, dtype=float).reshape(-1)
    b = np.asarray(point_b, dtype=float).reshape(-1)
    if a.size != b.size:
        raise ValueError(f"points have different dimensions: {a.size} vs {b.size}")
    if a.size < 1:
        raise ValueError("points must have at least one feature")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("points contain non-finite values")
    return a, b


def _check_exponential_domain(dots: np.ndarray, sigma: float) -> np.ndarray:
    if np.max(dots) > 1.0 + _DOT_SLACK:
        raise ValueError(
            "exponential kernel needs x . x' <= 1; "
            "normalize the data to the unit sphere first"
        )
    return np.exp(-sigma * np.sqrt(np.maximum(0.0, 1.0 - dots)))


def _metric_rows(kernel: ClassicalKernel, points: np.ndarray) -> np.ndarray:
    if kernel.transform is None:
        return points
    if kernel.transform.shape[1] != points.shape[1]:
        raise ValueError(
            f"transform is {kernel.transform.shape[0]}x{kernel.transform.shape[1]} "
            f"but points have {points.shape[1]} features"
        )
    return points @ kernel.transform.T


def eval_classical(kernel: ClassicalKernel, point_a, point_b) -> float:
    """Evaluate one kernel entry."""
    a, b = _pair(point_a, point_b)
    if kernel.kind == "linear":
        return float(np.dot(a, b) + kernel.c)
    if kernel.kind == "polynomial":
        return float((np.dot(a, b) + kernel.c) ** kernel.degree)
    if kernel.kind == "exponential":
        dot = np.array(np.dot(a, b), dtype=float)
        return float(_check_exponential_domain(dot, kernel.sigma))
    diff = a - b
    if kernel.transform is not None:
        if kernel.transform.shape[1] != a.size:
            raise ValueError(
                f"transform is {kernel.transform.shape[0]}x{kernel.transform.shape[1]} "
                f"but points have {a.size} features"
            )
        diff = kernel.transform @ diff
    return float(np.exp(-kernel.gamma * np.dot(diff, diff)))


def _as_matrix(data, name: str) -> np.ndarray:
    points = np.asarray(data, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D array of points")
    if not np.all(np.isfinite(points)):
        raise ValueError(f"{name} contains non-finite values")
    return points


def classical_gram(kernel: ClassicalKernel, data) -> GramMatrix:
    """Kernel matrix of a point set against itself (upper triangle mirrored)."""
    points = _as_matrix(data, "data")
    m = points.shape[0]
    values = np.empty((m, m), dtype=float)
    for i in range(m):
        for j in range(i, m):
            values[i, j] = eval_classical(kernel, points[i], points[j])
            values[j, i] = values[i, j]
    return GramMatrix(values=values, kernel_id=describe_classical(kernel), point_count=m)


def classical_cross(kernel: ClassicalKernel, data_new, data_train) -> np.ndarray:
    """Rectangular block K[i][j] = k(data_new[i], data_train[j])."""
    new_points = _as_matrix(data_new, "data_new")
    train_points = _as_matrix(data_train, "data_train")
    if new_points.shape[1] != train_points.shape[1]:
        raise ValueError(
            f"feature dimensions differ: {new_points.shape[1]} vs {train_points.shape[1]}"
        )
    if kernel.kind == "gaussian_metric":
        z_new = _metric_rows(kernel, new_points)
        z_train = _metric_rows(kernel, train_points)
        return np.exp(-kernel.gamma * cdist(z_new, z_train, "sqeuclidean"))
    dots = new_points @ train_points.T
    if kernel.kind == "linear":
        return dots + kernel.c
    if kernel.kind == "polynomial":
        return (dots + kernel.c) ** kernel.degree
    return _check_exponential_domain(dots, kernel.sigma)
