"""Kernel machines over precomputed Gram matrices.

Every fit function takes a square training Gram (a GramMatrix or a plain
array) and returns a small trained-model record; prediction functions take
rectangular new-versus-training kernel blocks. Nothing here evaluates
kernels, so quantum and classical kernels plug in interchangeably.

The SVC solves the soft-margin dual

    max_a  sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij
    s.t.   0 <= a_i <= C,  sum_i a_i y_i = 0

with SMO-style updates of the maximally KKT-violating pair. The SVR solves
the epsilon-insensitive dual by projected gradient ascent, and KRR solves
(K + reg I) a = y directly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .qkernel import GramMatrix

__all__ = [
    "SUPPORT_THRESHOLD",
    "TrainedSVC",
    "TrainedKRR",
    "TrainedSVR",
    "KpcaModel",
    "svc_fit",
    "svc_decision",
    "svc_predict",
    "krr_fit",
    "krr_predict",
    "svr_fit",
    "svr_predict",
    "kpca_fit",
    "kpca_transform",
    "kernel_kmeans",
]

SUPPORT_THRESHOLD = 1e-9


def _gram_values(K, name: str = "K") -> np.ndarray:
    values = K.values if isinstance(K, GramMatrix) else np.asarray(K, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError(f"{name} must be square, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{name} contains non-finite entries")
    if np.max(np.abs(values - values.T)) > 1e-8:
        raise ValueError(f"{name} is not symmetric")
    return values


def _kernel_id(K) -> str:
    return K.kernel_id if isinstance(K, GramMatrix) else "precomputed"


def _cross_values(K_new, m: int, name: str = "K_new") -> np.ndarray:
    if isinstance(K_new, GramMatrix):
        K_new = K_new.values
    values = np.asarray(K_new, dtype=float)
    if values.ndim == 1:
        values = values.reshape(1, -1)
    if values.ndim != 2 or values.shape[1] != m:
        raise ValueError(
            f"{name} must have one column per training point ({m}), got shape {values.shape}"
        )
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{name} contains non-finite entries")
    return values


def _binary_labels(y, m: int) -> np.ndarray:
    labels = np.asarray(y, dtype=float).reshape(-1)
    if labels.size != m:
        raise ValueError(f"got {labels.size} labels for {m} points")
    if not np.all(np.isin(labels, (-1.0, 1.0))):
        raise ValueError("labels must be exactly +1 or -1")
    if np.all(labels == 1.0) or np.all(labels == -1.0):
        raise ValueError("training needs both classes present")
    return labels


def _real_targets(y, m: int) -> np.ndarray:
    targets = np.asarray(y, dtype=float).reshape(-1)
    if targets.size != m:
        raise ValueError(f"got {targets.size} targets for {m} points")
    if not np.all(np.isfinite(targets)):
        raise ValueError("targets contain non-finite values")
    return targets


# support vector classification


@dataclass(frozen=True, eq=False)
class TrainedSVC:
    alphas: np.ndarray
    labels: np.ndarray
    bias: float
    support_indices: np.ndarray
    C: float
    kernel_id: str
    dual_objective: float


def svc_fit(K, y, C: float, *, zero_bias: bool = False, tol: float = 1e-6,
            max_iter: int = 200_000) -> TrainedSVC:
    """Train a soft-margin SVM on a precomputed Gram matrix."""
    values = _gram_values(K)
    m = values.shape[0]
    labels = _binary_labels(y, m)
    C = float(C)
    if not C > 0:
        raise ValueError(f"C must be positive, got {C}")

    alpha = np.zeros(m)
    g = np.zeros(m)  # g_i = sum_j alpha_j y_j K_ij
    converged = False
    for _ in range(max_iter):
        score = labels - g  # -y_i grad_i of the minimization form
        up = ((labels > 0) & (alpha < C)) | ((labels < 0) & (alpha > 0))
        low = ((labels > 0) & (alpha > 0)) | ((labels < 0) & (alpha < C))
        if not up.any() or not low.any():
            converged = True
            break
        i = int(np.flatnonzero(up)[np.argmax(score[up])])
        j = int(np.flatnonzero(low)[np.argmin(score[low])])
        gap = score[i] - score[j]
        if gap <= tol:
            converged = True
            break
        quad = values[i, i] + values[j, j] - 2.0 * values[i, j]
        quad = max(quad, 1e-12)
        # move t along the feasible pair direction: a_i += y_i t, a_j -= y_j t
        head_i = C - alpha[i] if labels[i] > 0 else alpha[i]
        head_j = alpha[j] if labels[j] > 0 else C - alpha[j]
        t = min(gap / quad, head_i, head_j)
        alpha[i] += labels[i] * t
        alpha[j] -= labels[j] * t
        g += t * (values[:, i] - values[:, j])
    if not converged:
        warnings.warn("svc_fit hit the iteration cap before reaching tolerance")

    alpha = np.clip(alpha, 0.0, C)
    g = values @ (alpha * labels)
    if zero_bias:
        bias = 0.0
    else:
        free = (alpha > SUPPORT_THRESHOLD) & (alpha < C - SUPPORT_THRESHOLD)
        bias = float(np.mean(labels[free] - g[free])) if free.any() else 0.0
    objective = float(alpha.sum() - 0.5 * np.dot(alpha * labels, g))
    alpha.flags.writeable = False
    return TrainedSVC(
        alphas=alpha,
        labels=labels,
        bias=bias,
        support_indices=np.flatnonzero(alpha > SUPPORT_THRESHOLD),
        C=C,
        kernel_id=_kernel_id(K),
        dual_objective=objective,
    )


def svc_decision(model: TrainedSVC, K_new) -> np.ndarray:
    """Decision values sum_i a_i y_i K(x, x_i) + b for each row of K_new."""
    values = _cross_values(K_new, model.alphas.size)
    return values @ (model.alphas * model.labels) + model.bias


def svc_predict(model: TrainedSVC, K_new) -> np.ndarray:
    """Class predictions in {-1, +1}; a decision value of 0 maps to +1."""
    return np.where(svc_decision(model, K_new) >= 0.0, 1.0, -1.0)


# kernel ridge regression


@dataclass(frozen=True, eq=False)
class TrainedKRR:
    alphas: np.ndarray
    reg: float
    kernel_id: str


def krr_fit(K, y, reg: float) -> TrainedKRR:
    """Solve (K + reg I) a = y through a symmetric positive-definite factorization."""
    values = _gram_values(K)
    m = values.shape[0]
    targets = _real_targets(y, m)
    reg = float(reg)
    if reg < 0 or not np.isfinite(reg):
        raise ValueError(f"reg must be a finite non-negative number, got {reg}")
    system = values + reg * np.eye(m)
    try:
        factor = cho_factor(system, lower=True)
    except LinAlgError as exc:
        raise ValueError(
            "kernel system is singular; add regularization (reg > 0)"
        ) from exc
    alpha = cho_solve(factor, targets)
    # one refinement pass keeps the residual at solver precision
    residual = targets - system @ alpha
    if np.max(np.abs(residual)) > 1e-11:
        alpha = alpha + cho_solve(factor, residual)
    alpha.flags.writeable = False
    return TrainedKRR(alphas=alpha, reg=reg, kernel_id=_kernel_id(K))


def krr_predict(model: TrainedKRR, K_new) -> np.ndarray:
    values = _cross_values(K_new, model.alphas.size)
    return values @ model.alphas


# epsilon-insensitive support vector regression


@dataclass(frozen=True, eq=False)
class TrainedSVR:
    coef: np.ndarray  # beta_i = alpha_i - alpha*_i
    bias: float
    epsilon: float
    C: float
    kernel_id: str


def _project_balanced(p0: np.ndarray, q0: np.ndarray, C: float) -> tuple[np.ndarray, np.ndarray]:
    """Project (p0, q0) onto {0 <= p, q <= C, sum p = sum q}.

    The shifted clip sums are piecewise linear in the shift, so the balancing
    shift is found exactly from the sorted breakpoints.
    """
    breakpoints = np.unique(np.concatenate([p0 - C, p0, -q0, C - q0]))
    shifted_p = np.clip(p0[None, :] - breakpoints[:, None], 0.0, C).sum(axis=1)
    shifted_q = np.clip(q0[None, :] + breakpoints[:, None], 0.0, C).sum(axis=1)
    balance = shifted_p - shifted_q
    idx = int(np.argmax(balance <= 0.0))
    if balance[idx] > 0.0:  # root beyond the last breakpoint: balance stays -mC..., unreachable
        nu = breakpoints[-1]
    elif idx == 0:
        nu = breakpoints[0]
    else:
        b0, b1 = balance[idx - 1], balance[idx]
        x0, x1 = breakpoints[idx - 1], breakpoints[idx]
        nu = x0 if b0 == b1 else x0 + (x1 - x0) * b0 / (b0 - b1)
    return np.clip(p0 - nu, 0.0, C), np.clip(q0 + nu, 0.0, C)


def svr_fit(K, y, C: float, epsilon: float, *, tol: float = 1e-5,
            max_iter: int = 50_000) -> TrainedSVR:
    """Train epsilon-insensitive SVR by projected gradient ascent on the dual."""
    values = _gram_values(K)
    m = values.shape[0]
    targets = _real_targets(y, m)
    C = float(C)
    epsilon = float(epsilon)
    if not C > 0:
        raise ValueError(f"C must be positive, got {C}")
    if epsilon < 0 or not np.isfinite(epsilon):
        raise ValueError(f"epsilon must be finite and non-negative, got {epsilon}")

    lam_max = float(np.linalg.eigvalsh(values).max())
    step = 1.0 / (2.0 * max(lam_max, 0.0) + 1e-9)
    p = np.zeros(m)
    q = np.zeros(m)
    converged = False
    for _ in range(max_iter):
        k_beta = values @ (p - q)
        grad_p = k_beta - targets + epsilon
        grad_q = -k_beta + targets + epsilon
        p_new, q_new = _project_balanced(p - step * grad_p, q - step * grad_q, C)
        moved = max(np.max(np.abs(p_new - p)), np.max(np.abs(q_new - q)))
        p, q = p_new, q_new
        if moved / step <= tol:
            converged = True
            break
    if not converged:
        warnings.warn("svr_fit hit the iteration cap before reaching tolerance")

    beta = p - q
    predictions = values @ beta
    at_bound = 1e-7 * max(C, 1.0)
    free = (np.abs(beta) > at_bound) & (np.abs(beta) < C - at_bound)
    if free.any():
        signs = np.sign(beta[free])
        bias = float(np.mean(targets[free] - predictions[free] - epsilon * signs))
    else:
        lower, upper = -np.inf, np.inf
        for i in range(m):
            slack = targets[i] - predictions[i]
            if beta[i] >= C - at_bound:
                upper = min(upper, slack - epsilon)
            elif beta[i] <= -C + at_bound:
                lower = max(lower, slack + epsilon)
            else:
                lower = max(lower, slack - epsilon)
                upper = min(upper, slack + epsilon)
        if not np.isfinite(lower):
            lower = upper
        if not np.isfinite(upper):
            upper = lower
        bias = float((lower + upper) / 2.0) if np.isfinite(lower) else 0.0
    beta.flags.writeable = False
    return TrainedSVR(coef=beta, bias=bias, epsilon=epsilon, C=C, kernel_id=_kernel_id(K))


def svr_predict(model: TrainedSVR, K_new) -> np.ndarray:
    values = _cross_values(K_new, model.coef.size)
    return values @ model.coef + model.bias


# kernel principal component analysis


@dataclass(frozen=True, eq=False)
class KpcaModel:
    eigenvalues: np.ndarray  # kept components, descending
    eigenvectors: np.ndarray  # one column per kept component
    col_means: np.ndarray
    total_mean: float
    n_components: int
    train_projections: np.ndarray
    kernel_id: str


EIGENVALUE_CUTOFF = 1e-10


def kpca_fit(K, n_components: int) -> KpcaModel:
    """Eigendecompose the doubly centered Gram and keep the top components."""
    values = _gram_values(K)
    m = values.shape[0]
    n_components = int(n_components)
    if n_components < 1:
        raise ValueError(f"n_components must be >= 1, got {n_components}")
    col_means = values.mean(axis=0)
    total_mean = float(values.mean())
    centered = values - col_means[None, :] - col_means[:, None] + total_mean
    eigenvalues, eigenvectors = np.linalg.eigh((centered + centered.T) / 2.0)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = eigenvalues[order]
    eigenvectors = eigenvectors[:, order]
    available = int(np.sum(eigenvalues > EIGENVALUE_CUTOFF))
    if n_components > available:
        raise ValueError(
            f"requested {n_components} components but the centered kernel "
            f"has rank {available}"
        )
    kept_values = eigenvalues[:n_components]
    kept_vectors = eigenvectors[:, :n_components]
    projections = centered @ kept_vectors / np.sqrt(kept_values)
    return KpcaModel(
        eigenvalues=kept_values,
        eigenvectors=kept_vectors,
        col_means=col_means,
        total_mean=total_mean,
        n_components=n_components,
        train_projections=projections,
        kernel_id=_kernel_id(K),
    )


def kpca_transform(model: KpcaModel, K_new) -> np.ndarray:
    """Project new points given their kernel rows against the training set."""
    values = _cross_values(K_new, model.col_means.size)
    row_means = values.mean(axis=1)
    centered = values - row_means[:, None] - model.col_means[None, :] + model.total_mean
    return centered @ model.eigenvectors / np.sqrt(model.eigenvalues)


# kernel k-means


def kernel_kmeans(K, n_clusters: int, seed: int, max_iter: int = 100,
                  return_objective_trace: bool = False):
    """Lloyd iterations with implicit feature-space centroids.

    Squared distance of point i to the centroid of cluster c is
    K_ii - (2/|c|) sum_{j in c} K_ij + (1/|c|^2) sum_{j,l in c} K_jl.
    Initial centers come from a seeded kmeans++ pass on kernel distances;
    clusters that empty out are re-seeded with the farthest point.
    """
    values = _gram_values(K)
    m = values.shape[0]
    n_clusters = int(n_clusters)
    if not 1 <= n_clusters <= m:
        raise ValueError(f"n_clusters must be in [1, {m}], got {n_clusters}")
    rng = np.random.default_rng(int(seed) % (1 << 64))
    diag = np.diag(values).copy()

    def point_dists(index: int) -> np.ndarray:
        return np.maximum(diag + diag[index] - 2.0 * values[:, index], 0.0)

    chosen = [int(rng.integers(m))]
    closest = point_dists(chosen[0])
    while len(chosen) < n_clusters:
        total = closest.sum()
        if total <= 1e-15:
            nxt = next(i for i in range(m) if i not in chosen)
        else:
            nxt = int(rng.choice(m, p=closest / total))
        chosen.append(nxt)
        closest = np.minimum(closest, point_dists(nxt))

    centers = np.asarray(chosen)
    assign = np.argmin(
        diag[:, None] + diag[centers][None, :] - 2.0 * values[:, centers], axis=1
    )

    def centroid_dists(assignment: np.ndarray) -> np.ndarray:
        dists = np.full((m, n_clusters), np.inf)
        for c in range(n_clusters):
            members = np.flatnonzero(assignment == c)
            if members.size == 0:
                continue
            sums = values[:, members].sum(axis=1)
            total = values[np.ix_(members, members)].sum()
            dists[:, c] = diag - 2.0 * sums / members.size + total / members.size**2
        return np.maximum(dists, 0.0)

    def repair_empty(assignment: np.ndarray) -> np.ndarray:
        assignment = assignment.copy()
        while True:
            present = set(assignment.tolist())
            empty = [c for c in range(n_clusters) if c not in present]
            if not empty:
                return assignment
            dists = centroid_dists(assignment)
            contrib = dists[np.arange(m), assignment]
            sizes = np.bincount(assignment, minlength=n_clusters)
            movable = sizes[assignment] >= 2
            candidates = np.flatnonzero(movable)
            farthest = int(candidates[np.argmax(contrib[candidates])])
            assignment[farthest] = empty[0]

    assign = repair_empty(assign)
    dists = centroid_dists(assign)
    trace = [float(dists[np.arange(m), assign].sum())]
    for _ in range(max_iter):
        new_assign = repair_empty(np.argmin(dists, axis=1))
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        dists = centroid_dists(assign)
        trace.append(float(dists[np.arange(m), assign].sum()))
    if return_objective_trace:
        return assign, trace
    return assign
