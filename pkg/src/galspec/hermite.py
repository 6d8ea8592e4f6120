"""Derivative-aware kernel regression and its plain ridge baseline.

Hermite regression fits f(x) = sum_i alpha_i k_{y_i}(x) to both values
and gradients at the data by least squares:

    min_alpha sum_k (f(x_k) - v_k)^2 + ||grad f(x_k) - t_k||^2 + eps ||alpha||^2.

The normal equations reuse the Gram fast paths: A = L + Psi as raw sums
(no 1/n; alpha is invariant to a common scale of A and b at eps = 0, and
eps is documented on the raw-sum scale), and b collects value and
gradient projections onto each kernel section.  The plain baseline drops
every gradient block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import storage
from .galerkin import build_gram_laplacian
from .kernels import KernelSpec, cross_gram, grad_ratio, pairwise_sqdist, q_prime


@dataclass(frozen=True)
class HermiteProblem:
    """Interpolation targets: values and gradients at each data point."""

    data: np.ndarray
    values: np.ndarray
    gradients: np.ndarray

    def __post_init__(self):
        for name in ("data", "values", "gradients"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n, d = self.data.shape
        if self.values.shape != (n,) or self.gradients.shape != (n, d):
            raise ValueError("inconsistent problem shapes")
        for arr in (self.data, self.values, self.gradients):
            if not np.all(np.isfinite(arr)):
                raise ValueError("non-finite problem entries")


@dataclass(frozen=True)
class HermiteModel:
    """Fitted expansion coefficients over a landmark kernel basis."""

    alpha: np.ndarray
    landmarks: np.ndarray
    kernel: KernelSpec
    epsilon: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.alpha)):
            raise ValueError("non-finite coefficients")


def _value_gram(kernel: KernelSpec, landmarks: np.ndarray, data: np.ndarray) -> np.ndarray:
    return cross_gram(kernel, landmarks, data)


def _gradient_rhs(kernel: KernelSpec, landmarks: np.ndarray,
                  data: np.ndarray, gradients: np.ndarray) -> np.ndarray:
    """b_i contribution sum_k <grad k_{y_i}(x_k), t_k> via the structured
    gradient formulas of each family."""
    if kernel.is_dot:
        X = landmarks @ data.T
        return (q_prime(kernel, X) * (landmarks @ gradients.T)).sum(axis=1)
    sq = pairwise_sqdist(landmarks, data)
    T = grad_ratio(kernel, sq)
    point_dots = np.einsum("kd,kd->k", data, gradients)
    return T @ point_dots - (T * (landmarks @ gradients.T)).sum(axis=1)


def _solve_ridge(A: np.ndarray, b: np.ndarray, epsilon: float) -> np.ndarray:
    M = A + epsilon * np.eye(len(A))
    try:
        return scipy.linalg.solve(M, b, assume_a="pos")
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError) as exc:
        raise ValueError("normal matrix is singular; set epsilon > 0") from exc


def default_ridge_epsilon(A: np.ndarray) -> float:
    return 1e-10 * float(np.trace(A)) / len(A)


def _pick_landmarks(data: np.ndarray, p: int, seed: int) -> np.ndarray:
    n = data.shape[0]
    if not 1 <= p <= n:
        raise ValueError(f"need 1 <= p <= n, got p={p}, n={n}")
    rng = np.random.default_rng(seed)
    return data[np.sort(rng.choice(n, size=p, replace=False))]


def hermite_fit(problem: HermiteProblem, kernel: KernelSpec, p: int,
                epsilon: float | None = None, seed: int = 0) -> HermiteModel:
    """Fit values and gradients jointly.

    A = L + Psi as raw sums over the data (the Gram fast paths are averaged,
    so they are scaled back by n); b_i = sum_k k_{y_i}(x_k) v_k +
    <grad k_{y_i}(x_k), t_k>.  O(n p^2 + n p d).
    """
    landmarks = _pick_landmarks(problem.data, p, seed)
    triplet = build_gram_laplacian(kernel, landmarks, problem.data)
    A = triplet.n_samples * (triplet.L + triplet.Psi)
    b = _value_gram(kernel, landmarks, problem.data) @ problem.values
    b = b + _gradient_rhs(kernel, landmarks, problem.data, problem.gradients)
    if epsilon is None:
        epsilon = default_ridge_epsilon(A)
    alpha = _solve_ridge(A, b, epsilon)
    return HermiteModel(alpha=alpha, landmarks=landmarks, kernel=kernel,
                        epsilon=epsilon)


def plain_ridge_fit(data, values, kernel: KernelSpec, p: int,
                    epsilon: float | None = None, seed: int = 0) -> HermiteModel:
    """Value-only ridge regression in the same basis (all gradient blocks
    removed: A = Psi raw sums, b = value Gram times targets)."""
    data = np.asarray(data, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.shape != (data.shape[0],):
        raise ValueError("inconsistent value shape")
    landmarks = _pick_landmarks(data, p, seed)
    K = _value_gram(kernel, landmarks, data)
    A = K @ K.T
    b = K @ values
    if epsilon is None:
        epsilon = default_ridge_epsilon(A)
    alpha = _solve_ridge(A, b, epsilon)
    return HermiteModel(alpha=alpha, landmarks=landmarks, kernel=kernel,
                        epsilon=epsilon)


def hermite_predict(model: HermiteModel, x) -> float:
    """f(x) = sum_i alpha_i k_{landmark_i}(x) at a single point."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.landmarks.shape[1],):
        raise ValueError(
            f"expected a vector of dimension {model.landmarks.shape[1]}")
    col = cross_gram(model.kernel, model.landmarks, x[None, :])
    return float(model.alpha @ col[:, 0])


def hermite_predict_batch(model: HermiteModel, data) -> np.ndarray:
    data = np.asarray(data, dtype=float)
    if data.shape[1] != model.landmarks.shape[1]:
        raise ValueError(
            f"expected points of dimension {model.landmarks.shape[1]}")
    return model.alpha @ cross_gram(model.kernel, model.landmarks, data)


def save_problem_csv(path, problem: HermiteProblem) -> None:
    """Rows are [x (d columns), y, t (d columns)]."""
    table = np.hstack([problem.data, problem.values[:, None], problem.gradients])
    storage.save_dataset_csv(path, table)


def _split_problem(table: np.ndarray) -> HermiteProblem:
    w = table.shape[1]
    if w < 3 or w % 2 == 0:
        raise ValueError(f"expected 2d+1 columns [x, y, t], got {w}")
    d = (w - 1) // 2
    return HermiteProblem(data=table[:, :d].copy(),
                          values=table[:, d].copy(),
                          gradients=table[:, d + 1:].copy())


def load_problem(path) -> HermiteProblem:
    """Reads the [x, y, t] CSV layout or a binary container with arrays
    data/values/gradients."""
    with open(path, "rb") as f:
        head = f.read(len(storage.MAGIC))
    if head == storage.MAGIC:
        arrays, _ = storage.load_arrays(path)
        return HermiteProblem(data=arrays["data"], values=arrays["values"],
                              gradients=arrays["gradients"])
    return _split_problem(storage.load_dataset_csv(path))


def save_model(path, model: HermiteModel) -> None:
    storage.save_json(path, {
        "alpha": model.alpha.tolist(),
        "landmarks": model.landmarks.tolist(),
        "kernel": model.kernel.to_json_dict(),
        "epsilon": model.epsilon,
    })


def load_model(path) -> HermiteModel:
    obj = storage.load_json(path)
    return HermiteModel(alpha=np.array(obj["alpha"], dtype=float),
                        landmarks=np.array(obj["landmarks"], dtype=float),
                        kernel=KernelSpec.from_json(obj["kernel"]),
                        epsilon=float(obj["epsilon"]))
