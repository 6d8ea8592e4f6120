"""Graph-Laplacian baseline: normalized weights, the quadratic-energy
matrix, and its Galerkin projection onto a kernel landmark basis.

The baseline estimates the same spectra from the dense pairwise energy
sum_ij w_ij (f(x_i) - f(x_j))^2 instead of a gradient bilinear form.  It
needs the full n x n weight matrix, so it is capped at moderate n, and
its eigenvalue scale is arbitrary up to a constant; comparisons go
through rescale_eigenvalues, which pins the sum of the first k estimated
eigenvalues to a known constant.  That rescaling is for the graph route
only; Galerkin estimates are never rescaled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .galerkin import SpectralEstimate, default_epsilon, default_landmark_count, gevd
from .kernels import KernelSpec, cross_gram, pairwise_sqdist


MEMORY_CAP = 2 * 10**4


@dataclass(frozen=True)
class GraphWeights:
    """Symmetrically normalized weights W = D^(-1/2) W_raw D^(-1/2).

    ``alpha`` is the Gaussian scale used to build the raw weights, or None
    when the raw weights came from a kernel instead.
    """

    W: np.ndarray
    alpha: float | None


def _normalize(W_raw: np.ndarray, alpha: float | None) -> GraphWeights:
    W_raw = 0.5 * (W_raw + W_raw.T)
    if np.any(W_raw < 0) or not np.all(np.isfinite(W_raw)):
        raise ValueError("raw weights must be finite and nonnegative")
    deg = W_raw.sum(axis=1)
    if np.any(deg <= 0):
        raise ValueError("zero-degree vertex; weights cannot be normalized")
    inv_sqrt = 1.0 / np.sqrt(deg)
    W = W_raw * inv_sqrt[:, None] * inv_sqrt[None, :]
    return GraphWeights(W=W, alpha=alpha)


def weight_matrix(data, alpha: float) -> GraphWeights:
    """Normalized Gaussian weights exp(-alpha ||x_i - x_j||^2).

    The diagonal of the raw matrix is kept at its formula value 1; the
    (f_i - f_i)^2 term vanishes in the energy, and keeping it makes every
    degree strictly positive.
    """
    data = np.asarray(data, dtype=float)
    if data.shape[0] < 2:
        raise ValueError("need at least 2 points")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    sq = pairwise_sqdist(data, data)
    return _normalize(np.exp(-alpha * sq), alpha)


def weight_matrix_from_kernel(data, kernel: KernelSpec) -> GraphWeights:
    """Normalized weights using kernel evaluations k_{x_i}(x_j) as the raw
    matrix (the same-kernel weighting scheme).  Kernels taking negative
    values on the data are rejected."""
    data = np.asarray(data, dtype=float)
    if data.shape[0] < 2:
        raise ValueError("need at least 2 points")
    return _normalize(cross_gram(kernel, data, data), None)


def graph_energy_matrix(weights: GraphWeights) -> np.ndarray:
    """L_g = 2 (D_w - W), so f^T L_g f = sum_ij w_ij (f_i - f_j)^2 exactly.

    The factor 2 is a fixed convention here; any constant scale is absorbed
    by the eigenvalue rescaling applied to this baseline.
    """
    W = weights.W
    L = -2.0 * W
    L[np.diag_indices_from(L)] += 2.0 * W.sum(axis=1)
    return L


def graph_decompose(data, kernel: KernelSpec, alpha: float | None,
                    p: int | None = None, epsilon: float | None = None,
                    seed: int = 0, memory_cap: int = MEMORY_CAP) -> SpectralEstimate:
    """Galerkin projection of the graph energy onto p kernel sections.

    Builds the dense n x n energy matrix, projects it through the
    evaluation matrix E_ki = k_{landmark_i}(x_k) as L_proj = E^T L_g E / n,
    and solves gevd(L_proj, Psi) with the same mass matrix as the gradient
    route.  alpha = None selects same-kernel weights.  O(n^2 p + n p^2 +
    p^3) time and O(n^2) memory, hence the cap.
    """
    data = np.asarray(data, dtype=float)
    n = data.shape[0]
    if n > memory_cap:
        raise ValueError(
            f"n={n} exceeds the graph memory cap {memory_cap}; "
            "the dense weight matrix needs O(n^2) memory")
    if p is None:
        p = default_landmark_count(n)
    if not 1 <= p <= n:
        raise ValueError(f"need 1 <= p <= n, got p={p}, n={n}")
    rng = np.random.default_rng(seed)
    landmarks = data[np.sort(rng.choice(n, size=p, replace=False))]
    if alpha is None:
        weights = weight_matrix_from_kernel(data, kernel)
    else:
        weights = weight_matrix(data, alpha)
    L_g = graph_energy_matrix(weights)
    K = cross_gram(kernel, landmarks, data)
    L_proj = (K @ L_g @ K.T) / n
    L_proj = 0.5 * (L_proj + L_proj.T)
    Psi = (K @ K.T) / n
    if epsilon is None:
        epsilon = default_epsilon(Psi)
    values, A = gevd(L_proj, Psi, epsilon)
    return SpectralEstimate(values=values, left_coeffs=A, right_coeffs=A,
                            landmarks=landmarks, kernel=kernel, epsilon=epsilon)


def rescale_eigenvalues(values, true_sum: float, k: int) -> np.ndarray:
    """Scale all eigenvalues so the first k sum to true_sum."""
    values = np.asarray(values, dtype=float)
    if not 1 <= k <= len(values):
        raise ValueError(f"need 1 <= k <= {len(values)}, got k={k}")
    s = float(values[:k].sum())
    if s <= 0:
        raise ValueError("first k eigenvalues have nonpositive sum; cannot rescale")
    return values * (true_sum / s)


def default_alpha_grid() -> tuple:
    """Gaussian weight scales sigma in {.01, .1, 1, 10, 100} as alpha =
    1/(2 sigma^2), plus None for the same-kernel scheme."""
    sigmas = (0.01, 0.1, 1.0, 10.0, 100.0)
    return tuple(1.0 / (2.0 * s * s) for s in sigmas) + (None,)
