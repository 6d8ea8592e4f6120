"""Gram-triplet assembly and the regularized spectral solvers.

The estimator projects an operator defined through a data expectation
onto the span of p kernel sections anchored at subsampled landmarks
(a Nystrom basis), then solves the resulting p x p generalized
eigenproblem.  Assembly comes in two flavours:

* a generic brute-force route that evaluates an arbitrary bilinear-form
  integrand H(i, j, x) pointwise (the oracle everything else is tested
  against), and
* structured fast paths for the dot-product and distance kernel families,
  which reduce the gradient inner products to Gram-matrix algebra in
  O(n p^2 + n p d) flops.

All empirical matrices are averaged (divided by n); generalized
eigenvalues are invariant to that common scaling.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import repeat

import numpy as np
import scipy.linalg

from .kernels import KernelSpec, cross_gram, grad_ratio, pairwise_sqdist, q_eval, q_prime
from . import storage


@dataclass(frozen=True)
class GramTriplet:
    """Empirical p x p matrices of the bilinear form (L) and the two basis
    inner products (Phi, Psi), averaged over n_samples points."""

    L: np.ndarray
    Phi: np.ndarray
    Psi: np.ndarray
    n_samples: int


@dataclass(frozen=True)
class SpectralEstimate:
    """Eigenvalues plus coefficient rows over a landmark basis.

    Row i of left_coeffs holds the expansion of the i-th estimated
    eigenfunction: f_i(x) = sum_j A[i, j] k_{landmark_j}(x).  For the
    symmetric operators built here right_coeffs is the same matrix.
    """

    values: np.ndarray
    left_coeffs: np.ndarray
    right_coeffs: np.ndarray
    landmarks: np.ndarray
    kernel: KernelSpec
    epsilon: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite eigenvalues in estimate")
        if np.any(np.diff(self.values) < 0):
            raise ValueError("eigenvalues must be sorted ascending")


class NystromBasis:
    """Kernel sections k_{x_i} anchored at landmark points, as a sequence of
    scalar callables for the generic assembly route."""

    def __init__(self, kernel: KernelSpec, landmarks):
        self.kernel = kernel
        self.landmarks = np.asarray(landmarks, dtype=float)
        self._rows = [row.tolist() for row in self.landmarks]

    def __len__(self):
        return len(self._rows)

    def __getitem__(self, i):
        from .kernels import kernel_eval

        row = self._rows[i]
        return lambda x: kernel_eval(self.kernel, row, x)


def _basis_matrix(basis, rows) -> np.ndarray:
    mat = np.empty((len(basis), len(rows)))
    for i in range(len(basis)):
        f = basis[i]
        mat[i] = [f(x) for x in rows]
    return mat


def build_gram_generic(h, phi_basis, psi_basis, data) -> GramTriplet:
    """Assemble (L, Phi, Psi) by brute force.

    ``h`` is the bilinear-form integrand: a callable (i, j, x) -> real
    closing over the two bases, evaluated at every data point; basis entries
    are scalar callables.  Data points are handed to the callables as plain
    Python lists.  O(p^2 n) evaluations of h -- this is the oracle route,
    not the fast one.
    """
    data = np.asarray(data, dtype=float)
    n = data.shape[0]
    rows = [row.tolist() for row in data]
    p_left = len(phi_basis)
    p_right = len(psi_basis)
    L = np.empty((p_left, p_right))
    for i in range(p_left):
        for j in range(p_right):
            # sum(map(...)) keeps the per-point iteration at C level; the
            # Python-loop rescan only runs to localize a bad value
            acc = sum(map(h, repeat(i), repeat(j), rows))
            if not math.isfinite(acc):
                for k, x in enumerate(rows):
                    if not math.isfinite(h(i, j, x)):
                        raise ValueError(
                            f"non-finite H value at basis pair ({i}, {j}), data index {k}")
                raise ValueError(f"non-finite H accumulation at basis pair ({i}, {j})")
            L[i, j] = acc / n
    F = _basis_matrix(phi_basis, rows)
    Phi = (F @ F.T) / n
    if psi_basis is phi_basis:
        Psi = Phi
    else:
        G = _basis_matrix(psi_basis, rows)
        Psi = (G @ G.T) / n
    return GramTriplet(L=L, Phi=Phi, Psi=Psi, n_samples=n)


def build_gram_laplacian_dot(kernel: KernelSpec, landmarks, data) -> GramTriplet:
    """Fast path for dot-product kernels.

    With X the landmark-data inner products and G the landmark Gram,
    Psi = q(X) q(X)^T / n and L = (q'(X) q'(X)^T / n) .* G.
    """
    if not kernel.is_dot:
        raise ValueError("dot-product fast path needs a dot-product kernel")
    landmarks = np.asarray(landmarks, dtype=float)
    data = np.asarray(data, dtype=float)
    n = data.shape[0]
    X = landmarks @ data.T
    G = landmarks @ landmarks.T
    qX = q_eval(kernel, X)
    qpX = q_prime(kernel, X)
    Psi = (qX @ qX.T) / n
    L = ((qpX @ qpX.T) / n) * G
    return GramTriplet(L=L, Phi=Psi, Psi=Psi, n_samples=n)


def build_gram_laplacian_dist(kernel: KernelSpec, landmarks, data,
                              chunk_bytes: int = 3 * 10**7) -> GramTriplet:
    """Fast path for distance kernels.

    L_ij = (1/n) sum_k T_ik T_jk (x_k - y_i).(x_k - y_j) with T = q'(N)/N.
    The sum is accumulated as outer products of per-point gradient stacks,
    chunked over the data axis; this keeps L a sum of PSD terms instead of
    the cancellation-prone expanded form, so round-off cannot manufacture
    large negative eigenvalues.
    """
    if kernel.is_dot:
        raise ValueError("distance fast path needs a distance kernel")
    landmarks = np.asarray(landmarks, dtype=float)
    data = np.asarray(data, dtype=float)
    p, d = landmarks.shape
    n = data.shape[0]
    sq = pairwise_sqdist(landmarks, data)
    if kernel.family == "gauss":
        qN = np.exp(-sq / (2.0 * kernel.sigma ** 2))
    else:
        qN = np.exp(-np.sqrt(sq) / kernel.sigma)
    T = grad_ratio(kernel, sq)
    Psi = (qN @ qN.T) / n
    L = np.zeros((p, p))
    chunk = max(1, chunk_bytes // (8 * p * d))
    for a in range(0, n, chunk):
        b = min(a + chunk, n)
        stack = T[:, a:b, None] * (data[a:b][None, :, :] - landmarks[:, None, :])
        flat = stack.reshape(p, -1)
        L += flat @ flat.T
    L /= n
    L = 0.5 * (L + L.T)
    return GramTriplet(L=L, Phi=Psi, Psi=Psi, n_samples=n)


def build_gram_laplacian(kernel: KernelSpec, landmarks, data) -> GramTriplet:
    """Dispatch to the structured fast path matching the kernel family."""
    if kernel.is_dot:
        return build_gram_laplacian_dot(kernel, landmarks, data)
    return build_gram_laplacian_dist(kernel, landmarks, data)


def gevd(L: np.ndarray, Psi: np.ndarray, epsilon: float = 0.0):
    """Symmetric-definite generalized eigensolve of (L, Psi + eps I).

    Returns (values ascending, A) with A (Psi + eps I) A^T = I and
    A L A^T diagonal; rows of A are coefficient vectors.  Implemented by
    Cholesky whitening of the regularized mass matrix (LAPACK sygvd).
    """
    L = np.asarray(L, dtype=float)
    B = np.asarray(Psi, dtype=float) + epsilon * np.eye(len(Psi))
    try:
        values, vectors = scipy.linalg.eigh(L, B)
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError) as exc:
        raise ValueError(
            "mass matrix not positive definite; increase epsilon") from exc
    return values, vectors.T


def _invsqrt_psd(M: np.ndarray, epsilon: float) -> np.ndarray:
    # Pseudo-inverse square root; eigenvalues below the clip floor contribute
    # nothing, so near-null directions are discarded rather than amplified.
    vals, vecs = scipy.linalg.eigh(M)
    floor = max(epsilon, 1e-15 * max(vals.max(), 0.0))
    inv = np.where(vals > floor, 1.0 / np.sqrt(np.maximum(vals, floor)), 0.0)
    return (vecs * inv) @ vecs.T


def gsvd(L: np.ndarray, Phi: np.ndarray, Psi: np.ndarray, epsilon: float = 0.0):
    """Generalized SVD for possibly asymmetric bilinear forms.

    Computes the SVD of (Phi + eps I)^(-1/2) L (Psi + eps I)^(-1/2) = X S Y^T
    and back-transforms, so A L B^T = S with A (Phi + eps I) A^T =
    B (Psi + eps I) B^T = I on the kept directions.  Values come out
    descending (SVD convention).
    """
    L = np.asarray(L, dtype=float)
    p = len(L)
    Phi_r = np.asarray(Phi, dtype=float) + epsilon * np.eye(p)
    Psi_r = np.asarray(Psi, dtype=float) + epsilon * np.eye(L.shape[1])
    left = _invsqrt_psd(Phi_r, epsilon)
    right = _invsqrt_psd(Psi_r, epsilon)
    M = left @ L @ right
    X, S, Yt = np.linalg.svd(M)
    A = X.T @ left
    B = Yt @ right
    return S, A, B


def default_landmark_count(n: int) -> int:
    return int(math.ceil(math.sqrt(n)))


def default_epsilon(Psi: np.ndarray) -> float:
    return 1e-8 * float(np.trace(Psi)) / len(Psi)


def decompose(data, kernel: KernelSpec, p: int | None = None,
              epsilon: float | None = None, seed: int = 0) -> SpectralEstimate:
    """End-to-end spectral estimate on a dataset.

    Subsamples p landmarks uniformly without replacement (seeded), assembles
    the matching fast path, and solves the regularized eigenproblem.
    Defaults: p = ceil(sqrt(n)), epsilon = 1e-8 trace(Psi) / p.
    """
    data = np.asarray(data, dtype=float)
    n = data.shape[0]
    if p is None:
        p = default_landmark_count(n)
    if not 1 <= p <= n:
        raise ValueError(f"need 1 <= p <= n, got p={p}, n={n}")
    rng = np.random.default_rng(seed)
    idx = rng.choice(n, size=p, replace=False)
    landmarks = data[np.sort(idx)]
    if p > 1 and np.allclose(landmarks, landmarks[0]):
        warnings.warn("all landmarks identical; estimate spans a single section")
    triplet = build_gram_laplacian(kernel, landmarks, data)
    if epsilon is None:
        epsilon = default_epsilon(triplet.Psi)
    values, A = gevd(triplet.L, triplet.Psi, epsilon)
    return SpectralEstimate(values=values, left_coeffs=A, right_coeffs=A,
                            landmarks=landmarks, kernel=kernel, epsilon=epsilon)


def evaluate_eigenfunction(est: SpectralEstimate, i: int, x) -> float:
    """f_i(x) = sum_j A[i, j] k_{landmark_j}(x)."""
    if not 0 <= i < len(est.values):
        raise IndexError(f"eigenfunction index {i} out of range")
    col = cross_gram(est.kernel, est.landmarks, np.asarray(x, dtype=float)[None, :])
    return float(est.left_coeffs[i] @ col[:, 0])


def evaluate_eigenfunctions(est: SpectralEstimate, indices, data) -> np.ndarray:
    """Rows of estimated eigenfunction values over a dataset (len(indices) x n)."""
    indices = list(indices)
    if indices and (min(indices) < 0 or max(indices) >= len(est.values)):
        raise IndexError("eigenfunction index out of range")
    K = cross_gram(est.kernel, est.landmarks, np.asarray(data, dtype=float))
    return est.left_coeffs[indices] @ K


def empirical_orthogonality(est: SpectralEstimate, data, k: int) -> np.ndarray:
    """k x k matrix (1/m) sum_x f(x) f(x)^T of the first k estimated
    functions over the supplied data; near-identity means the functions
    stay orthonormal in L2."""
    if k > len(est.values):
        raise ValueError("k exceeds the number of estimated functions")
    F = evaluate_eigenfunctions(est, range(k), data)
    return (F @ F.T) / np.asarray(data).shape[0]


def save_estimate(path, est: SpectralEstimate) -> None:
    storage.save_arrays(
        path,
        {"values": est.values, "left_coeffs": est.left_coeffs,
         "right_coeffs": est.right_coeffs, "landmarks": est.landmarks},
        meta={"kernel": est.kernel.to_json_dict(), "epsilon": est.epsilon},
    )


def load_estimate(path) -> SpectralEstimate:
    arrays, meta = storage.load_arrays(path)
    return SpectralEstimate(
        values=arrays["values"], left_coeffs=arrays["left_coeffs"],
        right_coeffs=arrays["right_coeffs"], landmarks=arrays["landmarks"],
        kernel=KernelSpec.from_json(meta["kernel"]), epsilon=float(meta["epsilon"]),
    )


def estimate_to_json(est: SpectralEstimate) -> dict:
    """JSON form for small p; the binary container is preferred at scale."""
    return {"values": est.values.tolist(),
            "left_coeffs": est.left_coeffs.tolist(),
            "right_coeffs": est.right_coeffs.tolist(),
            "landmarks": est.landmarks.tolist(),
            "kernel": est.kernel.to_json_dict(),
            "epsilon": est.epsilon}


def estimate_from_json(obj: dict) -> SpectralEstimate:
    return SpectralEstimate(
        values=np.array(obj["values"], dtype=float),
        left_coeffs=np.array(obj["left_coeffs"], dtype=float),
        right_coeffs=np.array(obj["right_coeffs"], dtype=float),
        landmarks=np.array(obj["landmarks"], dtype=float),
        kernel=KernelSpec.from_json(obj["kernel"]),
        epsilon=float(obj["epsilon"]))


def triplet_to_json(triplet: GramTriplet) -> dict:
    return {"L": triplet.L.tolist(), "Phi": triplet.Phi.tolist(),
            "Psi": triplet.Psi.tolist(), "n_samples": triplet.n_samples}


def triplet_from_json(obj: dict) -> GramTriplet:
    return GramTriplet(L=np.array(obj["L"], dtype=float),
                       Phi=np.array(obj["Phi"], dtype=float),
                       Psi=np.array(obj["Psi"], dtype=float),
                       n_samples=int(obj["n_samples"]))


def save_triplet(path, triplet: GramTriplet) -> None:
    storage.save_arrays(
        path,
        {"L": triplet.L, "Phi": triplet.Phi, "Psi": triplet.Psi},
        meta={"n_samples": triplet.n_samples},
    )


def load_triplet(path) -> GramTriplet:
    arrays, meta = storage.load_arrays(path)
    return GramTriplet(L=arrays["L"], Phi=arrays["Phi"], Psi=arrays["Psi"],
                       n_samples=int(meta["n_samples"]))
