"""Closed-form validation targets and data samplers.

On the uniform sphere S^(d-1) the energy operator is diagonalized by
spherical harmonics: degree-s harmonics share the eigenvalue

    mu_s = s (s + d - 2),

with multiplicity N(d, s) = ((2s + d - 2) / s) * C(s + d - 3, s - 1).
The s = 0 constant mode (eigenvalue 0) is excluded throughout, since the
error metric works with inverse eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np


@dataclass(frozen=True)
class GroundTruthSpectrum:
    """Ascending nonzero eigenvalues as (value, multiplicity) blocks.

    The last block may be truncated so the flattened length is exactly the
    requested count.
    """

    dimension: int
    entries: tuple

    @property
    def values(self) -> np.ndarray:
        out = []
        for value, mult in self.entries:
            out.extend([value] * mult)
        return np.array(out, dtype=float)

    def to_json(self) -> dict:
        return {"dimension": self.dimension,
                "entries": [[value, mult] for value, mult in self.entries]}

    @classmethod
    def from_json(cls, obj: dict) -> "GroundTruthSpectrum":
        return cls(dimension=int(obj["dimension"]),
                   entries=tuple((float(v), int(m)) for v, m in obj["entries"]))


def harmonic_multiplicity(d: int, s: int) -> int:
    """Number of independent degree-s spherical harmonics on S^(d-1)."""
    return (2 * s + d - 2) * comb(s + d - 3, s - 1) // s


def sphere_spectrum(d: int, k: int) -> GroundTruthSpectrum:
    """First k nonzero eigenvalues of the sphere energy operator, with
    multiplicity."""
    if d < 2:
        raise ValueError("sphere needs d >= 2")
    if k < 1:
        raise ValueError("k >= 1 required")
    entries = []
    total = 0
    s = 1
    while total < k:
        mu = float(s * (s + d - 2))
        mult = min(harmonic_multiplicity(d, s), k - total)
        entries.append((mu, mult))
        total += mult
        s += 1
    return GroundTruthSpectrum(dimension=d, entries=tuple(entries))


def surrogate_error(truth: GroundTruthSpectrum, estimated_inverses, k: int) -> float:
    """Normalized sum of absolute inverse-eigenvalue errors.

    Returns sum_i |1/lambda_i - v_i| / sum_i 1/lambda_i over the first k
    modes, so the trivial estimator v = 0 scores exactly 1.
    """
    tv = truth.values
    if len(tv) < k:
        raise ValueError("ground truth provides fewer than k values")
    v = np.asarray(estimated_inverses, dtype=float)
    if v.shape != (k,):
        raise ValueError(f"expected {k} estimated inverses, got shape {v.shape}")
    tinv = 1.0 / tv[:k]
    return float(np.sum(np.abs(tinv - v)) / np.sum(tinv))


def estimate_to_inverses(est, k: int, zero_tol: float | None = None):
    """Adapter from solver output to the inverse-eigenvalue metric.

    Sorts eigenvalues ascending, drops all values with |v| <= zero_tol
    (numerical zeros and the constant-function mode), clamps surviving
    negatives to zero_tol, and returns the first k inverses.  Default
    zero_tol is 1e-8 * max|v|.

    Returns (inverses, n_padded): when fewer than k values survive, the
    tail is padded with 0 (the trivial-estimator convention) and n_padded
    reports how many entries were padded.
    """
    values = np.sort(np.asarray(getattr(est, "values", est), dtype=float))
    if len(values) < k + 1:
        raise ValueError(f"need at least k+1={k + 1} values, got {len(values)}")
    if zero_tol is None:
        peak = np.max(np.abs(values)) if len(values) else 0.0
        zero_tol = 1e-8 * peak
    kept = values[np.abs(values) > zero_tol]
    kept = np.maximum(kept, zero_tol if zero_tol > 0 else np.finfo(float).tiny)
    inv = 1.0 / kept[:k]
    n_padded = k - len(inv)
    if n_padded > 0:
        inv = np.concatenate([inv, np.zeros(n_padded)])
    return inv, n_padded


def sample_sphere(n: int, d: int, seed: int) -> np.ndarray:
    """n uniform points on the unit sphere in R^d (normalized Gaussians)."""
    if d < 2:
        raise ValueError("sphere sampling needs d >= 2")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, d))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def sample_two_moons(n: int, noise: float, seed: int) -> np.ndarray:
    """Two interleaved half-circle arcs in R^2 with Gaussian noise.

    The first ceil(n/2) rows belong to the upper moon (unit arc around the
    origin), the rest to the lower moon offset by (1, 0.5); row order is the
    class label convention used by downstream demos.
    """
    rng = np.random.default_rng(seed)
    n_upper = (n + 1) // 2
    n_lower = n - n_upper
    theta_u = rng.uniform(0.0, np.pi, n_upper)
    theta_l = rng.uniform(0.0, np.pi, n_lower)
    upper = np.column_stack([np.cos(theta_u), np.sin(theta_u)])
    lower = np.column_stack([1.0 - np.cos(theta_l), 0.5 - np.sin(theta_l)])
    pts = np.vstack([upper, lower])
    if noise > 0:
        pts = pts + noise * rng.standard_normal((n, 2))
    return pts


def two_moons_labels(n: int) -> np.ndarray:
    """Class labels matching the :func:`sample_two_moons` row convention."""
    labels = np.zeros(n)
    labels[(n + 1) // 2:] = 1.0
    return labels


def sample_gaussian(n: int, d: int, seed: int) -> np.ndarray:
    """n i.i.d. standard-normal points in R^d."""
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, d))
