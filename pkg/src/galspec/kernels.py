"""Kernel families: profiles q, derivatives q', and the structured
gradient inner products that make Gram assembly cheap.

Three families are supported:

* ``poly``  -- dot-product kernel  k_x(y) = (c0 + c1 * x.y)**s
* ``exp``   -- exponential distance kernel  k_x(y) = exp(-||x-y|| / sigma)
* ``gauss`` -- Gaussian distance kernel  k_x(y) = exp(-||x-y||**2 / (2 sigma**2))

The scalar operations (``kernel_eval``, ``grad_inner``, ``grad_dot``)
deliberately use plain Python arithmetic: they sit in tight loops inside the
brute-force assembly oracle, where numpy scalar overhead dominates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

FAMILIES = ("poly", "exp", "gauss")

# Below this center-to-point distance the exponential kernel is treated as
# having zero gradient (the profile is not differentiable at 0).
COINCIDENT_TOL = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family together with its hyperparameters.

    ``degree``, ``offset`` and ``scale`` only apply to the ``poly`` family,
    ``sigma`` only to the distance families.
    """

    family: str
    degree: int = 3
    offset: float = 1.0
    scale: float = 1.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family == "poly":
            if int(self.degree) < 1 or self.degree != int(self.degree):
                raise ValueError("poly degree must be a positive integer")
        else:
            if not self.sigma > 0:
                raise ValueError("distance kernels need sigma > 0")

    @property
    def is_dot(self) -> bool:
        return self.family == "poly"

    def to_json_dict(self) -> dict:
        if self.family == "poly":
            return {"family": "poly", "degree": int(self.degree),
                    "offset": self.offset, "scale": self.scale}
        return {"family": self.family, "sigma": self.sigma}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, source) -> "KernelSpec":
        obj = json.loads(source) if isinstance(source, (str, bytes)) else source
        if not isinstance(obj, dict) or "family" not in obj:
            raise ValueError("kernel JSON must be an object with a 'family' key")
        allowed = {"family", "degree", "offset", "scale", "sigma"}
        unknown = set(obj) - allowed
        if unknown:
            raise ValueError(f"unknown kernel fields: {sorted(unknown)}")
        return cls(**obj)


def q_eval(kernel: KernelSpec, t):
    """Profile value q(t).  Accepts scalars or numpy arrays.

    For distance families t is the (nonnegative) distance.
    """
    fam = kernel.family
    if isinstance(t, (float, int)):
        if not math.isfinite(t):
            raise ValueError("non-finite profile argument")
        if fam == "poly":
            return (kernel.offset + kernel.scale * t) ** kernel.degree
        if t < 0:
            raise ValueError("distance profiles need t >= 0")
        if fam == "exp":
            return math.exp(-t / kernel.sigma)
        return math.exp(-t * t / (2.0 * kernel.sigma ** 2))
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("non-finite profile argument")
    if fam == "poly":
        return (kernel.offset + kernel.scale * t) ** kernel.degree
    if np.any(t < 0):
        raise ValueError("distance profiles need t >= 0")
    if fam == "exp":
        return np.exp(-t / kernel.sigma)
    return np.exp(-(t ** 2) / (2.0 * kernel.sigma ** 2))


def q_prime(kernel: KernelSpec, t):
    """Profile derivative q'(t).  Same conventions as :func:`q_eval`."""
    fam = kernel.family
    if isinstance(t, (float, int)):
        if not math.isfinite(t):
            raise ValueError("non-finite profile argument")
        if fam == "poly":
            s, c0, c1 = kernel.degree, kernel.offset, kernel.scale
            return s * c1 * (c0 + c1 * t) ** (s - 1)
        if t < 0:
            raise ValueError("distance profiles need t >= 0")
        sig = kernel.sigma
        if fam == "exp":
            return -math.exp(-t / sig) / sig
        return -(t / sig ** 2) * math.exp(-t * t / (2.0 * sig ** 2))
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("non-finite profile argument")
    if fam == "poly":
        s, c0, c1 = kernel.degree, kernel.offset, kernel.scale
        return s * c1 * (c0 + c1 * t) ** (s - 1)
    if np.any(t < 0):
        raise ValueError("distance profiles need t >= 0")
    sig = kernel.sigma
    if fam == "exp":
        return -np.exp(-t / sig) / sig
    return -(t / sig ** 2) * np.exp(-(t ** 2) / (2.0 * sig ** 2))


# Bound locally because the scalar kernel functions sit inside O(p^2 n)
# oracle loops where attribute lookups dominate the arithmetic.
_exp = math.exp
_sqrt = math.sqrt
_ndarray = np.ndarray


def _as_seq(v):
    return v.tolist() if isinstance(v, _ndarray) else v


def kernel_eval(kernel: KernelSpec, x, y) -> float:
    """Pointwise kernel value k_x(y)."""
    if type(x) is not list:
        x = _as_seq(x)
    if type(y) is not list:
        y = _as_seq(y)
    if len(x) != len(y):
        raise ValueError("dimension mismatch")
    fam = kernel.family
    if fam == "poly":
        t = 0.0
        for xi, yi in zip(x, y):
            t += xi * yi
        return (kernel.offset + kernel.scale * t) ** kernel.degree
    s2 = 0.0
    for xi, yi in zip(x, y):
        u = xi - yi
        s2 += u * u
    sig = kernel.sigma
    if fam == "exp":
        return _exp(-_sqrt(s2) / sig)
    return _exp(-s2 / (2.0 * sig ** 2))


def grad_inner(kernel: KernelSpec, y, z, x) -> float:
    """<grad k_y(x), grad k_z(x)> through the chain-rule factorization.

    Dot family:      q'(x.y) q'(x.z) (y.z)
    Distance family: [q'(||x-y||)/||x-y||] [q'(||x-z||)/||x-z||] (x-y).(x-z)

    The Gaussian ratio q'(r)/r = -exp(-r**2/(2 sigma**2))/sigma**2 is computed
    directly, so no 0/0 arises; the exponential kernel returns 0 when x
    coincides with a center (non-differentiable point).
    """
    if type(y) is not list:
        y = _as_seq(y)
    if type(z) is not list:
        z = _as_seq(z)
    if type(x) is not list:
        x = _as_seq(x)
    if len(x) != len(y) or len(x) != len(z):
        raise ValueError("dimension mismatch")
    fam = kernel.family
    if fam == "poly":
        sxy = 0.0
        sxz = 0.0
        syz = 0.0
        for xi, yi, zi in zip(x, y, z):
            sxy += xi * yi
            sxz += xi * zi
            syz += yi * zi
        s, c0, c1 = kernel.degree, kernel.offset, kernel.scale
        sc = s * c1
        # grouped so the y/z factors commute exactly in floating point
        return (sc * (c0 + c1 * sxy) ** (s - 1)) * (sc * (c0 + c1 * sxz) ** (s - 1)) * syz
    ny = 0.0
    nz = 0.0
    cross = 0.0
    for xi, yi, zi in zip(x, y, z):
        uy = xi - yi
        uz = xi - zi
        ny += uy * uy
        nz += uz * uz
        cross += uy * uz
    sig = kernel.sigma
    if fam == "gauss":
        s2 = sig * sig
        inv2 = 1.0 / (2.0 * s2)
        return (_exp(-ny * inv2) / s2) * (_exp(-nz * inv2) / s2) * cross
    if ny < COINCIDENT_TOL ** 2 or nz < COINCIDENT_TOL ** 2:
        return 0.0
    ry = _sqrt(ny)
    rz = _sqrt(nz)
    return (_exp(-ry / sig) / (sig * ry)) * (_exp(-rz / sig) / (sig * rz)) * cross


def grad_dot(kernel: KernelSpec, y, x, t) -> float:
    """<grad k_y(x), t> for an arbitrary direction t.

    Dot family: q'(x.y) (y.t); distance family: [q'(||x-y||)/||x-y||] (x-y).t
    with the same singularity conventions as :func:`grad_inner`.
    """
    if type(y) is not list:
        y = _as_seq(y)
    if type(x) is not list:
        x = _as_seq(x)
    if type(t) is not list:
        t = _as_seq(t)
    if len(x) != len(y) or len(x) != len(t):
        raise ValueError("dimension mismatch")
    fam = kernel.family
    if fam == "poly":
        sxy = 0.0
        syt = 0.0
        for xi, yi, ti in zip(x, y, t):
            sxy += xi * yi
            syt += yi * ti
        s, c0, c1 = kernel.degree, kernel.offset, kernel.scale
        return s * c1 * (c0 + c1 * sxy) ** (s - 1) * syt
    ny = 0.0
    cross = 0.0
    for xi, yi, ti in zip(x, y, t):
        u = xi - yi
        ny += u * u
        cross += u * ti
    sig = kernel.sigma
    if fam == "gauss":
        s2 = sig * sig
        return -_exp(-ny / (2.0 * s2)) / s2 * cross
    if ny < COINCIDENT_TOL ** 2:
        return 0.0
    r = _sqrt(ny)
    return -_exp(-r / sig) / (sig * r) * cross


def pairwise_sqdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared distances ||a_i - b_j||**2 via the norm expansion.

    Entries at or below the expansion's cancellation noise floor are
    snapped to exact 0: they are indistinguishable from coincident
    points, and leaving the ~1e-16 residue in place would let a later
    sqrt amplify it into a spurious ~1e-8 distance.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na = np.sum(a * a, axis=1)
    nb = np.sum(b * b, axis=1)
    sq = na[:, None] - 2.0 * (a @ b.T) + nb[None, :]
    noise_floor = 1e-14 * (na[:, None] + nb[None, :])
    sq[sq <= noise_floor] = 0.0
    return sq


def cross_gram(kernel: KernelSpec, landmarks: np.ndarray, data: np.ndarray) -> np.ndarray:
    """p x n matrix of kernel sections evaluated at the data,
    entry (i, k) = k_{landmark_i}(data_k)."""
    landmarks = np.asarray(landmarks, dtype=float)
    data = np.asarray(data, dtype=float)
    if landmarks.shape[1] != data.shape[1]:
        raise ValueError("dimension mismatch")
    if kernel.is_dot:
        return q_eval(kernel, landmarks @ data.T)
    sq = pairwise_sqdist(landmarks, data)
    if kernel.family == "gauss":
        return np.exp(-sq / (2.0 * kernel.sigma ** 2))
    return np.exp(-np.sqrt(sq) / kernel.sigma)


def grad_ratio(kernel: KernelSpec, sqdists: np.ndarray) -> np.ndarray:
    """q'(r)/r evaluated from squared distances r**2, vectorized.

    This is the T matrix of the distance-kernel assembly; the exponential
    family gets 0 at coincident points, the Gaussian ratio is exact.
    """
    if kernel.is_dot:
        raise ValueError("grad_ratio applies to distance kernels only")
    sig = kernel.sigma
    if kernel.family == "gauss":
        return -np.exp(-sqdists / (2.0 * sig ** 2)) / (sig ** 2)
    r = np.sqrt(sqdists)
    small = r < COINCIDENT_TOL
    safe = np.where(small, 1.0, r)
    return np.where(small, 0.0, -np.exp(-r / sig) / (sig * safe))
