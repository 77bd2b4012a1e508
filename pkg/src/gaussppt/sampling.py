"""Random covariance matrices for property tests and experiment scripts.

All samplers take a ``numpy.random.Generator``.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import block_diag, expm

from .gaussian_state import MixtureComponent
from .numerics import hermitian_eigen
from .phase_space import SystemShape, symplectic_block


def random_symplectic(modes: int, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """``expm(sigma H)`` for a random symmetric ``H``; preserves ``sigma``."""
    n = 2 * modes
    H = rng.normal(scale=scale, size=(n, n))
    return expm(symplectic_block(modes) @ ((H + H.T) / 2))


def random_local_symplectic(shape: SystemShape, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    return block_diag(random_symplectic(shape.f_a, rng, scale), random_symplectic(shape.f_b, rng, scale))


def thermal_diagonal(modes: int, rng: np.random.Generator, high: float = 3.0) -> np.ndarray:
    """Diagonal ``(d1, d1, d2, d2, ...)`` with every ``d_k >= 1``."""
    return np.diag(np.repeat(rng.uniform(1.0, high, size=modes), 2))


def random_local_covariance(modes: int, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    S = random_symplectic(modes, rng, scale)
    return S @ thermal_diagonal(modes, rng) @ S.T


def random_product_covariance(shape: SystemShape, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """``S (D + D) S^T`` for a random local symplectic ``S``; ppt by construction."""
    S = random_local_symplectic(shape, rng, scale)
    D = block_diag(thermal_diagonal(shape.f_a, rng), thermal_diagonal(shape.f_b, rng))
    return S @ D @ S.T


def random_pure_covariance(shape: SystemShape, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    S = random_symplectic(shape.modes, rng, scale)
    return S @ S.T


def random_impure_covariance(shape: SystemShape, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    return random_pure_covariance(shape, rng, scale) + np.diag(rng.uniform(0.05, 1.0, size=shape.dim))


def random_ppt_covariance(
    shape: SystemShape, rng: np.random.Generator, scale: float = 0.5, margin: float = 0.2
) -> np.ndarray:
    """A generically entangled-looking ppt-covariance.

    A random pure covariance is shifted by a multiple of the identity just
    large enough (plus a random ``margin``) to make ``gamma + i sigma_t`` PSD.
    The result is strictly inside the ppt set, hence not minimally ppt.
    """
    sigma_t = symplectic_block(shape.modes)
    sigma_t[: shape.dim_a, : shape.dim_a] *= -1
    gamma = random_pure_covariance(shape, rng, scale)
    w, _ = hermitian_eigen(gamma + 1j * sigma_t)
    shift = max(0.0, -w[0]) + rng.uniform(0.0, margin) + 1e-3
    return gamma + shift * np.eye(shape.dim)


def random_mixture(shape: SystemShape, rng: np.random.Generator, max_components: int = 5, mean_scale: float = 1.0):
    """Random convex mixture of Gaussian product states."""
    k = int(rng.integers(1, max_components + 1))
    weights = rng.dirichlet(np.ones(k))
    weights /= weights.sum()
    comps = []
    for w in weights:
        gamma = block_diag(random_local_covariance(shape.f_a, rng), random_local_covariance(shape.f_b, rng))
        comps.append(MixtureComponent(float(w), rng.normal(scale=mean_scale, size=shape.dim), gamma))
    return comps
