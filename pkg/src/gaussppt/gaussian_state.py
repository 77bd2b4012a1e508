"""Gaussian states at the level of covariance matrices.

Conventions: the covariance carries a factor 2 on the second moments and the
characteristic function is ``exp(i m.xi - xi.gamma.xi / 4)``, so the vacuum
has ``gamma = identity``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .numerics import DEFAULT_TOL, DimensionMismatch, ToleranceConfig, hermitian_eigen, null_space
from .phase_space import SystemShape, standard_symplectic


class StateError(ValueError):
    pass


class NotSymmetric(StateError):
    def __init__(self, asymmetry: float):
        super().__init__(f"covariance is not symmetric (max asymmetry {asymmetry:.3e})")
        self.asymmetry = asymmetry


class NotAState(StateError):
    """gamma + i sigma has a negative eigenvalue."""

    def __init__(self, min_eigenvalue: float, eigenvector: np.ndarray):
        super().__init__(f"gamma + i sigma is not PSD (min eigenvalue {min_eigenvalue:.6g})")
        self.min_eigenvalue = min_eigenvalue
        self.eigenvector = eigenvector


class MixtureError(StateError):
    pass


def _frozen(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GaussianState:
    """A validated covariance matrix plus an (entanglement-irrelevant) mean.

    Construct through :func:`validate`; the dataclass itself does not check
    the uncertainty relation.
    """

    shape: SystemShape
    gamma: np.ndarray
    mean: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "gamma", _frozen(self.gamma))
        mean = np.zeros(self.shape.dim) if self.mean is None else self.mean
        object.__setattr__(self, "mean", _frozen(mean))

    @property
    def sigma(self) -> np.ndarray:
        return standard_symplectic(self.shape).sigma


@dataclass(frozen=True)
class ValidationRecord:
    symmetry_residual: float
    min_eigenvalue: float
    eigenvalues: np.ndarray = field(repr=False)


def inspect(gamma, shape: SystemShape, tol: ToleranceConfig = DEFAULT_TOL) -> ValidationRecord:
    """Symmetry residual and spectrum of gamma + i sigma, without raising on failure."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (shape.dim, shape.dim):
        raise DimensionMismatch(
            f"shape {shape} needs a {shape.dim}x{shape.dim} matrix, got {gamma.shape}"
        )
    if not np.all(np.isfinite(gamma)):
        raise StateError("covariance has non-finite entries")
    residual = float(np.max(np.abs(gamma - gamma.T)))
    sym = (gamma + gamma.T) / 2
    w, _ = hermitian_eigen(sym + 1j * standard_symplectic(shape).sigma, tol)
    return ValidationRecord(residual, float(w[0]), w)


def validate(gamma, shape: SystemShape, tol: ToleranceConfig = DEFAULT_TOL, mean=None) -> GaussianState:
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 2 or gamma.shape != (shape.dim, shape.dim):
        raise DimensionMismatch(
            f"shape {shape} needs a {shape.dim}x{shape.dim} matrix, got {gamma.shape}"
        )
    if not np.all(np.isfinite(gamma)):
        raise StateError("covariance has non-finite entries")
    asym = float(np.max(np.abs(gamma - gamma.T)))
    if asym > tol.herm_tol * max(1.0, float(np.max(np.abs(gamma)))):
        raise NotSymmetric(asym)
    gamma = (gamma + gamma.T) / 2
    # gamma - i sigma >= 0 follows by complex conjugation
    w, V = hermitian_eigen(gamma + 1j * standard_symplectic(shape).sigma, tol)
    if w[0] < -tol.rtol * max(1.0, w[-1]):
        raise NotAState(float(w[0]), V[:, 0])
    if mean is not None:
        mean = np.asarray(mean, dtype=float)
        if mean.shape != (shape.dim,):
            raise DimensionMismatch(f"mean must have length {shape.dim}")
    return GaussianState(shape, gamma, mean)


def purity_residual(state: GaussianState) -> float:
    """Frobenius norm of ``(sigma^{-1} gamma)^2 + 1``."""
    K = np.linalg.solve(state.sigma, state.gamma)
    return float(np.linalg.norm(K @ K + np.eye(state.shape.dim)))


def is_pure(state: GaussianState, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Purity test, computed two ways that must agree.

    One route checks ``(sigma^{-1} gamma)^2 = -1``; the other asks for the
    null space of ``gamma + i sigma`` to have the maximal complex dimension f.
    """
    dim = state.shape.dim
    by_square = purity_residual(state) <= 1e-8 * dim
    nulls = null_space(state.gamma + 1j * state.sigma, tol)
    by_nulls = nulls.shape[1] == state.shape.modes
    if by_square != by_nulls:
        raise ArithmeticError(
            "purity tests disagree: "
            f"residual={purity_residual(state):.3e}, null dim={nulls.shape[1]}"
        )
    return by_square


def characteristic_value(state: GaussianState, xi) -> complex:
    xi = np.asarray(xi, dtype=float)
    return complex(np.exp(1j * (state.mean @ xi) - 0.25 * (xi @ state.gamma @ xi)))


@dataclass(frozen=True, eq=False)
class MixtureComponent:
    weight: float
    mean: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        if not (0.0 < self.weight <= 1.0):
            raise MixtureError(f"weight must lie in (0, 1], got {self.weight}")
        object.__setattr__(self, "mean", _frozen(self.mean))
        object.__setattr__(self, "gamma", _frozen(self.gamma))


def mixture_covariance(components: Sequence[MixtureComponent]):
    """First and second moments of a convex mixture of Gaussian states.

    Returns ``(gamma, mean, delta)`` where ``delta = gamma - sum_k w_k gamma_k``
    is the (PSD) spread contributed by the component means.
    """
    if not components:
        raise MixtureError("empty mixture")
    dim = components[0].gamma.shape[0]
    for c in components:
        if c.gamma.shape != (dim, dim) or c.mean.shape != (dim,):
            raise MixtureError("mixture components do not share a shape")
    weights = np.array([c.weight for c in components])
    if abs(weights.sum() - 1.0) > 1e-12:
        raise MixtureError(f"weights sum to {weights.sum()!r}, not 1")
    means = np.stack([c.mean for c in components])
    mean = weights @ means
    second = sum(c.weight * (c.gamma + 2 * np.outer(c.mean, c.mean)) for c in components)
    gamma = second - 2 * np.outer(mean, mean)
    delta = 2 * (np.einsum("k,ki,kj->ij", weights, means, means) - np.outer(mean, mean))
    return (gamma + gamma.T) / 2, mean, (delta + delta.T) / 2
