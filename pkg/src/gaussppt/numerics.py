"""Dense Hermitian linear algebra with an explicit tolerance policy.

Everything here works on plain numpy arrays. Eigendecompositions go through
LAPACK's Hermitian driver (``numpy.linalg.eigh``), which is a deterministic
dense method, so null spaces and certificates are reproducible run to run.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg


class NumericsError(ValueError):
    """Base class for malformed matrix input."""


class NotHermitian(NumericsError):
    pass


class NonFinite(NumericsError):
    pass


class NotPSD(NumericsError):
    pass


class DimensionMismatch(NumericsError):
    pass


@dataclass(frozen=True)
class ToleranceConfig:
    """Relative tolerances used throughout the package.

    Parameters
    ----------
    rtol : float
        PSD slack; a matrix is PSD if its smallest eigenvalue is at least
        ``-rtol * max(1, largest eigenvalue)``.
    ntol : float
        Null-space cutoff; eigenvalues ``<= ntol * largest eigenvalue`` are
        treated as zero.
    btol : float
        Block-diagonality cutoff relative to ``max(1, ||gamma||_F)``.
    herm_tol : float
        Allowed deviation from exact Hermiticity (relative to the largest
        entry, floored at 1).
    """

    rtol: float = 1e-9
    ntol: float = 1e-7
    btol: float = 1e-7
    herm_tol: float = 1e-12

    def __post_init__(self):
        for name in ("rtol", "ntol", "btol", "herm_tol"):
            value = getattr(self, name)
            if not (0.0 < value < 1.0):
                raise ValueError(f"{name} must lie in (0, 1), got {value!r}")

    def relaxed(self, factor: float = 10.0) -> "ToleranceConfig":
        return replace(self, ntol=min(self.ntol * factor, 0.5))

    def tightened(self, factor: float = 1000.0) -> "ToleranceConfig":
        return replace(self, ntol=max(self.ntol / factor, 1e-13))


DEFAULT_TOL = ToleranceConfig()


@dataclass(frozen=True)
class RealSubspace:
    """Orthonormal basis (stored as columns) of a subspace of R^n."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float).reshape(self.ambient_dim, -1)
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def contains(self, v, atol: float = 1e-9) -> bool:
        v = np.asarray(v, dtype=float)
        return np.linalg.norm(v - self.projector() @ v) <= atol * max(1.0, np.linalg.norm(v))

    def same_span(self, other: "RealSubspace", atol: float = 1e-9) -> bool:
        if self.ambient_dim != other.ambient_dim or self.dim != other.dim:
            return False
        return np.linalg.norm(self.projector() - other.projector()) <= atol

    def __add__(self, other: "RealSubspace") -> "RealSubspace":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("subspaces live in different ambient spaces")
        return _orthonormal_span(np.hstack([self.basis, other.basis]), self.ambient_dim)


def _as_hermitian(M, tol: ToleranceConfig) -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NonFinite("matrix has non-finite entries")
    M = M.astype(complex)
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    asym = float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0
    if asym > tol.herm_tol * scale:
        raise NotHermitian(f"matrix deviates from Hermitian by {asym:.3e}")
    return (M + M.conj().T) / 2


def hermitian_eigen(M, tol: ToleranceConfig = DEFAULT_TOL):
    """Ascending eigenvalues and orthonormal eigenvectors (columns) of ``M``."""
    H = _as_hermitian(M, tol)
    w, V = np.linalg.eigh(H)
    return w, V


def _psd_floor(w: np.ndarray, tol: ToleranceConfig) -> float:
    top = float(w[-1]) if w.size else 0.0
    return -tol.rtol * max(1.0, top)


def is_psd(M, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    w, _ = hermitian_eigen(M, tol)
    if w.size == 0:
        return True
    return bool(w[0] >= _psd_floor(w, tol))


def _null_mask(w: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    top = max(float(w[-1]), 0.0) if w.size else 0.0
    return w <= tol.ntol * top


def _checked_psd_eigen(M, tol: ToleranceConfig):
    w, V = hermitian_eigen(M, tol)
    if w.size and w[0] < _psd_floor(w, tol):
        raise NotPSD(f"matrix is not PSD (min eigenvalue {w[0]:.3e})")
    return w, V


def null_space(M, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical null space of a PSD matrix."""
    w, V = _checked_psd_eigen(M, tol)
    return V[:, _null_mask(w, tol)]


def pseudoinverse(M, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a PSD matrix with the ntol rank cutoff."""
    w, V = _checked_psd_eigen(M, tol)
    inv = np.zeros_like(w)
    support = ~_null_mask(w, tol)
    inv[support] = 1.0 / w[support]
    P = (V * inv) @ V.conj().T
    return (P + P.conj().T) / 2


def _orthonormal_span(vectors: np.ndarray, n: int, rank_tol: float = 1e-8) -> RealSubspace:
    vectors = np.asarray(vectors, dtype=float).reshape(n, -1)
    if vectors.shape[1] == 0:
        return RealSubspace(n, np.zeros((n, 0)))
    U, s, _ = np.linalg.svd(vectors, full_matrices=False)
    rank = int(np.sum(s > rank_tol * max(1.0, s[0])))
    return RealSubspace(n, U[:, :rank])


def real_part_span(basis, rank_tol: float = 1e-8) -> RealSubspace:
    """Real span of the real and imaginary parts of the given complex vectors.

    ``basis`` holds the vectors as columns of an ``n x k`` array.
    """
    B = np.asarray(basis)
    if B.ndim != 2:
        raise DimensionMismatch("basis must be an n x k array of column vectors")
    n = B.shape[0]
    return _orthonormal_span(np.hstack([B.real, B.imag]), n, rank_tol)


def orthogonal_complement(S: RealSubspace) -> RealSubspace:
    """Orthonormal basis of the complement, from a pivoted QR of the projector.

    Column pivoting in LAPACK's geqp3 is deterministic, so the returned basis
    (including its order) is stable across runs.
    """
    n = S.ambient_dim
    k = n - S.dim
    if k == 0:
        return RealSubspace(n, np.zeros((n, 0)))
    P = np.eye(n) - S.projector()
    Q, _, _ = scipy.linalg.qr(P, pivoting=True)
    return RealSubspace(n, Q[:, :k])
