"""A five-parameter family of 2x2-mode bound entangled covariance matrices.

A single complex null vector ``seed`` of ``gamma + i sigma`` is pushed around
by the symmetry operators ``R``, ``C``, ``S`` (and their products). The eight
resulting vectors form a basis ``Omega``, the images ``Lambda = gamma Omega``
are fixed by the null-space condition and the symmetries, and
``gamma = Lambda Omega^{-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import DEFAULT_TOL, ToleranceConfig, hermitian_eigen, is_psd
from .phase_space import SystemShape
from .separability import (
    PptCovariance,
    Verdict,
    classify,
    forms,
    is_block_diagonal,
    null_space_report,
)

SHAPE = SystemShape(2, 2)

# Integer example reproduced by FamilyParams(1, 1, 2, 1, 1).
EXAMPLE_GAMMA = np.array(
    [
        [2, 0, 0, 0, 1, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 0, -1],
        [0, 0, 2, 0, 0, 0, -1, 0],
        [0, 0, 0, 1, 0, -1, 0, 0],
        [1, 0, 0, 0, 2, 0, 0, 0],
        [0, 0, 0, -1, 0, 4, 0, 0],
        [0, 0, -1, 0, 0, 0, 2, 0],
        [0, -1, 0, 0, 0, 0, 0, 4],
    ],
    dtype=float,
)
EXAMPLE_GAMMA.setflags(write=False)


class FamilyError(ValueError):
    pass


class ParamDomain(FamilyError):
    pass


class SingularOrbit(ArithmeticError):
    pass


class RealityFailure(ArithmeticError):
    pass


@dataclass(frozen=True)
class FamilyParams:
    a: float
    b: float
    c: float
    e: float
    f: float

    def __post_init__(self):
        for name in ("a", "b", "c", "e", "f"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ParamDomain(f"parameter {name} must be positive, got {value!r}")

    @property
    def d(self) -> float:
        # forced by reality and symmetry of gamma
        return (self.b * self.c + self.f) / self.a

    @property
    def admissible(self) -> bool:
        return self.a < self.c * self.e

    def as_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d, "e": self.e, "f": self.f}


@dataclass(frozen=True, eq=False)
class SymmetryOperators:
    S: np.ndarray
    C: np.ndarray
    R: np.ndarray

    def orbit(self) -> list:
        """Group elements in the fixed column order I, R, C, S, RC, RS, CS, RCS."""
        S, C, R = self.S, self.C, self.R
        return [np.eye(8), R, C, S, R @ C, R @ S, C @ S, R @ C @ S]


def symmetry_operators() -> SymmetryOperators:
    S = np.diag([1.0, 1, -1, -1, 1, -1, -1, 1])
    C = np.diag([1.0, -1, 1, -1, 1, -1, 1, -1])
    R = np.zeros((8, 8))
    for i, j in [(1, 3), (2, 4), (7, 5), (8, 6)]:
        R[i - 1, j - 1] = 1.0
        R[j - 1, i - 1] = -1.0
    return SymmetryOperators(S, C, R)


def seed_vector(p: FamilyParams) -> np.ndarray:
    return np.array([-p.a, 1j * p.b, p.c, -1j * p.d, p.e, -1j * p.f, 1.0, 0.0])


def orbit_matrices(p: FamilyParams, seed=None):
    """``(Omega, Lambda)`` with columns ``G_k seed`` and ``G_k (-i sigma seed)``."""
    seed = seed_vector(p) if seed is None else np.asarray(seed, dtype=complex)
    sigma = forms(SHAPE)[0]
    image = -1j * sigma @ seed
    group = symmetry_operators().orbit()
    omega = np.column_stack([G @ seed for G in group])
    lam = np.column_stack([G @ image for G in group])
    return omega, lam


def build_gamma(p: FamilyParams, tol: ToleranceConfig = DEFAULT_TOL, seed=None) -> np.ndarray:
    """Covariance matrix of the family member with parameters ``p``.

    ``seed`` overrides the seed vector (used to check invariance under complex
    rescaling); by default it is :func:`seed_vector` of ``p``.
    """
    if not p.admissible:
        raise ParamDomain(f"need a < c*e, got a={p.a!r}, c*e={p.c * p.e!r}")
    omega, lam = orbit_matrices(p, seed)
    if 1.0 / np.linalg.cond(omega) < 1e-12:
        raise SingularOrbit("orbit vectors are numerically dependent")
    # gamma = Lambda Omega^{-1}  <=>  Omega^T gamma^T = Lambda^T
    gamma = np.linalg.solve(omega.T, lam.T).T
    scale = max(1.0, float(np.max(np.abs(gamma))))
    if np.max(np.abs(gamma.imag)) > 1e-9 * scale:
        raise RealityFailure(f"imaginary residue {np.max(np.abs(gamma.imag)):.3e}")
    gamma = gamma.real
    if np.max(np.abs(gamma - gamma.T)) > 1e-9 * scale:
        raise RealityFailure("constructed gamma is not symmetric")
    gamma = (gamma + gamma.T) / 2
    sigma, sigma_t = forms(SHAPE)
    if not (is_psd(gamma + 1j * sigma, tol) and is_psd(gamma + 1j * sigma_t, tol)):
        raise RealityFailure("constructed gamma is not a ppt-covariance")
    return gamma


def build_gamma_exact(p: FamilyParams, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Same construction as :func:`build_gamma`, evaluated in exact rational arithmetic.

    Float parameters are converted to the rationals they represent exactly,
    ``Lambda Omega^{-1}`` is solved over the Gaussian rationals, and each
    entry is rounded to float once. Integer parameters therefore give integer
    matrices.
    """
    import sympy as sp

    if not p.admissible:
        raise ParamDomain(f"need a < c*e, got a={p.a!r}, c*e={p.c * p.e!r}")
    a, b, c, e, f = (sp.Rational(x) for x in (p.a, p.b, p.c, p.e, p.f))
    d = (b * c + f) / a
    seed = sp.Matrix([-a, sp.I * b, c, -sp.I * d, e, -sp.I * f, 1, 0])
    sigma = sp.Matrix(forms(SHAPE)[0].astype(int))
    image = -sp.I * sigma * seed
    group = [sp.Matrix(G.astype(int)) for G in symmetry_operators().orbit()]
    omega = sp.Matrix.hstack(*[G * seed for G in group])
    if omega.det() == 0:
        raise SingularOrbit("orbit vectors are linearly dependent")
    lam = sp.Matrix.hstack(*[G * image for G in group])
    exact = omega.T.LUsolve(lam.T).T.applyfunc(sp.expand)
    if any(sp.im(x) != 0 for x in exact) or exact != exact.T:
        raise RealityFailure("exact construction is not real symmetric")
    gamma = np.array([[float(x) for x in row] for row in exact.tolist()])
    sigma_f, sigma_t = forms(SHAPE)
    if not (is_psd(gamma + 1j * sigma_f, tol) and is_psd(gamma + 1j * sigma_t, tol)):
        raise RealityFailure("constructed gamma is not a ppt-covariance")
    return gamma


@dataclass
class FamilyReport:
    checks: dict = field(default_factory=dict)
    eigenvalues: np.ndarray = None
    verdict: str = ""

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> list:
        return [name for name, passed in self.checks.items() if not passed]


def verify_family_member(gamma, tol: ToleranceConfig = DEFAULT_TOL) -> FamilyReport:
    """Run every structural check expected of a family member; never raises."""
    gamma = np.asarray(gamma, dtype=float)
    ops = symmetry_operators()
    sigma, sigma_t = forms(SHAPE)
    report = FamilyReport()
    checks = report.checks
    scale = max(1.0, float(np.max(np.abs(gamma))))
    for name in ("S", "C", "R"):
        G = getattr(ops, name)
        checks[f"commutes_{name}"] = bool(np.max(np.abs(G @ gamma - gamma @ G)) <= 1e-9 * scale)
    plus = gamma + 1j * sigma
    report.eigenvalues, _ = hermitian_eigen(plus, tol)
    checks["psd_sigma"] = is_psd(plus, tol)
    checks["psd_sigma_t"] = is_psd(gamma + 1j * sigma_t, tol)
    # S(gamma + i sigma)S = gamma - i sigma_t, the conjugate of gamma + i sigma_t
    checks["unitary_equivalence"] = bool(np.max(np.abs(ops.S @ plus @ ops.S - (gamma - 1j * sigma_t))) <= 1e-9 * scale)
    if checks["psd_sigma"] and checks["psd_sigma_t"]:
        g = PptCovariance(SHAPE, gamma)
        checks["minimally_ppt"] = null_space_report(g, tol).joint_span_dim == SHAPE.dim
    else:
        checks["minimally_ppt"] = False
    checks["not_block_diagonal"] = not is_block_diagonal(gamma, SHAPE, tol)
    try:
        verdict = classify(gamma, SHAPE, tol).verdict
        report.verdict = verdict.value
    except (ArithmeticError, ValueError) as exc:
        verdict = None
        report.verdict = f"error: {exc}"
    checks["bound_entangled"] = verdict is Verdict.BOUND_ENTANGLED
    return report
