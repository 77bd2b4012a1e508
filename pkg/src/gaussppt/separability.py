"""PPT tests, separability witnesses, minimally-ppt descent and classification.

The central objects are the two Hermitian matrices ``gamma + i sigma`` and
``gamma + i sigma_t``, where ``sigma_t`` is the symplectic form with Alice's
block negated. A real symmetric ``gamma`` for which both are PSD is a
*ppt-covariance*; it is *minimally ppt* when no other ppt-covariance lies
below it in the matrix order, which happens exactly when the real parts of the
two null spaces together span the whole phase space.
"""

from __future__ import annotations

import enum
import logging
import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import numerics
from .gaussian_state import GaussianState, NotAState, NotSymmetric, validate
from .numerics import (
    DEFAULT_TOL,
    RealSubspace,
    ToleranceConfig,
    hermitian_eigen,
    is_psd,
    null_space,
    orthogonal_complement,
    pseudoinverse,
    real_part_span,
)
from .phase_space import (
    SystemShape,
    partial_transpose_form,
    standard_symplectic,
)
from .phase_space import is_block_diagonal as _is_block_diagonal

log = logging.getLogger(__name__)


class SeparabilityError(ValueError):
    pass


class NotPpt(SeparabilityError):
    pass


class AlreadyMinimal(SeparabilityError):
    pass


class NumericalStall(ArithmeticError):
    pass


class MaxStepsExceeded(ArithmeticError):
    pass


class NoFactor(SeparabilityError):
    pass


class FactorizationResidual(ArithmeticError):
    pass


class ToleranceWarning(UserWarning):
    pass


def forms(shape: SystemShape):
    """``(sigma, sigma_t)`` for the standard canonical layout of ``shape``."""
    form = standard_symplectic(shape)
    return form.sigma, partial_transpose_form(form)


def momentum_flip(gamma, shape: SystemShape) -> np.ndarray:
    """Covariance of the partially transposed state: Alice's momenta reversed."""
    signs = np.ones(shape.dim)
    signs[1 : shape.dim_a : 2] = -1.0
    return np.asarray(gamma) * np.outer(signs, signs)


@dataclass(frozen=True, eq=False)
class PptCovariance:
    """Real symmetric matrix with ``gamma + i sigma >= 0`` and ``gamma + i sigma_t >= 0``.

    Build with :func:`as_ppt`, which checks both conditions.
    """

    shape: SystemShape
    gamma: np.ndarray

    def __post_init__(self):
        g = np.array(self.gamma, dtype=float)
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)

    @property
    def plus_sigma(self) -> np.ndarray:
        return self.gamma + 1j * forms(self.shape)[0]

    @property
    def plus_sigma_t(self) -> np.ndarray:
        return self.gamma + 1j * forms(self.shape)[1]


def as_ppt(gamma, shape: SystemShape, tol: ToleranceConfig = DEFAULT_TOL) -> PptCovariance:
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (shape.dim, shape.dim):
        raise numerics.DimensionMismatch(f"expected {shape.dim}x{shape.dim}, got {gamma.shape}")
    asym = float(np.max(np.abs(gamma - gamma.T)))
    if asym > tol.herm_tol * max(1.0, float(np.max(np.abs(gamma)))):
        raise NotSymmetric(asym)
    gamma = (gamma + gamma.T) / 2
    g = PptCovariance(shape, gamma)
    if not is_psd(g.plus_sigma, tol):
        raise NotPpt("gamma + i sigma is not PSD")
    if not is_psd(g.plus_sigma_t, tol):
        raise NotPpt("gamma + i sigma_t is not PSD")
    return g


def is_ppt(state: GaussianState, tol: ToleranceConfig = DEFAULT_TOL, cross_check: bool = False) -> bool:
    sigma, sigma_t = forms(state.shape)
    result = is_psd(state.gamma + 1j * sigma_t, tol)
    if cross_check:
        flipped = is_psd(momentum_flip(state.gamma, state.shape) + 1j * sigma, tol)
        if flipped != result:
            raise ArithmeticError("partial-transpose forms disagree")
    return result


def is_block_diagonal(gamma, shape: SystemShape, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    return _is_block_diagonal(gamma, shape, tol.btol)


# -- separability witnesses ------------------------------------------------


@dataclass(frozen=True, eq=False)
class SeparabilityWitness:
    """Local covariances whose direct sum lies below ``gamma``."""

    gamma_a: np.ndarray
    gamma_b: np.ndarray

    @classmethod
    def from_blocks(cls, gamma, shape: SystemShape) -> "SeparabilityWitness":
        gamma = np.asarray(gamma)
        return cls(gamma[shape.alice, shape.alice].copy(), gamma[shape.bob, shape.bob].copy())

    def direct_sum(self) -> np.ndarray:
        na, nb = len(self.gamma_a), len(self.gamma_b)
        out = np.zeros((na + nb, na + nb))
        out[:na, :na] = self.gamma_a
        out[na:, na:] = self.gamma_b
        return out


def verify_witness(
    state: Union[GaussianState, PptCovariance],
    w: SeparabilityWitness,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> bool:
    """Check the three PSD conditions that certify separability of ``state``."""
    shape = state.shape
    ga, gb = np.asarray(w.gamma_a), np.asarray(w.gamma_b)
    if ga.shape != (shape.dim_a, shape.dim_a) or gb.shape != (2 * shape.f_b, 2 * shape.f_b):
        raise numerics.DimensionMismatch("witness blocks do not match the A/B split")
    sigma = forms(shape)[0]
    return (
        is_psd(ga + 1j * sigma[shape.alice, shape.alice], tol)
        and is_psd(gb + 1j * sigma[shape.bob, shape.bob], tol)
        and is_psd(state.gamma - w.direct_sum(), tol)
    )


# -- null spaces and minimality --------------------------------------------


@dataclass(frozen=True, eq=False)
class NullSpaceReport:
    n_basis: np.ndarray
    nt_basis: np.ndarray
    re_n: RealSubspace
    re_nt: RealSubspace
    joint: RealSubspace

    @property
    def joint_span_dim(self) -> int:
        return self.joint.dim

    @property
    def null_dims(self) -> tuple:
        return self.n_basis.shape[1], self.nt_basis.shape[1]


def null_space_report(g: PptCovariance, tol: ToleranceConfig = DEFAULT_TOL) -> NullSpaceReport:
    n = null_space(g.plus_sigma, tol)
    nt = null_space(g.plus_sigma_t, tol)
    re_n, re_nt = real_part_span(n), real_part_span(nt)
    return NullSpaceReport(n, nt, re_n, re_nt, re_n + re_nt)


def is_minimally_ppt(g: PptCovariance, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    return null_space_report(g, tol).joint_span_dim == g.shape.dim


# -- rank-one descent -------------------------------------------------------


def largest_admissible_multiple(M, xi, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Largest ``eps`` keeping ``M - eps xi xi^T`` PSD, for ``xi`` in the support of ``M``.

    Returns ``inf`` when ``xi^* M^+ xi`` is not positive.
    """
    xi = np.asarray(xi)
    q = float(np.real(np.conj(xi) @ pseudoinverse(M, tol) @ xi))
    return 1.0 / q if q > 0 else np.inf


@dataclass(frozen=True, eq=False)
class SubtractionStep:
    xi: np.ndarray
    epsilon: float
    null_dims_before: tuple
    null_dims_after: tuple


def _direction(report: NullSpaceReport, rng) -> np.ndarray:
    comp = orthogonal_complement(report.joint)
    if comp.dim == 0:
        raise AlreadyMinimal("real null spaces already span the phase space")
    if rng is None:
        return comp.basis[:, 0].copy()
    v = comp.basis @ rng.standard_normal(comp.dim)
    return v / np.linalg.norm(v)


def _step_once(g: PptCovariance, tol: ToleranceConfig, rng):
    report = null_space_report(g, tol)
    xi = _direction(report, rng)
    eps = min(
        largest_admissible_multiple(g.plus_sigma, xi, tol),
        largest_admissible_multiple(g.plus_sigma_t, xi, tol),
    )
    if not np.isfinite(eps):
        raise NumericalStall("xi^T M^+ xi <= 0 for both forms")
    g_next = as_ppt(g.gamma - eps * np.outer(xi, xi), g.shape, tol)
    after = null_space_report(g_next, tol).null_dims
    return g_next, SubtractionStep(xi, eps, report.null_dims, after)


def subtract_rank_one_step(g: PptCovariance, tol: ToleranceConfig = DEFAULT_TOL, rng=None):
    """One descent step: subtract the largest admissible multiple of ``xi xi^T``.

    ``xi`` is the first vector of the deterministic orthonormal basis of the
    complement of ``Re N + Re N_t``; pass a numpy ``Generator`` as ``rng`` to
    draw a random unit direction from that complement instead.

    Returns ``(g_next, xi, epsilon)``.
    """
    g_next, step = _checked_step(g, tol, rng)
    return g_next, step.xi, step.epsilon


def _checked_step(g: PptCovariance, tol: ToleranceConfig, rng):
    g_next, step = _step_once(g, tol, rng)
    if sum(step.null_dims_after) > sum(step.null_dims_before):
        return g_next, step
    log.debug("null dimension did not grow (%s -> %s); relaxing ntol", step.null_dims_before, step.null_dims_after)
    relaxed = tol.relaxed()
    g_next, step = _step_once(g, relaxed, rng)
    if sum(step.null_dims_after) > sum(step.null_dims_before):
        return g_next, step
    raise MaxStepsExceeded(
        f"subtraction step failed to enlarge the null spaces ({step.null_dims_before} -> {step.null_dims_after})"
    )


def minimize_ppt(g: PptCovariance, tol: ToleranceConfig = DEFAULT_TOL, max_steps: Optional[int] = None, rng=None):
    """Descend to a minimally ppt covariance below ``g``.

    Returns ``(g_min, trace)`` with ``trace`` a list of :class:`SubtractionStep`.
    """
    if max_steps is None:
        max_steps = 8 * g.shape.modes
    trace = []
    while not is_minimally_ppt(g, tol):
        if len(trace) >= max_steps:
            raise MaxStepsExceeded(f"no minimal point after {max_steps} steps")
        g, step = _checked_step(g, tol, rng)
        trace.append(step)
    return g, trace


# -- pure factors -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PureFactor:
    """Result of splitting off one pure Bob mode.

    ``remainder`` is the covariance on Alice plus the remaining Bob modes
    (``reduced`` wraps it as a ppt-covariance when Bob keeps at least one
    mode). ``transform`` is the local symplectic change of basis used: the
    transformed covariance ``transform.T @ gamma @ transform`` is
    ``remainder`` (+) ``pure_block`` up to the checked residual.
    """

    reduced: Optional[PptCovariance]
    remainder: np.ndarray
    pure_block: np.ndarray
    transform: np.ndarray


def symplectic_gram_schmidt(vectors, sigma) -> np.ndarray:
    """Canonical pairs spanning the same space as ``vectors`` (columns).

    Returns columns ``(q1, p1, q2, p2, ...)`` with ``q_k^T sigma p_k = -1`` and
    all other pairings zero. Pivots are chosen greedily by the largest
    symplectic pairing, scanning columns in order.
    """
    pool = [np.asarray(v, dtype=float) for v in np.asarray(vectors, dtype=float).T]
    out = []
    while pool:
        norms = [np.linalg.norm(v) for v in pool]
        i = int(np.argmax(norms))
        if norms[i] < 1e-10:
            break
        u = pool.pop(i) / norms[i]
        pairings = [abs(u @ sigma @ v) for v in pool]
        if not pairings or max(pairings) < 1e-10:
            raise ArithmeticError("vectors do not span a symplectic subspace")
        j = int(np.argmax(pairings))
        v = pool.pop(j)
        w = u @ sigma @ v
        q, p = u, -v / w
        out += [q, p]
        # symplectic projection of the rest off span(q, p)
        pool = [x - (p @ sigma @ x) * q + (q @ sigma @ x) * p for x in pool]
    return np.column_stack(out) if out else np.zeros((len(sigma), 0))


def extract_pure_factor(g: PptCovariance, tol: ToleranceConfig = DEFAULT_TOL) -> PureFactor:
    """Split off a pure Bob mode from a null vector shared by both forms.

    Raises :class:`NoFactor` when the two null spaces intersect trivially.
    """
    shape = g.shape
    sigma, sigma_t = forms(shape)
    # null(A) and null(B) intersect in null(A + B) for PSD A, B
    shared = null_space(2 * g.gamma + 1j * (sigma + sigma_t), tol)
    if shared.shape[1] == 0:
        raise NoFactor("null spaces of gamma + i sigma and gamma + i sigma_t intersect trivially")
    phi = shared[:, 0]
    if np.linalg.norm(phi[shape.alice]) > 1e-6:
        raise FactorizationResidual("shared null vector has Alice components")

    sigma_b = sigma[shape.bob, shape.bob]
    x, y = phi.real[shape.bob], phi.imag[shape.bob]
    w = float(x @ sigma_b @ y)
    if w <= 0:
        raise FactorizationResidual(f"shared null vector is symplectically degenerate (pairing {w:.3e})")
    q, p = y / np.sqrt(w), x / np.sqrt(w)

    nb = 2 * shape.f_b
    rest = [e - (p @ sigma_b @ e) * q + (q @ sigma_b @ e) * p for e in np.eye(nb)]
    rest_basis = symplectic_gram_schmidt(np.column_stack(rest), sigma_b)
    if rest_basis.shape[1] != nb - 2:
        raise FactorizationResidual("symplectic complement has the wrong dimension")
    t_b = np.column_stack([rest_basis, q, p])
    T = np.eye(shape.dim)
    T[shape.bob, shape.bob] = t_b
    if np.max(np.abs(T.T @ sigma @ T - sigma)) > 1e-8:
        raise FactorizationResidual("constructed basis is not canonical")

    G = T.T @ g.gamma @ T
    G = (G + G.T) / 2
    keep = slice(0, shape.dim - 2)
    cross = G[keep, shape.dim - 2 :]
    if np.linalg.norm(cross) > tol.btol * max(1.0, np.linalg.norm(G)):
        raise FactorizationResidual(f"pure block does not decouple (cross norm {np.linalg.norm(cross):.3e})")
    remainder = G[keep, keep].copy()
    pure_block = G[shape.dim - 2 :, shape.dim - 2 :].copy()
    reduced = None
    if shape.f_b > 1:
        reduced = as_ppt(remainder, SystemShape(shape.f_a, shape.f_b - 1), tol)
    return PureFactor(reduced, remainder, pure_block, T)


# -- classification ---------------------------------------------------------


class Verdict(str, enum.Enum):
    INVALID = "invalid"
    NPT_ENTANGLED = "npt_entangled"
    SEPARABLE = "separable"
    BOUND_ENTANGLED = "bound_entangled"
    PPT_UNDECIDED = "ppt_undecided"


@dataclass(frozen=True, eq=False)
class EigenRecord:
    """A violated positivity condition: which matrix, how negative, and where."""

    matrix: str
    min_eigenvalue: float
    eigenvector: Optional[np.ndarray]
    asymmetry: float = 0.0


@dataclass(frozen=True, eq=False)
class MinimalPoint:
    g_min: PptCovariance
    report: NullSpaceReport


Certificate = Union[EigenRecord, SeparabilityWitness, MinimalPoint]


@dataclass(frozen=True, eq=False)
class Classification:
    verdict: Verdict
    certificate: Certificate
    shape: SystemShape
    gamma: np.ndarray
    tol: ToleranceConfig
    trace: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


def classify(gamma, shape: SystemShape, tol: ToleranceConfig = DEFAULT_TOL, rng=None) -> Classification:
    """Decide validity, ppt and separability of a covariance matrix.

    Verdicts and certificates:

    * ``INVALID``: ``gamma`` is not symmetric or ``gamma + i sigma`` is not
      PSD; an :class:`EigenRecord` holds the violation.
    * ``NPT_ENTANGLED``: ``gamma + i sigma_t`` has a negative eigenvalue
      (:class:`EigenRecord`).
    * ``SEPARABLE``: a :class:`SeparabilityWitness`. For 1xN and Nx1
      systems ppt always implies separability; the witness comes from the
      minimal point reached by descent and a :class:`ToleranceWarning` is
      attached if that point is not numerically block diagonal.
    * ``BOUND_ENTANGLED``: ``gamma`` itself is minimally ppt and not block
      diagonal; the certificate is the :class:`MinimalPoint` (``gamma`` with
      its null-space report).
    * ``PPT_UNDECIDED``: descent from a non-minimal ``gamma`` reached a
      non-product minimal point. That point is bound entangled but says
      nothing about ``gamma`` itself.
    """
    gamma = np.asarray(gamma, dtype=float)
    try:
        state = validate(gamma, shape, tol)
    except NotSymmetric as exc:
        return Classification(Verdict.INVALID, EigenRecord("gamma - gamma^T", np.nan, None, exc.asymmetry), shape, gamma, tol)
    except NotAState as exc:
        return Classification(
            Verdict.INVALID, EigenRecord("gamma + i sigma", exc.min_eigenvalue, exc.eigenvector), shape, gamma, tol
        )
    gamma = state.gamma

    sigma_t = forms(shape)[1]
    w, V = hermitian_eigen(gamma + 1j * sigma_t, tol)
    if w[0] < -tol.rtol * max(1.0, w[-1]):
        return Classification(
            Verdict.NPT_ENTANGLED, EigenRecord("gamma + i sigma_t", float(w[0]), V[:, 0]), shape, gamma, tol
        )

    g = PptCovariance(shape, gamma)
    report = null_space_report(g, tol)
    minimal = report.joint_span_dim == shape.dim
    block = is_block_diagonal(gamma, shape, tol)

    if block:
        # product state: its own blocks are the witness, minimal or not
        return Classification(Verdict.SEPARABLE, SeparabilityWitness.from_blocks(gamma, shape), shape, gamma, tol)

    if shape.is_one_by_n:
        notes = []
        trace = []
        witness = None
        # a small eigenvalue just under the ntol cutoff can stop the descent
        # early; one retry with a tighter cutoff usually reaches the product
        for attempt in (tol, tol.tightened()):
            try:
                g_min, trace = minimize_ppt(g, attempt, rng=rng)
            except ArithmeticError as exc:
                notes = [f"descent failed: {exc}"]
                continue
            witness = SeparabilityWitness.from_blocks(g_min.gamma, shape)
            notes = []
            if not is_block_diagonal(g_min.gamma, shape, tol):
                notes.append("descent ended off block-diagonal; verdict follows from the 1xN theorem")
            if not verify_witness(state, witness, tol):
                notes.append("witness from descent failed re-verification")
            if not notes:
                break
        if witness is None:
            witness = SeparabilityWitness.from_blocks(gamma, shape)
        for note in notes:
            warnings.warn(note, ToleranceWarning, stacklevel=2)
        return Classification(Verdict.SEPARABLE, witness, shape, gamma, tol, trace, notes)

    if minimal:
        return Classification(Verdict.BOUND_ENTANGLED, MinimalPoint(g, report), shape, gamma, tol)

    g_min, trace = minimize_ppt(g, tol, rng=rng)
    if is_block_diagonal(g_min.gamma, shape, tol):
        witness = SeparabilityWitness.from_blocks(g_min.gamma, shape)
        return Classification(Verdict.SEPARABLE, witness, shape, gamma, tol, trace)
    return Classification(
        Verdict.PPT_UNDECIDED, MinimalPoint(g_min, null_space_report(g_min, tol)), shape, gamma, tol, trace
    )


def verify_certificate(c: Classification, tol: Optional[ToleranceConfig] = None) -> bool:
    """Re-check a classification's certificate with this module's own tests."""
    tol = tol or c.tol
    shape = c.shape
    sigma, sigma_t = forms(shape)
    cert = c.certificate
    if c.verdict is Verdict.INVALID:
        if cert.eigenvector is None:
            return cert.asymmetry > 0
        return not is_psd(c.gamma + 1j * sigma, tol)
    if c.verdict is Verdict.NPT_ENTANGLED:
        v = cert.eigenvector
        rayleigh = float(np.real(np.conj(v) @ (c.gamma + 1j * sigma_t) @ v))
        return rayleigh < 0 and not is_psd(c.gamma + 1j * sigma_t, tol)
    if c.verdict is Verdict.SEPARABLE:
        return verify_witness(PptCovariance(shape, c.gamma), cert, tol)
    g_min = cert.g_min
    ok = (
        null_space_report(g_min, tol).joint_span_dim == shape.dim
        and not is_block_diagonal(g_min.gamma, shape, tol)
        and is_psd(c.gamma - g_min.gamma, tol)
    )
    if c.verdict is Verdict.BOUND_ENTANGLED:
        ok = ok and np.allclose(g_min.gamma, c.gamma)
    return ok
