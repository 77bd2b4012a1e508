"""Bipartite phase spaces and the symplectic forms on them.

Coordinates are ordered ``(q_A1, p_A1, ..., q_Af, p_Af, q_B1, p_B1, ...)``:
position and momentum interleaved per mode, Alice's modes first. Each
canonical pair carries the block ``[[0, -1], [1, 0]]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

PAIR_BLOCK = np.array([[0.0, -1.0], [1.0, 0.0]])


@dataclass(frozen=True)
class SystemShape:
    f_a: int
    f_b: int

    def __post_init__(self):
        for name in ("f_a", "f_b"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")

    @property
    def modes(self) -> int:
        return self.f_a + self.f_b

    @property
    def dim(self) -> int:
        return 2 * self.modes

    @property
    def dim_a(self) -> int:
        return 2 * self.f_a

    @property
    def alice(self) -> slice:
        return slice(0, self.dim_a)

    @property
    def bob(self) -> slice:
        return slice(self.dim_a, self.dim)

    @property
    def is_one_by_n(self) -> bool:
        return self.f_a == 1 or self.f_b == 1

    def __str__(self):
        return f"{self.f_a}x{self.f_b}"


def shape_for_dim(dim: int, f_a: int) -> SystemShape:
    if dim % 2 or dim // 2 <= f_a:
        raise ValueError(f"cannot split dimension {dim} with {f_a} Alice modes")
    return SystemShape(f_a, dim // 2 - f_a)


def symplectic_block(modes: int) -> np.ndarray:
    return block_diag(*([PAIR_BLOCK] * modes)) if modes else np.zeros((0, 0))


@dataclass(frozen=True, eq=False)
class SymplecticForm:
    shape: SystemShape
    sigma: np.ndarray

    def __post_init__(self):
        sigma = np.array(self.sigma, dtype=float)
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)

    @property
    def sigma_a(self) -> np.ndarray:
        a = self.shape.alice
        return self.sigma[a, a]

    @property
    def sigma_b(self) -> np.ndarray:
        b = self.shape.bob
        return self.sigma[b, b]


def standard_symplectic(shape: SystemShape) -> SymplecticForm:
    return SymplecticForm(shape, symplectic_block(shape.modes))


def partial_transpose_form(form: SymplecticForm) -> np.ndarray:
    """The twin form with Alice's block negated: ``(-sigma_A) + sigma_B``."""
    twin = np.array(form.sigma)
    a = form.shape.alice
    twin[a, a] = -twin[a, a]
    return twin


def is_block_diagonal(M, shape: SystemShape, rel_tol: float) -> bool:
    """True iff the A-B off-diagonal block is small in Frobenius norm."""
    M = np.asarray(M)
    cross = M[shape.alice, shape.bob]
    return bool(np.linalg.norm(cross) <= rel_tol * max(1.0, np.linalg.norm(M)))


def is_local_symplectic(S, form: SymplecticForm, atol: float = 1e-9) -> bool:
    S = np.asarray(S, dtype=float)
    n = form.shape.dim
    if S.shape != (n, n):
        return False
    a, b = form.shape.alice, form.shape.bob
    if np.max(np.abs(S[a, b]), initial=0.0) > atol or np.max(np.abs(S[b, a]), initial=0.0) > atol:
        return False
    return bool(np.max(np.abs(S.T @ form.sigma @ S - form.sigma)) <= atol)
