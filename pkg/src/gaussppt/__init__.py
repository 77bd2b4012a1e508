"""Entanglement of bipartite Gaussian states from their covariance matrices."""

__version__ = "0.1.0"

from .numerics import ToleranceConfig
from .phase_space import SystemShape, partial_transpose_form, standard_symplectic
from .gaussian_state import GaussianState, characteristic_value, is_pure, mixture_covariance, validate
from .separability import (
    Classification,
    PptCovariance,
    Verdict,
    as_ppt,
    classify,
    extract_pure_factor,
    is_minimally_ppt,
    is_ppt,
    minimize_ppt,
    null_space_report,
    subtract_rank_one_step,
    verify_witness,
)
from .family import EXAMPLE_GAMMA, FamilyParams, build_gamma, verify_family_member
