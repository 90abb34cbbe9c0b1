"""Non-Hermitian Aharonov-Bohm cages in bosonic BdG ladders and N-chain lattices."""

from .errors import (CageError, ClassificationError, ConfigError,
                     ConsistencyError, ConvergenceError,
                     DegenerateResponseError, DimensionError, DomainError,
                     InconclusiveLatticeError, PathError, PreconditionError,
                     RangeError)
from .params import (Boundary, Component, LadderParams, LatticeSpec,
                     NChainParams, SiteIndex, fluxes, gauge_fix,
                     gauge_transform, make_ep2n_params)
from .model import build_bloch, build_real_space, excitation_vector, wilson_loop
from .transfer import (PathSpec, cage_loop_matrix, flat_band_conditions,
                       nchain_prohibited, path_product, transfer_set)
from .spectra import (Kind, classify, classify_nchain, closed_form_eigs,
                      dispersion, local_range, minimal_polynomial,
                      perturbation_scaling, phase_diagram_scan)
from .dynamics import (ExcitationSpec, confinement_check, evolve,
                       growth_character)

__version__ = "0.1.0"

__all__ = [
    "CageError", "ClassificationError", "ConfigError", "ConsistencyError",
    "ConvergenceError", "DegenerateResponseError", "DimensionError",
    "DomainError", "InconclusiveLatticeError", "PathError",
    "PreconditionError", "RangeError",
    "Boundary", "Component", "LadderParams", "LatticeSpec", "NChainParams",
    "SiteIndex", "fluxes", "gauge_fix", "gauge_transform", "make_ep2n_params",
    "build_bloch", "build_real_space", "excitation_vector", "wilson_loop",
    "PathSpec", "cage_loop_matrix", "flat_band_conditions",
    "nchain_prohibited", "path_product", "transfer_set",
    "Kind", "classify", "classify_nchain", "closed_form_eigs", "dispersion",
    "local_range", "minimal_polynomial", "perturbation_scaling",
    "phase_diagram_scan",
    "ExcitationSpec", "confinement_check", "evolve", "growth_character",
]
