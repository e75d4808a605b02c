"""Discrete-time quantum walk simulator with a biased coin.

Simulates one-dimensional walks whose coin operation cos(t) Z + sin(t) X is
biased toward small angles, where the walker concentrates coherently at the
ends of the lattice. Includes position-dephasing noise with reproducible
Monte-Carlo trajectory averaging, coin post-selection and fidelity analysis
against end-site and Gaussian-cat superposition targets, and a beam-splitter
mesh realizing the same dynamics in spatial optical modes.
"""

from .analysis import (
    DegeneratePostselectionError,
    NoBracketError,
    PositionDistribution,
    TargetState,
    best_end_fidelity,
    best_end_fidelity_pure,
    coin_entropy,
    critical_theta,
    distribution_from_pure,
    end_superposition_target,
    fidelity,
    fidelity_pure,
    gaussian_cat_target,
    position_distribution,
    project_coin,
    project_coin_pure,
    tau_target,
    trace_out_coin,
    variance,
)
from .evolution import (
    BoundaryViolationError,
    CoinOperator,
    apply_step_density,
    apply_step_pure,
    closed_form_z_walk,
    coin_operator,
    evolve_pure,
)
from .noise import (
    NoiseSpec,
    RngStream,
    closed_form_full_noise,
    dephasing_channel,
    evolve_noisy,
    evolve_with_betas,
    monte_carlo_average,
    sample_beta,
)
from .optics import (
    BeamSplitterNode,
    OpticalMesh,
    PhaseMask,
    build_mesh,
    mesh_to_json,
    project_detection,
    propagate,
    sample_phase_mask,
    zero_phase_mask,
)
from .states import (
    COIN_SYMMETRIC,
    COIN_SYMMETRIC_ORTH,
    CoinState,
    JointDensityMatrix,
    JointPureState,
    LatticeSpec,
    initial_state_from_descriptor,
    make_custom_initial,
    make_gaussian_initial,
    make_localized_initial,
    pure_to_density,
    sized_lattice,
)

__version__ = "0.1.0"

__all__ = [
    "BeamSplitterNode",
    "BoundaryViolationError",
    "COIN_SYMMETRIC",
    "COIN_SYMMETRIC_ORTH",
    "CoinOperator",
    "CoinState",
    "DegeneratePostselectionError",
    "JointDensityMatrix",
    "JointPureState",
    "LatticeSpec",
    "NoBracketError",
    "NoiseSpec",
    "OpticalMesh",
    "PhaseMask",
    "PositionDistribution",
    "RngStream",
    "TargetState",
    "apply_step_density",
    "apply_step_pure",
    "best_end_fidelity",
    "best_end_fidelity_pure",
    "build_mesh",
    "closed_form_full_noise",
    "closed_form_z_walk",
    "coin_entropy",
    "coin_operator",
    "critical_theta",
    "dephasing_channel",
    "distribution_from_pure",
    "end_superposition_target",
    "evolve_noisy",
    "evolve_pure",
    "evolve_with_betas",
    "fidelity",
    "fidelity_pure",
    "gaussian_cat_target",
    "initial_state_from_descriptor",
    "make_custom_initial",
    "make_gaussian_initial",
    "make_localized_initial",
    "mesh_to_json",
    "monte_carlo_average",
    "position_distribution",
    "project_coin",
    "project_coin_pure",
    "propagate",
    "pure_to_density",
    "sample_beta",
    "sample_phase_mask",
    "sized_lattice",
    "tau_target",
    "trace_out_coin",
    "variance",
    "zero_phase_mask",
]
