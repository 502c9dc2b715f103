"""Energy-based shot selection and ordering for automated video assembly."""

from .catalog import (
    LabelSequence,
    MotionType,
    Shot,
    ShotCatalog,
    ShotSize,
    load_catalog,
    load_reference,
    parse_catalog,
    parse_reference,
    serialize_catalog,
    validate_instance,
)
from .continuous import ContinuousConfig, continuous_langevin, sinkhorn
from .discrete import (
    OptimizationResult,
    OptimizerConfig,
    beam_search,
    brute_force,
    genetic,
    langevin_bs,
    langevin_ga,
    langevin_local_step,
    metropolis_accept,
    neighborhood,
)
from .energy import (
    EnergySpec,
    JointEnergy,
    SelectionMatrix,
    Sequence,
    encode_sequence,
    joint_energy,
    matrix_energy,
    matrix_energy_gradient,
    motion_energy,
    semantic_energy,
    sequence_labels,
    shot_size_energy,
    shot_size_score,
)
from .syntax import (
    TransitionMatrix,
    builtin_motion_matrix,
    builtin_shot_size_matrix,
    learn_transition_matrix,
    matrix_mse,
    sequence_style_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "ContinuousConfig",
    "EnergySpec",
    "JointEnergy",
    "LabelSequence",
    "MotionType",
    "OptimizationResult",
    "OptimizerConfig",
    "SelectionMatrix",
    "Sequence",
    "Shot",
    "ShotCatalog",
    "ShotSize",
    "TransitionMatrix",
    "beam_search",
    "brute_force",
    "builtin_motion_matrix",
    "builtin_shot_size_matrix",
    "continuous_langevin",
    "encode_sequence",
    "genetic",
    "joint_energy",
    "langevin_bs",
    "langevin_ga",
    "langevin_local_step",
    "learn_transition_matrix",
    "load_catalog",
    "load_reference",
    "matrix_energy",
    "matrix_energy_gradient",
    "matrix_mse",
    "metropolis_accept",
    "motion_energy",
    "neighborhood",
    "parse_catalog",
    "parse_reference",
    "semantic_energy",
    "sequence_labels",
    "sequence_style_matrix",
    "serialize_catalog",
    "shot_size_energy",
    "shot_size_score",
    "sinkhorn",
    "validate_instance",
]
