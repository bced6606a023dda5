"""Structured-sparsity training with exact weighted group proximal updates.

Core pieces: closed-branch weighted prox operators for the mixed l1/l2 and
group-MCP penalties under diagonal preconditioners (``weighted_prox``),
safeguarded scalar root solvers (``solvers``), proximal preconditioned
optimizers (``optimizer``), structural pruning (``pruning``), and experiment
drivers behind the ``groupprox`` CLI (``experiments``, ``cli``).

Hot kernels run through a compiled extension when it is importable and fall
back to pure numpy otherwise; see ``available_backends``/``set_backend`` and
the ``GROUPPROX_KERNELS`` environment variable.
"""

from ._kernels import available_backends, backend_name, set_backend
from .exceptions import (
    BadBracketError,
    CheckpointError,
    ConfigError,
    DegenerateLayerError,
    GroupProxError,
    InvalidPartitionError,
    NotInteriorError,
    SolverFailedError,
    StepSizeError,
)
from .experiments import (
    ExperimentConfig,
    bench_solvers,
    prox_check,
    prune_checkpoint,
    train,
)
from .groups import (
    GroupPartition,
    as_param_vector,
    as_preconditioner,
    contiguous_partition,
    group_l2_norm,
    validate_partition,
    weighted_group_norm,
)
from .network import (
    Layer,
    LayeredNetwork,
    column_groups,
    generate_teacher_student,
    load_checkpoint,
    load_param_checkpoint,
    network_forward,
    network_loss_and_grad,
    read_checkpoint_header,
    row_groups,
    save_checkpoint,
    save_param_checkpoint,
)
from .optimizer import (
    LRSchedule,
    OptimizerState,
    PreconditionerRule,
    ProxGenConfig,
    ProxTolSchedule,
    StepStats,
    group_sparsity,
    penalty_subgradient,
    proxgen_step,
    stationarity_residual,
    subgradient_step,
    update_moments,
)
from .penalties import (
    GROUP_MCP,
    MIXED_L1L2,
    PenaltyConfig,
    mcp_scalar,
    penalty_value,
    prox_l2_unweighted,
    prox_mcp_l2_unweighted,
)
from .problems import (
    LeastSquaresProblem,
    LogisticProblem,
    generate_group_sparse_regression,
    generate_logistic_problem,
)
from .pruning import (
    GroupMasks,
    PruneReport,
    functional_equivalence_check,
    propagate_and_prune,
    zero_group_masks,
)
from .solvers import (
    SolverConfig,
    SolverStats,
    ThetaBracket,
    adaprox_solve,
    bisection_solve,
    newton_solve,
)
from .weighted_prox import (
    FullProxStats,
    WeightedProxOutcome,
    theta_bounds_l2,
    theta_bounds_mcp,
    theta_residual_l2,
    theta_residual_mcp,
    weighted_prox_full,
    weighted_prox_l2,
    weighted_prox_mcp_l2,
)

__version__ = "0.1.0"

__all__ = [
    "BadBracketError",
    "CheckpointError",
    "ConfigError",
    "DegenerateLayerError",
    "ExperimentConfig",
    "FullProxStats",
    "GROUP_MCP",
    "GroupMasks",
    "GroupPartition",
    "GroupProxError",
    "InvalidPartitionError",
    "LRSchedule",
    "Layer",
    "LayeredNetwork",
    "LeastSquaresProblem",
    "LogisticProblem",
    "MIXED_L1L2",
    "NotInteriorError",
    "OptimizerState",
    "PenaltyConfig",
    "PreconditionerRule",
    "ProxGenConfig",
    "ProxTolSchedule",
    "PruneReport",
    "SolverConfig",
    "SolverFailedError",
    "SolverStats",
    "StepSizeError",
    "StepStats",
    "ThetaBracket",
    "WeightedProxOutcome",
    "adaprox_solve",
    "as_param_vector",
    "as_preconditioner",
    "available_backends",
    "backend_name",
    "bench_solvers",
    "bisection_solve",
    "column_groups",
    "contiguous_partition",
    "functional_equivalence_check",
    "generate_group_sparse_regression",
    "generate_logistic_problem",
    "generate_teacher_student",
    "group_l2_norm",
    "group_sparsity",
    "load_checkpoint",
    "load_param_checkpoint",
    "mcp_scalar",
    "network_forward",
    "network_loss_and_grad",
    "newton_solve",
    "penalty_subgradient",
    "penalty_value",
    "propagate_and_prune",
    "prox_check",
    "prox_l2_unweighted",
    "prox_mcp_l2_unweighted",
    "proxgen_step",
    "prune_checkpoint",
    "read_checkpoint_header",
    "row_groups",
    "save_checkpoint",
    "save_param_checkpoint",
    "set_backend",
    "stationarity_residual",
    "subgradient_step",
    "theta_bounds_l2",
    "theta_bounds_mcp",
    "theta_residual_l2",
    "theta_residual_mcp",
    "train",
    "update_moments",
    "validate_partition",
    "weighted_group_norm",
    "weighted_prox_full",
    "weighted_prox_l2",
    "weighted_prox_mcp_l2",
    "zero_group_masks",
]
