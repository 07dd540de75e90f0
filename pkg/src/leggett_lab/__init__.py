"""Numerical laboratory for Leggett and CHSH inequality tests with
entangled coherent states and a two-qubit polarization baseline."""

from .coherent_algebra import (
    EcsSpec,
    LogValue,
    gram_expectation,
    gram_matrix,
    gram_norm,
    kappa_K,
    operator_elements,
    pseudospin_bloch,
    pseudospin_map,
    rotation_map,
)
from .correlations import (
    CorrelationModel,
    ecs_model,
    ecs_onoff_correlation,
    ecs_onoff_local_avg,
    ecs_parity_correlation,
    ecs_parity_local_avg,
    ecs_pseudospin_correlation,
    ecs_pseudospin_local_avg,
    malus_local_avg,
    pes_correlation,
    pes_model,
)
from .errors import CertificationError, ConvergenceError, LeggettLabError, TruncationError
from .geometry import (
    Direction,
    RigidRotation,
    SettingsLayout,
    angle_between,
    build_layout,
    from_cartesian,
    rotate_settings,
    to_cartesian,
)
from .inequality import (
    BoundResult,
    ChshEvaluation,
    ImplicationReport,
    LeggettEvaluation,
    analytic_fmin,
    chsh_at_layout,
    chsh_value,
    evaluate_leggett,
    implication_check,
    leggett_bound,
    leggett_value,
)
from .optimize import (
    ScanTask,
    SearchConfig,
    SimplexResult,
    SweepRecord,
    ThresholdResult,
    numeric_fmin,
    optimize_chsh,
    optimize_rigid,
    scan,
    simplex_maximize,
    simplex_minimize,
    threshold_alpha,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
