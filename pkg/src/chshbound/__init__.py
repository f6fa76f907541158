"""Bounds on the CHSH Bell operator under local vertical measurements."""

from .bell import (
    BlochVector,
    MeasurementSetting,
    bell_operator,
    canonical_eigensystem,
    canonical_settings,
    canonical_W,
    chsh_value,
    max_violating_state,
    tsirelson_rhs,
)
from .entanglement import concurrence, horodecki_M, horodecki_max, von_neumann_entropy
from .optimizer import (
    BoundResult,
    OptimizerConfig,
    maximize_bound,
    maximize_bounds,
    objective,
    pure_bound_analytic,
    sweep_lambda,
    sweep_theta,
)
from .states import (
    DensityMatrix,
    InvalidState,
    PureState,
    SchmidtForm,
    lambda_state,
    pure_to_density,
    schmidt_angle,
    schmidt_to_pure,
)

__version__ = "0.1.0"
