"""Discrete-time quantum walks on a line and a cycle with coin symmetries and coin noise."""

from ._backend import BACKEND
from .analysis import (
    SweepPoint,
    SymmetryVerdict,
    fit_scaling_exponent,
    std_dev,
    symmetry_verdict,
    time_average,
    total_variation,
    uniformity_deviation,
)
from .channels import (
    DephasingPhysicalParams,
    GadPhysicalParams,
    KrausChannel,
    QubitBloch,
    apply_channel,
    bit_flip,
    gad_channel,
    gad_closed_form,
    gad_from_physical,
    phase_flip,
    phase_flip_from_physical,
)
from .coins import CoinOp, CoinParams, GateOp, build_coin, gate, hadamard, reflect_coin, variant_coin
from .config import ConfigError, ExperimentConfig
from .engine import (
    ShiftKind,
    StepOverride,
    StepPipeline,
    Symmetry,
    WalkConfig,
    augment,
    distribution,
    distributions_over_time,
    evolve_density,
    evolve_pure,
    make_config,
    parse_symmetry,
    spatial_inversion,
)
from .errors import BranchCapError, InvariantError, LatticeOverflowError
from .lattice import DensityState, Distribution, InitialState, PureState, Topology, position_distribution
from .trajectories import enumerate_exact, sample_monte_carlo, verify_symmetry_trajectorywise

__version__ = "0.1.0"
