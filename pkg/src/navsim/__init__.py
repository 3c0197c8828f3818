"""Strapdown inertial navigation kernel and level-flight simulator.

Velocity/position update algorithms for a rotating local-level navigation
frame (North-Up-East), two-sample sculling/scrolling corrections, a WGS-84
Earth model, deterministic level-flight truth scenarios, and a navigator
that scores each algorithm family against the analytic truth.
"""

from .geo import EarthModel, GeodeticPosition, PolarSingularity, WGS84
from .navigator import (
    AttitudeSource,
    NavAbort,
    RunConfig,
    RunResult,
    compare,
    run,
)
from .scenarios import Scenario, ScenarioKind, imu_increments, truth_state
from .sculling import ImuInterval, sculling_correction, scrolling_correction
from .updates import (
    FrameRates,
    NavState,
    PosAlg,
    VelAlg,
    apply_position,
    attitude_update,
    frame_rates,
    position_increment,
    step_once,
    velocity_update,
)

__version__ = "0.1.0"

__all__ = [
    "EarthModel",
    "GeodeticPosition",
    "PolarSingularity",
    "WGS84",
    "AttitudeSource",
    "NavAbort",
    "RunConfig",
    "RunResult",
    "compare",
    "run",
    "Scenario",
    "ScenarioKind",
    "imu_increments",
    "truth_state",
    "ImuInterval",
    "sculling_correction",
    "scrolling_correction",
    "FrameRates",
    "NavState",
    "PosAlg",
    "VelAlg",
    "apply_position",
    "attitude_update",
    "frame_rates",
    "position_increment",
    "step_once",
    "velocity_update",
    "__version__",
]
