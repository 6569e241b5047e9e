"""Indoor RSSI positioning over a pinched dielectric waveguide.

The library simulates the uplink of users served by pinching antennas
(PAs) placed along a lossy dielectric waveguide, inverts the received
powers to per-antenna ranges, and localizes each user in 2-D with a
weighted-least-squares lateration solver. An experiment harness layers
Monte-Carlo robustness runs, noise sweeps, and spatial error heatmaps
on top, all reproducible from a single master seed.
"""

from .errors import (
    ConfigError,
    DomainError,
    EvanescentModeError,
    PinchlocError,
    RankDeficiencyError,
    SolveError,
)
from .geometry import PaLayout, Room, UserPosition, distance_3d, even_pa_placement
from .channel import (
    CHI_STD_SCALE,
    SPEED_OF_LIGHT,
    CarrierConfig,
    NoiseModel,
    PropagationConstants,
    TxConfig,
    WaveguideMaterial,
    clean_received_power,
    dbm_to_watts,
    large_scale_gain,
    propagation_constants_approx,
    propagation_constants_exact,
    received_power,
    received_signal,
    small_scale_phase,
    waveguide_transfer,
)
from .ranging import (
    DEFAULT_POWER_FLOOR,
    RangeMeasurement,
    collect_measurements,
    estimate_distance,
    measurements_for_user,
    range_cap_floor,
)
from .solver import (
    CONDITION_LIMIT,
    LinearSystem,
    PositionEstimate,
    WeightSpec,
    build_system,
    locate,
    recover_position,
    solve_wls,
)
from .simulate import (
    HeatmapGrid,
    MonteCarloResult,
    Scenario,
    SweepPoint,
    SweepResult,
    TrialResult,
    heatmap,
    monte_carlo,
    noise_sweep,
    run_trial,
)
from .config import (
    RunConfig,
    default_run_config,
    default_scenario,
    load_config,
    parse_config,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "PinchlocError",
    "ConfigError",
    "DomainError",
    "RankDeficiencyError",
    "SolveError",
    "EvanescentModeError",
    "Room",
    "PaLayout",
    "UserPosition",
    "distance_3d",
    "even_pa_placement",
    "SPEED_OF_LIGHT",
    "CHI_STD_SCALE",
    "CarrierConfig",
    "WaveguideMaterial",
    "PropagationConstants",
    "TxConfig",
    "NoiseModel",
    "dbm_to_watts",
    "large_scale_gain",
    "small_scale_phase",
    "propagation_constants_approx",
    "propagation_constants_exact",
    "waveguide_transfer",
    "received_signal",
    "clean_received_power",
    "received_power",
    "DEFAULT_POWER_FLOOR",
    "RangeMeasurement",
    "estimate_distance",
    "range_cap_floor",
    "collect_measurements",
    "measurements_for_user",
    "CONDITION_LIMIT",
    "WeightSpec",
    "LinearSystem",
    "PositionEstimate",
    "build_system",
    "solve_wls",
    "recover_position",
    "locate",
    "Scenario",
    "TrialResult",
    "SweepPoint",
    "SweepResult",
    "MonteCarloResult",
    "HeatmapGrid",
    "run_trial",
    "monte_carlo",
    "noise_sweep",
    "heatmap",
    "RunConfig",
    "default_scenario",
    "default_run_config",
    "parse_config",
    "load_config",
]
