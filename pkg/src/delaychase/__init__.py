"""delaychase: a planar pursuit-evasion game with sensing delays.

A pursuer point mass tracks a human-steered evader, but its position and
velocity measurements arrive tau1 and tau2 seconds late.  The package
provides the delayed error dynamics and its LQR synthesis, a deterministic
DDE integrator, a numerical stability analyzer for the transcendental
characteristic equation, and a realtime game loop with a WebSocket service.
"""

from .dynamics import (
    DelaySystem,
    LqrWeights,
    PlantParams,
    RiccatiError,
    StateMatrices,
    assemble_delay_system,
    build_plant,
    fig9_benchmark,
    hayes_system,
    lqr_gain,
    solve_care,
    zero_delay_matrix,
)
from .ddesim import HistoryBuffer, SimConfig, Trajectory, simulate, simulate_two_block
from .stability import (
    CRITICAL_BAND,
    PRESET_TAUS,
    StabilityMap,
    StabilityVerdict,
    char_fn,
    classify_presets,
    envelope_growth_rate,
    rightmost_root,
    stability_map,
)
from .game import (
    ControlLaw,
    DisturbanceSpec,
    EvaderFilter,
    GameConfig,
    GameEngine,
    GameState,
    TelemetryFrame,
    disturbance_value,
    preset_select,
)
from .config import AppConfig, ConfigError, load_config

__version__ = "0.1.0"

__all__ = [
    "AppConfig",
    "ConfigError",
    "ControlLaw",
    "CRITICAL_BAND",
    "DelaySystem",
    "DisturbanceSpec",
    "EvaderFilter",
    "GameConfig",
    "GameEngine",
    "GameState",
    "HistoryBuffer",
    "LqrWeights",
    "PlantParams",
    "PRESET_TAUS",
    "RiccatiError",
    "SimConfig",
    "StabilityMap",
    "StabilityVerdict",
    "StateMatrices",
    "TelemetryFrame",
    "Trajectory",
    "assemble_delay_system",
    "build_plant",
    "char_fn",
    "classify_presets",
    "disturbance_value",
    "envelope_growth_rate",
    "fig9_benchmark",
    "hayes_system",
    "load_config",
    "lqr_gain",
    "preset_select",
    "rightmost_root",
    "simulate",
    "simulate_two_block",
    "solve_care",
    "stability_map",
    "zero_delay_matrix",
]
