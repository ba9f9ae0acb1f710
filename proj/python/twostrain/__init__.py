"""Two-strain periodic reaction-diffusion malaria model (C++ core)."""

from ._core import (
    ConfigError,
    ConvergenceError,
    FieldSpec,
    InvalidArgument,
    InvariantViolation,
    Model,
    ScenarioConfig,
    StrainParams,
    __version__,
    load_config,
    parse_config,
    preset,
    preset_names,
    run_scenario,
    run_sweep,
    save_config,
    seasonal_beta,
    vector_bias_scaling,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "FieldSpec",
    "InvalidArgument",
    "InvariantViolation",
    "Model",
    "ScenarioConfig",
    "StrainParams",
    "__version__",
    "load_config",
    "parse_config",
    "preset",
    "preset_names",
    "run_scenario",
    "run_sweep",
    "save_config",
    "seasonal_beta",
    "vector_bias_scaling",
]
