"""Heat equation uniqueness-class experiments (bindings to the C++ core)."""

from ._heatlab import (
    ConfigError,
    LogScalar,
    QuadratureError,
    Solution,
    build_schedule,
    classify_osgood,
    cutoff_constant,
    heat_kernel,
    integral_lower_bound,
    run,
    spike_radii,
    verify_example,
)

__all__ = [
    "ConfigError",
    "LogScalar",
    "QuadratureError",
    "Solution",
    "build_schedule",
    "classify_osgood",
    "cutoff_constant",
    "heat_kernel",
    "integral_lower_bound",
    "run",
    "spike_radii",
    "verify_example",
]
