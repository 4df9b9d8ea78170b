"""Python access to the nonlinear Helmholtz solver."""

from ._core import (
    NlhError,
    characteristic_root,
    critical_power_ratio,
    normalize_config,
    preset,
    preset_names,
    run,
    soliton_profile,
    solve_slab_1d,
    transfer_matrix,
)

__all__ = [
    "NlhError",
    "characteristic_root",
    "critical_power_ratio",
    "normalize_config",
    "preset",
    "preset_names",
    "run",
    "soliton_profile",
    "solve_slab_1d",
    "transfer_matrix",
]
