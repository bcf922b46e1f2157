"""Closed-loop NMR parameter optimization against a simulated spectrometer."""

from ._core import (
    PoiseError,
    Routine,
    SimConfig,
    Spectrum,
    cost,
    cost_names,
    dosy_sequential,
    dosy_simultaneous,
    ernst_angle_deg,
    grid_search,
    list_routines,
    load_routine,
    load_spectrum,
    minimize,
    parse_log,
    parse_routine,
    run,
    save_spectrum,
    scale,
    unscale,
    write_routine,
)

__all__ = [
    "PoiseError",
    "Routine",
    "SimConfig",
    "Spectrum",
    "cost",
    "cost_names",
    "dosy_sequential",
    "dosy_simultaneous",
    "ernst_angle_deg",
    "grid_search",
    "list_routines",
    "load_routine",
    "load_spectrum",
    "minimize",
    "parse_log",
    "parse_routine",
    "run",
    "save_spectrum",
    "scale",
    "unscale",
    "write_routine",
]
