from .grids import Grid, RadialField, line_grid, radial_grid
from .scheme import (
    Sampling,
    SimulationRun,
    Stepper,
    domain_full,
    flux_field,
    front_position,
    rear_position,
    run,
    step,
)
from .data import (
    box_datum,
    init_datum,
    kanel_bump,
    left_plateau_datum,
    plateau_datum,
    wave_datum,
    wave_evaluator,
)
from .envelope import Envelope, OrderingReport, compare_envelope, envelope

__all__ = [
    "Grid",
    "RadialField",
    "line_grid",
    "radial_grid",
    "Sampling",
    "SimulationRun",
    "Stepper",
    "domain_full",
    "flux_field",
    "front_position",
    "rear_position",
    "run",
    "step",
    "box_datum",
    "init_datum",
    "kanel_bump",
    "left_plateau_datum",
    "plateau_datum",
    "wave_datum",
    "wave_evaluator",
    "Envelope",
    "OrderingReport",
    "compare_envelope",
    "envelope",
]
