"""Cold-spray impact simulation, splat imaging and design optimization."""

from ._core import (
    BoundsError,
    DesignPoint,
    Error,
    MLPNetwork,
    NumericalError,
    ParseError,
    RunConfig,
    analytic_flattening_cost,
    config_schema,
    fcc_atom_count,
    gen_potential,
    latin_hypercube,
    measure,
    minimize,
    optimize,
    read_png,
    report,
    simulate,
    surrogate_optimize,
    train_surrogate,
)

__all__ = [
    "BoundsError",
    "DesignPoint",
    "Error",
    "MLPNetwork",
    "NumericalError",
    "ParseError",
    "RunConfig",
    "analytic_flattening_cost",
    "config_schema",
    "fcc_atom_count",
    "gen_potential",
    "latin_hypercube",
    "measure",
    "minimize",
    "optimize",
    "read_png",
    "report",
    "simulate",
    "surrogate_optimize",
    "train_surrogate",
]
