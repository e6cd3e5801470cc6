"""Numerical laboratory for the large-time behaviour of u_t - u_xx = a F(u)_x."""

from .core import (
    INF,
    Field,
    FluxKind,
    Frame,
    Grid1D,
    InitialData,
    Nonlinearity,
    RunConfig,
    Scheme,
    log_times,
    lp_norm,
    make_initial,
    trapezoid_integral,
)
from .diagnostics import (
    DecayReport,
    Regime,
    RegimeSpec,
    attractor_distance,
    classify,
    fit_decay,
    weak_rate_check,
)
from .errors import CdasymError
from .exact import NWave, burgers_exact, burgers_profile, heat_kernel, heat_solution
from .solver import Trajectory, run
from .spectral import WeightedBasis

__version__ = "0.1.0"

__all__ = [
    "INF", "Field", "FluxKind", "Frame", "Grid1D", "InitialData", "Nonlinearity", "RunConfig",
    "Scheme", "log_times", "lp_norm", "make_initial", "trapezoid_integral", "DecayReport", "Regime",
    "RegimeSpec", "attractor_distance", "classify", "fit_decay", "weak_rate_check", "CdasymError",
    "NWave", "burgers_exact", "burgers_profile", "heat_kernel", "heat_solution", "Trajectory", "run",
    "WeightedBasis",
]
