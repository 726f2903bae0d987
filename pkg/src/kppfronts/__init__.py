"""Fisher-KPP fronts in slowly varying media: simulator and bound-verification lab."""

from .bounds import (
    BoundParams,
    BumpSchedule,
    bump_schedule,
    bump_subsolution,
    calibrate_theta,
    check_bound,
    epsilon_max,
    exp_upper_bound,
    gaussian_lower_bound,
    heat_band_integral,
    supersolution_ubar,
    supersolution_vbar,
    theorem_rates,
    xminus_window,
)
from .levelset import LevelTrace, crossing_time, level_positions, ratio_extrema
from .media import MediaProfile, SequencePair, generate_sequences, mu_at, reaction, verify_kpp
from .solver import Field, SolverConfig, init_field, run, step

__version__ = "0.1.0"

__all__ = [
    "BoundParams",
    "BumpSchedule",
    "Field",
    "LevelTrace",
    "MediaProfile",
    "SequencePair",
    "SolverConfig",
    "bump_schedule",
    "bump_subsolution",
    "calibrate_theta",
    "check_bound",
    "crossing_time",
    "epsilon_max",
    "exp_upper_bound",
    "gaussian_lower_bound",
    "generate_sequences",
    "heat_band_integral",
    "init_field",
    "level_positions",
    "mu_at",
    "ratio_extrema",
    "reaction",
    "run",
    "step",
    "supersolution_ubar",
    "supersolution_vbar",
    "theorem_rates",
    "verify_kpp",
    "xminus_window",
]
