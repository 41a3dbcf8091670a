"""Figure rendering for the spin-chain protocol simulator's output files."""

from .plots import decay_figure, plot_decay, plot_profile, profile_figure
from .readers import (
    DecaySeries,
    ProfileSeries,
    SchemaError,
    read_decay,
    read_profile,
    read_report,
)

__version__ = "0.1.0"

__all__ = [
    "DecaySeries",
    "ProfileSeries",
    "SchemaError",
    "decay_figure",
    "plot_decay",
    "plot_profile",
    "profile_figure",
    "read_decay",
    "read_profile",
    "read_report",
]
