"""Numerical toolkit for stationary coupled NLS-KdV systems of second and fourth order."""

from .errors import (
    GridError,
    ManifoldError,
    NLSKdVError,
    NoPassGeometry,
    ParameterError,
    ProfileRequiredError,
    SolverError,
    ThresholdNotFound,
)
from .grid import RadialGrid, default_grid, integrate, make_grid
from .model import ModelParams, StatePair, energy_J, nehari_G
from .nehari import classify_v2, constrained_gradient, project

__version__ = "0.1.0"

__all__ = [
    "GridError",
    "ManifoldError",
    "ModelParams",
    "NLSKdVError",
    "NoPassGeometry",
    "ParameterError",
    "ProfileRequiredError",
    "RadialGrid",
    "SolverError",
    "StatePair",
    "ThresholdNotFound",
    "classify_v2",
    "constrained_gradient",
    "default_grid",
    "energy_J",
    "integrate",
    "make_grid",
    "nehari_G",
    "project",
]
