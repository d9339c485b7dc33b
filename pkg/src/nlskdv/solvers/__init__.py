"""Ground states, mountain-pass bound states, the threshold Lambda and small-coupling bound states."""

from .eigen import LambdaResult, compute_Lambda
from .ground import descend, solve_ground, solve_scalar_ground
from .mountain_pass import solve_mountain_pass
from .newton import newton_critical, solve_perturbative, unperturbed_pair
from .report import SolveReport

__all__ = [
    "LambdaResult",
    "SolveReport",
    "compute_Lambda",
    "descend",
    "newton_critical",
    "solve_ground",
    "solve_mountain_pass",
    "solve_perturbative",
    "solve_scalar_ground",
    "unperturbed_pair",
]
