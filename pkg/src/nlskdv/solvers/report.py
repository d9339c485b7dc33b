"""Result record shared by the solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..model import StatePair


@dataclass
class SolveReport:
    """Outcome of a solve.

    ``trace`` holds one ``(iteration, energy, gradient_norm)`` tuple per iteration
    (for the mountain-pass string the energy is the path maximum).
    ``nehari_residual`` is |G(state)| and ``grad_norm`` the metric norm of the
    constrained gradient (or of J' after a Newton refinement).
    """

    state: StatePair
    energy: float
    nehari_residual: float
    grad_norm: float
    iterations: int
    converged: bool
    multiplier: float = 0.0
    semi_trivial: bool = False
    trace: list = field(default_factory=list, repr=False)
    info: dict = field(default_factory=dict, repr=False)

    def summary(self) -> dict:
        return {
            "energy": self.energy,
            "nehari_residual": self.nehari_residual,
            "grad_norm": self.grad_norm,
            "iterations": self.iterations,
            "converged": self.converged,
            "multiplier": self.multiplier,
            "semi_trivial": self.semi_trivial,
        }
