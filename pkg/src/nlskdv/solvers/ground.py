"""Ground states by projected Sobolev-gradient descent on the Nehari manifold."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ManifoldError, SolverError
from ..grid import RadialGrid, default_grid
from ..model import (
    ModelParams,
    StatePair,
    energy_difference,
    energy_J,
    nehari_G,
    norm_sq,
    semi_trivial_flag,
)
from ..nehari import gradients, project
from .report import SolveReport

ARMIJO_C = 1e-4
STEP_SHRINK = 0.5
MIN_STEP = 1e-12


def descend(
    p: ModelParams,
    s0: StatePair,
    tol: float = 1e-8,
    max_iters: int = 20000,
    step0: float = 1.0,
    symmetric: bool = True,
) -> SolveReport:
    """Armijo-damped descent along -(J' - mu G') followed by re-projection.

    The sufficient-decrease test uses :func:`energy_difference`, so it keeps
    working when the decrease is far below the round-off of J itself.  The
    trace energies are J(s0) plus the accumulated accepted decreases, hence
    exactly non-increasing; the report's ``energy`` is J evaluated directly.

    Raises :class:`SolverError` (with the partial report attached) when the line
    search stalls or the iteration budget runs out.
    """
    p.check_grid(s0.grid)
    if symmetric:
        s0 = s0.reflect()
    s = project(p, s0).state
    J = energy_J(p, s)
    trace = []
    step = step0
    it = 0
    while True:
        gr = gradients(p, s)
        d = gr.constrained
        gn = math.sqrt(max(norm_sq(p, d), 0.0))
        trace.append((it, J, gn))
        if gn <= tol:
            return _report(p, s, gn, gr.multiplier, it, True, trace)
        if it >= max_iters:
            rep = _report(p, s, gn, gr.multiplier, it, False, trace)
            raise SolverError(f"no convergence after {it} iterations (|grad| = {gn:.3e})", rep)
        alpha = min(step0, 2.0 * step)
        while True:
            trial = s - alpha * d
            if symmetric:
                trial = trial.reflect()
            try:
                cand = project(p, trial).state
                dJ = energy_difference(p, cand, s)
            except ManifoldError:
                dJ = math.inf
            if dJ <= -ARMIJO_C * alpha * gn * gn:
                break
            alpha *= STEP_SHRINK
            if alpha < MIN_STEP:
                rep = _report(p, s, gn, gr.multiplier, it, False, trace)
                raise SolverError(f"line search stalled at iteration {it} (|grad| = {gn:.3e})", rep)
        s, J, step = cand, J + dJ, alpha
        it += 1


def _report(p, s, gn, mu, it, ok, trace) -> SolveReport:
    return SolveReport(
        state=s,
        energy=energy_J(p, s),
        nehari_residual=abs(nehari_G(p, s)),
        grad_norm=gn,
        iterations=it,
        converged=ok,
        multiplier=mu,
        semi_trivial=semi_trivial_flag(p, s),
        trace=trace,
    )


def solve_ground(
    p: ModelParams,
    init: StatePair,
    tol: float = 1e-8,
    max_iters: int = 20000,
    symmetric: bool = True,
    nonnegative: bool = True,
) -> SolveReport:
    """Minimize J on the Nehari manifold starting from ``init``.

    When ``nonnegative`` is set and re-projecting ``|s|`` does not raise the
    energy by more than ``tol``, the non-negative representative is returned.
    """
    rep = descend(p, init, tol=tol, max_iters=max_iters, symmetric=symmetric)
    if nonnegative and (np.any(rep.state.u < 0) or np.any(rep.state.v < 0)):
        cand = project(p, rep.state.abs()).state
        if energy_J(p, cand) <= rep.energy + tol:
            again = descend(p, cand, tol=tol, max_iters=max_iters, symmetric=symmetric)
            if again.energy <= rep.energy + tol:
                again.iterations += rep.iterations
                again.trace = rep.trace + again.trace
                rep = again
    rep.info["initial_energy"] = rep.trace[0][1]
    return rep


def scalar_initial_guess(p: ModelParams, g: RadialGrid) -> np.ndarray:
    """A positive bump with the semi-trivial amplitude and decay rate."""
    k = p.lambda2 ** (1.0 / (2 * p.order))
    return g.field(lambda x: 3.0 * p.lambda2 / np.cosh(0.5 * k * np.abs(x)) ** 2)


def solve_scalar_ground(
    p: ModelParams,
    g: RadialGrid | None = None,
    init: np.ndarray | None = None,
    tol: float = 1e-9,
    max_iters: int = 20000,
) -> np.ndarray:
    """Ground state V2 of the scalar v-equation, i.e. the coupled flow with u = 0."""
    if g is None:
        g = default_grid(p.dim, p.order, p.lambda1, p.lambda2)
    p.check_grid(g)
    v0 = scalar_initial_guess(p, g) if init is None else g.check(init)
    rep = descend(p, StatePair(g.zeros(), v0, g), tol=tol, max_iters=max_iters)
    return rep.state.v.copy()
