"""Nehari-manifold projection, constrained gradients and the nature of v2 = (0, V2)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ManifoldError
from .grid import RadialGrid, integrate
from .model import (
    ModelParams,
    StatePair,
    differential_G,
    differential_J,
    inner,
    nehari_G,
    nehari_parts,
    norm_sq,
    riesz_gradient,
    second_variation_J,
)

RHO_MIN = 1e-8
ON_MANIFOLD_TOL = 1e-8


@dataclass(frozen=True)
class Projection:
    scaling: float
    state: StatePair
    residual: float


def nehari_scaling(a: float, b: float, c: float) -> float:
    """Positive root t of a - t^2 b - t c = 0 (b >= 0)."""
    if b > 0.0:
        disc = math.sqrt(c * c + 4.0 * a * b)
        # pick the cancellation-free branch
        return 2.0 * a / (c + disc) if c >= 0.0 else (disc - c) / (2.0 * b)
    if c > 0.0:
        return a / c
    raise ManifoldError(
        f"ray misses the Nehari manifold (int u^4 = {b:.3g}, cubic part = {c:.3g} <= 0)"
    )


def project(p: ModelParams, s: StatePair) -> Projection:
    """Scale ``s`` onto the Nehari manifold along its ray."""
    if s.is_zero():
        raise ManifoldError("the zero pair has no Nehari projection")
    a, b, c = nehari_parts(p, s)
    t = nehari_scaling(a, b, c)
    state = t * s
    return Projection(scaling=t, state=state, residual=abs(nehari_G(p, state)))


@dataclass(frozen=True)
class _Gradients:
    j_grad: StatePair
    g_grad: StatePair
    multiplier: float
    constrained: StatePair


def gradients(p: ModelParams, s: StatePair) -> _Gradients:
    """Metric gradients J', G' and the tangential part J' - mu G' (no manifold check)."""
    jp = riesz_gradient(p, differential_J(p, s))
    gp = riesz_gradient(p, differential_G(p, s))
    mu = inner(p, jp, gp) / norm_sq(p, gp)
    return _Gradients(jp, gp, mu, jp - mu * gp)


def constrained_gradient(
    p: ModelParams, s: StatePair, tol: float = ON_MANIFOLD_TOL
) -> tuple[StatePair, float]:
    """Return (J'(s) - mu G'(s), mu) with mu = <J', G'> / ||G'||^2."""
    ns = norm_sq(p, s)
    gval = nehari_G(p, s)
    if not abs(gval) <= tol * max(ns, RHO_MIN):
        raise ManifoldError(f"state is off the Nehari manifold: |G| = {abs(gval):.3e}, "
                            f"||s||^2 = {ns:.3e}")
    gr = gradients(p, s)
    return gr.constrained, gr.multiplier


def manifold_check(
    p: ModelParams, s: StatePair, tol: float = ON_MANIFOLD_TOL, rho_min: float = RHO_MIN
) -> tuple[bool, dict]:
    ns = norm_sq(p, s)
    gval = nehari_G(p, s)
    ok = abs(gval) <= tol * max(ns, rho_min) and ns > rho_min
    return bool(ok), {"G": gval, "norm_sq": ns, "rel_residual": abs(gval) / max(ns, rho_min)}


@dataclass
class V2Classification:
    """Outcome of :func:`classify_v2`.

    ``kind`` is ``"strict_local_min"``, ``"saddle"`` or ``"indeterminate"``.
    ``samples`` holds the second variation of J at v2 along (phi, 0), with phi the
    Rayleigh-quotient minimizer, and along a tangent direction (0, h2).
    """

    kind: str
    Lambda: float
    beta: float
    phi: np.ndarray = field(repr=False)
    samples: dict = field(default_factory=dict)


def tangent_v_direction(p: ModelParams, g: RadialGrid, v2: np.ndarray) -> np.ndarray:
    """A direction h2 tangent to N_2 at V2, built from a Gaussian bump."""
    bump = g.field(lambda x: np.exp(-(np.abs(x) ** 2) / 4.0) * (1.0 - np.abs(x) ** 2 / 8.0))
    zero = g.zeros()
    s = StatePair(zero, v2, g)
    dg = differential_G(p, s)
    a = integrate(g, dg.rv * bump)
    b = integrate(g, dg.rv * v2)
    return bump - (a / b) * v2


def classify_v2(
    p: ModelParams,
    grid: RadialGrid,
    v2: np.ndarray | None = None,
    resolution: float = 1e-6,
) -> V2Classification:
    """Strict local minimum for beta < Lambda, saddle for beta > Lambda."""
    from .exact import semitrivial_profile
    from .solvers.eigen import compute_Lambda

    if v2 is None:
        v2 = semitrivial_profile(p, grid)
    lam = compute_Lambda(p, grid, v2=v2)
    zero = grid.zeros()
    base = StatePair(zero, v2, grid)
    h1 = StatePair(lam.phi, zero, grid)
    h2 = StatePair(zero, tangent_v_direction(p, grid, v2), grid)
    samples = {
        "d2J_phi": second_variation_J(p, base, h1, h1),
        "d2J_h2": second_variation_J(p, base, h2, h2),
    }
    if abs(p.beta - lam.value) <= resolution * max(1.0, lam.value):
        kind = "indeterminate"
    elif p.beta < lam.value:
        kind = "strict_local_min"
    else:
        kind = "saddle"
    return V2Classification(kind=kind, Lambda=lam.value, beta=p.beta, phi=lam.phi,
                            samples=samples)
