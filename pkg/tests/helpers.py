"""Shared fixtures-as-functions: grids, closed-form states and random smooth fields."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from nlskdv.exact import soliton_U1, soliton_V2
from nlskdv.grid import make_grid
from nlskdv.model import (
    ModelParams,
    StatePair,
    differential_G,
    differential_J,
    energy_J,
    nehari_G,
    norm_sq,
    second_variation_J,
)


@lru_cache(maxsize=None)
def line_grid(order: int = 1, points: int = 4001, radius: float = 40.0):
    return make_grid(1, order, radius, points)


def closed_pair(g, lambda1=1.0, lambda2=1.0, u=True, v=True) -> StatePair:
    uu = g.field(lambda x: soliton_U1(x, lambda1)) if u else g.zeros()
    vv = g.field(lambda x: soliton_V2(x, lambda2)) if v else g.zeros()
    return StatePair(uu, vv, g)


def smooth_field(g, rng, signed=True, bumps=3, scale=2.0):
    """Sum of Gaussian bumps with random centres, widths and amplitudes."""
    r = g.nodes
    f = np.zeros(g.points)
    span = min(g.radius / 3.0, 8.0)
    for _ in range(bumps):
        c = rng.uniform(-span, span) if g.dimension == 1 else rng.uniform(0.0, span)
        w = rng.uniform(0.7, 3.0)
        a = scale * (rng.uniform(-1.0, 1.0) if signed else rng.uniform(0.1, 1.0))
        f += a * np.exp(-((r - c) ** 2) / (2 * w * w))
    f[g.boundary] = 0.0
    return f


def smooth_pair(g, rng, signed=True, scale=2.0) -> StatePair:
    return StatePair(smooth_field(g, rng, signed, scale=scale),
                     smooth_field(g, rng, signed, scale=scale), g)


def model(order=1, dim=1, lambda1=1.0, lambda2=1.0, beta=1.0) -> ModelParams:
    return ModelParams(order=order, dim=dim, lambda1=lambda1, lambda2=lambda2, beta=beta)


def observed_order(errors) -> list[float]:
    """log2 ratios of successive errors under h -> h/2."""
    return [math.log2(a / b) for a, b in zip(errors, errors[1:])]


def lambda_oracle(lambda1: float, lambda2: float) -> float:
    """Exact inf ||phi||_1^2 / int V2 phi^2 for m=1, N=1.

    With a = lambda1/lambda2 and z = sqrt(lambda2) x / 2 the eigenproblem reads
    -phi_zz + 4a phi = 12 Lambda sech^2(z) phi.  The Poschl-Teller well
    s(s+1) sech^2 has ground level -s^2, so s = 2 sqrt(a) and
    Lambda = s (s + 1) / 12 with eigenfunction sech^s(z).
    """
    a = lambda1 / lambda2
    return math.sqrt(a) * (2.0 * math.sqrt(a) + 1.0) / 6.0


def unit(p, h: StatePair) -> StatePair:
    return (1.0 / math.sqrt(norm_sq(p, h))) * h


def fd_sample(g, p, rng):
    """A base pair s and unit directions h, k for finite-difference checks.

    For the fourth-order model the v-component of s is kept positive wherever
    the directions live: |v|^3 is only C^2, so central differences across
    v = 0 lose an order in eps.
    """
    s = smooth_pair(g, rng, scale=1.0)
    if p.order == 2:
        background = g.field(lambda x: 1.0 / np.cosh(np.abs(x) / 4.0))
        s = StatePair(s.u, np.abs(s.v) + background, g)
    return s, unit(p, smooth_pair(g, rng)), unit(p, smooth_pair(g, rng))


def fd_errors(p, s, h, k, eps=1e-4):
    """Relative errors of dJ[h], dG[h] and d2J[h][k] against central differences."""
    def rel(fd, exact):
        return abs(fd - exact) / abs(exact)

    dj = differential_J(p, s)(h)
    dg = differential_G(p, s)(h)
    d2 = second_variation_J(p, s, h, k)
    fj = (energy_J(p, s + eps * h) - energy_J(p, s - eps * h)) / (2 * eps)
    fg = (nehari_G(p, s + eps * h) - nehari_G(p, s - eps * h)) / (2 * eps)
    f2 = (differential_J(p, s + eps * k)(h) - differential_J(p, s - eps * k)(h)) / (2 * eps)
    return rel(fj, dj), rel(fg, dg), rel(f2, d2)
