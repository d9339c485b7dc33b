"""Closed-form solitons and the scalar algebra of the diagonal test state t (V2, V2).

Second order (m=1)::

    V(theta) = 3 / (2 cosh^2(theta / 2))       solves V'' - V + V^2 = 0
    V2(x)    = 2 lambda2 V(sqrt(lambda2) x)    solves -v'' + lambda2 v = v^2 / 2
    U1(x)    = sqrt(2 lambda1) / cosh(sqrt(lambda1) x)

Fourth order (m=2) has no closed form: a base profile V (lambda = 1) is
computed once per dimension and rescaled as V2(x) = lambda2 V(lambda2^(1/4) x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from threading import Lock

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ParameterError, ProfileRequiredError, ThresholdNotFound
from .grid import RadialGrid, default_points, integrate, make_grid

# int_R cosh^-p(x) dx
COSH_INTEGRALS = {4: 4.0 / 3.0, 6: 16.0 / 15.0, 8: 32.0 / 35.0}


def soliton_V(theta):
    """KdV solitary wave 3 / (2 cosh^2(theta/2))."""
    return 1.5 / np.cosh(0.5 * np.asarray(theta, dtype=float)) ** 2


def soliton_U1(x, lambda1: float):
    """Positive NLS ground state sqrt(2 lambda1) / cosh(sqrt(lambda1) x)."""
    if not lambda1 > 0:
        raise ParameterError("lambda1 must be positive")
    return math.sqrt(2.0 * lambda1) / np.cosh(math.sqrt(lambda1) * np.asarray(x, dtype=float))


def soliton_V2(x, lambda2: float, m: int = 1, profile: "ScalarProfile | None" = None):
    """Semi-trivial component V2 at abscissa / radius ``x``.

    For ``m == 2`` a base :class:`ScalarProfile` at lambda = 1 must be supplied.
    """
    if not lambda2 > 0:
        raise ParameterError("lambda2 must be positive")
    x = np.asarray(x, dtype=float)
    if m == 1:
        return 2.0 * lambda2 * soliton_V(math.sqrt(lambda2) * x)
    if m != 2:
        raise ParameterError(f"order must be 1 or 2, got {m}")
    if profile is None:
        raise ProfileRequiredError(
            "fourth-order V2 needs the numerically computed base profile (see base_profile)"
        )
    return lambda2 * profile(lambda2 ** 0.25 * np.abs(x))


@dataclass(frozen=True)
class WaveParams:
    """Frequency omega and speed c of the standing-traveling ansatz."""

    omega: float
    speed: float


def ansatz_params(w: WaveParams) -> tuple[float, float]:
    """(lambda1, lambda2) = (omega + c^2/4, c)."""
    lam1 = w.omega + w.speed ** 2 / 4.0
    lam2 = w.speed
    if not (lam1 > 0 and lam2 > 0):
        raise ParameterError(
            f"ansatz gives lambda1={lam1:g}, lambda2={lam2:g}; both must be positive"
        )
    return lam1, lam2


# -- fourth-order base profile -----------------------------------------------------


@dataclass(eq=False)
class ScalarProfile:
    """A radial profile sampled on a grid, evaluable off-grid by cubic interpolation."""

    grid: RadialGrid
    values: np.ndarray
    lam: float = 1.0
    _spline: CubicSpline | None = field(default=None, repr=False)

    def __call__(self, r):
        if self._spline is None:
            g = self.grid
            keep = g.nodes >= 0.0
            self._spline = CubicSpline(g.nodes[keep], self.values[keep], bc_type="clamped")
        r = np.abs(np.asarray(r, dtype=float))
        out = np.zeros_like(r)
        inside = r <= self.grid.radius
        out[inside] = self._spline(r[inside])
        return out

    def moments(self) -> dict[str, float]:
        g, v = self.grid, self.values
        return {
            "V2": integrate(g, v ** 2),
            "V3": integrate(g, v ** 3),
            "absV3": integrate(g, np.abs(v) ** 3),
            "V4": integrate(g, v ** 4),
        }


_PROFILE_LOCK = Lock()
_PROFILES: dict[tuple, ScalarProfile] = {}


def base_profile(dim: int = 1, radius: float = 40.0, points: int | None = None) -> ScalarProfile:
    """Fourth-order ground profile of Delta^2 v + v = |v| v / 2, computed once and cached."""
    points = points or default_points(dim)
    key = (dim, float(radius), int(points))
    with _PROFILE_LOCK:
        prof = _PROFILES.get(key)
        if prof is None:
            from .model import ModelParams
            from .solvers.ground import solve_scalar_ground

            g = make_grid(dim, 2, radius, points)
            p = ModelParams(order=2, dim=dim, lambda1=1.0, lambda2=1.0)
            prof = ScalarProfile(g, solve_scalar_ground(p, g), 1.0)
            _PROFILES[key] = prof
    return prof


def semitrivial_profile(p, grid: RadialGrid) -> np.ndarray:
    """V2 on ``grid``: closed form for m=1, a direct scalar solve for m=2 (cached per grid)."""
    p.check_grid(grid)
    if p.order == 1 and p.dim == 1:
        return grid.field(lambda x: soliton_V2(x, p.lambda2))
    key = ("semitrivial", p.order, float(p.lambda2))
    with grid._lock:
        cached = grid._factor_cache.get(key)
    if cached is not None:
        return cached.copy()
    from .solvers.ground import solve_scalar_ground

    v2 = solve_scalar_ground(p, grid)
    v2.setflags(write=False)
    with grid._lock:
        grid._factor_cache[key] = v2
    return v2.copy()


# -- diagonal test state --------------------------------------------------------------


def diag_nehari_t(lambda1: float, lambda2: float, beta: float) -> float:
    """Positive root of (18/7) l2 t^2 + (1 + 3 beta) t / 2 - (1 + 5 (l1 - l2) / (12 l2)) = 0.

    t (V2, V2) lies on the Nehari manifold (m=1, N=1).
    """
    if not (lambda1 > 0 and lambda2 > 0):
        raise ParameterError("lambda1 and lambda2 must be positive")
    a = 18.0 / 7.0 * lambda2
    b = 0.5 * (1.0 + 3.0 * beta)
    c = 1.0 + 5.0 * (lambda1 - lambda2) / (12.0 * lambda2)
    if not c > 0:
        raise ParameterError("no positive Nehari scaling: constant term is not positive")
    disc = math.sqrt(b * b + 4.0 * a * c)
    return 2.0 * c / (b + disc) if b >= 0 else (disc - b) / (2.0 * a)


def diag_energy_gap(lambda1: float, lambda2: float, beta: float) -> float:
    """(18/7) l2 t^4 + t^2 (2 + 5 (l1 - l2) / (6 l2)) - 1; negative iff J(t(V2,V2)) < J(v2)."""
    t = diag_nehari_t(lambda1, lambda2, beta)
    return 18.0 / 7.0 * lambda2 * t ** 4 + t * t * (2.0 + 5.0 * (lambda1 - lambda2) / (6.0 * lambda2)) - 1.0


def diag_gap_from_moments(lambda1: float, lambda2: float, beta: float, moments: dict, dim: int) -> float:
    """Energy gap of the diagonal state for the fourth-order system, from moments of V.

    Returns 6 lambda2^(N/4 - 3) (J(t (V2, V2)) - J(v2)), i.e.
    t^2 (int|V|^3 + (l1 - l2)/l2 int V^2) + t^4 l2 int V^4 / 2 - int|V|^3 / 2,
    with t fixed by G(t (V2, V2)) = 0.
    """
    v2, v3, a3, v4 = moments["V2"], moments["V3"], moments["absV3"], moments["V4"]
    # everything divided by lambda2^(3 - N/4)
    a = a3 + (lambda1 - lambda2) / lambda2 * v2
    b = lambda2 * v4
    c = 0.5 * a3 + 1.5 * beta * v3
    if not a > 0:
        raise ParameterError("no positive Nehari scaling for the diagonal state")
    disc = math.sqrt(c * c + 4.0 * a * b)
    t = 2.0 * a / (c + disc) if c >= 0 else (disc - c) / (2.0 * b)
    return t * t * a + 0.5 * t ** 4 * b - 0.5 * a3


@dataclass(frozen=True)
class ThresholdResult:
    value: float
    lower: float
    upper: float
    gap_lower: float
    gap_upper: float


def lambda2_threshold(
    lambda1: float,
    beta: float,
    order: int = 1,
    dim: int = 1,
    profile: ScalarProfile | None = None,
    bracket: tuple[float, float] | None = None,
    tol: float = 1e-6,
) -> ThresholdResult:
    """Bisect the sign change of the diagonal energy gap in lambda2.

    Above the returned value the diagonal state beats the semi-trivial energy.
    """
    if not (lambda1 > 0 and beta > 0):
        raise ParameterError("lambda1 and beta must be positive")
    if order == 1:
        if dim != 1:
            raise ParameterError("closed-form gap is only available for N=1, m=1")

        def gap(l2):
            return diag_energy_gap(lambda1, l2, beta)
    else:
        prof = profile if profile is not None else base_profile(dim)
        mom = prof.moments()

        def gap(l2):
            return diag_gap_from_moments(lambda1, l2, beta, mom, dim)

    lo, hi = bracket or (lambda1 * 1e-3, lambda1 * 1e6)
    glo, ghi = gap(lo), gap(hi)
    if not (glo > 0 and ghi < 0):
        raise ThresholdNotFound(
            f"no threshold found in [{lo:g}, {hi:g}]: gap = ({glo:.4g}, {ghi:.4g})",
            bracket=(lo, hi), values=(glo, ghi),
        )
    while hi - lo > tol:
        mid = math.sqrt(lo * hi) if hi / lo > 4.0 else 0.5 * (lo + hi)
        gm = gap(mid)
        if gm > 0:
            lo, glo = mid, gm
        else:
            hi, ghi = mid, gm
    return ThresholdResult(0.5 * (lo + hi), lo, hi, glo, ghi)
