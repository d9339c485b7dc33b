"""Energies, variations and gradients of the coupled NLS-KdV functional.

With ``D`` the gradient (m=1) or the Laplacian (m=2) and
``||u||_j^2 = int |Du|^2 + lambda_j u^2``::

    J(u, v) = 1/2 ||u||_1^2 - 1/4 int u^4 + 1/2 ||v||_2^2 - 1/6 int N(v) - beta/2 int u^2 v

where ``N(v) = v^3`` for the second-order system and ``|v|^3`` for the
fourth-order one.  Derivatives are returned as :class:`Covector` objects
(pointwise strong-form residuals, paired with test fields through the
quadrature weights) and turned into metric gradients by :func:`riesz_gradient`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import GridError, ParameterError
from .grid import MAX_DIM, Field, RadialGrid, apply_polylaplacian, integrate, sobolev_inner


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the stationary system.

    ``order`` is the operator order m (1: -Delta, 2: Delta^2) and also fixes the
    nonlinearity convention of the second equation (signed v^2 for m=1,
    |v| v for m=2).
    """

    order: int = 1
    dim: int = 1
    lambda1: float = 1.0
    lambda2: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ParameterError(f"order must be 1 or 2, got {self.order!r}")
        if not 1 <= self.dim <= MAX_DIM[self.order]:
            raise ParameterError(
                f"dimension {self.dim} not admissible for order {self.order} "
                f"(1 <= N <= {MAX_DIM[self.order]})"
            )
        if not (self.lambda1 > 0 and self.lambda2 > 0):
            raise ParameterError(
                f"lambda1 and lambda2 must be positive, got {self.lambda1}, {self.lambda2}"
            )

    def replace(self, **changes) -> "ModelParams":
        values = dict(order=self.order, dim=self.dim, lambda1=self.lambda1,
                      lambda2=self.lambda2, beta=self.beta)
        values.update(changes)
        return ModelParams(**values)

    def check_grid(self, g: RadialGrid) -> None:
        if g.order != self.order or g.dimension != self.dim:
            raise GridError(
                f"grid (N={g.dimension}, m={g.order}) does not match model "
                f"(N={self.dim}, m={self.order})"
            )


@dataclass(frozen=True, eq=False)
class StatePair:
    """A pair (u, v) of fields on one grid."""

    u: Field
    v: Field
    grid: RadialGrid

    def __post_init__(self):
        object.__setattr__(self, "u", self.grid.check(self.u))
        object.__setattr__(self, "v", self.grid.check(self.v))

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "StatePair":
        return cls(grid.zeros(), grid.zeros(), grid)

    def _like(self, u, v) -> "StatePair":
        return StatePair(u, v, self.grid)

    def __add__(self, other: "StatePair") -> "StatePair":
        return self._like(self.u + other.u, self.v + other.v)

    def __sub__(self, other: "StatePair") -> "StatePair":
        return self._like(self.u - other.u, self.v - other.v)

    def __mul__(self, t: float) -> "StatePair":
        return self._like(t * self.u, t * self.v)

    __rmul__ = __mul__

    def __neg__(self) -> "StatePair":
        return self._like(-self.u, -self.v)

    def abs(self) -> "StatePair":
        return self._like(np.abs(self.u), np.abs(self.v))

    def reflect(self) -> "StatePair":
        """Even part (N=1); radial grids are returned unchanged."""
        return self._like(self.grid.reflect(self.u), self.grid.reflect(self.v))

    def clamp_boundary(self) -> "StatePair":
        u, v = self.u.copy(), self.v.copy()
        u[self.grid.boundary] = 0.0
        v[self.grid.boundary] = 0.0
        return self._like(u, v)

    def is_zero(self) -> bool:
        return not (np.any(self.u) or np.any(self.v))

    def stacked(self) -> np.ndarray:
        """Interior values of u then v, as one vector."""
        i = self.grid.interior
        return np.concatenate([self.u[i], self.v[i]])

    @classmethod
    def from_stacked(cls, x: np.ndarray, grid: RadialGrid) -> "StatePair":
        k = grid.n_interior
        u, v = grid.zeros(), grid.zeros()
        u[grid.interior] = x[:k]
        v[grid.interior] = x[k:]
        return cls(u, v, grid)


@dataclass(frozen=True, eq=False)
class Covector:
    """Linear functional l[h] = sum_i w_i (ru_i h1_i + rv_i h2_i)."""

    ru: Field
    rv: Field
    grid: RadialGrid

    def __call__(self, h: StatePair) -> float:
        w = self.grid.weights
        return float(np.sum(w * (self.ru * h.u + self.rv * h.v)))

    def __sub__(self, other: "Covector") -> "Covector":
        return Covector(self.ru - other.ru, self.rv - other.rv, self.grid)

    def __mul__(self, t: float) -> "Covector":
        return Covector(t * self.ru, t * self.rv, self.grid)

    __rmul__ = __mul__


# -- scalar pieces -----------------------------------------------------------


def _cubic(p: ModelParams, v: Field) -> Field:
    """The density N(v) of the KdV nonlinearity: v^3 (m=1) or |v|^3 (m=2)."""
    return v ** 3 if p.order == 1 else np.abs(v) ** 3


def _quad(p: ModelParams, v: Field) -> Field:
    """N'(v)/3: v^2 (m=1) or |v| v (m=2)."""
    return v * v if p.order == 1 else np.abs(v) * v


def norm_sq(p: ModelParams, s: StatePair) -> float:
    """||s||^2 = ||u||_1^2 + ||v||_2^2."""
    g = s.grid
    return sobolev_inner(g, s.u, s.u, p.lambda1) + sobolev_inner(g, s.v, s.v, p.lambda2)


def inner(p: ModelParams, a: StatePair, b: StatePair) -> float:
    g = a.grid
    return sobolev_inner(g, a.u, b.u, p.lambda1) + sobolev_inner(g, a.v, b.v, p.lambda2)


def energy_I1(p: ModelParams, g: RadialGrid, u: Field) -> float:
    """I1(u) = 1/2 ||u||_1^2 - 1/4 int u^4."""
    return 0.5 * sobolev_inner(g, u, u, p.lambda1) - 0.25 * integrate(g, u ** 4)


def energy_I2(p: ModelParams, g: RadialGrid, v: Field) -> float:
    """I2(v) = 1/2 ||v||_2^2 - 1/6 int N(v)."""
    return 0.5 * sobolev_inner(g, v, v, p.lambda2) - integrate(g, _cubic(p, v)) / 6.0


def energy_J(p: ModelParams, s: StatePair) -> float:
    p.check_grid(s.grid)
    g = s.grid
    return (energy_I1(p, g, s.u) + energy_I2(p, g, s.v)
            - 0.5 * p.beta * integrate(g, s.u ** 2 * s.v))


def energy_difference(p: ModelParams, a: StatePair, b: StatePair) -> float:
    """J(a) - J(b), formed from a - b so that it stays accurate when a and b are close."""
    g = a.grid
    du, dv = a.u - b.u, a.v - b.v
    su, sv = a.u + b.u, a.v + b.v
    quad = 0.5 * (sobolev_inner(g, du, su, p.lambda1) + sobolev_inner(g, dv, sv, p.lambda2))
    quartic = integrate(g, du * su * (a.u ** 2 + b.u ** 2)) / 4.0
    if p.order == 1:
        cubic = integrate(g, dv * (a.v ** 2 + a.v * b.v + b.v ** 2))
    else:
        aa, ab = np.abs(a.v), np.abs(b.v)
        den = aa + ab
        # |a| - |b| = (a - b)(a + b) / (|a| + |b|)
        dabs = np.divide(dv * sv, den, out=np.zeros_like(den), where=den > 0)
        cubic = integrate(g, dabs * (aa * aa + aa * ab + ab * ab))
    coupling = integrate(g, du * su * a.v + b.u ** 2 * dv)
    return quad - quartic - cubic / 6.0 - 0.5 * p.beta * coupling


def nehari_parts(p: ModelParams, s: StatePair) -> tuple[float, float, float]:
    """(A, B, C) with G(t s) = t^2 A - t^4 B - t^3 C.

    A = ||s||^2, B = int u^4, C = 1/2 int N(v) + 3/2 beta int u^2 v.
    """
    g = s.grid
    a = norm_sq(p, s)
    b = integrate(g, s.u ** 4)
    c = 0.5 * integrate(g, _cubic(p, s.v)) + 1.5 * p.beta * integrate(g, s.u ** 2 * s.v)
    return a, b, c


def nehari_G(p: ModelParams, s: StatePair) -> float:
    """G(s) = dJ(s)[s]."""
    p.check_grid(s.grid)
    a, b, c = nehari_parts(p, s)
    return a - b - c


def restricted_energy(p: ModelParams, s: StatePair) -> float:
    """J on the Nehari manifold: 1/6 ||s||^2 + 1/12 int u^4."""
    return norm_sq(p, s) / 6.0 + integrate(s.grid, s.u ** 4) / 12.0


# -- first and second variations ----------------------------------------------


def differential_J(p: ModelParams, s: StatePair) -> Covector:
    p.check_grid(s.grid)
    g, u, v = s.grid, s.u, s.v
    ru = apply_polylaplacian(g, u) + p.lambda1 * u - u ** 3 - p.beta * u * v
    rv = apply_polylaplacian(g, v) + p.lambda2 * v - 0.5 * _quad(p, v) - 0.5 * p.beta * u ** 2
    ru[g.boundary] = 0.0
    rv[g.boundary] = 0.0
    return Covector(ru, rv, g)


def differential_G(p: ModelParams, s: StatePair) -> Covector:
    p.check_grid(s.grid)
    g, u, v = s.grid, s.u, s.v
    ru = 2.0 * (apply_polylaplacian(g, u) + p.lambda1 * u) - 4.0 * u ** 3 - 3.0 * p.beta * u * v
    rv = (2.0 * (apply_polylaplacian(g, v) + p.lambda2 * v) - 1.5 * _quad(p, v)
          - 1.5 * p.beta * u ** 2)
    ru[g.boundary] = 0.0
    rv[g.boundary] = 0.0
    return Covector(ru, rv, g)


def second_variation_J(p: ModelParams, s: StatePair, h: StatePair, k: StatePair) -> float:
    """d^2 J(s)[h][k]."""
    p.check_grid(s.grid)
    g, u, v = s.grid, s.u, s.v
    dv = v if p.order == 1 else np.abs(v)
    val = sobolev_inner(g, h.u, k.u, p.lambda1) - 3.0 * integrate(g, u ** 2 * h.u * k.u)
    val += sobolev_inner(g, h.v, k.v, p.lambda2) - integrate(g, dv * h.v * k.v)
    val -= p.beta * integrate(g, v * h.u * k.u + u * h.v * k.u + u * h.u * k.v)
    return val


def riesz_gradient(p: ModelParams, ell: Covector) -> StatePair:
    """The pair r with <r, h> = ell[h] for every admissible h."""
    g = ell.grid
    p.check_grid(g)
    i = g.interior
    w = g.weights[i]
    u, v = g.zeros(), g.zeros()
    u[i] = g.metric_solver(p.lambda1).solve(w * ell.ru[i])
    v[i] = g.metric_solver(p.lambda2).solve(w * ell.rv[i])
    return StatePair(u, v, g)


def strong_residual(p: ModelParams, s: StatePair) -> tuple[Field, Field]:
    """Pointwise residuals of both Euler-Lagrange equations (zero on the boundary)."""
    ell = differential_J(p, s)
    return ell.ru, ell.rv


def hessian_matrix(p: ModelParams, s: StatePair) -> sparse.csc_matrix:
    """Interior nodal Hessian of J, symmetric, acting on :meth:`StatePair.stacked` vectors."""
    g = s.grid
    i = g.interior
    w = g.weights[i]
    u, v = s.u[i], s.v[i]
    dv = v if p.order == 1 else np.abs(v)
    a11 = g.metric_matrix(p.lambda1) - sparse.diags(w * (3.0 * u ** 2 + p.beta * v))
    a22 = g.metric_matrix(p.lambda2) - sparse.diags(w * dv)
    a12 = sparse.diags(-p.beta * w * u)
    return sparse.bmat([[a11, a12], [a12, a22]], format="csc")


def semi_trivial_flag(p: ModelParams, s: StatePair, rel: float = 1e-6) -> bool:
    """True when the u-component is negligible against v: ||u||_1 < rel ||v||_2."""
    g = s.grid
    nu = np.sqrt(max(sobolev_inner(g, s.u, s.u, p.lambda1), 0.0))
    nv = np.sqrt(max(sobolev_inner(g, s.v, s.v, p.lambda2), 0.0))
    return bool(nu < rel * nv)
