"""Radial / even-line grids with quadrature and polyharmonic operators.

Every integral over R^N of a radial function becomes a weighted sum over the
nodes, and the Laplacian is assembled in flux form ``L = W^-1 K`` where ``W``
holds the quadrature weights and ``K`` is the symmetric stiffness matrix of the
discrete Dirichlet form.  This keeps the discrete Sobolev products exactly
adjoint to the strong-form operators (summation by parts holds to round-off).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from threading import Lock

import numpy as np
from numpy.typing import NDArray
from scipy import sparse
from scipy.sparse.linalg import splu

from .errors import GridError

Field = NDArray[np.float64]

# m=1 existence theory covers N<=3, m=2 needs H^2 -> L^4, i.e. N<=7
MAX_DIM = {1: 3, 2: 7}


def ball_volume(N: int) -> float:
    """Volume of the unit ball in R^N."""
    return math.pi ** (N / 2) / math.gamma(N / 2 + 1)


def sphere_area(N: int) -> float:
    """Surface measure of the unit sphere in R^N (2 for N=1)."""
    return N * ball_volume(N)


@dataclass(eq=False)
class RadialGrid:
    """Discretization of R^N restricted to radial (N>=2) or even-line (N=1) fields.

    Attributes:
        dimension: spatial dimension N.
        order: operator order m (1 -> -Laplacian, 2 -> bi-Laplacian).
        radius: truncation radius R; fields vanish at the outer node(s).
        points: number of nodes n.
        spacing: node spacing h.
        nodes: abscissae (N=1, symmetric about 0) or radii (N>=2, from 0 to R).
        weights: quadrature weights, all strictly positive.
    """

    dimension: int
    order: int
    radius: float
    points: int
    spacing: float
    nodes: Field
    weights: Field
    stiffness: sparse.csr_matrix = field(repr=False)
    boundary: NDArray[np.intp] = field(repr=False)
    interior: NDArray[np.intp] = field(repr=False)
    _factor_cache: dict = field(default_factory=dict, repr=False)
    _lock: Lock = field(default_factory=Lock, repr=False)

    def __post_init__(self) -> None:
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)
        w_int = self.weights[self.interior]
        k_ii = self.stiffness[self.interior][:, self.interior].tocsc()
        self._w_int = w_int
        self._k_ii = k_ii
        self._winv_int = sparse.diags(1.0 / w_int)

    # -- small helpers -----------------------------------------------------

    @property
    def radii(self) -> Field:
        """Distance of each node from the origin."""
        return np.abs(self.nodes)

    @property
    def n_interior(self) -> int:
        return len(self.interior)

    def field(self, fn) -> Field:
        """Sample ``fn(radius_or_abscissa)`` on the nodes, zero on the boundary."""
        values = np.asarray(fn(self.nodes), dtype=float) * np.ones(self.points)
        values[self.boundary] = 0.0
        return values

    def zeros(self) -> Field:
        return np.zeros(self.points)

    def check(self, f: Field) -> Field:
        f = np.asarray(f, dtype=float)
        if f.shape != (self.points,):
            raise GridError(f"field has shape {f.shape}, grid expects ({self.points},)")
        return f

    def reflect(self, f: Field) -> Field:
        """Average ``f`` with its mirror image (identity for N>=2)."""
        if self.dimension != 1:
            return f
        return 0.5 * (f + f[::-1])

    def metric_matrix(self, lam: float) -> sparse.csc_matrix:
        """Interior matrix of the form <f, g>_lam (m=1: K + lam W; m=2: K W^-1 K + lam W)."""
        if self.order == 1:
            a = self._k_ii
        else:
            a = self._k_ii @ self._winv_int @ self._k_ii
        return (a + lam * sparse.diags(self._w_int)).tocsc()

    def metric_solver(self, lam: float):
        """Cached sparse LU factorization of :meth:`metric_matrix`."""
        key = float(lam)
        with self._lock:
            lu = self._factor_cache.get(key)
            if lu is None:
                lu = splu(self.metric_matrix(lam))
                self._factor_cache[key] = lu
        return lu

    def laplacian_matrix(self) -> sparse.csc_matrix:
        """Interior matrix of (-Delta)^m acting on fields with zero boundary values."""
        l1 = self._winv_int @ self._k_ii
        if self.order == 1:
            return l1.tocsc()
        return (l1 @ l1).tocsc()


def make_grid(N: int, m: int, R: float, n: int) -> RadialGrid:
    """Build a :class:`RadialGrid`.

    For ``N == 1`` the grid covers ``[-R, R]`` with ``n`` symmetric nodes.  For
    ``N >= 2`` it covers ``[0, R]``; the origin carries the volume of the ball of
    radius ``h/2`` so that every weight is positive.
    """
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise GridError(f"dimension must be a positive integer, got {N!r}")
    if m not in (1, 2):
        raise GridError(f"order must be 1 (Laplacian) or 2 (bi-Laplacian), got {m!r}")
    if N > MAX_DIM[m]:
        raise GridError(
            f"N={N} is outside the validity range for order m={m}: the "
            + ("second-order system is only treated for N<=3"
               if m == 1 else "fourth-order energy is only defined for N<=7")
        )
    if not R > 0:
        raise GridError(f"radius must be positive, got {R!r}")
    if n < 8:
        raise GridError(f"need at least 8 points, got {n}")

    if N == 1:
        h = 2.0 * R / (n - 1)
        nodes = np.linspace(-R, R, n)
        weights = np.full(n, h)
        weights[[0, -1]] = 0.5 * h
        areas = np.ones(n - 1)
        boundary = np.array([0, n - 1])
    else:
        h = R / (n - 1)
        nodes = np.linspace(0.0, R, n)
        weights = sphere_area(N) * nodes ** (N - 1) * h
        weights[0] = ball_volume(N) * (0.5 * h) ** N
        weights[-1] *= 0.5
        # edge areas chosen so the flux form reproduces Delta r^2 = 2N exactly
        mid = 0.5 * (nodes[1:] + nodes[:-1])
        areas = N * np.cumsum(weights[:-1]) / mid
        boundary = np.array([n - 1])

    coef = areas / h
    main = np.zeros(n)
    main[:-1] += coef
    main[1:] += coef
    stiffness = sparse.diags([main, -coef, -coef], [0, 1, -1], format="csr")
    interior = np.setdiff1d(np.arange(n), boundary)
    return RadialGrid(
        dimension=int(N),
        order=int(m),
        radius=float(R),
        points=int(n),
        spacing=float(h),
        nodes=nodes,
        weights=weights,
        stiffness=stiffness,
        boundary=boundary,
        interior=interior,
    )


def default_radius(lambda1: float, lambda2: float, order: int = 1) -> float:
    """Truncation radius scaled to the slowest decay rate min(lambda)^(1/(2m))."""
    return 40.0 / min(lambda1, lambda2) ** (1.0 / (2 * order))


def default_points(dim: int) -> int:
    return 4001 if dim == 1 else 2001


def default_grid(dim: int, order: int, lambda1: float, lambda2: float,
                 radius: float | None = None, points: int | None = None) -> RadialGrid:
    """Grid with the default truncation radius and resolution for the given parameters."""
    return make_grid(dim, order, radius or default_radius(lambda1, lambda2, order),
                     points or default_points(dim))


def integrate(g: RadialGrid, f: Field) -> float:
    """Quadrature of a radial field over R^N."""
    return float(g.weights @ g.check(f))


def apply_polylaplacian(g: RadialGrid, f: Field) -> Field:
    """Return (-Delta)^m f at the interior nodes (zero on the boundary).

    For m=1 the actual boundary values of ``f`` enter the stencil; the
    bi-Laplacian is the composition of two Laplacians with the intermediate
    field clamped to zero on the boundary.
    """
    f = g.check(f)
    out = (g.stiffness @ f) / g.weights
    out[g.boundary] = 0.0
    if g.order == 2:
        out = (g.stiffness @ out) / g.weights
        out[g.boundary] = 0.0
    return out


def dirichlet_form(g: RadialGrid, f1: Field, f2: Field) -> float:
    """The derivative part of the Sobolev product: int grad f1 . grad f2 (m=1) or int Lf1 Lf2 (m=2)."""
    f1 = g.check(f1)
    f2 = g.check(f2)
    if g.order == 1:
        return float(f1 @ (g.stiffness @ f2))
    l1 = (g.stiffness @ f1) / g.weights
    l2 = (g.stiffness @ f2) / g.weights
    l1[g.boundary] = 0.0
    l2[g.boundary] = 0.0
    return float(np.sum(g.weights * l1 * l2))


def sobolev_inner(g: RadialGrid, f1: Field, f2: Field, lam: float) -> float:
    """<f1, f2>_lam = int (D f1 . D f2 + lam f1 f2) with D = grad (m=1) or Delta (m=2)."""
    return dirichlet_form(g, f1, f2) + lam * float(np.sum(g.weights * f1 * f2))
