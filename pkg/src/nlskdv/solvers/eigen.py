"""The linear coupling threshold Lambda = inf ||phi||_1^2 / int V2 phi^2."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from ..errors import SolverError
from ..grid import RadialGrid, default_grid
from ..model import ModelParams


@dataclass(frozen=True)
class LambdaResult:
    value: float
    phi: np.ndarray = field(repr=False)
    iterations: int = 0
    residual: float = 0.0

    def __float__(self) -> float:
        return float(self.value)


def compute_Lambda(
    p: ModelParams,
    grid: RadialGrid | None = None,
    v2: np.ndarray | None = None,
    tol: float = 1e-13,
    max_iters: int = 10000,
) -> LambdaResult:
    """Minimize the Rayleigh quotient by power iteration on A^-1 M.

    A is the lambda1 metric and M the weighted multiplication by V2; the
    dominant eigenvalue of A^-1 M is 1 / Lambda.  The returned ``value`` is the
    Rayleigh quotient of the returned ``phi`` (normalized to max |phi| = 1, phi(0) > 0).
    """
    from ..exact import semitrivial_profile

    if grid is None:
        grid = default_grid(p.dim, p.order, p.lambda1, p.lambda2)
    p.check_grid(grid)
    if v2 is None:
        v2 = semitrivial_profile(p, grid)
    i = grid.interior
    A = grid.metric_matrix(p.lambda1)
    lu = grid.metric_solver(p.lambda1)
    M = sparse.diags(grid.weights[i] * v2[i])
    x = np.maximum(v2[i], 0.0) + 1e-3 * np.max(np.abs(v2))
    x /= np.linalg.norm(x)
    prev = np.inf
    rq = np.inf
    for it in range(1, max_iters + 1):
        y = lu.solve(M @ x)
        y /= np.linalg.norm(y)
        if grid.dimension == 1:
            y = 0.5 * (y + y[::-1])
        ay, my = A @ y, M @ y
        den = float(y @ my)
        if den <= 0:
            raise SolverError("V2 gives no positive weight to the power iterate")
        rq = float(y @ ay) / den
        x = y
        if abs(rq - prev) <= tol * abs(rq):
            break
        prev = rq
    res = float(np.linalg.norm(A @ x - rq * (M @ x)) / np.linalg.norm(A @ x))
    phi = grid.zeros()
    phi[i] = x
    centre = int(np.argmin(grid.radii))
    phi /= np.max(np.abs(phi))
    if phi[centre] < 0:
        phi = -phi
    return LambdaResult(value=rq, phi=phi, iterations=it, residual=res)
