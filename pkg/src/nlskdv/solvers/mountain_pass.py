"""Mountain-pass critical points by a string method on the Nehari manifold.

A discrete path of K nodes joins two local minimizers of J on the manifold.
Interior nodes descend along the constrained gradient with its component along
the path tangent removed, so the path relaxes toward a minimum-energy path
while every node's energy, hence the path maximum, never increases.  Nodes are
redistributed by arc length periodically.  The highest node is finally refined
into an exact critical point by Newton's method.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ManifoldError, NoPassGeometry, SolverError
from ..model import ModelParams, StatePair, energy_difference, energy_J, inner, norm_sq
from ..nehari import gradients, project
from .ground import ARMIJO_C, STEP_SHRINK
from .newton import newton_critical
from .report import SolveReport


def _distance(p, a, b) -> float:
    return math.sqrt(max(norm_sq(p, a - b), 0.0))


def _reparametrize(p, nodes):
    """Equal arc-length redistribution of the interior nodes, re-projected."""
    seg = np.array([_distance(p, nodes[k + 1], nodes[k]) for k in range(len(nodes) - 1)])
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0.0, arc[-1], len(nodes))
    out = [nodes[0]]
    for tau in targets[1:-1]:
        k = min(int(np.searchsorted(arc, tau, side="right")) - 1, len(nodes) - 2)
        frac = (tau - arc[k]) / seg[k] if seg[k] > 0 else 0.0
        out.append(project(p, (1.0 - frac) * nodes[k] + frac * nodes[k + 1]).state)
    out.append(nodes[-1])
    return out


def _relax_node(p, prev, node, nxt, energy, symmetric):
    """One Armijo step along the path-normal constrained gradient; returns (node, J, |g_perp|)."""
    gr = gradients(p, node)
    d = gr.constrained
    tangent = nxt - prev
    tangent = tangent - (inner(p, tangent, gr.g_grad) / norm_sq(p, gr.g_grad)) * gr.g_grad
    tn = math.sqrt(max(norm_sq(p, tangent), 0.0))
    if tn > 0:
        d = d - (inner(p, d, tangent) / (tn * tn)) * tangent
    gn = math.sqrt(max(norm_sq(p, d), 0.0))
    if gn == 0.0:
        return node, energy, 0.0
    alpha = 1.0
    while alpha >= 1e-10:
        trial = node - alpha * d
        if symmetric:
            trial = trial.reflect()
        try:
            cand = project(p, trial).state
            dj = energy_difference(p, cand, node)
        except ManifoldError:
            dj = math.inf
        if dj <= -ARMIJO_C * alpha * gn * gn:
            return cand, energy + dj, gn
        alpha *= STEP_SHRINK
    return node, energy, gn


def solve_mountain_pass(
    p: ModelParams,
    end_a: StatePair,
    end_b: StatePair,
    K: int = 17,
    tol: float = 1e-8,
    max_iters: int = 3000,
    path_tol: float = 1e-4,
    reparam_every: int = 25,
    symmetric: bool = True,
) -> SolveReport:
    """Critical point of mountain-pass type between ``end_a`` and ``end_b``.

    ``trace`` records (iteration, path maximum, largest path-normal gradient);
    the path maximum is non-increasing.  Raises :class:`NoPassGeometry` when the
    maximum of the relaxed path sits at an endpoint or the refined critical
    point is not above both endpoints.
    """
    if K < 8:
        raise SolverError(f"need at least 8 path nodes, got {K}")
    p.check_grid(end_a.grid)
    gap = _distance(p, end_a, end_b)
    if gap <= 1e-12 * (math.sqrt(norm_sq(p, end_a)) + math.sqrt(norm_sq(p, end_b)) + 1e-300):
        raise SolverError("end_a and end_b coincide: there is no path to deform")
    a = project(p, end_a).state
    b = project(p, end_b).state
    ja, jb = energy_J(p, a), energy_J(p, b)

    nodes = [a] + [project(p, (1 - t) * a + t * b).state
                   for t in np.linspace(0.0, 1.0, K)[1:-1]] + [b]
    energies = [energy_J(p, s) for s in nodes]
    trace = []
    it = 0
    while True:
        worst = 0.0
        for k in range(1, K - 1):
            nodes[k], energies[k], gk = _relax_node(
                p, nodes[k - 1], nodes[k], nodes[k + 1], energies[k], symmetric)
            worst = max(worst, gk)
        it += 1
        top = max(energies)
        trace.append((it, top, worst))
        if worst <= path_tol or it >= max_iters:
            break
        if it % reparam_every == 0:
            moved = _reparametrize(p, nodes)
            moved_e = [energy_J(p, s) for s in moved]
            if max(moved_e) <= top:
                nodes, energies = moved, moved_e

    kmax = int(np.argmax(energies))
    info = {"path_energies": list(energies), "max_index": kmax, "path_iterations": it,
            "path_converged": worst <= path_tol, "endpoint_energies": (ja, jb)}
    if kmax in (0, K - 1):
        rep = SolveReport(state=nodes[kmax], energy=energies[kmax], nehari_residual=0.0,
                          grad_norm=worst, iterations=it, converged=False, trace=trace,
                          info=info)
        raise NoPassGeometry("path maximum sits at an endpoint: no pass geometry", rep)
    try:
        refined = newton_critical(p, nodes[kmax], tol=tol, symmetric=symmetric)
    except SolverError as exc:
        if exc.report is not None:
            exc.report.trace = trace + exc.report.trace
            exc.report.info.update(info)
        raise
    info["newton_iterations"] = refined.iterations
    info["newton_trace"] = refined.trace
    refined.iterations += it
    refined.trace = trace
    refined.info.update(info)
    refined.multiplier = gradients(p, refined.state).multiplier
    if not refined.energy > max(ja, jb):
        raise NoPassGeometry(
            f"critical point energy {refined.energy:.10g} is not above the endpoints "
            f"({ja:.10g}, {jb:.10g})", refined)
    return refined
