"""Command-line interface: ``nlskdv <command> [flags]``.

Exit codes: 0 success, 1 verification failure, 2 solver failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from . import exact
from .errors import NLSKdVError, SolverError, ThresholdNotFound
from .grid import RadialGrid, default_points, default_radius, integrate, make_grid
from .model import ModelParams, StatePair, energy_J, strong_residual, sobolev_inner
from .nehari import classify_v2, project
from .rearrange import check_equimeasurable, check_hardy_littlewood, check_polya_szego, symmetrize
from .solvers import compute_Lambda, solve_ground, solve_mountain_pass

EXIT_OK, EXIT_VERIFY, EXIT_SOLVER, EXIT_USAGE = 0, 1, 2, 64
SWEEP_HEADER = ["param", "J_ground", "J_v2", "J_mp", "Lambda", "classification", "grad_norm",
                "iters"]
SWEEP_AXES = ("beta", "lambda2")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Everything a command needs; built from defaults, a config file, then flags."""

    order: int = 2
    dim: int = 1
    lambda1: float = 1.0
    lambda2: float = 1.0
    beta: float = 1.0
    radius: float | None = None
    points: int | None = None
    tol: float = 1e-8
    max_iters: int = 20000
    nodes: int = 17
    sweep: str | None = None
    sweep_from: float | None = None
    sweep_to: float | None = None
    steps: int = 0
    seed: int = 42
    noise: float = 0.0
    init: str = "coupled"
    out: str | None = None
    json: bool = False
    profile: str | None = None
    profile2: str | None = None
    workers: int | None = None

    @property
    def m(self) -> int:
        return self.order // 2

    def model(self) -> ModelParams:
        return ModelParams(order=self.m, dim=self.dim, lambda1=self.lambda1,
                           lambda2=self.lambda2, beta=self.beta)

    def grid(self) -> RadialGrid:
        r = self.radius or default_radius(self.lambda1, self.lambda2, self.m)
        return make_grid(self.dim, self.m, r, self.points or default_points(self.dim))


_CONFIG_KEYS = {f.name: f.type for f in fields(RunConfig)}
_CONFIG_ALIASES = {"from": "sweep_from", "to": "sweep_to", "max-iters": "max_iters",
                   "format": "json"}


def _coerce(key: str, raw: str):
    kind = str(_CONFIG_KEYS[key])
    if key == "json":
        return raw.strip().lower() in ("json", "true", "1", "yes")
    if kind.startswith("int"):
        return int(raw)
    if kind.startswith("float"):
        return float(raw)
    return raw


def read_config(path: str) -> dict:
    """Parse a flat ``key = value`` file ('#' starts a comment)."""
    if not os.path.isfile(path):
        raise UsageError(f"config file not found: {path}")
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, raw = (part.strip() for part in line.split("=", 1))
            key = _CONFIG_ALIASES.get(key, key.replace("-", "_"))
            if key not in _CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _coerce(key, raw)
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return values


# -- argument parsing -------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--order", type=int, choices=(2, 4),
                        help="operator order: 2 for -Delta, 4 for Delta^2")
    common.add_argument("--dim", type=int, metavar="N")
    common.add_argument("--lambda1", type=float, metavar="X")
    common.add_argument("--lambda2", type=float, metavar="X")
    common.add_argument("--beta", type=float, metavar="X")
    common.add_argument("--radius", type=float, metavar="R")
    common.add_argument("--points", type=int, metavar="N")
    common.add_argument("--tol", type=float, metavar="X")
    common.add_argument("--max-iters", dest="max_iters", type=int, metavar="N")
    common.add_argument("--seed", type=int, metavar="N")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--json", action="store_true", default=None)

    parser = _Parser(prog="nlskdv", description="Stationary coupled NLS-KdV solver toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("verify", parents=[common], help="closed-form identity checks")
    for name, text in (("ground", "ground state on the Nehari manifold"),
                       ("mountain-pass", "mountain-pass bound state")):
        sp = sub.add_parser(name, parents=[common], help=text)
        sp.add_argument("--init", choices=("coupled", "near-v2"))
        sp.add_argument("--noise", type=float, metavar="X",
                        help="amplitude of seeded random perturbation of the initial pair")
        if name == "mountain-pass":
            sp.add_argument("--nodes", type=int, metavar="K")
    sub.add_parser("lambda", parents=[common], help="coupling threshold Lambda")
    sub.add_parser("threshold", parents=[common], help="lambda2 threshold of the diagonal state")
    sp = sub.add_parser("symmetrize", parents=[common], help="rearrange a stored profile")
    sp.add_argument("--profile", metavar="PATH", required=False)
    sp.add_argument("--profile2", metavar="PATH")
    sp = sub.add_parser("sweep", parents=[common], help="parameter sweep to CSV")
    sp.add_argument("--sweep", choices=SWEEP_AXES)
    sp.add_argument("--from", dest="sweep_from", type=float, metavar="X")
    sp.add_argument("--to", dest="sweep_to", type=float, metavar="X")
    sp.add_argument("--steps", type=int, metavar="N")
    sp.add_argument("--workers", type=int, metavar="N")
    sp.add_argument("--nodes", type=int, metavar="K")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg = replace(cfg, **read_config(args.config))
    flags = {k: v for k, v in vars(args).items()
             if k in _CONFIG_KEYS and v is not None}
    cfg = replace(cfg, **flags)
    if cfg.order not in (2, 4):
        raise UsageError(f"order must be 2 or 4, got {cfg.order}")
    try:
        cfg.model()
        if cfg.radius is not None or cfg.points is not None:
            cfg.grid()
    except NLSKdVError as exc:
        raise UsageError(str(exc)) from None
    return cfg


# -- output helpers -----------------------------------------------------------------


def fmt(x) -> str:
    """17-significant-digit text for floats, blank for None."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    return str(x)


def emit(rows: list[dict], cfg: RunConfig, header: list[str] | None = None,
         path: str | None = None) -> None:
    """Write rows as CSV (or JSON with --json) to ``path`` or stdout."""
    if header is None:
        header = list(rows[0]) if rows else []
    if cfg.json:
        text = json.dumps([{k: _jsonable(r.get(k)) for k in header} for r in rows], indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([fmt(r.get(k)) for k in header] for r in rows)
        text = buf.getvalue()
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def dump_profile(path: str, g: RadialGrid, values: np.ndarray, comment: str) -> None:
    np.savetxt(path, np.column_stack([g.nodes, values]), fmt="%.17g",
               header=comment + "\nnode value")


def read_profile(path: str) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise UsageError(f"{path}: expected two columns (node, value)")
    return data[:, 0], data[:, 1]


def _describe(cfg: RunConfig) -> str:
    return (f"order={cfg.order} dim={cfg.dim} lambda1={cfg.lambda1!r} lambda2={cfg.lambda2!r} "
            f"beta={cfg.beta!r}")


# -- building blocks ------------------------------------------------------------------


def initial_pair(p: ModelParams, g: RadialGrid, v2: np.ndarray, kind: str, noise: float,
                 rng: np.random.Generator) -> StatePair:
    """Coupled start (U1-shaped bump, V2) or a near-semi-trivial start (tiny u, V2)."""
    k = p.lambda1 ** (1.0 / (2 * p.order))
    bump = g.field(lambda x: math.sqrt(2.0 * p.lambda1) / np.cosh(k * np.abs(x)))
    u = bump if kind == "coupled" else 1e-3 * bump
    s = StatePair(u, v2.copy(), g)
    if noise:
        env = g.field(lambda x: np.exp(-np.abs(x) ** 2 / 16.0))
        s = s + StatePair(noise * env * rng.standard_normal(g.points),
                          noise * env * rng.standard_normal(g.points), g)
    return s.clamp_boundary()


def semitrivial_energy(p: ModelParams, g: RadialGrid, v2: np.ndarray) -> float:
    return energy_J(p, StatePair(g.zeros(), v2, g))


# -- commands ----------------------------------------------------------------------------


def verify_rows(cfg: RunConfig) -> list[dict]:
    """Closed-form identity suite: quadrature constants, soliton residuals and energies."""
    g = make_grid(1, 1, cfg.radius or 40.0, cfg.points or 4001)
    x = g.nodes
    rows = []

    def add(name, expected, got, tol):
        rows.append({"check": name, "expected": expected, "got": got, "tol": tol,
                     "ok": bool(abs(got - expected) <= tol)})

    for pw in (4, 6, 8):
        add(f"cosh{pw}", exact.COSH_INTEGRALS[pw], integrate(g, np.cosh(x) ** -float(pw)), 1e-8)
    p = ModelParams(order=1, dim=1, lambda1=1.0, lambda2=1.0, beta=0.0)
    u1 = g.field(lambda t: exact.soliton_U1(t, 1.0))
    v2 = g.field(lambda t: exact.soliton_V2(t, 1.0))
    ru, rv = strong_residual(p, StatePair(u1, v2, g))
    add("residual_U1", 0.0, float(np.max(np.abs(ru))), 1e-3)
    add("residual_V2", 0.0, float(np.max(np.abs(rv))), 1e-3)
    add("norm_U1_sq", 16.0 / 3.0, sobolev_inner(g, u1, u1, 1.0), 1e-3)
    add("J_v2", 4.8, semitrivial_energy(p, g, v2), 1e-3)
    for l1, l2, b in ((1.0, 1.0, 1.0), (1.0, 2.0, 1.0), (1.0, 1.0, 0.3)):
        q = ModelParams(order=1, dim=1, lambda1=l1, lambda2=l2, beta=b)
        w = g.field(lambda t: exact.soliton_V2(t, l2))
        t_num = project(q, StatePair(w, w, g)).scaling
        add(f"diag_t({l1:g},{l2:g},{b:g})", exact.diag_nehari_t(l1, l2, b), t_num, 1e-4)
    return rows


def cmd_verify(cfg: RunConfig) -> int:
    rows = verify_rows(cfg)
    emit(rows, cfg, ["check", "expected", "got", "tol", "ok"], cfg.out)
    bad = [r for r in rows if not r["ok"]]
    for r in bad:
        print(f"FAIL {r['check']}: |{r['got']!r} - {r['expected']!r}| > {r['tol']!r}",
              file=sys.stderr)
    return EXIT_VERIFY if bad else EXIT_OK


def _ground_run(cfg: RunConfig):
    p, g = cfg.model(), cfg.grid()
    v2 = exact.semitrivial_profile(p, g)
    rng = np.random.default_rng(cfg.seed)
    init = initial_pair(p, g, v2, cfg.init, cfg.noise, rng)
    rep = solve_ground(p, init, tol=cfg.tol, max_iters=cfg.max_iters)
    return p, g, v2, rep


def _summary_row(cfg, p, g, v2, rep, lam) -> dict:
    return {"beta": p.beta, "lambda1": p.lambda1, "lambda2": p.lambda2, "J": rep.energy,
            "J_v2": semitrivial_energy(p, g, v2), "Lambda": lam, "semi_trivial": rep.semi_trivial,
            "grad_norm": rep.grad_norm, "iterations": rep.iterations}


def _dump_state(cfg, g, s, tag):
    if cfg.out:
        dump_profile(f"{cfg.out}_{tag}u.txt", g, s.u, _describe(cfg) + " component=u")
        dump_profile(f"{cfg.out}_{tag}v.txt", g, s.v, _describe(cfg) + " component=v")


def cmd_ground(cfg: RunConfig) -> int:
    p, g, v2, rep = _ground_run(cfg)
    lam = compute_Lambda(p, g, v2=v2).value
    _dump_state(cfg, g, rep.state, "")
    emit([_summary_row(cfg, p, g, v2, rep, lam)], cfg,
         path=f"{cfg.out}_summary.{'json' if cfg.json else 'csv'}" if cfg.out else None)
    return EXIT_OK


def cmd_mountain_pass(cfg: RunConfig) -> int:
    p, g, v2, ground = _ground_run(cfg)
    if ground.semi_trivial:
        raise SolverError("the ground state is semi-trivial: no second minimizer to connect")
    end_a = StatePair(g.zeros(), v2, g)
    rep = solve_mountain_pass(p, end_a, ground.state, K=cfg.nodes, tol=cfg.tol)
    lam = compute_Lambda(p, g, v2=v2).value
    row = _summary_row(cfg, p, g, v2, rep, lam)
    row["J_ground"] = ground.energy
    _dump_state(cfg, g, rep.state, "mp_")
    emit([row], cfg, path=f"{cfg.out}_summary.{'json' if cfg.json else 'csv'}" if cfg.out else None)
    return EXIT_OK


def cmd_lambda(cfg: RunConfig) -> int:
    p, g = cfg.model(), cfg.grid()
    res = compute_Lambda(p, g)
    if cfg.out:
        dump_profile(f"{cfg.out}_phi.txt", g, res.phi, _describe(cfg) + " minimizer phi")
    emit([{"quantity": "Lambda", "value": res.value, "iterations": res.iterations,
           "residual": res.residual}], cfg)
    return EXIT_OK


def cmd_threshold(cfg: RunConfig) -> int:
    res = exact.lambda2_threshold(cfg.lambda1, cfg.beta, order=cfg.m, dim=cfg.dim)
    emit([{"quantity": "Lambda2", "value": res.value, "lower": res.lower, "upper": res.upper,
           "gap_lower": res.gap_lower, "gap_upper": res.gap_upper}], cfg, path=cfg.out)
    return EXIT_OK


def cmd_symmetrize(cfg: RunConfig) -> int:
    if not cfg.profile:
        raise UsageError("symmetrize needs --profile PATH")
    if not os.path.isfile(cfg.profile):
        raise UsageError(f"profile not found: {cfg.profile}")
    x, f = read_profile(cfg.profile)
    g = make_grid(cfg.dim, cfg.m, float(np.max(np.abs(x))), len(x))
    if not np.allclose(g.nodes, x, rtol=0, atol=1e-9 * max(1.0, g.radius)):
        raise UsageError(f"{cfg.profile}: nodes do not form a grid for dim={cfg.dim}")
    f = np.where(np.isin(np.arange(len(x)), g.boundary), 0.0, f)
    partner = f
    if cfg.profile2:
        x2, partner = read_profile(cfg.profile2)
        if len(x2) != len(x) or not np.allclose(x2, x):
            raise UsageError("--profile2 must live on the same nodes as --profile")
    fs = symmetrize(g, f)
    hl = check_hardy_littlewood(g, f, partner)
    ps = check_polya_szego(g, f)
    if cfg.out:
        dump_profile(cfg.out, g, fs, f"symmetrized {cfg.profile}")
    emit([{"HL_lhs": hl[0], "HL_rhs": hl[1], "PS_lhs": ps[0], "PS_rhs": ps[1],
           "Lp2_gap": check_equimeasurable(g, f, fs, 2.0),
           "Lp4_gap": check_equimeasurable(g, f, fs, 4.0)}], cfg)
    return EXIT_OK


def sweep_values(cfg: RunConfig) -> np.ndarray:
    if cfg.sweep not in SWEEP_AXES or cfg.steps is None or cfg.steps < 1 \
            or cfg.sweep_from is None or cfg.sweep_to is None:
        raise UsageError("sweep needs --sweep {beta,lambda2}, --from, --to and --steps >= 1")
    return np.linspace(cfg.sweep_from, cfg.sweep_to, cfg.steps)


def sweep_row(cfg: RunConfig, value: float) -> dict:
    """One sweep point; failures are reported in the row, never raised."""
    cfg = replace(cfg, **{cfg.sweep: float(value)})
    row = {"param": float(value)}
    try:
        p, g = cfg.model(), cfg.grid()
        v2 = exact.semitrivial_profile(p, g)
        row["J_v2"] = semitrivial_energy(p, g, v2)
        kind = classify_v2(p, g, v2=v2)
        row["Lambda"], row["classification"] = kind.Lambda, kind.kind
        init = initial_pair(p, g, v2, "coupled", 0.0, np.random.default_rng(cfg.seed))
        ground = solve_ground(p, init, tol=cfg.tol, max_iters=cfg.max_iters)
        row["J_ground"] = ground.energy
        row["grad_norm"], row["iters"] = ground.grad_norm, ground.iterations
        if kind.kind == "strict_local_min" and not ground.semi_trivial:
            try:
                mp = solve_mountain_pass(p, StatePair(g.zeros(), v2, g), ground.state,
                                         K=cfg.nodes, tol=cfg.tol)
                row["J_mp"] = mp.energy
            except SolverError:
                pass
    except NLSKdVError as exc:
        row["classification"] = "failed: " + str(exc)
    return row


def cmd_sweep(cfg: RunConfig) -> int:
    values = sweep_values(cfg)
    workers = cfg.workers or min(len(values), os.cpu_count() or 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(sweep_row, [cfg] * len(values), values))
    else:
        rows = [sweep_row(cfg, v) for v in values]
    emit(rows, cfg, SWEEP_HEADER, cfg.out)
    ok = any(not str(r.get("classification", "")).startswith("failed") for r in rows)
    return EXIT_OK if ok else EXIT_SOLVER


COMMANDS = {
    "verify": cmd_verify,
    "ground": cmd_ground,
    "mountain-pass": cmd_mountain_pass,
    "lambda": cmd_lambda,
    "threshold": cmd_threshold,
    "symmetrize": cmd_symmetrize,
    "sweep": cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"nlskdv: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, ThresholdNotFound) as exc:
        print(f"nlskdv: solver failure: {exc}", file=sys.stderr)
        rep = getattr(exc, "report", None)
        if rep is not None:
            print(json.dumps({k: _jsonable(v) for k, v in rep.summary().items()}),
                  file=sys.stderr)
        return EXIT_SOLVER
    except NLSKdVError as exc:
        print(f"nlskdv: error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
