"""Command line entry point.

    monospline solve|check|convergence|compare --config run.cfg [--out DIR]
               [--levels K] [--sweep space|time] [--permissive]

Exit codes: 0 success, 1 config or I/O error, 2 monotonicity refusal (or a
non-monotone verdict from ``check``), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional

import numpy as np

from .errors import (ConfigError, DegenerateEliminationError, MonotonicityError,
                     NumericalFailure, SingularSystemError)
from .problem import PRESETS, StepParams, build_dual_grid, build_problem, sample_field
from .scheme import monotonicity_report
from .stepper import run
from .verify import (BASELINES, convergence_study, error_norms, run_baseline,
                     spline_points, error_report)

EXIT_OK, EXIT_CONFIG, EXIT_MONOTONE, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    preset: str
    L: float
    D: float
    V: float
    A: float
    N: int
    rho: float
    t_end: float
    mu_fraction: float = 0.5
    snapshot_times: List[float] = field(default_factory=list)
    mode: str = "uniform"
    strict_monotone: bool = True
    out_dir: str = "."
    c: float = 1.0


REQUIRED = ("preset", "L", "D", "V", "A", "N", "rho", "t_end")
_FLOATS = ("L", "D", "V", "A", "rho", "t_end", "mu_fraction", "c")
_KEYS = set(RunConfig.__dataclass_fields__)


def _parse_bool(text):
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected true or false, got {text!r}")


def _parse_float(text):
    val = float(text)
    if not math.isfinite(val):
        raise ValueError(f"expected a finite number, got {text!r}")
    return val


def parse_config(text: str) -> RunConfig:
    """Parse a flat ``key = value`` document; ``#`` starts a comment."""
    values, where = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _FLOATS:
                parsed = _parse_float(val)
            elif key == "N":
                parsed = int(val)
            elif key == "strict_monotone":
                parsed = _parse_bool(val)
            elif key == "snapshot_times":
                parsed = [_parse_float(v) for v in val.split(",") if v.strip()]
                if not parsed:
                    raise ValueError("empty list")
            else:
                parsed = val
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
        values[key] = parsed
        where[key] = lineno

    missing = [k for k in REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"required keys missing: {', '.join(missing)}")

    def fail(key, msg):
        line = where.get(key)
        prefix = f"line {line}: " if line else ""
        raise ConfigError(f"{prefix}{key} {msg}")

    v = values
    if v["preset"] not in PRESETS:
        fail("preset", f"must be one of {', '.join(PRESETS)}")
    if not v["L"] > 0:
        fail("L", "must be positive")
    if not v["D"] > 0:
        fail("D", "must be positive (non-positive diffusion)")
    if v["preset"] != "constant" and v["V"] == 0:
        fail("V", "must be nonzero for this preset")
    if v["preset"] == "gaussian" and v["A"] != 0:
        fail("A", "must be 0 for the gaussian preset")
    if v["N"] < 4:
        fail("N", "must be at least 4")
    if not v["rho"] > 0:
        fail("rho", "must be positive")
    if not v["t_end"] >= v["rho"]:
        fail("t_end", "must be at least one time step rho")
    if "mu_fraction" in v and not 0 < v["mu_fraction"] < 1:
        fail("mu_fraction", "must lie in (0, 1)")
    if "mode" in v and v["mode"] not in ("uniform", "general"):
        fail("mode", "must be 'uniform' or 'general'")
    snaps = v.get("snapshot_times", [v["t_end"]])
    for t in snaps:
        if not 0 < t <= v["t_end"] * (1 + 1e-12):
            fail("snapshot_times", "entries must lie in (0, t_end]")
    v["snapshot_times"] = sorted(snaps)
    return RunConfig(**v)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def problem_from_config(cfg: RunConfig):
    return build_problem(cfg.preset, L=cfg.L, D=cfg.D, V=cfg.V, A=cfg.A, c=cfg.c)


def grid_from_config(cfg: RunConfig):
    return build_dual_grid(cfg.L, cfg.N, cfg.mu_fraction)


# ----------------------------------------------------------------------------
# output


def fmt(x) -> str:
    """17 significant digits: enough for every double to round-trip."""
    return "%.17g" % x


def write_csv(path: Path, header, rows) -> None:
    """Write atomically: temp file in the target directory, then rename."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(c if isinstance(c, str) else fmt(c) for c in row))
    data = ("\n".join(lines) + "\n").encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise OSError(f"output directory {out} is not writable")
    return out


def _snapshot_name(t) -> str:
    return f"solution-{t:.10g}.csv"


# ----------------------------------------------------------------------------
# commands


def cmd_check(cfg: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    grid = grid_from_config(cfg)
    rep = monotonicity_report(cfg.D, cfg.V, cfg.A, cfg.rho, grid.h, grid.mu)

    def show(x):
        return fmt(x) if math.isfinite(x) else "unsatisfiable" if x == math.inf else str(x)

    print(f"h = {fmt(grid.h)}", file=stream)
    print(f"mu = {fmt(grid.mu)}", file=stream)
    print(f"rho = {fmt(cfg.rho)}", file=stream)
    print(f"rho1 = {show(rep.rho1)}", file=stream)
    print(f"rho2 = {show(rep.rho2)}", file=stream)
    bound = fmt(rep.rho_max_reaction) if math.isfinite(rep.rho_max_reaction) else "none"
    print(f"rho_max_reaction = {bound}", file=stream)
    print(f"alpha = {fmt(rep.alpha)}", file=stream)
    print(f"beta = {fmt(rep.beta)}", file=stream)
    print(f"gamma = {fmt(rep.gamma)}", file=stream)
    print(f"verdict = {'monotone' if rep.monotone else 'not monotone'}", file=stream)
    return EXIT_OK if rep.monotone else EXIT_MONOTONE


def _params(cfg):
    return StepParams(cfg.rho, cfg.mode, cfg.strict_monotone)


def cmd_solve(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    problem, grid = problem_from_config(cfg), grid_from_config(cfg)
    res = run(problem, grid, _params(cfg), cfg.t_end, snapshot_times=cfg.snapshot_times)
    extra = spline_points(grid)
    summary = []
    for _, t, state in res.snapshots:
        s = state.spline
        pts = np.concatenate([grid.taus, extra])
        kinds = np.array(["node"] * grid.N + ["spline"] * extra.size)
        order = np.argsort(pts, kind="stable")
        pts, kinds = pts[order], kinds[order]
        u = s(pts)
        exact = sample_field(problem.exact, pts, t) if problem.exact else None
        rows = []
        for j in range(pts.size):
            if exact is None:
                rows.append((t, pts[j], u[j], "", "", kinds[j]))
            else:
                rows.append((t, pts[j], u[j], exact[j], abs(u[j] - exact[j]), kinds[j]))
        write_csv(out / _snapshot_name(t),
                  ("t", "x", "u", "u_exact", "abs_error", "kind"), rows)
        if problem.exact is not None:
            rep = error_norms(s, problem.exact, grid, t)
            summary.append((t, rep.linf, rep.l2, rep.linf_rel))
    write_csv(out / "summary.csv", ("t", "linf", "l2", "linf_rel"), summary)
    return EXIT_OK


def cmd_convergence(cfg: RunConfig, levels: int, sweep: str = "space") -> int:
    if levels < 2:
        raise ConfigError(f"--levels must be at least 2, got {levels}")
    out = _out_dir(cfg)
    problem = problem_from_config(cfg)
    rows = convergence_study(problem, cfg.N, levels, cfg.rho, cfg.t_end, sweep=sweep,
                             mu_fraction=cfg.mu_fraction, mode=cfg.mode,
                             strict=cfg.strict_monotone)
    body = []
    for r in rows:
        order = "exact" if r.exact else ("" if r.order is None else fmt(r.order))
        body.append((str(r.level), r.h, r.rho, r.linf, r.l2, order))
    write_csv(out / "convergence.csv", ("level", "h", "rho", "linf", "l2", "order_linf"), body)
    return EXIT_OK


def cmd_compare(cfg: RunConfig) -> int:
    """Monotone spline scheme against the implicit upwind and central baselines."""
    out = _out_dir(cfg)
    problem, grid = problem_from_config(cfg), grid_from_config(cfg)
    res = run(problem, grid, _params(cfg), cfg.t_end, snapshot_times=cfg.snapshot_times)
    rows = []

    def add(name, t, vals):
        if problem.exact is not None:
            rep = error_report(grid.taus, vals, sample_field(problem.exact, grid.taus, t))
            rows.append((name, t, rep.linf, rep.l2, float(vals.min()), float(vals.max())))
        else:
            rows.append((name, t, "", "", float(vals.min()), float(vals.max())))

    for _, t, state in res.snapshots:
        add("spline-monotone", t, state.spline.phi)
    for kind in BASELINES:
        _, snaps = run_baseline(kind, problem, grid.taus, cfg.rho, cfg.t_end,
                                cfg.snapshot_times)
        for k in sorted(snaps):
            add(kind, snaps[k].t, snaps[k].u_x)
    write_csv(out / "compare.csv", ("scheme", "t", "linf", "l2", "min_u", "max_u"), rows)
    return EXIT_OK


# ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="monospline",
                                description="Monotone quadratic-spline scheme for 1D "
                                            "convection-diffusion-reaction problems.")
    p.add_argument("command", choices=("solve", "check", "convergence", "compare"))
    p.add_argument("--config", required=True, help="flat key = value run description")
    p.add_argument("--out", help="output directory (overrides out_dir)")
    p.add_argument("--levels", type=int, default=3, help="refinement levels for convergence")
    p.add_argument("--sweep", choices=("space", "time"), default="space",
                   help="convergence: halve h (space) or rho on the finest grid (time)")
    p.add_argument("--permissive", action="store_true",
                   help="step even when the monotonicity conditions fail")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.out:
            cfg = replace(cfg, out_dir=args.out)
        if args.permissive:
            cfg = replace(cfg, strict_monotone=False)
        if args.command == "check":
            return cmd_check(cfg)
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "convergence":
            return cmd_convergence(cfg, args.levels, args.sweep)
        return cmd_compare(cfg)
    except ConfigError as exc:
        print(f"monospline: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MonotonicityError as exc:
        print(f"monospline: refused at step {exc.step}: {exc}", file=sys.stderr)
        return EXIT_MONOTONE
    except (NumericalFailure, SingularSystemError, DegenerateEliminationError) as exc:
        print(f"monospline: numerical failure at step {exc.step}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"monospline: I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"monospline: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
