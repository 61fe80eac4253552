"""Exact solutions, error norms, baseline schemes and convergence studies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import TridiagonalSystem, thomas_solve
from .problem import (DualGrid, ProblemSpec, StepParams, build_dual_grid,
                      gaussian_exact, sample_field, sine_fields)
from .spline import QuadSpline
from .stepper import SolverState, n_steps_for, run


def exact_gaussian(x, t, D, V, x0=0.4):
    """Gaussian of unit mass, centred at ``x0 + V t`` with variance ``2 D (t + 1)``."""
    return gaussian_exact(x, t, D, V, x0)


def manufactured_sine(L, D, V, A):
    """Fields for ``u = exp(-t) sin(pi x / L)``.

    Returns a dict with ``u``, ``f``, ``U0``, ``UL`` and ``g``.
    """
    u, f = sine_fields(L, D, V, A)
    return dict(u=u, f=f, U0=lambda t: 0.0, UL=lambda t: 0.0, g=lambda x: u(x, 0.0))


@dataclass(frozen=True)
class ErrorReport:
    linf: float
    l2: float
    linf_rel: float
    sample_count: int


def trapezoid_weights(points) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    w = np.zeros_like(points)
    dx = np.diff(points)
    w[:-1] += dx / 2
    w[1:] += dx / 2
    return w


def error_report(points, numeric, exact_vals) -> ErrorReport:
    """Norms of ``numeric - exact_vals`` on sorted sample ``points``."""
    err = np.abs(np.asarray(numeric, dtype=float) - exact_vals)
    linf = float(np.max(err))
    l2 = float(math.sqrt(np.sum(trapezoid_weights(points) * err * err)))
    scale = float(np.max(np.abs(exact_vals)))
    linf_rel = linf / scale if scale > 0 else math.inf if linf > 0 else 0.0
    return ErrorReport(linf=linf, l2=l2, linf_rel=linf_rel, sample_count=err.size)


def error_norms(numeric, exact, grid: DualGrid, t: float) -> ErrorReport:
    """Errors at the knots.

    ``numeric`` is a :class:`QuadSpline` or an array of knot values; ``l2``
    uses trapezoid weights so that a constant error ``e`` gives ``e sqrt(L)``.
    """
    vals = numeric.phi if isinstance(numeric, QuadSpline) else np.asarray(numeric, dtype=float)
    if vals.shape != grid.taus.shape:
        raise ValueError(f"expected {grid.N} knot values, got {vals.shape}")
    return error_report(grid.taus, vals, sample_field(exact, grid.taus, t))


def spline_points(grid: DualGrid, per_interval: int = 10) -> np.ndarray:
    """Strictly interior sample points, ``per_interval`` evenly spaced per interval."""
    frac = np.arange(1, per_interval + 1) / (per_interval + 1)
    ta, tb = grid.taus[:-1], grid.taus[1:]
    return (ta[:, None] + frac[None, :] * (tb - ta)[:, None]).ravel()


def spline_error_norms(s: QuadSpline, exact, t: float, per_interval: int = 10) -> ErrorReport:
    """Errors through the continuous reconstruction: knots plus interior samples."""
    pts = np.sort(np.concatenate([s.grid.taus, spline_points(s.grid, per_interval)]))
    return error_report(pts, s(pts), sample_field(exact, pts, t))


# ----------------------------------------------------------------------------
# baselines on a single uniform grid

BASELINES = ("implicit-upwind", "implicit-central")


def _constant(fn, x, t, name):
    v = sample_field(fn, x, t)
    if np.any(v != v.flat[0]):
        raise ValueError(f"baseline schemes need a constant {name}")
    return float(v.flat[0])


def baseline_step(state: SolverState, kind: str, problem: ProblemSpec, nodes,
                  rho: float) -> SolverState:
    """One backward-Euler step of a standard three-point scheme on ``nodes``.

    ``kind`` is ``implicit-central`` (centred convection) or
    ``implicit-upwind`` (one-sided convection taken from the upwind side).
    """
    if kind not in BASELINES:
        raise ValueError(f"unknown baseline {kind!r}")
    nodes = np.asarray(nodes, dtype=float)
    h = nodes[1] - nodes[0]
    if not np.allclose(np.diff(nodes), h, rtol=1e-9, atol=0):
        raise ValueError("baseline schemes need a uniform grid")
    t_next = (state.k + 1) * rho
    inner = nodes[1:-1]
    D = _constant(problem.D, inner, t_next, "D")
    V = _constant(problem.V, inner, t_next, "V")
    A = _constant(problem.A, inner, t_next, "A")
    if kind == "implicit-central":
        lo = -D / h**2 - V / (2 * h)
        mid = 1 / rho - A + 2 * D / h**2
        hi = -D / h**2 + V / (2 * h)
    else:
        vp, vm = max(V, 0.0), min(V, 0.0)
        lo = -D / h**2 - vp / h
        mid = 1 / rho - A + 2 * D / h**2 + (vp - vm) / h
        hi = -D / h**2 + vm / h
    n = inner.size
    rhs = state.u_x[1:-1] / rho + sample_field(problem.f, inner, t_next)
    left, right = problem.U0(t_next), problem.UL(t_next)
    rhs[0] -= lo * left
    rhs[-1] -= hi * right
    system = TridiagonalSystem(sub=np.full(n - 1, lo), diag=np.full(n, mid),
                               sup=np.full(n - 1, hi), rhs=rhs)
    u = np.empty_like(nodes)
    u[0], u[-1] = left, right
    u[1:-1] = thomas_solve(system)
    return SolverState(k=state.k + 1, t=t_next, u_x=u)


def run_baseline(kind, problem, nodes, rho, t_end, snapshot_times=()):
    """Baseline time loop; returns the final state and ``{k: state}`` snapshots."""
    nodes = np.asarray(nodes, dtype=float)
    n = n_steps_for(t_end, rho)
    wanted = {min(n, max(1, round(t / rho))) for t in snapshot_times}
    state = SolverState(k=0, t=0.0, u_x=np.array(problem.g(nodes), dtype=float))
    snaps = {}
    for _ in range(n):
        state = baseline_step(state, kind, problem, nodes, rho)
        if state.k in wanted:
            snaps[state.k] = state
    return state, snaps


# ----------------------------------------------------------------------------
# convergence


@dataclass(frozen=True)
class ConvergenceRow:
    level: int
    N: int
    h: float
    rho: float
    linf: float
    l2: float
    order: Optional[float]
    exact: bool = False


def _order_rows(raw, exact_tol):
    rows = []
    for lev, (N, h, rho, rep) in enumerate(raw):
        order, exact = None, False
        if lev > 0:
            prev = raw[lev - 1][3].linf
            if prev <= exact_tol and rep.linf <= exact_tol:
                exact = True
            elif rep.linf > 0 and prev > 0:
                order = math.log2(prev / rep.linf)
        rows.append(ConvergenceRow(lev, N, h, rho, rep.linf, rep.l2, order, exact))
    return rows


def convergence_study(problem: ProblemSpec, N: int, levels: int, rho: float, t_end: float,
                      sweep: str = "space", rho_policy: str = "fixed",
                      mu_fraction: float = 0.5, mode: str = "uniform",
                      strict: bool = False, exact_tol: float = 1e-9):
    """Refinement study against ``problem.exact`` at the final time.

    ``sweep="space"`` runs grids with ``N, 2N-1, 4N-3, ...`` knots (halving
    ``h``); with ``rho_policy="proportional-to-h"`` the time step is halved
    alongside.  ``sweep="time"`` halves ``rho`` on the finest grid of the
    spatial ladder.  Errors are max/L2 at the knots; the order column is
    ``log2(e_prev / e)``, or flagged ``exact`` when both errors are below
    ``exact_tol``.
    """
    if levels < 2:
        raise ValueError(f"need at least 2 levels, got {levels}")
    if problem.exact is None:
        raise ValueError("convergence study needs a problem with an exact solution")
    if sweep not in ("space", "time"):
        raise ValueError(f"unknown sweep {sweep!r}")
    if rho_policy not in ("fixed", "proportional-to-h"):
        raise ValueError(f"unknown rho policy {rho_policy!r}")
    raw = []
    for lev in range(levels):
        if sweep == "space":
            n_lev = (N - 1) * 2**lev + 1
            r = rho / 2**lev if rho_policy == "proportional-to-h" else rho
        else:
            n_lev = (N - 1) * 2 ** (levels - 1) + 1
            r = rho / 2**lev
        grid = build_dual_grid(problem.L, n_lev, mu_fraction)
        res = run(problem, grid, StepParams(r, mode, strict), t_end)
        rep = error_norms(res.state.spline, problem.exact, grid, res.state.t)
        raw.append((n_lev, grid.h, r, rep))
    return _order_rows(raw, exact_tol)
