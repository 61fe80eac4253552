"""Implicit time stepping: assemble, solve, reconstruct, hand C forward."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import MonosplineError, MonotonicityError, NumericalFailure
from .linalg import TridiagonalSystem, thomas_solve
from .problem import DualGrid, ProblemSpec, StepParams, sample_field, sample_initial
from .scheme import assemble, monotonicity_report, reconstruct_c
from .spline import QuadSpline, build_spline


@dataclass(frozen=True)
class SolverState:
    k: int
    t: float
    u_x: np.ndarray
    spline: Optional[QuadSpline] = None


def initial_state(problem: ProblemSpec, grid: DualGrid) -> SolverState:
    return SolverState(k=0, t=0.0, u_x=sample_initial(problem, grid))


def check_monotone(problem, grid, params, t_next, system: Optional[TridiagonalSystem] = None):
    """Raise :class:`MonotonicityError` if the step would not be monotone.

    Uniform mode checks the stencil weights before assembly; general mode
    checks the sign pattern and dominance of the assembled rows.
    """
    if params.mode == "uniform":
        xc = grid.xs[1:-1]
        D, V, A = (float(sample_field(fn, xc, t_next).flat[0])
                   for fn in (problem.D, problem.V, problem.A))
        rep = monotonicity_report(D, V, A, params.rho, grid.h, grid.mu)
        if not rep.monotone:
            raise MonotonicityError(
                f"scheme not monotone at rho={params.rho}: alpha={rep.alpha:.6g}, "
                f"beta={rep.beta:.6g}, gamma={rep.gamma:.6g}, rho1={rep.rho1:.6g}, "
                f"rho2={rep.rho2:.6g}, 1/A bound={rep.rho_max_reaction:.6g}"
            )
        return rep
    A = sample_field(problem.A, grid.xs[1:-1], t_next)
    if np.any(A > 0) and params.rho > 1.0 / np.max(A):
        raise MonotonicityError(f"rho={params.rho} exceeds 1/max(A)")
    if system is None:
        return None
    ok = (np.all(system.sub > 0) and np.all(system.sup > 0) and np.all(system.diag < 0))
    off = np.zeros(system.n)
    off[1:] += system.sub
    off[:-1] += system.sup
    if not ok or np.any(-system.diag < off):
        raise MonotonicityError("assembled rows lack the monotone sign pattern")
    return None


def step(state: SolverState, problem: ProblemSpec, grid: DualGrid,
         params: StepParams) -> SolverState:
    k_next = state.k + 1
    t_next = k_next * params.rho
    try:
        if params.strict and params.mode == "uniform":
            check_monotone(problem, grid, params, t_next)
        system = assemble(problem, grid, params, state.u_x, t_next)
        if params.strict and params.mode == "general":
            check_monotone(problem, grid, params, t_next, system)
        phi = np.empty(grid.N)
        phi[0] = problem.U0(t_next)
        phi[-1] = problem.UL(t_next)
        phi[1:-1] = thomas_solve(system)
        c = reconstruct_c(phi, problem, grid, params, state.u_x, t_next)
        if not (np.all(np.isfinite(phi)) and np.all(np.isfinite(c))):
            raise NumericalFailure(f"non-finite values at t={t_next}")
    except MonosplineError as exc:
        exc.step = k_next
        raise
    return SolverState(k=k_next, t=t_next, u_x=c, spline=build_spline(grid, phi, c))


Observer = Callable[[int, float, QuadSpline], None]


@dataclass
class RunResult:
    state: SolverState
    snapshots: list = field(default_factory=list)


def n_steps_for(t_end: float, rho: float) -> int:
    # tolerate round-off in t_end / rho before rounding up
    return max(1, math.ceil(t_end / rho - 1e-9))


def run(problem: ProblemSpec, grid: DualGrid, params: StepParams, t_end: float,
        snapshot_times: Sequence[float] = (), observers: Sequence[Observer] = (),
        on_step: Optional[Callable[[SolverState, SolverState], None]] = None) -> RunResult:
    """Advance from ``g`` to ``t_end``, overshooting to a whole number of steps.

    Snapshots are taken at the step nearest each requested time and stored
    as ``(k, t, state)``; observers are called with ``(k, t, spline)`` at the
    same steps.  ``on_step(old, new)`` runs after every step.
    """
    if not t_end >= params.rho * (1 - 1e-12):
        raise ValueError(f"t_end={t_end} is shorter than one step rho={params.rho}")
    n = n_steps_for(t_end, params.rho)
    wanted = sorted({min(n, max(1, round(t / params.rho))) for t in snapshot_times})
    result = RunResult(state=initial_state(problem, grid))
    state = result.state
    for _ in range(n):
        new = step(state, problem, grid, params)
        if on_step is not None:
            on_step(state, new)
        state = new
        if wanted and state.k == wanted[0]:
            wanted.pop(0)
            result.snapshots.append((state.k, state.t, state))
            for obs in observers:
                obs(state.k, state.t, state.spline)
    result.state = state
    return result
