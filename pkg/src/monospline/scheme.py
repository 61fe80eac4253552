"""Assembly of the three-point spline scheme.

On every interval ``[tau_i, tau_{i+1}]`` the solution is the quadratic through
``(tau_i, phi_i)``, ``(x_{i+1}, C_{i+1})`` and ``(tau_{i+1}, phi_{i+1})``.
Collocating the time-discrete equation

    D u'' - V u' + (A - 1/rho) u = -f - u_prev / rho

at ``x_{i+1}`` expresses ``C_{i+1}`` through its two knot values.  Requiring
the first derivative to be continuous at every interior knot then leaves a
tridiagonal system in the knot values alone, written row-wise as

    alpha phi_{i-1} - gamma phi_i + beta phi_{i+1} = rhs_i.

Notation used below, per interval: ``d1 = x_{i+1} - tau_i``,
``d2 = tau_{i+1} - x_{i+1}``, ``H = tau_{i+1} - tau_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEliminationError
from .linalg import TridiagonalSystem
from .problem import DualGrid, ProblemSpec, StepParams, sample_field


@dataclass(frozen=True)
class SchemeCoefficients:
    alpha: float
    gamma: float
    beta: float
    a: float
    b: float


@dataclass(frozen=True)
class MonotonicityReport:
    """Thresholds and verdict for the uniform scheme.

    ``rho1``/``rho2`` are ``inf`` when no time step can make the matching
    weight positive at this offset.  ``rho_max_reaction`` is ``1/A`` for
    ``A > 0`` and ``inf`` otherwise.
    """

    rho: float
    rho1: float
    rho2: float
    rho_max_reaction: float
    alpha: float
    beta: float
    gamma: float
    monotone: bool

    @property
    def rho1_satisfiable(self) -> bool:
        return math.isfinite(self.rho1)

    @property
    def rho2_satisfiable(self) -> bool:
        return math.isfinite(self.rho2)


@dataclass(frozen=True)
class QTriple:
    """Continuity row ``q_prev phi_{i-1} - q_self phi_i + q_next phi_{i+1} = f_term``."""

    q_prev: float
    q_self: float
    q_next: float
    f_term: float


def _check_uniform_args(D, V, A, rho, h, mu):
    if not h > 0:
        raise ValueError(f"grid spacing must be positive, got h={h}")
    if not 0 < mu < h:
        raise ValueError(f"offset must satisfy 0 < mu < h, got mu={mu}, h={h}")
    if not rho > 0:
        raise ValueError(f"time step must be positive, got rho={rho}")
    if not D > 0:
        raise ValueError(f"diffusion must be positive, got D={D}")


def scheme_coefficients(D, V, A, rho, h, mu) -> SchemeCoefficients:
    """Stencil weights of the uniform scheme with constant coefficients."""
    _check_uniform_args(D, V, A, rho, h, mu)
    mass = 1.0 / rho - A
    h2 = h * h
    a = D / h2 + V / h2 * mu
    b = D / h2 - V / h * (1.0 - mu / h)
    alpha = a - mu * mu / (2.0 * h2) * mass
    beta = b - (h - mu) ** 2 / (2.0 * h2) * mass
    gamma = a + b + (2.0 * h2 - mu * mu - (h - mu) ** 2) / (2.0 * h2) * mass
    return SchemeCoefficients(alpha=alpha, gamma=gamma, beta=beta, a=a, b=b)


def _threshold(num, den):
    return num / den if den > 0 else math.inf


def monotonicity_report(D, V, A, rho, h, mu) -> MonotonicityReport:
    c = scheme_coefficients(D, V, A, rho, h, mu)
    rho1 = _threshold(mu * mu, 2.0 * (D + V * mu) + A * mu * mu)
    rho2 = _threshold((h - mu) ** 2, 2.0 * (D + V * mu - V * h) + A * (h - mu) ** 2)
    rho_max = 1.0 / A if A > 0 else math.inf
    monotone = bool(
        c.alpha > 0 and c.beta > 0 and c.gamma >= c.alpha + c.beta and rho <= rho_max
    )
    return MonotonicityReport(
        rho=rho, rho1=rho1, rho2=rho2, rho_max_reaction=rho_max,
        alpha=c.alpha, beta=c.beta, gamma=c.gamma, monotone=monotone,
    )


# ----------------------------------------------------------------------------
# per-interval elimination


@dataclass(frozen=True)
class _Intervals:
    d1: np.ndarray
    d2: np.ndarray
    H: np.ndarray
    E: np.ndarray  # bracket denominator of the C elimination
    P: np.ndarray  # weight of the left knot in C
    R: np.ndarray  # weight of the right knot in C
    S: np.ndarray  # source part of C


def _eliminate(ta, xc, tb, D, V, A, rho, f, u):
    """``C = P phi_left + R phi_right + S`` on each interval (vectorised)."""
    d1 = xc - ta
    d2 = tb - xc
    H = tb - ta
    E = (2.0 * D - V * ((xc - ta) + (xc - tb))) / (d1 * d2) + 1.0 / rho - A
    bad = ~np.isfinite(E) | (E == 0) | (d1 <= 0) | (d2 <= 0)
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise DegenerateEliminationError(
            f"degenerate elimination on interval {k}: bracket denominator {E.flat[k]!r}",
            interval=k,
        )
    P = (2.0 * D - V * (xc - tb)) / (d1 * H) / E
    R = (2.0 * D - V * (xc - ta)) / (d2 * H) / E
    S = (f + u / rho) / E
    return _Intervals(d1=d1, d2=d2, H=H, E=E, P=P, R=R, S=S)


def _continuity(left: _Intervals, right: _Intervals):
    """Derivative continuity at the knot shared by ``left`` and ``right``.

    Returns the row ``(q_prev, q_self, q_next, f_term)`` as it falls out of
    the derivative matching, together with the weight ``w`` that rescales it onto the ``alpha, gamma,
    beta`` normalisation used by the uniform scheme.
    """
    # derivative of the left piece at its right end, of the right piece at its left end
    cl = left.H / (left.d1 * left.d2)
    cr = right.H / (right.d1 * right.d2)
    q_prev = left.d2 / (left.d1 * left.H) - cl * left.P
    q_self = -(
        (left.H + left.d2) / (left.H * left.d2) - cl * left.R
        + (right.d1 + right.H) / (right.d1 * right.H) - cr * right.P
    )
    q_next = right.d1 / (right.H * right.d2) - cr * right.R
    f_term = cl * left.S + cr * right.S
    w = -1.0 / (cl / left.E + cr / right.E)
    return q_prev, q_self, q_next, f_term, w


def q_coefficients(taus, xs, D, V, A, rho, f, u_prev) -> QTriple:
    """Continuity row at knot ``taus[1]``.

    ``taus = (tau_{i-1}, tau_i, tau_{i+1})`` and ``xs = (x_i, x_{i+1})``.
    ``D``, ``V``, ``A`` may be scalars or pairs sampled at ``xs``; ``f`` and
    ``u_prev`` are pairs sampled at ``xs``.
    """
    t0, t1, t2 = (float(v) for v in taus)
    x1, x2 = (float(v) for v in xs)
    if not (t0 < x1 < t1 < x2 < t2):
        raise ValueError("knots and collocation nodes do not interleave")
    D, V, A, f, u = (np.broadcast_to(np.asarray(v, dtype=float), (2,)) for v in (D, V, A, f, u_prev))
    iv = _eliminate(np.array([t0, t1]), np.array([x1, x2]), np.array([t1, t2]),
                    D, V, A, rho, f, u)
    left = _Intervals(*(a[:1] for a in (iv.d1, iv.d2, iv.H, iv.E, iv.P, iv.R, iv.S)))
    right = _Intervals(*(a[1:] for a in (iv.d1, iv.d2, iv.H, iv.E, iv.P, iv.R, iv.S)))
    qp, qs, qn, ft, _ = _continuity(left, right)
    return QTriple(float(qp[0]), float(qs[0]), float(qn[0]), float(ft[0]))


def _interval_terms(problem: ProblemSpec, grid: DualGrid, rho, u_prev, t_next) -> _Intervals:
    xc = grid.xs[1:-1]
    D = sample_field(problem.D, xc, t_next)
    if not np.all(D > 0):
        raise ValueError(f"non-positive diffusion coefficient at t={t_next}")
    V = sample_field(problem.V, xc, t_next)
    A = sample_field(problem.A, xc, t_next)
    f = sample_field(problem.f, xc, t_next)
    u = np.asarray(u_prev, dtype=float)[1:-1]
    return _eliminate(grid.taus[:-1], xc, grid.taus[1:], D, V, A, rho, f, u)


def _check_u_prev(grid, u_prev):
    if np.shape(u_prev) != grid.xs.shape:
        raise ValueError(f"u_prev has shape {np.shape(u_prev)}, expected {grid.xs.shape}")


def _fold_boundaries(sub, diag, sup, rhs, first_coef, last_coef, left, right):
    rhs = rhs.copy()
    rhs[0] -= first_coef * left
    rhs[-1] -= last_coef * right
    return TridiagonalSystem(sub=sub, diag=diag, sup=sup, rhs=rhs)


def _constant_value(fn, x, t, name):
    vals = sample_field(fn, x, t)
    if np.any(vals != vals.flat[0]):
        raise ValueError(f"uniform assembly needs a constant {name}; use general mode")
    return float(vals.flat[0])


def assemble_uniform(problem: ProblemSpec, grid: DualGrid, params: StepParams,
                     u_prev, t_next: float) -> TridiagonalSystem:
    """Interior system for constant D, V, A on a uniform grid.

    Unknowns are ``phi_1 .. phi_{N-2}``; the known boundary knots are moved
    to the right-hand side.
    """
    if not grid.uniform:
        raise ValueError("uniform assembly needs a grid from build_dual_grid")
    _check_u_prev(grid, u_prev)
    xc = grid.xs[1:-1]
    D = _constant_value(problem.D, xc, t_next, "D")
    V = _constant_value(problem.V, xc, t_next, "V")
    A = _constant_value(problem.A, xc, t_next, "A")
    rho = params.rho
    c = scheme_coefficients(D, V, A, rho, grid.h, grid.mu)

    n = grid.N - 2
    f = sample_field(problem.f, grid.xs, t_next)
    u = np.asarray(u_prev, dtype=float)
    # row i (1..N-2) couples x_i and x_{i+1}
    rhs = -(f[1:-2] + f[2:-1]) / 2.0 - (u[2:-1] + u[1:-2]) / (2.0 * rho)
    return _fold_boundaries(
        np.full(n - 1, c.alpha), np.full(n, -c.gamma), np.full(n - 1, c.beta), rhs,
        c.alpha, c.beta, problem.U0(t_next), problem.UL(t_next),
    )


def assemble_general(problem: ProblemSpec, grid: DualGrid, params: StepParams,
                     u_prev, t_next: float) -> TridiagonalSystem:
    """Interior system with coefficients sampled at each collocation node.

    Works on any interleaved grid.  Each continuity row is rescaled so that
    it reduces to the ``alpha, -gamma, beta`` row of :func:`assemble_uniform`
    when the grid is uniform and the coefficients constant.
    """
    _check_u_prev(grid, u_prev)
    iv = _interval_terms(problem, grid, params.rho, u_prev, t_next)
    left = _Intervals(*(a[:-1] for a in (iv.d1, iv.d2, iv.H, iv.E, iv.P, iv.R, iv.S)))
    right = _Intervals(*(a[1:] for a in (iv.d1, iv.d2, iv.H, iv.E, iv.P, iv.R, iv.S)))
    qp, qs, qn, ft, w = _continuity(left, right)
    sub_full = w * qp
    sup_full = w * qn
    return _fold_boundaries(
        sub_full[1:], -w * qs, sup_full[:-1], w * ft,
        sub_full[0], sup_full[-1], problem.U0(t_next), problem.UL(t_next),
    )


def assemble(problem, grid, params, u_prev, t_next) -> TridiagonalSystem:
    if params.mode == "uniform":
        return assemble_uniform(problem, grid, params, u_prev, t_next)
    return assemble_general(problem, grid, params, u_prev, t_next)


def reconstruct_c(phi, problem: ProblemSpec, grid: DualGrid, params: StepParams,
                  u_prev, t_next: float) -> np.ndarray:
    """Values at the collocation nodes from the knot values ``phi``."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != grid.taus.shape:
        raise ValueError(f"phi has shape {phi.shape}, expected {grid.taus.shape}")
    _check_u_prev(grid, u_prev)
    iv = _interval_terms(problem, grid, params.rho, u_prev, t_next)
    c = np.empty(grid.N + 1)
    c[0] = phi[0]
    c[-1] = phi[-1]
    c[1:-1] = iv.P * phi[:-1] + iv.R * phi[1:] + iv.S
    return c
