"""Problem description, dual grid geometry and initial sampling.

The equation solved is

    u_t = D u_xx - V u_x + A u + f,   0 < x < L,  t > 0,
    u(0, t) = U0(t),  u(L, t) = UL(t),  u(x, 0) = g(x).

All coefficient fields are callables ``field(x, t)`` that accept numpy
arrays for ``x`` and broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

Field = Callable[[np.ndarray, float], np.ndarray]

PRESETS = ("gaussian", "linear_steady", "constant", "manufactured_sine")


def constant_field(value: float) -> Field:
    """Return a space-time field that is identically ``value``."""
    value = float(value)

    def fn(x, t):
        return np.full(np.shape(x), value)

    fn.constant = value
    return fn


def sample_field(fn: Field, x, t: float) -> np.ndarray:
    """Evaluate ``fn`` on ``x`` and broadcast the result to ``x``'s shape."""
    x = np.asarray(x, dtype=float)
    return np.broadcast_to(np.asarray(fn(x, t), dtype=float), x.shape)


@dataclass(frozen=True)
class ProblemSpec:
    L: float
    D: Field
    V: Field
    A: Field
    f: Field
    U0: Callable[[float], float]
    UL: Callable[[float], float]
    g: Callable[[np.ndarray], np.ndarray]
    exact: Optional[Field] = None
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError(f"domain length must be positive, got L={self.L}")


@dataclass(frozen=True)
class DualGrid:
    """Interleaved partitions of ``[0, L]``.

    ``xs`` holds the collocation nodes x_0..x_N and ``taus`` the spline knots
    tau_0..tau_{N-1}.  The end points coincide: tau_0 = x_0 = 0 and
    tau_{N-1} = x_N = L.  Interval ``i`` is ``[taus[i], taus[i+1]]`` and
    carries the collocation node ``xs[i+1]``.

    For grids built with :func:`build_dual_grid`, ``h`` is the knot spacing
    and ``mu`` the offset ``tau_i - x_i``; both are ``None`` on grids built
    from arbitrary nodes.
    """

    N: int
    xs: np.ndarray
    taus: np.ndarray
    h: Optional[float] = None
    mu: Optional[float] = None

    @property
    def L(self) -> float:
        return float(self.taus[-1])

    @property
    def uniform(self) -> bool:
        return self.h is not None

    @classmethod
    def from_nodes(cls, xs, taus) -> "DualGrid":
        """Build a (possibly nonuniform) grid, validating the interleaving."""
        xs = np.array(xs, dtype=float)
        taus = np.array(taus, dtype=float)
        N = taus.size
        if N < 4:
            raise ValueError(f"need at least 4 knots, got {N}")
        if xs.size != N + 1:
            raise ValueError(f"expected {N + 1} collocation nodes, got {xs.size}")
        if xs[0] != taus[0] or xs[-1] != taus[-1] or taus[0] != 0.0:
            raise ValueError("grid end points must coincide at 0 and L")
        # tau_{i} < x_{i+1} < tau_{i+1} for every interval
        if not (np.all(taus[:-1] < xs[1:-1]) and np.all(xs[1:-1] < taus[1:])):
            raise ValueError("collocation nodes do not interleave with the knots")
        xs.setflags(write=False)
        taus.setflags(write=False)
        return cls(N=N, xs=xs, taus=taus)


@dataclass(frozen=True)
class StepParams:
    rho: float
    mode: str = "uniform"
    strict: bool = True

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"time step must be positive, got rho={self.rho}")
        if self.mode not in ("uniform", "general"):
            raise ValueError(f"unknown assembly mode {self.mode!r}")


def build_dual_grid(L: float, N: int, mu_fraction: float = 0.5) -> DualGrid:
    """Uniform knots ``tau_i = i h`` with collocation nodes shifted left by ``mu``."""
    if N < 4:
        raise ValueError(f"too few nodes: N={N}, need N >= 4")
    if not 0.0 < mu_fraction < 1.0:
        raise ValueError(f"mu_fraction must lie in (0, 1), got {mu_fraction}")
    if not L > 0:
        raise ValueError(f"domain length must be positive, got L={L}")
    h = L / (N - 1)
    mu = mu_fraction * h
    taus = np.arange(N) * h
    taus[-1] = L
    xs = np.empty(N + 1)
    xs[0] = 0.0
    xs[1:N] = np.arange(1, N) * h - mu
    xs[N] = L
    xs.setflags(write=False)
    taus.setflags(write=False)
    return DualGrid(N=N, xs=xs, taus=taus, h=h, mu=mu)


def sample_initial(problem: ProblemSpec, grid: DualGrid) -> np.ndarray:
    """Initial values ``g(x_i)`` at the collocation nodes, i = 0..N."""
    return np.array(np.broadcast_to(problem.g(grid.xs), grid.xs.shape), dtype=float)


# ----------------------------------------------------------------------------
# presets


def gaussian_exact(x, t, D, V, x0=0.4):
    """Gaussian pulse advected with speed V and spreading with diffusion D."""
    t = np.asarray(t, dtype=float)
    s = 4.0 * D * (t + 1.0)
    return np.exp(-((np.asarray(x, dtype=float) - x0 - V * t) ** 2) / s) / (
        2.0 * np.sqrt(math.pi * D * (t + 1.0))
    )


def sine_fields(L, D, V, A):
    """Closed-form fields for u(x, t) = exp(-t) sin(pi x / L)."""
    k = math.pi / L

    def u(x, t):
        return np.exp(-np.asarray(t, dtype=float)) * np.sin(k * np.asarray(x, dtype=float))

    def f(x, t):
        x = np.asarray(x, dtype=float)
        return np.exp(-np.asarray(t, dtype=float)) * (
            (-1.0 + D * k * k - A) * np.sin(k * x) + V * k * np.cos(k * x)
        )

    return u, f


def build_problem(preset: str, L: float = 1.0, D: float = 0.001, V: float = 1.0,
                  A: float = 0.0, c: float = 1.0, x0: float = 0.4) -> ProblemSpec:
    """Construct one of the closed-form test problems.

    ``gaussian``
        Advected Gaussian pulse centred at ``x0``; requires ``A = 0``.
    ``linear_steady``
        Steady ``u = x`` with source ``f = V - A x``.
    ``constant``
        Steady ``u = c`` with source ``f = -A c``.
    ``manufactured_sine``
        ``u = exp(-t) sin(pi x / L)`` with the matching source.
    """
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
    if not D > 0:
        raise ValueError(f"non-positive diffusion D={D}")
    if preset != "constant" and V == 0:
        raise ValueError(f"preset {preset!r} needs a nonzero convection speed V")
    params = dict(L=L, D=D, V=V, A=A)
    Df, Vf, Af = constant_field(D), constant_field(V), constant_field(A)

    if preset == "gaussian":
        if A != 0:
            raise ValueError("gaussian preset has no reaction term; set A = 0")
        params["x0"] = x0

        def exact(x, t):
            return gaussian_exact(x, t, D, V, x0)

        return ProblemSpec(
            L=L, D=Df, V=Vf, A=Af, f=constant_field(0.0),
            U0=lambda t: float(exact(0.0, t)),
            UL=lambda t: float(exact(L, t)),
            g=lambda x: exact(x, 0.0),
            exact=exact, name=preset, params=params,
        )

    if preset == "linear_steady":
        return ProblemSpec(
            L=L, D=Df, V=Vf, A=Af,
            f=lambda x, t: V - A * np.asarray(x, dtype=float),
            U0=lambda t: 0.0,
            UL=lambda t: float(L),
            g=lambda x: np.array(x, dtype=float),
            exact=lambda x, t: np.array(x, dtype=float),
            name=preset, params=params,
        )

    if preset == "constant":
        params["c"] = c
        return ProblemSpec(
            L=L, D=Df, V=Vf, A=Af, f=constant_field(-A * c),
            U0=lambda t: float(c),
            UL=lambda t: float(c),
            g=lambda x: np.full(np.shape(x), float(c)),
            exact=lambda x, t: np.full(np.shape(x), float(c)),
            name=preset, params=params,
        )

    u, f = sine_fields(L, D, V, A)
    return ProblemSpec(
        L=L, D=Df, V=Vf, A=Af, f=f,
        U0=lambda t: 0.0,
        UL=lambda t: 0.0,
        g=lambda x: u(x, 0.0),
        exact=u, name=preset, params=params,
    )
