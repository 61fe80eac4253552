"""Piecewise-quadratic C1 spline on the dual grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problem import DualGrid


@dataclass(frozen=True)
class QuadSpline:
    """Quadratic pieces through ``(tau_i, phi_i), (x_{i+1}, c_{i+1}), (tau_{i+1}, phi_{i+1})``."""

    grid: DualGrid
    phi: np.ndarray
    c: np.ndarray

    def __call__(self, x):
        return spline_eval(self, x)

    def deriv(self, x):
        return spline_deriv(self, x)


def build_spline(grid: DualGrid, phi, c) -> QuadSpline:
    phi = np.array(phi, dtype=float)
    c = np.array(c, dtype=float)
    if phi.shape != (grid.N,):
        raise ValueError(f"phi must have length {grid.N}, got {phi.shape}")
    if c.shape != (grid.N + 1,):
        raise ValueError(f"c must have length {grid.N + 1}, got {c.shape}")
    phi.setflags(write=False)
    c.setflags(write=False)
    return QuadSpline(grid=grid, phi=phi, c=c)


def _locate(s: QuadSpline, x):
    x = np.asarray(x, dtype=float)
    taus = s.grid.taus
    if np.any(x < taus[0]) or np.any(x > taus[-1]) or np.any(np.isnan(x)):
        raise ValueError(f"evaluation point outside [0, {taus[-1]}]")
    # ties go to the interval on the left
    i = np.clip(np.searchsorted(taus, x, side="left") - 1, 0, s.grid.N - 2)
    return x, i, taus[i], s.grid.xs[i + 1], taus[i + 1]


def spline_eval(s: QuadSpline, x):
    """Spline value at ``x``; scalar in, scalar out."""
    x, i, ta, xc, tb = _locate(s, x)
    pa, cc, pb = s.phi[i], s.c[i + 1], s.phi[i + 1]
    # basis first, then scale: each basis is exactly 1 or 0 at the nodes
    val = (
        pa * ((x - xc) * (x - tb) / ((xc - ta) * (tb - ta)))
        - cc * ((x - ta) * (x - tb) / ((xc - ta) * (tb - xc)))
        + pb * ((x - ta) * (x - xc) / ((tb - xc) * (tb - ta)))
    )
    return val[()] if val.ndim == 0 else val


def spline_deriv(s: QuadSpline, x):
    """First derivative; at interior knots this is the left piece's derivative."""
    x, i, ta, xc, tb = _locate(s, x)
    val = _piece_deriv(s, i, x, ta, xc, tb)
    return val[()] if val.ndim == 0 else val


def _piece_deriv(s, i, x, ta, xc, tb):
    pa, cc, pb = s.phi[i], s.c[i + 1], s.phi[i + 1]
    return (
        pa * ((x - xc) + (x - tb)) / ((xc - ta) * (tb - ta))
        - cc * ((x - ta) + (x - tb)) / ((xc - ta) * (tb - xc))
        + pb * ((x - ta) + (x - xc)) / ((tb - xc) * (tb - ta))
    )


def continuity_defect(s: QuadSpline) -> float:
    """Largest first-derivative jump over the interior knots."""
    taus, xs = s.grid.taus, s.grid.xs
    k = np.arange(1, s.grid.N - 1)
    left = _piece_deriv(s, k - 1, taus[k], taus[k - 1], xs[k], taus[k])
    right = _piece_deriv(s, k, taus[k], taus[k], xs[k + 1], taus[k + 1])
    return float(np.max(np.abs(left - right))) if k.size else 0.0


def derivative_scale(s: QuadSpline) -> float:
    """Largest derivative magnitude over all knots, from both sides."""
    taus, xs = s.grid.taus, s.grid.xs
    i = np.arange(s.grid.N - 1)
    left_end = _piece_deriv(s, i, taus[i], taus[i], xs[i + 1], taus[i + 1])
    right_end = _piece_deriv(s, i, taus[i + 1], taus[i], xs[i + 1], taus[i + 1])
    return float(max(np.max(np.abs(left_end)), np.max(np.abs(right_end))))
