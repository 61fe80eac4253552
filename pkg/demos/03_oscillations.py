"""Monotone spline scheme against standard implicit schemes at cell Peclet 10.

The same pulse is advanced with rho = 0.1 on a grid with h = 0.01.  When
it reaches the outflow boundary, centred differences produce a large negative
overshoot; the upwind scheme and the spline scheme stay non-negative.
"""

import numpy as np

from monospline import StepParams, build_dual_grid, build_problem, run
from monospline.verify import BASELINES, run_baseline

L, D, V, rho, steps = 2.4, 0.001, 1.0, 0.1, 50
problem = build_problem("gaussian", L=L, D=D, V=V, A=0.0)
grid = build_dual_grid(L, 241, 0.95)
times = [k * rho for k in range(1, steps + 1)]

spline_min = []
run(problem, grid, StepParams(rho), steps * rho,
    on_step=lambda old, new: spline_min.append(new.spline.phi.min()))
print(f"{'scheme':18s} {'min u':>12s}  step")
k = int(np.argmin(spline_min))
print(f"{'spline-monotone':18s} {spline_min[k]:12.3e}  {k + 1}")
for kind in BASELINES:
    _, snaps = run_baseline(kind, problem, grid.taus, rho, steps * rho, times)
    k, state = min(snaps.items(), key=lambda kv: kv[1].u_x.min())
    print(f"{kind:18s} {state.u_x.min():12.3e}  {k}")
