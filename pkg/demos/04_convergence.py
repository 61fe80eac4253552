"""Refinement studies on the manufactured solution exp(-t) sin(pi x).

Halving rho on a fine grid exposes the first-order time discretisation;
halving h with a tiny rho shows the spatial error falling.  Switching the
reaction term on (A = 1) barely changes either column.
"""

from monospline import build_problem
from monospline.verify import convergence_study

for A in (0.0, 1.0):
    p = build_problem("manufactured_sine", L=1.0, D=0.01, V=1.0, A=A)
    print(f"A = {A:g}, time sweep (N = 801)")
    for r in convergence_study(p, 101, 4, 0.04, 1.0, sweep="time"):
        order = "" if r.order is None else f"{r.order:.3f}"
        print(f"  rho = {r.rho:.4f}  linf = {r.linf:.3e}  order {order}")
    print(f"A = {A:g}, space sweep (rho = 1e-4)")
    for r in convergence_study(p, 11, 5, 1e-4, 0.1, sweep="space"):
        order = "" if r.order is None else f"{r.order:.3f}"
        print(f"  h = {r.h:.5f}  linf = {r.linf:.3e}  order {order}")
    print()
