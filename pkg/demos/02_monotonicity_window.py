"""Which time steps keep the scheme monotone?

For the reference constants the offset mu decides the admissible window
rho > max(rho1, rho2).  Moving the collocation node towards the upstream
knot (larger mu) relaxes rho2 sharply, which is what makes cell Peclet
numbers far above 2 usable.
"""

import math

import numpy as np

from monospline import monotonicity_report

D, V, A = 0.001, 1.0, 0.0


def show(x):
    return f"{x:.3e}" if math.isfinite(x) else "never"


for h in (0.0005, 0.01):
    print(f"h = {h}  (cell Peclet {V * h / D:g})")
    for frac in (0.25, 0.5, 0.75, 0.9, 0.95):
        rep = monotonicity_report(D, V, A, 0.1, h, frac * h)
        print(f"  mu = {frac:.2f} h: rho1 = {show(rep.rho1)}, rho2 = {show(rep.rho2)}")
    print()

h, mu = 0.0005, 0.00025
print("verdict across rho at h = 0.0005, mu = h/2:")
for rho in np.geomspace(1e-5, 1e-2, 7):
    rep = monotonicity_report(D, V, A, rho, h, mu)
    print(f"  rho = {rho:.2e}: alpha = {rep.alpha:+.3e}, beta = {rep.beta:+.3e}, "
          f"{'monotone' if rep.monotone else 'not monotone'}")
