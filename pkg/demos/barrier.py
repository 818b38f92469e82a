"""The two-sheet barrier and its side bump.

The graph sheet is the lifted well ``w_eps`` over the unit interval, and a
flat sheet sits at distance ``d(eps)`` below it. Without the bump the
curvature at the centre of the well is small, bounded by
``c phi(eps)^s`` with ``phi`` the largest second derivative of the well.
The bump pushes the sheet up away from the centre and makes the centre
value strictly negative once the normal points down.
"""

import numpy as np

from fracarea import Params, QuadratureSpec, fmc_estimate
from fracarea.shapes import BarrierSpec, barrier_apex, barrier_constants, make_barrier

params = Params(2, 0.5)
down = np.array([0.0, -1.0])

print(f"{'eps':>8} {'phi':>10} {'bound':>10} {'plain':>18} {'with bump':>18}")
for eps in (1e-2, 1e-3, 1e-4, 1e-5):
    bs = BarrierSpec(eps)
    c = barrier_constants(bs, params)
    bound = c["c_bound"] * c["phi"] ** params.s
    spec = QuadratureSpec(n_samples=200_000, seed=1)
    vals = []
    for bump in (False, True):
        M = make_barrier(bs, params, with_bump=bump)
        e = fmc_estimate(M, barrier_apex(M), down, params, spec)
        vals.append(f"{e.value:+.4f}+-{e.halfwidth:.4f}")
    print(f"{eps:8.0e} {c['phi']:10.4g} {bound:10.4g} {vals[0]:>18} {vals[1]:>18}")

# The bound only becomes small once phi is tiny; phi_inverse shows how small
# eps has to be for a given curvature budget.
from fracarea.shapes import phi_inverse

for target in (1.0, 0.1):
    print(f"phi(eps) = {target}: eps = {phi_inverse(target, 2)}")
