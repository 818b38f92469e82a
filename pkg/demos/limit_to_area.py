"""``(1 - s) Per_s`` tends to a multiple of the length as ``s -> 1``.

The estimator is run at a few orders below 1 and the values are
extrapolated to ``s = 1``. The multiple is fixed by the segment and then
reused for the circle.
"""

import numpy as np

from fracarea import Domain, Params, QuadratureSpec, area_constant, area_limit_scan, build_polyline

omega = Domain.ball((0, 0), 3)
plist = [Params(2, s) for s in (0.5, 0.7, 0.9)]
spec = QuadratureSpec(n_samples=300_000, seed=5)

seg = area_limit_scan(build_polyline([(-1.0, 0.0), (1.0, 0.0)]), omega, plist, spec)
print(seg.to_csv())
kappa = area_constant(plist[0])
print(f"segment: limit {seg.limit:.4f} +- {seg.limit_std:.4f}, length {seg.limit / kappa:.4f} (exact 2)")

t = 2 * np.pi * np.arange(400) / 400
circ = area_limit_scan(build_polyline(np.c_[np.cos(t), np.sin(t)], closed=True), omega, plist, spec)
fitted = seg.limit / 2.0
print(f"circle: length {circ.limit / fitted:.4f} with the fitted constant (exact {2 * np.pi:.4f})")
