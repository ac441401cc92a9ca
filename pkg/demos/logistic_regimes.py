#!/usr/bin/env python3
# The synthetic plant: a logistic map whose parameter mu jumps between set points.
# Low mu settles to a fixed point, mid mu oscillates, high mu is chaotic.

import numpy as np

from wrelm.synthgen import GenConfig, bifurcation_scan, count_distinct, generate_full, period2_orbit

# %% Post-transient behaviour at a few parameter values
grid = np.array([2.8, 3.2, 3.5, 3.9])
samples = bifurcation_scan(grid, transient_skip=2000, samples=1000)
for mu, s in zip(grid, samples):
    print(f"mu={mu:.1f}: {count_distinct(s):4d} distinct states, range [{s.min():.4f}, {s.max():.4f}]")

print("fixed point at 2.8:", 1 - 1 / 2.8)
print("period-2 orbit at 3.2:", period2_orbit(3.2))

# %% A stepped stream like the ones used for training and evaluation
g = generate_full(GenConfig(seed=1, n_steps=2000, noise=0.01, invalid_fraction=0.03))
ds = g.dataset
print(f"\n{len(ds)} rows, {len(g.dwells)} set points, dwell lengths {g.dwells.min()}..{g.dwells.max()}")
print("features per row:", ds.z, "(state, mu, 4 distractors)")
print("rows flagged invalid:", int((~ds.valid).sum()))

# return map: x[k+1] against x[k], binned
H, _, _ = np.histogram2d(ds.features[:, 0], g.states[1:], bins=8, range=[[0, 1], [0, 1]])
print("\nreturn-map occupancy (rows: x[k], cols: x[k+1])")
print(H.astype(int))
