#!/usr/bin/env python3
# The online correction is an exact rewrite of refitting on the stacked data.
# Build one system by hand and check it against the brute-force solve.

import numpy as np

from wrelm.adapter import adapt_arrays
from wrelm.elm import hidden_matrix, init_input_weights
from wrelm.oracle import batch_weighted_ls, stack
from wrelm.trainer import weighted_offline_solve
from wrelm.verify import rel_err, run_battery

rng = np.random.default_rng(0)
weights = init_input_weights(42, 4, 16)
X0, X1 = rng.uniform(-8, 8, (300, 4)), rng.uniform(-8, 8, (8, 4))
H0, H1 = hidden_matrix(weights, X0, "exact"), hidden_matrix(weights, X1, "exact")
T0, T1 = rng.random(300), rng.random(8)
w0, w1 = np.full(300, 3.5e-3), np.ones(8)

p0, beta0, _ = weighted_offline_solve(H0, w0, T0)
beta1, _ = adapt_arrays(p0, beta0, H1, T1, w1)
reference = batch_weighted_ls(stack((H0, w0, T0), (H1, w1, T1)))
print("relative difference vs stacked solve:", rel_err(beta1, reference))

# The ring weights are relative to the offline weights: scaling both changes nothing.
p0c, beta0c, _ = weighted_offline_solve(H0, 1e3 * w0, T0)
beta1c, _ = adapt_arrays(p0c, beta0c, H1, T1, 1e3 * w1)
print("after scaling both weight sets by 1e3:", rel_err(beta1c, beta1))

# %% Randomised battery, as run by `wrelm verify`
report = run_battery(100, seed=0)
print(f"\n{report.instances} instances, worst offline {report.max_offline_error:.1e}, "
      f"worst online {report.max_online_error:.1e}, passed={report.passed}")
