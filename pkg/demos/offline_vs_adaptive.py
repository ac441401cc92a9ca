#!/usr/bin/env python3
# Train once on a narrow slice of the dynamics, then stream data from a wider
# range and compare the frozen model with ring-buffer adaptation.

import numpy as np

from wrelm import GenConfig, TrainConfig, generate, replay, train_offline
from wrelm.synthgen import generate_full

train = generate(GenConfig(seed=11, n_steps=10_000, mu_min=2.8, mu_max=3.4, noise=0.01))
model = train_offline(train, TrainConfig())
print(f"trained on {model.n_train} rows, {model.n_neurons} neurons")

g = generate_full(GenConfig(seed=12, n_steps=10_000, mu_min=2.8, mu_max=3.9, noise=0.01))
test = g.dataset

static = replay(model, test, adaptive=False, log_events=False)
adaptive = replay(model, test, ring_size=8, log_events=False)

print(f"\n{'':10s}{'R2':>8s}{'RMSE':>9s}{'steady':>9s}")
for name, res in [("static", static), ("adaptive", adaptive)]:
    print(f"{name:10s}{res.r2:8.3f}{res.rmse:9.4f}{res.steady_rmse:9.4f}")

# %% Where does adaptation help?  Split by whether mu was seen in training.
seen = g.mu <= 3.4
for label, mask in [("mu seen", seen), ("mu unseen", ~seen)]:
    r2_s, e_s = static.subset_metrics(mask)
    r2_a, e_a = adaptive.subset_metrics(mask)
    print(f"{label:10s} static RMSE {e_s:.4f}  adaptive RMSE {e_a:.4f}")

# %% Ring size trade-off
for r in (1, 2, 4, 8, 16, 32):
    res = replay(model, test, ring_size=r, log_events=False)
    print(f"r={r:2d}  RMSE {res.rmse:.4f}  median adapt {np.median(res.adapt_ns[1:]) / 1e3:.1f} us")
