#!/usr/bin/env python3
# Per-step cost of push + adapt + predict, and how it grows with ring size
# and neuron count.

from wrelm.bench import bench_latency, synthetic_model

for n in (16, 32, 64, 128):
    model = synthetic_model(n, 6, n_steps=3000)
    for r in (4, 8, 16):
        rep = bench_latency(model, r, iterations=5000, warmup=500)
        print(
            f"neurons={n:3d} r={r:2d}  total {rep.median_us():6.1f} us  "
            f"(push {rep.median_us('push'):5.1f}, adapt {rep.median_us('adapt'):5.1f}, "
            f"predict {rep.median_us('predict'):5.1f})  p99 {rep.p99_us():6.1f} us"
        )
