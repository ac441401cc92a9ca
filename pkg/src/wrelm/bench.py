"""Per-sample latency of push + adapt + predict."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .adapter import OnlineWeights, RingBuffer, step
from .synthgen import GenConfig, generate
from .trainer import OfflineModel, TrainConfig, train_offline

PHASES = ("push", "adapt", "predict")


@dataclass
class BenchReport:
    n_neurons: int
    ring_size: int
    z: int
    iterations: int
    push_ns: np.ndarray
    adapt_ns: np.ndarray
    predict_ns: np.ndarray
    total_ns: np.ndarray

    def median_us(self, phase: str = "total") -> float:
        return float(np.median(getattr(self, f"{phase}_ns")) / 1e3)

    def p99_us(self, phase: str = "total") -> float:
        return float(np.percentile(getattr(self, f"{phase}_ns"), 99) / 1e3)

    @property
    def phase_fraction(self) -> float:
        """Share of the measured wall time attributed to the three phases."""
        phases = self.push_ns.sum() + self.adapt_ns.sum() + self.predict_ns.sum()
        return float(phases / self.total_ns.sum())

    def summary(self) -> dict:
        out = {
            "neurons": self.n_neurons,
            "ring": self.ring_size,
            "z": self.z,
            "iterations": self.iterations,
            "phase_fraction": self.phase_fraction,
        }
        for phase in ("total", *PHASES):
            out[f"{phase}_median_us"] = self.median_us(phase)
            out[f"{phase}_p99_us"] = self.p99_us(phase)
        return out


def synthetic_model(n_neurons: int = 64, z: int = 6, seed: int = 1, n_steps: int = 5000) -> OfflineModel:
    """Small trained model for benchmarking when no model file is supplied."""
    if z < 2:
        raise ValueError("synthetic models need z >= 2 (state and map parameter)")
    ds = generate(GenConfig(seed=seed, n_steps=n_steps, noise=0.01, n_distractors=z - 2))
    return train_offline(ds, TrainConfig(n_neurons=n_neurons))


def bench_latency(
    model: OfflineModel,
    ring_size: int = 8,
    iterations: int = 100_000,
    seed: int = 0,
    warmup: int = 1000,
) -> BenchReport:
    """Time ``iterations`` calls of :func:`step` on random in-range inputs."""
    rng = np.random.default_rng(seed)
    lo, hi = model.scaler.lo, model.scaler.hi
    n_rows = 4096
    X = lo + rng.random((n_rows, model.z)) * (hi - lo)
    tlo, thi = model.target_scaler.lo[0], model.target_scaler.hi[0]
    T = tlo + rng.random(n_rows) * (thi - tlo)

    ring = RingBuffer.for_model(model, ring_size)
    w1 = OnlineWeights.identity(ring_size)
    clock = time.perf_counter_ns
    for i in range(warmup):
        step(model, ring, w1, X[i % n_rows], T[i % n_rows], X[(i + 1) % n_rows])

    push = np.empty(iterations, dtype=np.int64)
    adapt = np.empty(iterations, dtype=np.int64)
    pred = np.empty(iterations, dtype=np.int64)
    total = np.empty(iterations, dtype=np.int64)
    for i in range(iterations):
        j = i % n_rows
        t0 = clock()
        res = step(model, ring, w1, X[j], T[j], X[(j + 1) % n_rows])
        total[i] = clock() - t0
        push[i] = res.push_ns
        adapt[i] = res.adapt_ns
        pred[i] = res.predict_ns
    return BenchReport(model.n_neurons, ring_size, model.z, iterations, push, adapt, pred, total)
