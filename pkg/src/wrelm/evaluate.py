"""Causal streaming replay and fit statistics."""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .adapter import OnlineWeights, RingBuffer, predict, static_state, step
from .dataset import SeriesDataset
from .trainer import OfflineModel

THREADS_ENV = "WRELM_THREADS"

# steady-state spans: set point held at least this long, first rows discarded
STEADY_MIN_SPAN = 50
STEADY_DISCARD = 10


def r_squared(predicted, actual) -> float:
    predicted = np.asarray(predicted, dtype=np.float64)
    actual = np.asarray(actual, dtype=np.float64)
    ss_res = np.sum((actual - predicted) ** 2)
    ss_tot = np.sum((actual - actual.mean()) ** 2)
    return float(1.0 - ss_res / ss_tot)


def rmse(predicted, actual) -> float:
    d = np.asarray(predicted, dtype=np.float64) - np.asarray(actual, dtype=np.float64)
    return float(np.sqrt(np.mean(d * d))) if d.size else float("nan")


def steady_state_mask(set_point, min_span: int = STEADY_MIN_SPAN, discard: int = STEADY_DISCARD) -> np.ndarray:
    """Rows inside set-point runs of length >= ``min_span``, minus each run's first ``discard`` rows."""
    sp = np.asarray(set_point)
    mask = np.zeros(sp.size, dtype=bool)
    starts = np.concatenate([[0], np.flatnonzero(np.diff(sp) != 0) + 1, [sp.size]])
    for a, b in zip(starts[:-1], starts[1:]):
        if b - a >= min_span:
            mask[a + discard : b] = True
    return mask


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class StreamResult:
    name: str
    step: np.ndarray
    set_point: np.ndarray
    predicted: np.ndarray
    actual: np.ndarray
    valid: np.ndarray
    beta1_norm: np.ndarray
    adapt_ns: np.ndarray
    total_ns: np.ndarray
    events: list = field(default_factory=list, repr=False)

    @property
    def scored(self) -> np.ndarray:
        return self.valid

    @property
    def r2(self) -> float:
        return r_squared(self.predicted[self.valid], self.actual[self.valid])

    @property
    def rmse(self) -> float:
        return rmse(self.predicted[self.valid], self.actual[self.valid])

    @property
    def steady_rmse(self) -> float:
        m = steady_state_mask(self.set_point) & self.valid
        return rmse(self.predicted[m], self.actual[m])

    @property
    def n_outliers(self) -> int:
        return int(np.count_nonzero(~self.valid))

    def subset_metrics(self, mask) -> tuple[float, float]:
        m = np.asarray(mask, dtype=bool) & self.valid
        return r_squared(self.predicted[m], self.actual[m]), rmse(self.predicted[m], self.actual[m])


def replay(
    model: OfflineModel,
    ds: SeriesDataset,
    ring_size: int = 8,
    adaptive: bool = True,
    w1: OnlineWeights | None = None,
    name: str = "stream",
    log_events: bool = True,
) -> StreamResult:
    """Feed ``ds`` one record at a time, predicting each target before reading it.

    Record ``k`` contributes its features to the prediction of its own target;
    that target is read only afterwards and becomes pushable on the next step.
    Invalid records are predicted but never pushed or scored.
    """
    if ds.z != model.z:
        raise ValueError(f"model expects {model.z} features, dataset has {ds.z}")
    n = len(ds)
    ring = RingBuffer.for_model(model, ring_size)
    if w1 is None:
        w1 = OnlineWeights.identity(ring_size)
    predicted = np.empty(n)
    beta_norm = np.empty(n)
    adapt_ns = np.zeros(n, dtype=np.int64)
    total_ns = np.zeros(n, dtype=np.int64)
    events: list[tuple[str, int, tuple]] = []
    log = events.append if log_events else (lambda e: None)
    static = static_state(model)
    static_norm = float(np.linalg.norm(model.beta0))

    features, target, valid, steps = ds.features, ds.target, ds.valid, ds.step
    for k in range(n):
        if not adaptive or k == 0:
            predicted[k] = predict(model, static, features[k])
            beta_norm[k] = static_norm
            log(("predict", int(steps[k]), tuple(ring.tags)))
        else:
            prev_t = float(target[k - 1]) if valid[k - 1] else None
            if prev_t is not None:
                log(("push", int(steps[k - 1]), ()))
            res = step(model, ring, w1, features[k - 1], prev_t, features[k], tag=int(steps[k - 1]))
            predicted[k] = res.prediction
            beta_norm[k] = float(np.linalg.norm(res.state.beta1))
            adapt_ns[k] = res.adapt_ns
            total_ns[k] = res.total_ns
            log(("predict", int(steps[k]), tuple(ring.tags)))
        log(("read", int(steps[k]), ()))

    return StreamResult(
        name=name,
        step=ds.step.copy(),
        set_point=ds.set_point.copy(),
        predicted=predicted,
        actual=ds.target.copy(),
        valid=ds.valid.copy(),
        beta1_norm=beta_norm,
        adapt_ns=adapt_ns,
        total_ns=total_ns,
        events=events,
    )


def audit_causality(events) -> list[str]:
    """Check an event log from :func:`replay`; returns violation messages.

    A prediction for step ``k`` must come before its target is read, and the
    ring it used may only contain pairs whose targets were already read.
    Pushes must likewise follow the read of the pushed target.
    """
    violations = []
    read = set()
    predicted = set()
    for seq, (kind, k, ring_tags) in enumerate(events):
        if kind == "predict":
            if k in read:
                violations.append(f"event {seq}: prediction for step {k} after its target was read")
            for j in ring_tags:
                if j not in read or j >= k:
                    violations.append(f"event {seq}: prediction for step {k} used pair from step {j}")
            predicted.add(k)
        elif kind == "read":
            if k not in predicted:
                violations.append(f"event {seq}: target for step {k} read before any prediction")
            read.add(k)
        elif kind == "push":
            if k not in read:
                violations.append(f"event {seq}: pushed step {k} before its target was read")
        else:
            violations.append(f"event {seq}: unknown event kind {kind!r}")
    return violations


@dataclass
class EvalReport:
    streams: list[StreamResult]
    adaptive: bool
    ring_size: int

    @property
    def overall_rmse(self) -> float:
        p = np.concatenate([s.predicted[s.valid] for s in self.streams])
        a = np.concatenate([s.actual[s.valid] for s in self.streams])
        return rmse(p, a)

    def latency_percentiles(self, qs=(50, 90, 99)) -> dict[str, float]:
        ns = np.concatenate([s.total_ns[s.total_ns > 0] for s in self.streams])
        if ns.size == 0:
            return {f"p{q}_us": float("nan") for q in qs}
        return {f"p{q}_us": float(np.percentile(ns, q) / 1e3) for q in qs}

    def summary(self) -> dict:
        return {
            "mode": "adaptive" if self.adaptive else "static",
            "ring": self.ring_size,
            "overall_rmse": self.overall_rmse,
            "streams": [
                {
                    "name": s.name,
                    "rows": int(s.step.size),
                    "r2": s.r2,
                    "rmse": s.rmse,
                    "steady_state_rmse": s.steady_rmse,
                    "outliers": s.n_outliers,
                }
                for s in self.streams
            ],
            "latency": self.latency_percentiles(),
        }


def evaluate(
    model: OfflineModel,
    datasets: dict[str, SeriesDataset],
    ring_size: int = 8,
    adaptive: bool = True,
    w1: OnlineWeights | None = None,
    threads: int | None = None,
) -> EvalReport:
    """Replay independent streams, optionally on worker threads sharing ``model``."""
    threads = threads or default_threads()
    items = list(datasets.items())

    def run(item):
        name, ds = item
        return replay(model, ds, ring_size, adaptive, w1, name=name)

    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            streams = list(pool.map(run, items))
    else:
        streams = [run(it) for it in items]
    return EvalReport(streams, adaptive, ring_size)


TRACE_HEADER = ["step", "predicted", "actual", "error", "beta1_norm", "adapt_us"]


def write_trace(result: StreamResult, path) -> None:
    """Per-step trace of scored rows; ``error`` is predicted minus actual."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for k in np.flatnonzero(result.valid):
            p, a = result.predicted[k], result.actual[k]
            w.writerow(
                [
                    int(result.step[k]),
                    f"{p:.17g}",
                    f"{a:.17g}",
                    f"{p - a:.17g}",
                    f"{result.beta1_norm[k]:.17g}",
                    f"{result.adapt_ns[k] / 1e3:.3f}",
                ]
            )
