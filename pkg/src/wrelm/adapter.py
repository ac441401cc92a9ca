"""Online correction of a frozen offline model from a ring of recent pairs.

Every call to :func:`adapt` starts again from the offline ``P0`` and
``beta0``; the corrected covariance is never carried forward, so the only
state between steps is the ring buffer itself. With ``H1`` the hidden rows of
the ring, ``T1`` its scaled targets and ``W1`` its slot weights::

    A = P0 H1'
    B = H1 A
    beta1 = beta0 + A (W1^-1 + B)^-1 (T1 - H1 beta0)

The inner inverse is only ``m x m`` for ``m`` ring entries.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .elm import hidden_row
from .trainer import OfflineModel

# above this 1-norm condition estimate the inner inverse goes through an SVD
INNER_COND_LIMIT = 1e12


class RingBuffer:
    """Fixed-capacity FIFO of (scaled features, scaled next target) pairs.

    Each entry also carries the hidden row of its features, computed once on
    insertion, and an optional caller tag (the eval loop stores step indices).
    """

    def __init__(self, capacity: int, z: int, n_neurons: int):
        if capacity < 1:
            raise ValueError(f"ring capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._x = np.empty((capacity, z))
        self._h = np.empty((capacity, n_neurons))
        self._t = np.empty(capacity)
        self._tags = [None] * capacity
        self._head = 0  # next slot to write
        self._len = 0

    @classmethod
    def for_model(cls, model: OfflineModel, capacity: int = 8) -> "RingBuffer":
        return cls(capacity, model.z, model.n_neurons)

    def __len__(self) -> int:
        return self._len

    def _order(self) -> np.ndarray:
        start = (self._head - self._len) % self.capacity
        return (start + np.arange(self._len)) % self.capacity

    def append(self, x_scaled, t_scaled: float, h_row, tag=None) -> None:
        i = self._head
        self._x[i] = x_scaled
        self._t[i] = t_scaled
        self._h[i] = h_row
        self._tags[i] = tag
        self._head = (i + 1) % self.capacity
        self._len = min(self._len + 1, self.capacity)

    def clear(self) -> None:
        self._head = 0
        self._len = 0

    # Views below are oldest-first copies.
    @property
    def x(self) -> np.ndarray:
        return self._x[self._order()]

    @property
    def hidden(self) -> np.ndarray:
        return self._h[self._order()]

    @property
    def targets(self) -> np.ndarray:
        return self._t[self._order()]

    @property
    def tags(self) -> list:
        return [self._tags[i] for i in self._order()]

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """``(H1, T1)`` oldest-first, the layout :func:`adapt` consumes."""
        if self._len == self.capacity and self._head == 0:
            return self._h.copy(), self._t.copy()
        order = self._order()
        return self._h[order], self._t[order]


@dataclass(frozen=True)
class OnlineWeights:
    """Per-slot ring weights, oldest slot first.

    With fewer than ``capacity`` entries in the ring, the newest ``m`` weights
    apply, so a weight always belongs to the same recency position.
    """

    w1: np.ndarray

    def __post_init__(self):
        w = np.array(self.w1, dtype=np.float64).ravel()
        if w.size == 0 or not np.all(w > 0) or not np.all(np.isfinite(w)):
            raise ValueError("online weights must be finite and strictly positive")
        w.flags.writeable = False
        object.__setattr__(self, "w1", w)

    @classmethod
    def identity(cls, capacity: int) -> "OnlineWeights":
        return cls(np.ones(capacity))

    def for_length(self, m: int) -> np.ndarray:
        if m > self.w1.size:
            raise ValueError(f"ring holds {m} entries but only {self.w1.size} weights given")
        return self.w1[self.w1.size - m :]


@dataclass(frozen=True)
class AdaptedState:
    beta1: np.ndarray
    model: OfflineModel
    ring_length: int
    used_svd: bool = False


def push_pair(ring: RingBuffer, x_raw, t_next_raw: float, model: OfflineModel, tag=None) -> None:
    """Scale a completed (features, next target) pair and append it to ``ring``."""
    x_raw = np.asarray(x_raw, dtype=np.float64)
    if x_raw.shape != (model.z,):
        raise ValueError(f"expected {model.z} features, got shape {x_raw.shape}")
    t = float(t_next_raw)
    if not (np.all(np.isfinite(x_raw)) and np.isfinite(t)):
        raise ValueError("cannot push a non-finite pair")
    x_scaled = model.scale_features(x_raw)
    t_scaled = model.scale_target(t)
    h = hidden_row(model.input_weights, x_scaled, model.activation)
    ring.append(x_scaled, t_scaled, h, tag)


def _inner_solve(M: np.ndarray, rhs: np.ndarray, tol: float) -> tuple[np.ndarray, bool]:
    try:
        M_inv = np.linalg.inv(M)
        cond = np.linalg.norm(M, 1) * np.linalg.norm(M_inv, 1)
    except np.linalg.LinAlgError:
        cond = np.inf
    if np.isfinite(cond) and cond <= INNER_COND_LIMIT:
        return M_inv @ rhs, False
    return np.linalg.pinv(M, rcond=tol) @ rhs, True


def adapt_arrays(p0, beta0, H1, T1, w1, svd_tolerance: float = 1e-12):
    """Ring correction on raw arrays; returns ``(beta1, used_svd)``."""
    if H1.shape[0] == 0:
        return beta0, False
    A = p0 @ H1.T
    B = H1 @ A
    M = B + np.diag(1.0 / w1)
    correction, used_svd = _inner_solve(M, T1 - H1 @ beta0, svd_tolerance)
    return beta0 + A @ correction, used_svd


def adapt(model: OfflineModel, ring: RingBuffer, w1: OnlineWeights | None = None) -> AdaptedState:
    m = len(ring)
    if m == 0:
        return AdaptedState(model.beta0, model, 0)
    w = np.ones(m) if w1 is None else w1.for_length(m)
    H1, T1 = ring.arrays()
    beta1, used_svd = adapt_arrays(model.p0, model.beta0, H1, T1, w, model.config.svd_tolerance)
    if not np.all(np.isfinite(beta1)):
        raise FloatingPointError("online adaptation produced non-finite weights")
    return AdaptedState(beta1, model, m, used_svd)


def static_state(model: OfflineModel) -> AdaptedState:
    return AdaptedState(model.beta0, model, 0)


def predict(model: OfflineModel, state: AdaptedState, x_next_raw) -> float:
    """One-step-ahead prediction in original target units."""
    x = np.asarray(x_next_raw, dtype=np.float64)
    if x.shape != (model.z,):
        raise ValueError(f"expected {model.z} features, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("cannot predict from non-finite features")
    h = hidden_row(model.input_weights, model.scale_features(x), model.activation)
    scaled = h @ state.beta1
    lo, hi = model.target_scaler.lo[0], model.target_scaler.hi[0]
    return float(lo + scaled * (hi - lo))


@dataclass(frozen=True)
class StepResult:
    prediction: float
    state: AdaptedState
    push_ns: int
    adapt_ns: int
    predict_ns: int

    @property
    def total_ns(self) -> int:
        return self.push_ns + self.adapt_ns + self.predict_ns


def step(
    model: OfflineModel,
    ring: RingBuffer,
    w1: OnlineWeights | None,
    x_n,
    t_n1: float | None,
    x_n1,
    tag=None,
) -> StepResult:
    """Push the pair just completed, re-adapt, then predict the next target.

    ``(x_n, t_n1)`` is the newest completed pair; pass ``t_n1=None`` to skip
    the push (an invalid sample), leaving the ring as it was. The returned
    prediction is for the target paired with ``x_n1``.
    """
    clock = time.perf_counter_ns
    t0 = clock()
    if t_n1 is not None:
        push_pair(ring, x_n, t_n1, model, tag)
    t1 = clock()
    state = adapt(model, ring, w1)
    t2 = clock()
    y = predict(model, state, x_n1)
    t3 = clock()
    return StepResult(y, state, t1 - t0, t2 - t1, t3 - t2)
