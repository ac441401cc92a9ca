"""Brute-force weighted least squares on explicitly stacked systems.

Reference path for testing the offline/online split. It works on raw
matrices only and imports nothing from the training or adaptation code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class StackedSystem:
    H: np.ndarray  # (n, n_neurons)
    w: np.ndarray  # (n,) diagonal weights
    T: np.ndarray  # (n,)

    def __post_init__(self):
        H = np.asarray(self.H, dtype=np.float64)
        w = np.asarray(self.w, dtype=np.float64).ravel()
        T = np.asarray(self.T, dtype=np.float64).ravel()
        if H.ndim != 2:
            raise ValueError(f"H must be 2-D, got shape {H.shape}")
        if w.shape != (H.shape[0],) or T.shape != (H.shape[0],):
            raise ValueError(
                f"dimension mismatch: H {H.shape}, w {w.shape}, T {T.shape}"
            )
        if not np.all(w > 0):
            raise ValueError("weights must be strictly positive")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "T", T)

    @property
    def n(self) -> int:
        return self.H.shape[0]


def batch_weighted_ls(sys: StackedSystem, tol: float = 1e-12) -> np.ndarray:
    """``pinv(H' W H) H' W T``.

    Evaluated as ``pinv(sqrt(W) H) sqrt(W) T`` with LAPACK's ``gelsd``; the
    singular-value cutoff ``sqrt(tol)`` on ``sqrt(W) H`` is the same as a
    relative cutoff of ``tol`` on the Gram matrix.
    """
    sw = np.sqrt(sys.w)
    beta, *_ = np.linalg.lstsq(sw[:, None] * sys.H, sw * sys.T, rcond=np.sqrt(tol))
    return beta


def weighted_sse(sys: StackedSystem, beta) -> float:
    r = sys.T - sys.H @ np.asarray(beta, dtype=np.float64)
    return float(np.sum(sys.w * r * r))


def stack(offline, ring) -> StackedSystem:
    """Concatenate ``(H0, w0, T0)`` and ``(H1, w1, T1)`` into one system.

    Scalar weights are broadcast over their block's rows.
    """
    blocks = []
    for H, w, T in (offline, ring):
        H = np.asarray(H, dtype=np.float64)
        if H.size == 0:
            H = H.reshape(0, H.shape[-1] if H.ndim == 2 else 0)
        elif H.ndim != 2:
            H = np.atleast_2d(H)
        T = np.asarray(T, dtype=np.float64).ravel()
        w = np.broadcast_to(np.asarray(w, dtype=np.float64), T.shape)
        blocks.append((H, w, T))
    (H0, w0, T0), (H1, w1, T1) = blocks
    if H1.shape[0] == 0:
        return StackedSystem(H0, w0, T0)
    if H0.shape[1] != H1.shape[1]:
        raise ValueError(f"neuron count mismatch: {H0.shape[1]} vs {H1.shape[1]}")
    return StackedSystem(np.vstack([H0, H1]), np.concatenate([w0, w1]), np.concatenate([T0, T1]))
