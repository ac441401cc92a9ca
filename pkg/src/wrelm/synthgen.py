"""Synthetic set-point-stepped series from the logistic map.

The state follows ``x[k+1] = mu * x[k] * (1 - x[k])`` with ``mu`` held for a
dwell period and redrawn uniformly at every set-point step, so a single
stream can visit fixed points, period-2/4 orbits and chaos. Each record
carries ``(x[k], mu, distractors...)`` as features and ``x[k+1]`` (plus
optional observation noise) as its target. Noise never feeds back into the
trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import SeriesDataset


@dataclass(frozen=True)
class GenConfig:
    seed: int = 1
    n_steps: int = 1000
    mu_min: float = 2.8
    mu_max: float = 3.9
    dwell_min: int = 10
    dwell_max: int = 200
    noise: float = 0.0
    n_distractors: int = 4
    # fraction of records flagged invalid with a corrupted target (misfire analog)
    invalid_fraction: float = 0.0
    x0: float | None = None

    def __post_init__(self):
        if not 0.0 < self.mu_min <= self.mu_max <= 4.0:
            raise ValueError(f"need 0 < mu_min <= mu_max <= 4, got [{self.mu_min}, {self.mu_max}]")
        if self.n_steps < 0:
            raise ValueError("n_steps must be >= 0")
        if not 1 <= self.dwell_min <= self.dwell_max:
            raise ValueError(f"need 1 <= dwell_min <= dwell_max, got [{self.dwell_min}, {self.dwell_max}]")
        if self.noise < 0:
            raise ValueError("noise must be >= 0")
        if self.n_distractors < 0:
            raise ValueError("n_distractors must be >= 0")
        if not 0.0 <= self.invalid_fraction < 1.0:
            raise ValueError("invalid_fraction must be in [0, 1)")
        if self.x0 is not None and not 0.0 < self.x0 < 1.0:
            raise ValueError("x0 must lie in (0, 1)")

    @property
    def z(self) -> int:
        return 2 + self.n_distractors


@dataclass(frozen=True)
class Generated:
    dataset: SeriesDataset
    states: np.ndarray  # noiseless trajectory, length n_steps + 1
    mu: np.ndarray  # per-record map parameter
    dwells: np.ndarray  # dwell length drawn for each set point


def feature_names(n_distractors: int) -> list[str]:
    return ["state", "mu", *(f"distractor_{j}" for j in range(n_distractors))]


def generate_full(cfg: GenConfig) -> Generated:
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_steps
    x = cfg.x0 if cfg.x0 is not None else rng.uniform(0.1, 0.9)

    mu = np.empty(n)
    set_point = np.empty(n, dtype=np.int64)
    dwells = []
    k = 0
    while k < n:
        d = int(rng.integers(cfg.dwell_min, cfg.dwell_max + 1))
        dwells.append(d)
        end = min(n, k + d)
        mu[k:end] = rng.uniform(cfg.mu_min, cfg.mu_max)
        set_point[k:end] = len(dwells) - 1
        k = end

    states = np.empty(n + 1)
    states[0] = x
    for k in range(n):
        states[k + 1] = mu[k] * states[k] * (1.0 - states[k])

    distractors = rng.random((n, cfg.n_distractors))
    target = states[1:] + cfg.noise * rng.standard_normal(n)
    valid = np.ones(n, dtype=bool)
    if cfg.invalid_fraction > 0 and n:
        bad = rng.random(n) < cfg.invalid_fraction
        valid[bad] = False
        # corrupted but finite, like a partial burn reading
        target[bad] = rng.uniform(-1.0, 2.0, int(bad.sum()))

    features = np.column_stack([states[:-1], mu, distractors])
    ds = SeriesDataset.from_arrays(np.arange(n), set_point, features, target, valid)
    return Generated(ds, states, mu, np.array(dwells, dtype=np.int64))


def generate(cfg: GenConfig) -> SeriesDataset:
    return generate_full(cfg).dataset


def iterate_map(mu: float, x0: float, n: int) -> np.ndarray:
    out = np.empty(n)
    x = x0
    for k in range(n):
        x = mu * x * (1.0 - x)
        out[k] = x
    return out


def bifurcation_scan(mu_grid, transient_skip: int = 1000, samples: int = 1000, x0: float = 0.5) -> np.ndarray:
    """Post-transient states for each ``mu``; row ``i`` belongs to ``mu_grid[i]``."""
    mu_grid = np.atleast_1d(np.asarray(mu_grid, dtype=np.float64))
    if np.any((mu_grid <= 0) | (mu_grid > 4)):
        raise ValueError("mu values must lie in (0, 4]")
    out = np.empty((mu_grid.size, samples))
    for i, mu in enumerate(mu_grid):
        x = x0
        for _ in range(transient_skip):
            x = mu * x * (1.0 - x)
        out[i] = iterate_map(mu, x, samples)
    return out


def period2_orbit(mu: float) -> tuple[float, float]:
    """Closed-form period-2 points of the logistic map (``mu > 3``)."""
    root = np.sqrt((mu - 3.0) * (mu + 1.0))
    return ((mu + 1.0 - root) / (2.0 * mu), (mu + 1.0 + root) / (2.0 * mu))


def count_distinct(values, tol: float = 1e-6) -> int:
    """Number of clusters after sorting and splitting at gaps wider than ``tol``."""
    v = np.sort(np.asarray(values, dtype=np.float64).ravel())
    if v.size == 0:
        return 0
    return int(1 + np.count_nonzero(np.diff(v) > tol))
