"""Randomized equivalence battery: offline/online split vs. stacked solve.

Each instance builds a hidden matrix through the ELM layer, trains the
offline block, adapts on a ring block, and compares both ``beta0`` and
``beta1`` with the brute-force weighted solve of the stacked system.

Inputs are drawn uniformly from ``[-spread, spread]`` before the hidden
layer. With inputs confined to [0, 1] and few features, a few dozen logistic
neurons are numerically collinear (condition numbers past 1e9), and then the
output weights are not identifiable to 1e-8 by any method. A wide spread
keeps every instance well posed so the comparison tests the algebra alone.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .adapter import adapt_arrays
from .elm import hidden_matrix, init_input_weights
from .oracle import StackedSystem, batch_weighted_ls, stack
from .trainer import DEFAULT_SVD_TOLERANCE, weighted_offline_solve

log = logging.getLogger(__name__)

TOLERANCE = 1e-8


@dataclass(frozen=True)
class Instance:
    H0: np.ndarray
    w0: np.ndarray
    T0: np.ndarray
    H1: np.ndarray
    w1: np.ndarray
    T1: np.ndarray

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.H0.shape[0], self.H1.shape[0], self.H0.shape[1]


def random_instance(
    rng: np.random.Generator,
    n0_range=(50, 500),
    m_range=(0, 8),
    z_range=(2, 8),
    neuron_range=(4, 32),
    spread: float = 16.0,
    weight_range=(0.1, 10.0),
) -> Instance:
    n0 = int(rng.integers(n0_range[0], n0_range[1] + 1))
    m = int(rng.integers(m_range[0], m_range[1] + 1))
    z = int(rng.integers(z_range[0], z_range[1] + 1))
    n_neurons = int(rng.integers(neuron_range[0], neuron_range[1] + 1))
    weights = init_input_weights(int(rng.integers(2**63)), z, n_neurons)
    X = rng.uniform(-spread, spread, (n0 + m, z))
    H = hidden_matrix(weights, X, "exact")
    T = rng.random(n0 + m)
    w = rng.uniform(*weight_range, n0 + m)
    return Instance(H[:n0], w[:n0], T[:n0], H[n0:], w[n0:], T[n0:])


def rel_err(beta, reference) -> float:
    scale = np.max(np.abs(reference))
    diff = np.max(np.abs(np.asarray(beta) - reference))
    return float(diff / scale) if scale > 0 else float(diff)


@dataclass
class VerifyReport:
    instances: int
    tolerance: float
    offline_errors: list[float] = field(default_factory=list)
    online_errors: list[float] = field(default_factory=list)
    shapes: list[tuple[int, int, int]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def max_offline_error(self) -> float:
        return max(self.offline_errors, default=0.0)

    @property
    def max_online_error(self) -> float:
        return max(self.online_errors, default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_offline_error <= self.tolerance and self.max_online_error <= self.tolerance

    @property
    def failures(self) -> int:
        return sum(
            max(a, b) > self.tolerance for a, b in zip(self.offline_errors, self.online_errors)
        )


def check_instance(inst: Instance, svd_tolerance=DEFAULT_SVD_TOLERANCE, fault: float = 0.0):
    """Return ``(offline_rel_err, online_rel_err)`` against the stacked oracle."""
    p0, beta0, _ = weighted_offline_solve(inst.H0, inst.w0, inst.T0, svd_tolerance)
    beta1, _ = adapt_arrays(p0, beta0, inst.H1, inst.T1, inst.w1, svd_tolerance)
    if fault:
        beta1 = beta1 + fault * np.max(np.abs(beta1))
    ref0 = batch_weighted_ls(StackedSystem(inst.H0, inst.w0, inst.T0), svd_tolerance)
    ref1 = batch_weighted_ls(
        stack((inst.H0, inst.w0, inst.T0), (inst.H1, inst.w1, inst.T1)), svd_tolerance
    )
    return rel_err(beta0, ref0), rel_err(beta1, ref1)


def run_battery(
    instances: int = 100,
    seed: int = 0,
    tolerance: float = TOLERANCE,
    fault: float = 0.0,
    **instance_kwargs,
) -> VerifyReport:
    """``fault`` adds ``fault * max|beta1|`` to every online weight, to show the battery can fail."""
    report = VerifyReport(instances, tolerance)
    if instances == 0:
        report.warnings.append("no instances requested; vacuous pass")
        log.warning(report.warnings[-1])
        return report
    rng = np.random.default_rng(seed)
    for _ in range(instances):
        inst = random_instance(rng, **instance_kwargs)
        e0, e1 = check_instance(inst, fault=fault)
        report.offline_errors.append(e0)
        report.online_errors.append(e1)
        report.shapes.append(inst.shape)
    return report
