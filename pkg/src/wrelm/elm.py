"""Random-feature machinery shared by offline training and online adaptation.

Input weights are standard-normal samples produced by a pinned generator:
numpy's PCG64 bit generator supplies uniform doubles and a Box-Muller
transform turns consecutive pairs into normal deviates. The hidden layer has
no bias term and uses a logistic activation with the sign flipped,
``G(y) = 1 / (1 + exp(y))``, either exactly or through a cubic Padé
approximant of ``exp``.

Hidden matrices are laid out row-major, one row per sample, one column per
neuron (shape ``n x n_neurons``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ACTIVATIONS = ("pade", "exact")

# Padé accuracy is only guaranteed inside this pre-activation range.
PADE_DOMAIN = 4.0


class DegenerateColumnError(ValueError):
    """A feature column has zero width between its saturation percentiles."""

    def __init__(self, column: int, value: float):
        self.column = column
        self.value = value
        super().__init__(
            f"column {column} is degenerate: low and high percentiles both equal {value!r}"
        )


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.flags.writeable = False
    return a


def box_muller(u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
    """Map two arrays of uniforms in (0, 1] to interleaved N(0, 1) samples."""
    radius = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    out = np.empty(2 * radius.size)
    out[0::2] = radius * np.cos(theta)
    out[1::2] = radius * np.sin(theta)
    return out


def standard_normal(seed: int, count: int) -> np.ndarray:
    """``count`` standard-normal deviates from PCG64(seed) via Box-Muller."""
    gen = np.random.Generator(np.random.PCG64(seed))
    n_pairs = (count + 1) // 2
    # random() is in [0, 1); flip it so log() never sees zero
    u = 1.0 - gen.random(2 * n_pairs)
    return box_muller(u[0::2], u[1::2])[:count]


@dataclass(frozen=True)
class InputWeights:
    """Fixed random input weights; column ``i`` feeds neuron ``i``."""

    seed: int
    matrix: np.ndarray

    @property
    def z(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_neurons(self) -> int:
        return self.matrix.shape[1]


def init_input_weights(seed: int, z: int, n_neurons: int) -> InputWeights:
    if z < 1 or n_neurons < 1:
        raise ValueError(f"z and n_neurons must be >= 1, got z={z}, n_neurons={n_neurons}")
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    samples = standard_normal(int(seed), z * n_neurons)
    return InputWeights(int(seed), _frozen(samples.reshape(z, n_neurons)))


def logistic_exact(y):
    """``1 / (1 + exp(y))``; decreasing in ``y``."""
    y = np.asarray(y, dtype=np.float64)
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(y))


def pade_exp(y):
    """Cubic Padé approximant of ``exp(y)``."""
    y = np.asarray(y, dtype=np.float64)
    y2 = y * y
    even = 120.0 + 12.0 * y2
    odd = 60.0 * y + y2 * y
    return (even + odd) / (even - odd)


def logistic_pade(y):
    """Logistic activation with ``exp`` replaced by its Padé approximant.

    Uses the division-light form ``(e - o) / (2 e)`` where ``e = 120 + 12 y^2``
    and ``o = 60 y + y^3``; this equals ``1 / (1 + pade_exp(y))``.
    """
    y = np.asarray(y, dtype=np.float64)
    y2 = y * y
    even = 120.0 + 12.0 * y2
    return (even - 60.0 * y - y2 * y) / (2.0 * even)


_ACTIVATION_FUNCS = {"pade": logistic_pade, "exact": logistic_exact}


def activation_function(name: str):
    try:
        return _ACTIVATION_FUNCS[name]
    except KeyError:
        raise ValueError(f"unknown activation {name!r}; expected one of {ACTIVATIONS}") from None


@dataclass(frozen=True)
class Scaler:
    """Per-column percentile saturation followed by a linear map onto [0, 1]."""

    lo: np.ndarray
    hi: np.ndarray
    p_low: float = 0.1
    p_high: float = 99.9

    @property
    def arity(self) -> int:
        return self.lo.size

    def _check(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=np.float64)
        if values.shape[-1:] != (self.arity,):
            raise ValueError(
                f"expected {self.arity} columns, got shape {values.shape}"
            )
        return values

    def apply(self, values) -> np.ndarray:
        values = self._check(values)
        return np.clip((values - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def apply_linear(self, values) -> np.ndarray:
        """Same linear map as :meth:`apply` but without saturation."""
        values = self._check(values)
        return (values - self.lo) / (self.hi - self.lo)

    def invert(self, scaled) -> np.ndarray:
        """Linear inverse; no clipping, so extrapolated outputs stay extrapolated."""
        scaled = self._check(scaled)
        return self.lo + scaled * (self.hi - self.lo)


def fit_scaler(columns, p_low: float = 0.1, p_high: float = 99.9) -> Scaler:
    """Fit saturation bounds with linearly interpolated percentiles.

    ``columns`` is ``(n_rows, n_columns)`` or a single 1-D column.
    """
    data = np.asarray(columns, dtype=np.float64)
    if data.ndim == 1:
        data = data[:, None]
    if data.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {data.shape}")
    if data.shape[0] < 2:
        raise ValueError(f"need at least 2 rows to fit a scaler, got {data.shape[0]}")
    if not 0.0 <= p_low < p_high <= 100.0:
        raise ValueError(f"need 0 <= p_low < p_high <= 100, got {p_low}, {p_high}")
    if not np.all(np.isfinite(data)):
        raise ValueError("scaler input contains non-finite values")
    lo = np.percentile(data, p_low, axis=0, method="linear")
    hi = np.percentile(data, p_high, axis=0, method="linear")
    for j in range(data.shape[1]):
        if not hi[j] > lo[j]:
            raise DegenerateColumnError(j, float(lo[j]))
    return Scaler(_frozen(lo), _frozen(hi), float(p_low), float(p_high))


def apply_scaler(scaler: Scaler, row) -> np.ndarray:
    return scaler.apply(row)


def hidden_row(weights: InputWeights, x_scaled, activation: str = "pade") -> np.ndarray:
    x = np.asarray(x_scaled, dtype=np.float64)
    if x.shape != (weights.z,):
        raise ValueError(f"expected a row of length {weights.z}, got shape {x.shape}")
    return activation_function(activation)(x @ weights.matrix)


def hidden_matrix(weights: InputWeights, x_scaled, activation: str = "pade") -> np.ndarray:
    X = np.asarray(x_scaled, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != weights.z:
        raise ValueError(f"expected shape (n, {weights.z}), got {X.shape}")
    if X.shape[0] == 0:
        return np.empty((0, weights.n_neurons))
    return activation_function(activation)(X @ weights.matrix)
