"""Weighted offline training and the frozen model it produces."""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .dataset import SeriesDataset
from .elm import ACTIVATIONS, InputWeights, Scaler, fit_scaler, hidden_matrix, init_input_weights

DEFAULT_SEED = 7898198
DEFAULT_W0 = 3.5e-3
DEFAULT_SVD_TOLERANCE = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    seed: int = DEFAULT_SEED
    z: int | None = None  # inferred from the dataset when None
    n_neurons: int = 64
    w0: float | np.ndarray = DEFAULT_W0
    p_low: float = 0.1
    p_high: float = 99.9
    activation: str = "pade"
    svd_tolerance: float = DEFAULT_SVD_TOLERANCE
    prune: tuple[int, int] | None = None
    # clamp online samples to the offline percentile bounds instead of extrapolating
    saturate_online: bool = False

    def __post_init__(self):
        if self.n_neurons < 1:
            raise ValueError(f"n_neurons must be >= 1, got {self.n_neurons}")
        if not np.all(np.asarray(self.w0) > 0):
            raise ValueError("offline weights must be strictly positive")
        if not self.svd_tolerance > 0:
            raise ValueError(f"svd_tolerance must be > 0, got {self.svd_tolerance}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.prune is not None and min(self.prune) < 0:
            raise ValueError(f"prune window must be non-negative, got {self.prune}")


@dataclass(frozen=True)
class OfflineModel:
    """Everything the online path needs; none of the training rows are kept."""

    config: TrainConfig
    input_weights: InputWeights
    scaler: Scaler
    target_scaler: Scaler
    p0: np.ndarray
    beta0: np.ndarray
    n_train: int = 0
    gram_singular_values: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def z(self) -> int:
        return self.input_weights.z

    @property
    def n_neurons(self) -> int:
        return self.input_weights.n_neurons

    @property
    def activation(self) -> str:
        return self.config.activation

    def scale_features(self, x_raw) -> np.ndarray:
        """Scaling used for online samples (see ``TrainConfig.saturate_online``)."""
        if self.config.saturate_online:
            return self.scaler.apply(x_raw)
        return self.scaler.apply_linear(x_raw)

    def scale_target(self, t_raw: float) -> float:
        t = np.array([t_raw], dtype=np.float64)
        if self.config.saturate_online:
            return float(self.target_scaler.apply(t)[0])
        return float(self.target_scaler.apply_linear(t)[0])

    def hidden(self, x_raw) -> np.ndarray:
        """Scale raw online feature rows and map them through the hidden layer."""
        X = np.atleast_2d(self.scale_features(x_raw))
        return hidden_matrix(self.input_weights, X, self.activation)

    def predict_static(self, x_raw) -> np.ndarray:
        """Offline-only predictions in original target units."""
        scaled = self.hidden(x_raw) @ self.beta0
        return self.target_scaler.invert(scaled[:, None])[:, 0]


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.flags.writeable = False
    return a


def prune_transients(ds: SeriesDataset, n_before: int = 6, n_after: int = 9) -> SeriesDataset:
    """Keep only rows near set-point changes.

    A change between rows ``k-1`` and ``k`` keeps rows ``k - n_before`` through
    ``k + n_after - 1``; overlapping windows are merged.
    """
    n = len(ds)
    keep = np.zeros(n, dtype=bool)
    changes = np.flatnonzero(np.diff(ds.set_point) != 0) + 1
    for k in changes:
        keep[max(0, k - n_before) : min(n, k + n_after)] = True
    return ds.subset(keep)


def weighted_offline_solve(H0, w0, T0, svd_tolerance: float = DEFAULT_SVD_TOLERANCE):
    """Return ``(P0, beta0, gram_singular_values)`` for weights ``w0``.

    ``P0`` is the pseudo-inverse of ``K0 = H0' W0 H0``. It is assembled from the
    SVD of ``sqrt(W0) H0`` (whose squared singular values are those of ``K0``)
    rather than by forming ``K0``, which would square the condition number.
    Gram singular values below ``svd_tolerance * max`` are dropped.
    """
    H0 = np.asarray(H0, dtype=np.float64)
    T0 = np.asarray(T0, dtype=np.float64)
    w0 = np.broadcast_to(np.asarray(w0, dtype=np.float64), T0.shape)
    sw = np.sqrt(w0)
    U, s, Vt = np.linalg.svd(sw[:, None] * H0, full_matrices=False)
    gram_sv = s * s
    if gram_sv.size == 0 or gram_sv[0] == 0.0:
        n = H0.shape[1]
        return np.zeros((n, n)), np.zeros(n), gram_sv
    keep = gram_sv > svd_tolerance * gram_sv[0]
    V = Vt[keep].T
    sk = s[keep]
    p0 = (V / (sk * sk)) @ V.T
    p0 = 0.5 * (p0 + p0.T)
    beta0 = V @ ((U[:, keep].T @ (sw * T0)) / sk)
    return p0, beta0, gram_sv


def train_offline(ds: SeriesDataset, cfg: TrainConfig = TrainConfig()) -> OfflineModel:
    if cfg.prune is not None:
        ds = prune_transients(ds, *cfg.prune)
    ds = ds.subset(ds.valid)
    if len(ds) == 0:
        raise ValueError("no valid training rows")
    if cfg.z is not None and cfg.z != ds.z:
        raise ValueError(f"config expects z={cfg.z}, dataset has {ds.z} feature columns")
    if not (np.all(np.isfinite(ds.features)) and np.all(np.isfinite(ds.target))):
        raise ValueError("training data contains non-finite values")
    w0 = np.asarray(cfg.w0, dtype=np.float64)
    if w0.ndim == 1 and w0.shape[0] != len(ds):
        raise ValueError(f"per-sample w0 has {w0.shape[0]} entries for {len(ds)} training rows")

    cfg = replace(cfg, z=ds.z)
    weights = init_input_weights(cfg.seed, ds.z, cfg.n_neurons)
    scaler = fit_scaler(ds.features, cfg.p_low, cfg.p_high)
    target_scaler = fit_scaler(ds.target[:, None], cfg.p_low, cfg.p_high)
    H0 = hidden_matrix(weights, scaler.apply(ds.features), cfg.activation)
    T0 = target_scaler.apply(ds.target[:, None])[:, 0]
    p0, beta0, gram_sv = weighted_offline_solve(H0, w0, T0, cfg.svd_tolerance)
    if not (np.all(np.isfinite(p0)) and np.all(np.isfinite(beta0))):
        raise FloatingPointError("offline solve produced non-finite values")
    return OfflineModel(
        config=cfg,
        input_weights=weights,
        scaler=scaler,
        target_scaler=target_scaler,
        p0=_readonly(p0),
        beta0=_readonly(beta0),
        n_train=len(ds),
        gram_singular_values=_readonly(gram_sv),
    )


# --- model file -----------------------------------------------------------

MAGIC = b"WRELMMDL"
FORMAT_VERSION = 1
_DIGEST_SIZE = 32


class ModelFormatError(ValueError):
    pass


class ModelVersionError(ModelFormatError):
    pass


class ModelChecksumError(ModelFormatError):
    pass


def _config_header(m: OfflineModel) -> dict:
    cfg = asdict(m.config)
    w0 = np.asarray(m.config.w0, dtype=np.float64)
    cfg["w0"] = None  # stored in the float block
    cfg["z"] = m.z
    cfg["prune"] = list(m.config.prune) if m.config.prune is not None else None
    return {
        "config": cfg,
        "w0_shape": list(w0.shape),
        "n_train": m.n_train,
        "p_low": m.scaler.p_low,
        "p_high": m.scaler.p_high,
    }


def model_to_bytes(m: OfflineModel) -> bytes:
    head = json.dumps(_config_header(m), sort_keys=True).encode("utf-8")
    blocks = [
        m.scaler.lo,
        m.scaler.hi,
        m.target_scaler.lo,
        m.target_scaler.hi,
        m.input_weights.matrix,
        m.p0,
        m.beta0,
        np.asarray(m.config.w0, dtype=np.float64),
    ]
    body = b"".join(np.ascontiguousarray(b, dtype="<f8").tobytes() for b in blocks)
    payload = MAGIC + struct.pack("<II", FORMAT_VERSION, len(head)) + head + body
    return payload + hashlib.sha256(payload).digest()


def model_from_bytes(data: bytes) -> OfflineModel:
    if data[: len(MAGIC)] != MAGIC:
        raise ModelFormatError("not a model file (bad magic)")
    if len(data) < len(MAGIC) + 8:
        raise ModelChecksumError("file truncated")
    version, head_len = struct.unpack_from("<II", data, len(MAGIC))
    if version != FORMAT_VERSION:
        raise ModelVersionError(f"unsupported model format version {version}")
    payload, digest = data[:-_DIGEST_SIZE], data[-_DIGEST_SIZE:]
    if len(data) < len(MAGIC) + 8 + _DIGEST_SIZE or hashlib.sha256(payload).digest() != digest:
        raise ModelChecksumError("checksum mismatch (file corrupt or truncated)")

    start = len(MAGIC) + 8
    head = json.loads(payload[start : start + head_len].decode("utf-8"))
    cfg = dict(head["config"])
    z, n = cfg["z"], cfg["n_neurons"]
    w0_shape = tuple(head["w0_shape"])
    sizes = [z, z, 1, 1, z * n, n * n, n, int(np.prod(w0_shape))]
    body = payload[start + head_len :]
    if len(body) != 8 * sum(sizes):
        raise ModelFormatError(f"float block has {len(body)} bytes, expected {8 * sum(sizes)}")
    floats = np.frombuffer(body, dtype="<f8")
    parts, pos = [], 0
    for size in sizes:
        parts.append(floats[pos : pos + size].astype(np.float64))
        pos += size
    lo, hi, tlo, thi, a, p0, beta0, w0 = parts

    w0 = float(w0[0]) if w0_shape == () else w0.reshape(w0_shape)
    if cfg["prune"] is not None:
        cfg["prune"] = tuple(cfg["prune"])
    cfg["w0"] = w0
    config = TrainConfig(**cfg)
    p_low, p_high = head["p_low"], head["p_high"]
    return OfflineModel(
        config=config,
        input_weights=InputWeights(config.seed, _readonly(a.reshape(z, n))),
        scaler=Scaler(_readonly(lo), _readonly(hi), p_low, p_high),
        target_scaler=Scaler(_readonly(tlo), _readonly(thi), p_low, p_high),
        p0=_readonly(p0.reshape(n, n)),
        beta0=_readonly(beta0),
        n_train=head["n_train"],
    )


def save_model(m: OfflineModel, path) -> None:
    Path(path).write_bytes(model_to_bytes(m))


def load_model(path) -> OfflineModel:
    return model_from_bytes(Path(path).read_bytes())
