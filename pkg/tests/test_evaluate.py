import csv

import numpy as np
import pytest

from wrelm.dataset import SeriesDataset
from wrelm.elm import hidden_matrix, init_input_weights
from wrelm.evaluate import (
    TRACE_HEADER,
    audit_causality,
    default_threads,
    evaluate,
    r_squared,
    replay,
    rmse,
    steady_state_mask,
    write_trace,
)
from wrelm.synthgen import GenConfig, generate
from wrelm.trainer import TrainConfig, train_offline


@pytest.fixture(scope="module")
def fitted():
    # evaluation reaches mu values the offline model never saw
    train = generate(GenConfig(seed=21, n_steps=3000, mu_min=2.8, mu_max=3.4, noise=0.01))
    test = generate(GenConfig(seed=22, n_steps=3000, mu_min=2.8, mu_max=3.9, noise=0.01, invalid_fraction=0.05))
    return train_offline(train, TrainConfig()), test


class TestMetrics:
    def test_mean_predictor(self, rng):
        a = rng.random(200)
        assert abs(r_squared(np.full(200, a.mean()), a)) <= 1e-10

    def test_perfect(self, rng):
        a = rng.random(50)
        assert r_squared(a, a) == 1.0
        assert rmse(a, a) == 0.0

    def test_rmse_value(self):
        assert rmse([0.0, 0.0], [3.0, 4.0]) == pytest.approx(np.sqrt(12.5))

    def test_r2_at_most_one(self, rng):
        for _ in range(20):
            assert r_squared(rng.random(30), rng.random(30)) <= 1.0

    def test_empty_rmse(self):
        assert np.isnan(rmse([], []))


def test_interpolating_model_scores_perfectly():
    n = z_neurons = 8
    rng = np.random.default_rng(8)
    X = rng.random((n, 6))
    weights = init_input_weights(1, 6, z_neurons)
    target = hidden_matrix(weights, X, "exact") @ rng.normal(size=z_neurons)
    ds = SeriesDataset.from_arrays(np.arange(n), np.zeros(n), X, target)
    cfg = TrainConfig(seed=1, n_neurons=z_neurons, w0=1.0, p_low=0.0, p_high=100.0, activation="exact")
    model = train_offline(ds, cfg)
    res = replay(model, ds, adaptive=False)
    assert res.r2 == pytest.approx(1.0, abs=1e-8)
    assert res.rmse <= 1e-8


def test_steady_state_mask():
    sp = np.r_[np.zeros(60), np.ones(30), np.full(55, 2), np.full(49, 3)]
    mask = steady_state_mask(sp)
    expected = np.zeros(sp.size, bool)
    expected[10:60] = True
    expected[100:145] = True
    np.testing.assert_array_equal(mask, expected)


class TestReplay:
    def test_no_causality_violations(self, fitted):
        model, test = fitted
        res = replay(model, test, 8)
        assert audit_causality(res.events) == []

    def test_invalid_rows_never_pushed_or_scored(self, fitted):
        model, test = fitted
        res = replay(model, test, 8)
        pushed = {k for kind, k, _ in res.events if kind == "push"}
        invalid = set(test.step[~test.valid].tolist())
        assert pushed.isdisjoint(invalid)
        assert res.n_outliers == len(invalid)
        keep = test.valid
        assert res.rmse == rmse(res.predicted[keep], test.target[keep])

    def test_static_mode_uses_beta0(self, fitted):
        model, test = fitted
        res = replay(model, test, 8, adaptive=False)
        np.testing.assert_allclose(res.predicted, model.predict_static(test.features), rtol=1e-14, atol=1e-15)

    def test_adaptive_beats_static(self, fitted):
        model, test = fitted
        assert replay(model, test, 8).rmse < replay(model, test, 8, adaptive=False).rmse

    def test_arity_mismatch(self, fitted):
        model, _ = fitted
        other = generate(GenConfig(seed=1, n_steps=20, n_distractors=1))
        with pytest.raises(ValueError):
            replay(model, other)

    def test_deterministic(self, fitted):
        model, test = fitted
        a, b = replay(model, test), replay(model, test)
        assert a.predicted.tobytes() == b.predicted.tobytes()


class TestAudit:
    def _events(self, fitted):
        model, test = fitted
        return list(replay(model, test.subset(slice(0, 40)), 8).events)

    def test_read_before_predict(self, fitted):
        ev = self._events(fitted)
        i = next(i for i, e in enumerate(ev) if e[0] == "predict" and e[1] == 20)
        ev[i], ev[i + 1] = ev[i + 1], ev[i]
        assert audit_causality(ev)

    def test_future_pair_in_ring(self, fitted):
        ev = self._events(fitted)
        i = next(i for i, e in enumerate(ev) if e[0] == "predict" and e[1] == 20)
        ev[i] = ("predict", 20, ev[i][2] + (20,))
        assert any("used pair" in v for v in audit_causality(ev))

    def test_push_before_read(self, fitted):
        ev = [("push", 0, ()), ("predict", 0, ()), ("read", 0, ())]
        assert audit_causality(ev)

    def test_unknown_event(self):
        assert audit_causality([("peek", 0, ())])


def test_trace_recomputation(fitted, tmp_path):
    model, test = fitted
    res = replay(model, test, 8)
    path = tmp_path / "trace.csv"
    write_trace(res, path)
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0].keys()) == TRACE_HEADER
    p = np.array([float(r["predicted"]) for r in rows])
    a = np.array([float(r["actual"]) for r in rows])
    err = np.array([float(r["error"]) for r in rows])
    np.testing.assert_allclose(err, p - a, atol=1e-15)
    ss_res = sum((ai - pi) ** 2 for pi, ai in zip(p, a))
    mean = sum(a) / len(a)
    ss_tot = sum((ai - mean) ** 2 for ai in a)
    assert abs((1 - ss_res / ss_tot) - res.r2) <= 1e-9
    assert abs((ss_res / len(a)) ** 0.5 - res.rmse) <= 1e-9
    assert len(rows) == int(test.valid.sum())


def test_threaded_streams_match_serial(fitted):
    model, _ = fitted
    data = {f"s{i}": generate(GenConfig(seed=30 + i, n_steps=300, noise=0.01)) for i in range(4)}
    serial = evaluate(model, data, threads=1)
    parallel = evaluate(model, data, threads=4)
    for a, b in zip(serial.streams, parallel.streams):
        assert a.name == b.name
        assert a.predicted.tobytes() == b.predicted.tobytes()
    summary = parallel.summary()
    assert [s["name"] for s in summary["streams"]] == list(data)
    assert summary["latency"]["p50_us"] > 0


def test_default_threads(monkeypatch):
    monkeypatch.delenv("WRELM_THREADS", raising=False)
    assert default_threads() == 1
    monkeypatch.setenv("WRELM_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("WRELM_THREADS", "x")
    assert default_threads() == 1
