import hashlib

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wrelm.dataset import write_csv
from wrelm.synthgen import (
    GenConfig,
    bifurcation_scan,
    count_distinct,
    feature_names,
    generate,
    generate_full,
    iterate_map,
    period2_orbit,
)

FIXED_POINT_28 = 0.642857142857143  # 1 - 1/2.8
PERIOD2_32 = (0.513044509532630, 0.799455490467370)  # closed-form roots at mu = 3.2


def test_fixed_point():
    tail = bifurcation_scan([2.8], transient_skip=2000, samples=200)[0]
    assert np.max(np.abs(tail - FIXED_POINT_28)) <= 1e-6


def test_period_two():
    assert period2_orbit(3.2) == pytest.approx(PERIOD2_32, abs=1e-12)
    tail = bifurcation_scan([3.2], transient_skip=2000, samples=200)[0]
    assert count_distinct(tail) == 2
    for p in PERIOD2_32:
        assert np.min(np.abs(tail - p)) <= 1e-6
    assert np.all(np.minimum(np.abs(tail - PERIOD2_32[0]), np.abs(tail - PERIOD2_32[1])) <= 1e-6)


def test_period_four():
    assert count_distinct(bifurcation_scan([3.5])[0]) == 4


def test_chaotic_regime():
    assert count_distinct(bifurcation_scan([3.9], samples=1000)[0]) >= 100


def test_generated_stream_reaches_fixed_point():
    g = generate_full(GenConfig(seed=2, n_steps=400, mu_min=2.8, mu_max=2.8, dwell_min=400, dwell_max=400))
    assert abs(g.states[-1] - FIXED_POINT_28) <= 1e-6


def test_scan_rejects_bad_mu():
    with pytest.raises(ValueError):
        bifurcation_scan([4.2])


def test_determinism(tmp_path):
    cfg = GenConfig(seed=9, n_steps=500, noise=0.02, invalid_fraction=0.05)
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        write_csv(generate(cfg), p)
    digests = {hashlib.sha256(p.read_bytes()).hexdigest() for p in paths}
    assert len(digests) == 1


def test_different_seeds_differ():
    a = generate(GenConfig(seed=1, n_steps=100))
    b = generate(GenConfig(seed=2, n_steps=100))
    assert not np.array_equal(a.features, b.features)


@settings(max_examples=30, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    n=st.integers(1, 600),
    dwell=st.tuples(st.integers(1, 50), st.integers(0, 100)),
)
def test_structure(seed, n, dwell):
    cfg = GenConfig(seed=seed, n_steps=n, mu_min=2.5, mu_max=4.0, dwell_min=dwell[0], dwell_max=dwell[0] + dwell[1])
    g = generate_full(cfg)
    ds = g.dataset
    assert len(ds) == n and ds.z == cfg.z
    # noiseless states stay inside [0, 1]
    assert np.all((g.states >= 0) & (g.states <= 1))
    # dwell draws within range; the last one may be cut short by n_steps
    assert np.all((g.dwells >= cfg.dwell_min) & (g.dwells <= cfg.dwell_max))
    assert np.count_nonzero(np.diff(ds.set_point)) == len(g.dwells) - 1
    assert g.dwells[:-1].sum() < n <= g.dwells.sum()
    # mu constant within a set point and inside the configured range
    for sp in np.unique(ds.set_point):
        assert np.unique(g.mu[ds.set_point == sp]).size == 1
    assert np.all((g.mu >= cfg.mu_min) & (g.mu <= cfg.mu_max))


def test_one_step_alignment():
    g = generate_full(GenConfig(seed=4, n_steps=800))
    ds = g.dataset
    x, mu = ds.features[:, 0], ds.features[:, 1]
    np.testing.assert_array_equal(ds.target, mu * x * (1 - x))
    np.testing.assert_array_equal(ds.target[:-1], ds.features[1:, 0])


def test_noise_is_observation_only():
    clean = generate_full(GenConfig(seed=4, n_steps=300))
    noisy = generate_full(GenConfig(seed=4, n_steps=300, noise=0.05))
    np.testing.assert_array_equal(clean.states, noisy.states)
    assert not np.array_equal(clean.dataset.target, noisy.dataset.target)


def test_invalid_rows():
    ds = generate(GenConfig(seed=4, n_steps=2000, invalid_fraction=0.1))
    frac = 1 - ds.valid.mean()
    assert 0.05 < frac < 0.15
    assert np.all(np.isfinite(ds.target))


def test_feature_names():
    assert feature_names(2) == ["state", "mu", "distractor_0", "distractor_1"]


def test_iterate_map():
    np.testing.assert_allclose(iterate_map(2.0, 0.25, 2), [0.375, 0.46875])


@pytest.mark.parametrize(
    "kw",
    [
        dict(mu_min=0.0),
        dict(mu_min=3.0, mu_max=2.9),
        dict(mu_max=4.5),
        dict(noise=-0.1),
        dict(dwell_min=0),
        dict(dwell_min=10, dwell_max=5),
        dict(n_steps=-1),
        dict(invalid_fraction=1.0),
        dict(x0=1.0),
    ],
)
def test_invalid_config(kw):
    with pytest.raises(ValueError):
        GenConfig(**kw)
