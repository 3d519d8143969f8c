import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from neuron_adc import DN, UP, ParameterError
from neuron_adc.core import SpikeTrain, simulate
from neuron_adc.reconstruction import (
    WINDOW,
    _nearest_windows,
    interpolate_poly5,
    level_arrays,
    levels_from_spikes,
    reconstruct,
)
from neuron_adc.signal import make_sinusoid


def test_running_sum_levels():
    train = SpikeTrain([1e-3, 2e-3, 3e-3], [UP, UP, DN], 4e-3)
    pts = levels_from_spikes(train, 0.020)
    assert [p.t for p in pts] == [0.0, 1e-3, 2e-3, 3e-3]
    np.testing.assert_allclose([p.v for p in pts], [0.0, 0.020, 0.040, 0.020], atol=1e-15)


def test_empty_train_keeps_anchor():
    assert levels_from_spikes(SpikeTrain([], [], 1e-3), 0.02, v0=0.3) == [(0.0, 0.3)]


def test_event_at_time_zero_replaces_anchor():
    t, v = level_arrays(SpikeTrain([0.0, 1e-3], [UP, UP], 2e-3), 0.02)
    np.testing.assert_array_equal(t, [0.0, 1e-3])
    np.testing.assert_allclose(v, [0.02, 0.04])


def test_ramp_levels_match_ramp(ramp_20v, ramp_cfg):
    trace = simulate(ramp_20v, ramp_cfg)
    pts = levels_from_spikes(trace.spikes, ramp_cfg.lsb, trace.initial_reference)[1:4]
    for (t, v), k in zip(pts, (1, 2, 3)):
        assert t == pytest.approx(k * 1e-3, abs=1e-12)
        assert v == pytest.approx(20.0 * k * 1e-3, abs=1e-12)


def test_collinear_points_reproduced():
    t = np.linspace(0.0, 1e-3, 6)
    w = interpolate_poly5((t, 3.0 * t + 0.2), 1e5, 1e-3)
    np.testing.assert_allclose(w.samples, 3.0 * w.times + 0.2, rtol=1e-9)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-2.0, 2.0), min_size=6, max_size=6),
    st.integers(6, 40),
    st.integers(0, 2**32 - 1),
)
def test_polynomials_up_to_degree_five_reproduced(coeffs, n_points, seed):
    rng = np.random.default_rng(seed)
    duration = 1.0
    t = np.sort(np.concatenate([[0.0, duration], rng.uniform(0, duration, n_points - 2)]))
    assume(np.min(np.diff(t)) > 1e-3)
    poly = np.polynomial.Polynomial(coeffs)
    w = interpolate_poly5((t, poly(t)), 200.0, duration)
    expected = poly(w.times)
    scale = max(1.0, np.max(np.abs(expected)))
    assert np.max(np.abs(w.samples - expected)) <= 1e-9 * scale


def test_few_points_lower_the_degree():
    t = np.array([0.0, 0.5, 1.0])
    w = interpolate_poly5((t, t ** 2), 100.0, 1.0)
    np.testing.assert_allclose(w.samples, w.times ** 2, atol=1e-12)
    single = interpolate_poly5([(0.2, 1.5)], 10.0, 1.0)
    assert np.all(single.samples == 1.5)


def test_values_held_outside_point_range():
    t = np.linspace(0.2, 0.8, 8)
    w = interpolate_poly5((t, t), 100.0, 1.0)
    assert np.all(w.samples[w.times < 0.2] == 0.2)
    assert np.all(w.samples[w.times > 0.8] == 0.8)


def test_grid_is_exact_multiples():
    w = interpolate_poly5((np.array([0.0, 1.0]), np.array([0.0, 1.0])), 48e3, 1.0)
    assert len(w) == 48001
    np.testing.assert_array_equal(w.times, np.arange(48001) / 48e3)


def test_invalid_points():
    with pytest.raises(ParameterError):
        interpolate_poly5([], 1e3, 1e-3)
    with pytest.raises(ParameterError):
        interpolate_poly5([(0.0, 0.0), (1e-4, 1.0), (1e-4, 2.0)], 1e3, 1e-3)


def test_locality():
    rng = np.random.default_rng(5)
    t = np.sort(rng.uniform(0, 1, 30))
    v = rng.normal(size=30)
    base = interpolate_poly5((t, v), 500.0, 1.0)
    j = 14
    bumped = v.copy()
    bumped[j] += 1.0
    moved = interpolate_poly5((t, bumped), 500.0, 1.0)
    tc = np.clip(base.times, t[0], t[-1])
    start = _nearest_windows(t, tc, WINDOW)
    uses_j = (start <= j) & (j < start + WINDOW)
    changed = moved.samples != base.samples
    assert np.all(~changed[~uses_j])
    assert changed[uses_j].any()


def test_nearest_windows_are_nearest():
    rng = np.random.default_rng(9)
    nodes = np.sort(rng.uniform(0, 1, 20))
    for q in rng.uniform(0, 1, 200):
        s = _nearest_windows(nodes, np.array([q]), WINDOW)[0]
        chosen = np.max(np.abs(nodes[s:s + WINDOW] - q))
        sixth = np.sort(np.abs(nodes - q))[WINDOW - 1]
        assert chosen == pytest.approx(sixth, abs=1e-15)


def test_sine_reconstruction_error_below_half_lsb(sine_1k, ideal_cfg):
    trace = simulate(sine_1k, ideal_cfg)
    w = reconstruct(trace, 1e6)
    truth = 0.64 * np.sin(2 * np.pi * 1e3 * w.times)
    rms = np.sqrt(np.mean((w.samples - truth) ** 2))
    assert rms < ideal_cfg.lsb / 2


def test_reconstruct_needs_lsb_for_bare_train():
    with pytest.raises(ParameterError):
        reconstruct(SpikeTrain([1e-3], [UP], 2e-3), 1e4)
    w = reconstruct(SpikeTrain([1e-3], [UP], 2e-3), 1e4, lsb=0.02)
    assert w.samples[-1] == pytest.approx(0.02)
