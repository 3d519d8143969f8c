import numpy as np
import pytest

from neuron_adc import AdcConfig, ConfigurationError, UnsupportedConfigurationError, Waveform
from neuron_adc.core import simulate
from neuron_adc.oracle import simulate_dense
from neuron_adc.signal import make_sinusoid

from conftest import ideal_config


def test_constant_input_is_silent():
    trace = simulate_dense(Waveform(1e6, np.full(501, 0.2)), ideal_config())
    assert trace.spike_count == 0


def test_ramp_within_one_fine_step(ramp_20v, ramp_cfg):
    dt_fine = ramp_cfg.dt / 10
    trace = simulate_dense(ramp_20v, ramp_cfg, dt_fine)
    expected = np.array([1e-3, 2e-3, 3e-3, 4e-3, 5e-3])
    assert trace.spike_count == expected.size
    assert np.max(np.abs(trace.spikes.times - expected)) <= dt_fine


def test_ramp_agrees_with_main_path(ramp_20v, ramp_cfg):
    main = simulate(ramp_20v, ramp_cfg)
    dense = simulate_dense(ramp_20v, ramp_cfg)
    assert main.spike_count == dense.spike_count
    assert np.max(np.abs(main.spikes.times - dense.spikes.times)) <= ramp_cfg.dt


def test_default_sine_counts_agree(sine_1k):
    cfg = AdcConfig()
    assert simulate(sine_1k, cfg).spike_count == simulate_dense(sine_1k, cfg).spike_count


def test_short_runs_agree_in_time():
    # few levels per half period keep the fine-step timing error from building up
    cfg = ideal_config(t_ref=200e-9)
    for amplitude in (0.05, 0.07, 0.09):
        w = make_sinusoid(amplitude, 1e3, 0.0, 2.3e-3, 1e6, t0=1.7e-4)
        main, dense = simulate(w, cfg), simulate_dense(w, cfg)
        assert main.spike_count == dense.spike_count
        assert np.max(np.abs(main.spikes.times - dense.spikes.times)) <= cfg.dt


def test_folds_match_trace_structure(sine_1k, ideal_cfg):
    dense = simulate_dense(sine_1k, ideal_cfg)
    assert dense.fold_history.shape[0] == dense.spike_count == dense.gate_off_intervals.shape[0]
    assert np.min(np.diff(dense.spikes.times)) >= ideal_cfg.t_ref - ideal_cfg.dt


def test_noise_is_unsupported(sine_1k):
    with pytest.raises(UnsupportedConfigurationError):
        simulate_dense(sine_1k, AdcConfig(input_offset_noise_sigma=1e-3))


def test_fine_step_must_be_ten_times_finer(sine_1k):
    cfg = AdcConfig()
    with pytest.raises(ConfigurationError):
        simulate_dense(sine_1k, cfg, dt_fine=cfg.dt / 5)
