import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from neuron_adc import ParameterError, Waveform
from neuron_adc.core import DN, UP, SpikeTrain, simulate
from neuron_adc.metrics import Metrics, compression_ratio, enob, event_bits, fom, format_rows, lsb, sndr
from neuron_adc.signal import make_sinusoid

from conftest import ideal_config

N_FFT = 1 << 14


def coherent_tone(f, periods, amplitude=1.0, noise_sigma=0.0, seed=0):
    rate = f * N_FFT / periods
    t = np.arange(N_FFT + 1) / rate
    x = amplitude * np.sin(2 * np.pi * f * t)
    if noise_sigma:
        x = x + np.random.default_rng(seed).normal(0.0, noise_sigma, t.size)
    return Waveform(rate, x)


def test_lsb_examples():
    assert lsb(1.28, 6) == 0.02
    assert lsb(1.0, 0) == 1.0
    assert lsb(0.64, 5) == pytest.approx(0.02, abs=1e-18)
    with pytest.raises(ParameterError):
        lsb(1.0, 2.5)


def test_enob_examples():
    assert enob(43.2) == pytest.approx(6.884, abs=1e-3)
    assert enob(1.76) == 0.0
    assert enob(7.78) == pytest.approx(1.0, abs=1e-12)


@given(st.floats(-5, 30))
def test_enob_round_trip(bits):
    assert enob(6.02 * bits + 1.76) == pytest.approx(bits, abs=1e-9)


def test_fom_examples():
    assert fom(229.8e-9, 10e3, 6.9) == pytest.approx(96.2e-15, rel=2e-3)
    assert fom(1.0, 0.5, 0.0) == 1.0
    assert fom(60e-9, 1e3, 5.6) == pytest.approx(627e-15, rel=0.02)
    with pytest.raises(ParameterError):
        fom(0.0, 1e3, 5)


@given(st.floats(1e-9, 1.0), st.floats(1.0, 1e6), st.floats(0, 20))
def test_fom_homogeneity(p, bw, b):
    assert fom(2 * p, bw, b) == pytest.approx(2 * fom(p, bw, b), rel=1e-12)
    assert fom(p, bw, b + 1) == pytest.approx(fom(p, bw, b) / 2, rel=1e-12)


def test_sndr_pure_tone():
    assert sndr(coherent_tone(1e3, 37), 1e3) >= 100.0


def test_sndr_known_noise_level():
    # signal power A^2/2 over noise power sigma^2 = 1e4 gives 40 dB
    sigma = math.sqrt(0.5 / 1e4)
    values = [sndr(coherent_tone(1e3, 37, noise_sigma=sigma, seed=s), 1e3) for s in range(3)]
    for v in values:
        assert v == pytest.approx(40.0, abs=1.0)


def test_sndr_scale_invariance():
    a = sndr(coherent_tone(1e3, 37, 1.0, 0.01, seed=4), 1e3)
    b = sndr(coherent_tone(1e3, 37, 3.0, 0.03, seed=4), 1e3)
    assert abs(a - b) <= 0.1


def test_sndr_preconditions():
    w = coherent_tone(1e3, 37)
    with pytest.raises(ParameterError):
        sndr(w, w.sample_rate / 2)
    with pytest.raises(ParameterError):
        sndr(coherent_tone(1e3, 5), 1e3)  # five periods only
    with pytest.raises(ParameterError):
        sndr(Waveform(15e3, np.zeros(200)), 1e3)  # under 20 samples per period


def test_compression_example():
    times = (np.arange(1280) + 0.5) / 1280
    train = SpikeTrain(times, np.where(np.arange(1280) % 2, DN, UP), 1.0)
    assert event_bits(1.0, 1e-6) == 21
    assert compression_ratio(train, 10e3, 10, dt=1e-6) == pytest.approx(2e4 * 10 / (1280 * 21))
    assert compression_ratio(train, 10e3, 10, dt=1e-6) == pytest.approx(7.44, abs=0.005)


def test_compression_empty_is_infinite():
    ratio = compression_ratio(SpikeTrain([], [], 1.0), 1e3, 8, dt=1e-6)
    assert math.isinf(ratio)
    m = Metrics(math.nan, math.nan, math.nan, 0, 0.0, ratio)
    d = m.to_dict()
    assert d["compression_ratio"] is None and d["compression_ratio_infinite"] is True
    json.dumps(d, allow_nan=False)


def test_silence_compresses_better():
    cfg = ideal_config()
    full = make_sinusoid(0.64, 1e3, 0.0, 10e-3, 1e6)
    half = Waveform(full.sample_rate, np.where(full.times < 5e-3, full.samples, 0.0))
    r_full = compression_ratio(simulate(full, cfg).spikes, 1e3, 6)
    r_half = compression_ratio(simulate(half, cfg).spikes, 1e3, 6)
    assert r_half > r_full


def test_metrics_outputs():
    m = Metrics(43.2, enob(43.2), 97e-15, 1280, 1.28e6, 7.4)
    d = json.loads(m.to_json())
    assert list(d) == ["sndr_db", "enob_bits", "fom_j_per_conv", "spike_count", "mean_event_rate_hz",
                       "compression_ratio"]
    text = format_rows(m.rows())
    assert text.splitlines()[0] == "name,value,unit"
    assert "sndr_db,43.2,dB" in text
