import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from neuron_adc import FormatError, ParameterError, RangeError, Waveform
from neuron_adc.signal import load_waveform, make_ramp, make_sinusoid, sample_at, save_waveform, waveform_to_text


def test_sinusoid_length_and_peak():
    w = make_sinusoid(0.64, 10e3, 0.0, 1e-3, 10e6)
    assert len(w) == 10001
    assert np.max(w.samples) == pytest.approx(0.64, abs=1e-12)
    assert np.min(w.samples) == pytest.approx(-0.64, abs=1e-12)


def test_zero_amplitude_is_constant():
    w = make_sinusoid(0.0, 1e3, 0.3, 10e-3, 1e6)
    assert np.all(w.samples == 0.3)


def test_quarter_period_value():
    w = make_sinusoid(1.0, 50.0, 0.0, 40e-3, 100e3)
    assert w.samples[0] == 0.0
    assert abs(sample_at(w, 5e-3) - 1.0) < 1e-12


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(amplitude=1, frequency=1e3, duration=float("nan"), sample_rate=1e6),
        dict(amplitude=1, frequency=1e3, duration=1e-2, sample_rate=-1.0),
        dict(amplitude=1, frequency=1e3, duration=1e-2, sample_rate=1e4),  # under 20 samples per period
        dict(amplitude=1, frequency=1e3, duration=1e-3, sample_rate=1e6),  # under two periods
        dict(amplitude=-1, frequency=1e3, duration=1e-2, sample_rate=1e6),
    ],
)
def test_sinusoid_rejects_bad_parameters(kwargs):
    with pytest.raises(ParameterError):
        make_sinusoid(**kwargs)


def test_waveform_invariants():
    with pytest.raises(ParameterError):
        Waveform(1e3, [1.0])
    with pytest.raises(ParameterError):
        Waveform(1e3, [0.0, float("inf")])
    with pytest.raises(ParameterError):
        Waveform(0.0, [0.0, 1.0])
    w = Waveform(1e3, [0.0, 1.0])
    with pytest.raises(ValueError):
        w.samples[0] = 5.0


def test_load_two_rows():
    w = load_waveform("t_s,v\n0,0\n0.001,1\n")
    assert w.sample_rate == pytest.approx(1000.0)
    assert list(w.samples) == [0.0, 1.0]


@pytest.mark.parametrize(
    "text, line",
    [
        ("t_s,v\n0,0\n0.002,1\n0.001,2\n", 4),
        ("t_s,v\n0,0\n0.001,nan\n", 3),
        ("t_s,v\n0,0\n", None),
        ("t_s,v\n0,0\n0.001,1\n0.002,2\n0.0035,3\n", 5),
        ("t_s,v\n0,0\n0.001;1\n", 3),
    ],
)
def test_load_rejects_malformed(text, line):
    with pytest.raises(FormatError) as err:
        load_waveform(text)
    if line is not None:
        assert f"line {line}" in str(err.value)


def test_load_rejects_wrong_header():
    with pytest.raises(FormatError):
        load_waveform("time,volts\n0,0\n1,1\n")


def test_export_reload_is_bit_exact():
    w = make_sinusoid(0.64, 1e3, 0.0, 5e-3, 1e6)
    buf = io.StringIO()
    save_waveform(w, buf)
    back = load_waveform(buf.getvalue())
    assert np.array_equal(back.samples, w.samples)
    assert back.sample_rate == pytest.approx(w.sample_rate, rel=1e-9)


def test_sample_at_midpoint_and_grid():
    w = Waveform(1e3, [0.0, 1.0, 3.0])
    assert sample_at(w, 0.0005) == 0.5
    assert sample_at(w, 0.001) == 1.0
    assert sample_at(w, 0.002) == 3.0
    np.testing.assert_array_equal(sample_at(w, np.array([0.0, 0.0015])), [0.0, 2.0])


def test_sample_at_out_of_range():
    w = Waveform(1e3, [0.0, 1.0])
    with pytest.raises(RangeError):
        sample_at(w, -1e-6)
    with pytest.raises(RangeError):
        sample_at(w, 0.0011)


def test_sample_at_respects_t0():
    w = Waveform(1e3, [2.0, 4.0], t0=1.0)
    assert sample_at(w, 1.0005) == pytest.approx(3.0, abs=1e-9)
    with pytest.raises(RangeError):
        sample_at(w, 0.5)


def test_sample_at_tracks_analytic_sine():
    f, a = 1e3, 0.64
    w = make_sinusoid(a, f, 0.0, 3e-3, 100 * f)
    t = np.random.default_rng(7).uniform(0, w.duration, 2000)
    err = np.abs(sample_at(w, t) - a * np.sin(2 * np.pi * f * t))
    assert err.max() <= 5e-4 * a


def test_ramp_values():
    w = make_ramp(20.0, 1e-3, 1e6, offset=0.1)
    assert w.samples[0] == 0.1
    assert sample_at(w, 1e-3) == pytest.approx(0.12, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-10, 10, allow_nan=False), min_size=2, max_size=40),
    st.floats(1.0, 1e6),
    st.floats(0.0, 1.0),
)
def test_sample_at_stays_within_bracketing_samples(values, rate, frac):
    w = Waveform(rate, values)
    t = frac * w.duration
    v = sample_at(w, t)
    k = min(int(math.floor(t * rate)), len(values) - 2)
    lo, hi = sorted(values[k:k + 2])
    assert lo - 1e-12 <= v <= hi + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=2, max_size=50), st.floats(1.0, 1e7))
def test_text_round_trip(values, rate):
    w = Waveform(rate, values)
    back = load_waveform(waveform_to_text(w))
    assert np.array_equal(back.samples, w.samples)
