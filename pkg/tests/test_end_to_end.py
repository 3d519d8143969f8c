"""Full calibrated pipeline at 10 kHz with delays fitted to the reported SNDR."""

from importlib import resources

import pytest

from neuron_adc import pipeline
from neuron_adc.config import RunConfig, format_config, parse_config
from neuron_adc.core import simulate


def _data(name):
    return resources.files("neuron_adc").joinpath(f"data/{name}").read_text()


@pytest.fixture(scope="module")
def anchored():
    anchors = pipeline.parse_anchors(_data("anchors_sndr.csv"))
    run, rows, _ = pipeline.calibrate_anchors(RunConfig(), anchors)
    return run, rows


def test_all_anchors_reached(anchored):
    _, rows = anchored
    assert [r.quantity for r in rows] == ["off_fraction", "sndr_db", "total_power_w"]
    assert all(r.ok for r in rows)


def test_shipped_high_rate_config_matches(anchored):
    run, _ = anchored
    shipped = parse_config(_data("anchored.cfg"))
    assert format_config(run).splitlines()[1:] == format_config(shipped).splitlines()[1:]


def _ten_khz(run):
    adc = run.adc.replace(gating_enabled=False, v_ref=0.285)
    run = run.replace(adc=adc, stimulus=run.stimulus.at_frequency(10e3))
    return pipeline.analyze(simulate(run.stimulus.waveform(), adc), 10e3, run)


def test_fom_within_band(anchored):
    result = _ten_khz(anchored[0])
    assert result.power.total == pytest.approx(229.8e-9, rel=1e-9)
    assert 94e-15 <= result.metrics.fom_j_per_conv <= 99e-15


def test_high_rate_sndr(anchored):
    assert _ten_khz(anchored[0]).metrics.sndr_db >= 40.0


def test_placeholder_delays_fall_short_at_10khz():
    # with the 200 ns placeholder loop delay the 10 kHz SNDR sits well below 40 dB
    run = parse_config(_data("default.cfg"))
    assert _ten_khz(run).metrics.sndr_db < 40.0
