import numpy as np
import pytest

from neuron_adc import AdcConfig, RefractoryModel, make_ramp, make_sinusoid


def ideal_config(t_ref=100e-9, dt=20e-9, **changes):
    """Zero-delay configuration with a fixed refractory period."""
    base = dict(comparator_delay=0.0, loop_delay=0.0, refractory=RefractoryModel.constant(t_ref), dt=dt)
    base.update(changes)
    return AdcConfig(**base)


@pytest.fixture
def ideal_cfg():
    return ideal_config()


@pytest.fixture
def ramp_20v():
    # 20 V/s crosses one 20 mV level per millisecond
    return make_ramp(20.0, 5.5e-3, 1e6)


@pytest.fixture
def ramp_cfg():
    return ideal_config(t_ref=10e-6, dt=1e-6)


@pytest.fixture
def sine_1k():
    return make_sinusoid(0.64, 1e3, 0.0, 4e-3, 10e6)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# -- acceptance reporting ------------------------------------------------------

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion.

    Call the returned function with ``(ok, detail)``; it records the line and
    asserts ``ok`` so the test result matches the printed verdict.
    """
    label = request.node.function.__doc__.strip().splitlines()[0]

    def report(ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, detail

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
