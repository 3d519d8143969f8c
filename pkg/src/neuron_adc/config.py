"""Flat ``key = value`` run configuration files.

One file carries the ADC configuration, the power parameters and a stimulus
description. ADC and power keys are required; stimulus keys fall back to the
built-in 1 kHz, 640 mV sine.
"""

from __future__ import annotations

import dataclasses
import io
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, TextIO, Union

from .core import AdcConfig
from .errors import ConfigurationError, NeuronAdcError
from .power import PowerParams
from .refractory import RefractoryModel
from .signal import Waveform, make_ramp, make_sinusoid

ADC_KEYS = {
    "v_h_v": "v_h",
    "v_m_v": "v_m",
    "v_l_v": "v_l",
    "supply_v": "supply",
    "comparator_delay_s": "comparator_delay",
    "loop_delay_s": "loop_delay",
    "v_ref_v": "v_ref",
    "droop_v_per_s": "droop_rate",
    "noise_sigma_v": "input_offset_noise_sigma",
    "dt_s": "dt",
    "gating_enabled": "gating_enabled",
    "rng_seed": "rng_seed",
}
REFRACTORY_KEYS = {
    "refr_t_base_s": "t_base",
    "refr_v_scale_v": "v_scale",
    "refr_t_min_s": "t_min",
    "refr_t_max_s": "t_max",
}
POWER_KEYS = {
    "static_baseline_w": "static_baseline",
    "energy_per_event_j": "energy_per_event",
    "overhead_w": "overhead_power",
}
STIMULUS_KEYS = {
    "stim_kind": "kind",
    "stim_amplitude_v": "amplitude",
    "stim_frequency_hz": "frequency",
    "stim_offset_v": "offset",
    "stim_duration_s": "duration",
    "stim_sample_rate_hz": "sample_rate",
}
REQUIRED_KEYS = tuple(ADC_KEYS) + tuple(REFRACTORY_KEYS) + tuple(POWER_KEYS)
ALL_KEYS = REQUIRED_KEYS + tuple(STIMULUS_KEYS)


@dataclass(frozen=True)
class Stimulus:
    """Synthetic input description.

    ``kind`` is ``"sine"`` or ``"ramp"``; for a ramp ``amplitude`` is the slope
    in V/s and ``frequency`` is ignored.
    """

    kind: str = "sine"
    amplitude: float = 0.64
    frequency: float = 1e3
    offset: float = 0.0
    duration: float = 10e-3
    sample_rate: float = 10e6

    def __post_init__(self):
        if self.kind not in ("sine", "ramp"):
            raise ConfigurationError(f"stim_kind must be 'sine' or 'ramp', got {self.kind!r}")

    @property
    def periods(self):
        return self.duration * self.frequency

    def at_frequency(self, frequency):
        """Same number of periods and samples per period at another frequency."""
        scale = self.frequency / frequency
        return dataclasses.replace(
            self,
            frequency=frequency,
            duration=self.duration * scale,
            sample_rate=self.sample_rate / scale,
        )

    def waveform(self) -> Waveform:
        if self.kind == "ramp":
            return make_ramp(self.amplitude, self.duration, self.sample_rate, self.offset)
        return make_sinusoid(self.amplitude, self.frequency, self.offset, self.duration, self.sample_rate)


@dataclass(frozen=True)
class RunConfig:
    adc: AdcConfig = field(default_factory=AdcConfig)
    power: PowerParams = field(default_factory=PowerParams)
    stimulus: Stimulus = field(default_factory=Stimulus)
    out_dir: Optional[Path] = None

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def _parse_value(key, raw, where):
    if key == "gating_enabled":
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigurationError(f"{where}: key {key!r} expects a boolean, got {raw!r}")
    if key == "rng_seed":
        try:
            return int(raw)
        except ValueError:
            raise ConfigurationError(f"{where}: key {key!r} expects an integer, got {raw!r}") from None
    if key == "stim_kind":
        return raw
    try:
        value = float(raw)
    except ValueError:
        raise ConfigurationError(f"{where}: key {key!r} expects a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigurationError(f"{where}: key {key!r} must be finite")
    return value


def parse_config(text_stream: Union[TextIO, str], source="<config>") -> RunConfig:
    """Parse a flat ``key = value`` file into a :class:`RunConfig`.

    Errors name the file, the line and the offending key.
    """
    if isinstance(text_stream, str):
        text_stream = io.StringIO(text_stream)
    values = {}
    for n, line in enumerate(text_stream.read().split("\n"), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{n}"
        if "=" not in line:
            raise ConfigurationError(f"{where}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in ALL_KEYS:
            raise ConfigurationError(f"{where}: unknown key {key!r}")
        if key in values:
            raise ConfigurationError(f"{where}: duplicate key {key!r}")
        values[key] = _parse_value(key, raw, where)

    missing = [k for k in REQUIRED_KEYS if k not in values]
    if missing:
        raise ConfigurationError(f"{source}: missing required key(s): {', '.join(missing)}")

    try:
        refractory = RefractoryModel(**{f: values[k] for k, f in REFRACTORY_KEYS.items()})
        adc = AdcConfig(refractory=refractory, **{f: values[k] for k, f in ADC_KEYS.items()})
        power = PowerParams(**{f: values[k] for k, f in POWER_KEYS.items()})
        stimulus = Stimulus(**{f: values[k] for k, f in STIMULUS_KEYS.items() if k in values})
    except NeuronAdcError as exc:
        raise ConfigurationError(f"{source}: {exc}") from None
    return RunConfig(adc=adc, power=power, stimulus=stimulus)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"{path}: cannot read config ({exc.strerror})") from None
    return parse_config(text, source=str(path))


def format_config(run: RunConfig) -> str:
    """Serialize ``run`` back to the flat text form with round-trip exact floats."""
    adc, refr, power, stim = run.adc, run.adc.refractory, run.power, run.stimulus

    def fmt(v):
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, float):
            return repr(v)
        return str(v)

    lines = ["# Neuron-ADC run configuration"]
    for key, name in ADC_KEYS.items():
        lines.append(f"{key} = {fmt(getattr(adc, name))}")
    for key, name in REFRACTORY_KEYS.items():
        lines.append(f"{key} = {fmt(getattr(refr, name))}")
    for key, name in POWER_KEYS.items():
        lines.append(f"{key} = {fmt(getattr(power, name))}")
    for key, name in STIMULUS_KEYS.items():
        lines.append(f"{key} = {fmt(getattr(stim, name))}")
    return "\n".join(lines) + "\n"


def default_config() -> RunConfig:
    """The committed calibrated configuration shipped with the package."""
    text = resources.files("neuron_adc").joinpath("data/default.cfg").read_text()
    return parse_config(text, source="default.cfg")
