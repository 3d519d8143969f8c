"""Behavioral simulator for a level-crossing Neuron-ADC with refractory gating.

The package converts analog waveforms into UP/DN spike events, models the
power-gated comparators, rebuilds the signal from the spikes and computes the
usual converter figures of merit.
"""

from .errors import (
    CalibrationError,
    ConfigurationError,
    FormatError,
    NeuronAdcError,
    ParameterError,
    RangeError,
    UnsupportedConfigurationError,
)
from .signal import Waveform, load_waveform, make_sinusoid, make_ramp, sample_at, save_waveform
from .refractory import RefractoryModel, calibrate_refractory, refractory_period
from .core import (
    DN,
    UP,
    AdcConfig,
    SimulationTrace,
    SpikeEvent,
    SpikeTrain,
    detect_crossing,
    simulate,
)
from .oracle import simulate_dense
from .reconstruction import LevelPoint, interpolate_poly5, levels_from_spikes, reconstruct
from .metrics import Metrics, compression_ratio, enob, fom, lsb, sndr
from .power import PowerParams, PowerReport, calibrate_dynamic_energy, power_report

__version__ = "0.1.0"

__all__ = [
    "AdcConfig",
    "CalibrationError",
    "ConfigurationError",
    "DN",
    "FormatError",
    "LevelPoint",
    "Metrics",
    "NeuronAdcError",
    "ParameterError",
    "PowerParams",
    "PowerReport",
    "RangeError",
    "RefractoryModel",
    "SimulationTrace",
    "SpikeEvent",
    "SpikeTrain",
    "UP",
    "UnsupportedConfigurationError",
    "Waveform",
    "calibrate_dynamic_energy",
    "calibrate_refractory",
    "compression_ratio",
    "detect_crossing",
    "enob",
    "fom",
    "interpolate_poly5",
    "levels_from_spikes",
    "load_waveform",
    "lsb",
    "make_ramp",
    "make_sinusoid",
    "power_report",
    "reconstruct",
    "refractory_period",
    "sample_at",
    "save_waveform",
    "simulate",
    "simulate_dense",
    "sndr",
]
