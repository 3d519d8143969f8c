"""Static and dynamic power bookkeeping with comparator power gating."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import SimulationTrace
from .errors import CalibrationError, ParameterError

# Comparator static power without gating, both comparators together.
STATIC_BASELINE_W = 30.7e-9


@dataclass(frozen=True)
class PowerParams:
    static_baseline: float = STATIC_BASELINE_W
    energy_per_event: float = 0.0
    overhead_power: float = 0.0

    def __post_init__(self):
        for name in ("static_baseline", "energy_per_event", "overhead_power"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ParameterError(f"PowerParams.{name} must be finite and >= 0")


@dataclass(frozen=True)
class PowerReport:
    static_baseline: float
    static_effective: float
    dynamic: float
    overhead: float
    total: float
    off_fraction: float
    reduction_percent: float

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def rows(self):
        return [
            ("static_baseline_w", self.static_baseline, "W"),
            ("static_effective_w", self.static_effective, "W"),
            ("dynamic_w", self.dynamic, "W"),
            ("overhead_w", self.overhead, "W"),
            ("total_w", self.total, "W"),
            ("off_fraction", self.off_fraction, "1"),
            ("reduction_percent", self.reduction_percent, "%"),
        ]


def off_fraction(trace: SimulationTrace):
    """Fraction of the record during which the comparators are gated off."""
    if not trace.duration > 0:
        raise ParameterError("trace duration must be > 0")
    g = trace.gate_off_intervals
    total = float(np.sum(g[:, 1] - g[:, 0])) if g.size else 0.0
    return min(max(total / trace.duration, 0.0), 1.0)


def static_report(off, params: PowerParams, gating=True, dynamic=0.0):
    """Build a :class:`PowerReport` from an off-time fraction."""
    if not 0.0 <= off <= 1.0:
        raise ParameterError("off_fraction must lie in [0, 1]")
    base = params.static_baseline
    effective = base * (1.0 - off) if gating else base
    reduction = 100.0 * off if gating else 0.0
    return PowerReport(
        static_baseline=base,
        static_effective=effective,
        dynamic=dynamic,
        overhead=params.overhead_power,
        total=effective + dynamic + params.overhead_power,
        off_fraction=off,
        reduction_percent=reduction,
    )


def power_report(trace: SimulationTrace, params: PowerParams, gating=True) -> PowerReport:
    off = off_fraction(trace)
    dynamic = trace.spike_count * params.energy_per_event / trace.duration
    return static_report(off, params, gating, dynamic)


def calibrate_dynamic_energy(target_total, trace: SimulationTrace, static_baseline=STATIC_BASELINE_W,
                             overhead=0.0, gating=False):
    """Energy per event that makes ``trace`` draw ``target_total`` watts on average.

    Raises
    ------
    CalibrationError
        If the trace has no spikes or static plus overhead already exceed the target.
    """
    if trace.spike_count < 1:
        raise CalibrationError("cannot calibrate dynamic energy on a trace without spikes")
    off = off_fraction(trace)
    static_effective = static_baseline * (1.0 - off) if gating else static_baseline
    residual = target_total - static_effective - overhead
    if not residual > 0:
        raise CalibrationError(
            f"target {target_total:g} W leaves no room for dynamic power "
            f"(static {static_effective:g} W + overhead {overhead:g} W)"
        )
    return residual * trace.duration / trace.spike_count
