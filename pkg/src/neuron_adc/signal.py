"""Analog test waveforms: generation, text I/O and continuous-time evaluation."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import TextIO, Union

import numpy as np

from .errors import FormatError, ParameterError, RangeError

WAVEFORM_HEADER = "t_s,v"

# Relative spacing jitter accepted when ingesting recorded time columns.
_SPACING_RTOL = 1e-6
# Grid-point snapping tolerance, in sample periods.
_SNAP_TOL = 1e-9


@dataclass(frozen=True)
class Waveform:
    """Uniformly sampled analog signal.

    Parameters
    ----------
    sample_rate : float
        Samples per second (Hz).
    samples : array_like
        Voltages in volts. Stored as a read-only float64 array.
    t0 : float
        Time of the first sample in seconds.
    """

    sample_rate: float
    samples: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        rate = float(self.sample_rate)
        if not math.isfinite(rate) or rate <= 0:
            raise ParameterError(f"sample_rate must be finite and > 0, got {self.sample_rate!r}")
        samples = np.array(self.samples, dtype=float).ravel()
        if samples.size < 2:
            raise ParameterError("a waveform needs at least 2 samples")
        if not np.all(np.isfinite(samples)):
            raise ParameterError("waveform samples must be finite")
        if not math.isfinite(float(self.t0)):
            raise ParameterError("t0 must be finite")
        samples.setflags(write=False)
        object.__setattr__(self, "sample_rate", rate)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "t0", float(self.t0))
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise ParameterError("waveform duration must be finite and > 0")

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return (self.samples.size - 1) / self.sample_rate

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.size) / self.sample_rate

    def __eq__(self, other):
        if not isinstance(other, Waveform):
            return NotImplemented
        return (
            self.sample_rate == other.sample_rate
            and self.t0 == other.t0
            and np.array_equal(self.samples, other.samples)
        )

    __hash__ = None


def _check_positive(name, value):
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise ParameterError(f"{name} must be finite and > 0, got {value!r}")
    return value


def make_sinusoid(amplitude, frequency, offset=0.0, duration=1e-3, sample_rate=10e6, t0=0.0):
    """Sampled sine ``offset + amplitude * sin(2*pi*frequency*t)``.

    The record holds ``floor(duration * sample_rate) + 1`` samples, so it
    starts at ``t0`` and ends at or just before ``t0 + duration``.
    """
    frequency = _check_positive("frequency", frequency)
    duration = _check_positive("duration", duration)
    sample_rate = _check_positive("sample_rate", sample_rate)
    amplitude = float(amplitude)
    offset = float(offset)
    if not math.isfinite(amplitude) or amplitude < 0:
        raise ParameterError(f"amplitude must be finite and >= 0, got {amplitude!r}")
    if not math.isfinite(offset):
        raise ParameterError("offset must be finite")
    if sample_rate < 20 * frequency:
        raise ParameterError(
            f"sample_rate {sample_rate:g} Hz is below 20x the frequency {frequency:g} Hz"
        )
    if duration * frequency < 2 * (1 - 1e-12):
        raise ParameterError("duration must span at least 2 periods")
    n = int(math.floor(duration * sample_rate * (1 + 1e-12))) + 1
    t = t0 + np.arange(n) / sample_rate
    return Waveform(sample_rate, offset + amplitude * np.sin(2 * np.pi * frequency * t), t0)


def make_ramp(slope, duration, sample_rate, offset=0.0, t0=0.0):
    """Linear ramp ``offset + slope * (t - t0)``, used as a closed-form test stimulus."""
    duration = _check_positive("duration", duration)
    sample_rate = _check_positive("sample_rate", sample_rate)
    n = int(math.floor(duration * sample_rate * (1 + 1e-12))) + 1
    k = np.arange(n)
    return Waveform(sample_rate, offset + float(slope) * (k / sample_rate), t0)


def sample_at(w: Waveform, t):
    """Evaluate ``w`` at time(s) ``t`` by linear interpolation.

    Grid points return the stored sample exactly. ``t`` may be a scalar or an
    array; a scalar input gives a float back.

    Raises
    ------
    RangeError
        If any ``t`` lies outside ``[t0, t0 + duration]``.
    """
    scalar = np.ndim(t) == 0
    pos = (np.asarray(t, dtype=float) - w.t0) * w.sample_rate
    last = w.samples.size - 1
    if np.any(pos < -_SNAP_TOL) or np.any(pos > last + _SNAP_TOL) or np.any(np.isnan(pos)):
        raise RangeError(
            f"t outside waveform span [{w.t0!r}, {w.t0 + w.duration!r}]"
        )
    near = np.rint(pos)
    pos = np.where(np.abs(pos - near) <= _SNAP_TOL, near, pos)
    pos = np.clip(pos, 0.0, last)
    idx = np.minimum(np.floor(pos).astype(np.intp), last - 1)
    frac = pos - idx
    s = w.samples
    lo = s[idx]
    out = np.where(frac == 0.0, lo, lo + frac * (s[idx + 1] - lo))
    return float(out) if scalar else out


def save_waveform(w: Waveform, stream: TextIO):
    """Write ``w`` as ``t_s,v`` text with round-trip exact float formatting."""
    stream.write(WAVEFORM_HEADER + "\n")
    for t, v in zip(w.times, w.samples):
        stream.write(f"{float(t)!r},{float(v)!r}\n")


def waveform_to_text(w: Waveform) -> str:
    buf = io.StringIO()
    save_waveform(w, buf)
    return buf.getvalue()


def load_waveform(text_stream: Union[TextIO, str]) -> Waveform:
    """Parse a ``t_s,v`` text stream into a :class:`Waveform`.

    The sample rate is the inverse of the median time step. Every step must
    match the median to a relative tolerance of 1e-6.
    """
    if isinstance(text_stream, str):
        text_stream = io.StringIO(text_stream)
    lines = text_stream.read().split("\n")
    if not lines or lines[0].strip() != WAVEFORM_HEADER:
        raise FormatError(f"line 1: expected header {WAVEFORM_HEADER!r}")
    times, values, lineno = [], [], []
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise FormatError(f"line {n}: expected 2 fields, got {len(parts)}")
        try:
            t, v = float(parts[0]), float(parts[1])
        except ValueError:
            raise FormatError(f"line {n}: cannot parse {line.strip()!r}") from None
        if not (math.isfinite(t) and math.isfinite(v)):
            raise FormatError(f"line {n}: non-finite value")
        times.append(t)
        values.append(v)
        lineno.append(n)
    if len(times) < 2:
        raise FormatError("waveform file needs at least 2 data rows")
    t = np.asarray(times)
    steps = np.diff(t)
    bad = np.flatnonzero(steps <= 0)
    if bad.size:
        raise FormatError(f"line {lineno[bad[0] + 1]}: time column is not increasing")
    step = float(np.median(steps))
    jitter = np.abs(steps - step) / step
    bad = np.flatnonzero(jitter >= _SPACING_RTOL)
    if bad.size:
        raise FormatError(f"line {lineno[bad[0] + 1]}: non-uniform time spacing")
    return Waveform(1.0 / step, np.asarray(values), t[0])
