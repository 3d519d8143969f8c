"""Figures of merit: LSB sizing, SNDR, ENOB, FoM and compression."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import SpikeTrain
from .errors import ParameterError
from .signal import Waveform

SIGNAL_HALF_WIDTH = 2
DC_BINS = 2


def lsb(a_fs, m):
    """Level spacing ``a_fs / 2**m`` for full-scale range ``a_fs`` and resolution ``m`` bits."""
    if not a_fs > 0:
        raise ParameterError("a_fs must be > 0")
    if int(m) != m or m < 0:
        raise ParameterError("m must be a non-negative integer")
    return a_fs / 2 ** int(m)


def enob(sndr_db):
    return (sndr_db - 1.76) / 6.02


def fom(power, bw, enob_bits):
    """Energy per conversion step ``power / (2 * bw * 2**enob_bits)`` in joules."""
    if not power > 0:
        raise ParameterError("power must be > 0")
    if not bw > 0:
        raise ParameterError("bw must be > 0")
    return power / (2.0 * bw * 2.0 ** enob_bits)


def _hann(n):
    # periodic form, so a coherent tone falls in exactly three bins
    return 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(n) / n)


def power_spectrum(samples):
    """Hann-windowed power spectrum of the mean-removed power-of-two prefix."""
    x = np.asarray(samples, dtype=float)
    n = 1 << int(math.floor(math.log2(x.size)))
    x = x[:n] - np.mean(x[:n])
    return np.abs(np.fft.rfft(x * _hann(n))) ** 2, n


def sndr(recon: Waveform, f_in):
    """Signal-to-noise-and-distortion ratio of ``recon`` for a tone at ``f_in`` Hz.

    The record is cut to the largest power-of-two length, mean-removed and
    Hann-windowed. Signal power is the spectral peak nearest ``f_in`` plus two
    bins on either side; everything else above the two lowest bins counts as
    noise and distortion.
    """
    rate = recon.sample_rate
    if not f_in > 0 or f_in >= rate / 2:
        raise ParameterError(f"f_in must lie in (0, {rate / 2:g}) Hz")
    if recon.duration * f_in < 10 * (1 - 1e-9):
        raise ParameterError("record must span at least 10 periods of f_in")
    if rate < 20 * f_in * (1 - 1e-9):
        raise ParameterError("grid rate must be at least 20 * f_in")
    p, n = power_spectrum(recon.samples)
    k0 = int(round(f_in * n / rate))
    lo = max(k0 - SIGNAL_HALF_WIDTH, DC_BINS + 1)
    hi = min(k0 + SIGNAL_HALF_WIDTH, p.size - 1)
    peak = lo + int(np.argmax(p[lo:hi + 1]))
    sig = slice(max(peak - SIGNAL_HALF_WIDTH, 0), peak + SIGNAL_HALF_WIDTH + 1)
    p_signal = float(np.sum(p[sig]))
    mask = np.ones(p.size, dtype=bool)
    mask[: DC_BINS + 1] = False
    mask[sig] = False
    p_nd = float(np.sum(p[mask]))
    if p_signal <= 0:
        raise ParameterError("no signal power at f_in")
    if p_nd <= 0:
        return math.inf
    return 10 * math.log10(p_signal / p_nd)


def event_bits(duration, dt):
    """Bits per event: one polarity bit plus a timestamp at resolution ``dt``."""
    return 1 + max(0, math.ceil(math.log2(duration / dt)))


def compression_ratio(train: SpikeTrain, bw, nyquist_bits, dt=None):
    """Nyquist bit count over event bit count for the same record.

    Returns ``math.inf`` when the train is empty.
    """
    if not bw > 0:
        raise ParameterError("bw must be > 0")
    if not train.duration > 0:
        raise ParameterError("spike train duration must be > 0")
    if dt is None:
        if train.config_snapshot is None:
            raise ParameterError("dt is required for a spike train without a config")
        dt = train.config_snapshot.dt
    if len(train) == 0:
        return math.inf
    nyquist = 2.0 * bw * train.duration * nyquist_bits
    return nyquist / (len(train) * event_bits(train.duration, dt))


@dataclass
class Metrics:
    sndr_db: float
    enob_bits: float
    fom_j_per_conv: float
    spike_count: int
    mean_event_rate: float
    compression_ratio: float

    @property
    def compression_infinite(self):
        return math.isinf(self.compression_ratio)

    def to_dict(self):
        """JSON-ready mapping; non-finite floats become ``None``."""
        def clean(v):
            return v if not isinstance(v, float) or math.isfinite(v) else None

        d = asdict(self)
        out = {
            "sndr_db": clean(d["sndr_db"]),
            "enob_bits": clean(d["enob_bits"]),
            "fom_j_per_conv": clean(d["fom_j_per_conv"]),
            "spike_count": int(d["spike_count"]),
            "mean_event_rate_hz": clean(d["mean_event_rate"]),
            "compression_ratio": clean(d["compression_ratio"]),
        }
        if self.compression_infinite:
            out["compression_ratio_infinite"] = True
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def rows(self):
        """``(name, value, unit)`` triples for the delimited-text output."""
        return [
            ("sndr_db", self.sndr_db, "dB"),
            ("enob_bits", self.enob_bits, "bit"),
            ("fom_j_per_conv", self.fom_j_per_conv, "J/conv"),
            ("spike_count", self.spike_count, "count"),
            ("mean_event_rate_hz", self.mean_event_rate, "Hz"),
            ("compression_ratio", self.compression_ratio, "1"),
        ]


def format_rows(rows):
    lines = ["name,value,unit"]
    for name, value, unit in rows:
        lines.append(f"{name},{value!r},{unit}")
    return "\n".join(lines) + "\n"
