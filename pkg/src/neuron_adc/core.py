"""Event-driven model of the Neuron-ADC.

The comparator input is the input signal folded into a fixed window around
``v_m``. An upward crossing of ``v_h`` emits an UP spike, a downward crossing
of ``v_l`` a DN spike. Each spike folds the input back to ``v_m`` after the
loop delay and disables both comparators for one refractory period.
"""

from __future__ import annotations

import dataclasses
import io
import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, TextIO, Union

import numpy as np

from .errors import ConfigurationError, FormatError, RangeError
from .refractory import SUPPLY_V, RefractoryModel, refractory_period
from .signal import Waveform, sample_at

UP = 1
DN = -1

SPIKE_HEADER = "t_s,polarity"

# Relative slack on float comparisons between configuration timings.
_REL_TOL = 1e-9
_NOISE_BLOCK = 1 << 16
_CHUNK_MIN = 256
_CHUNK_MAX = 1 << 18
# Threshold touches closer than this count as crossings; absorbs the rounding
# in v_h - v_m so that inputs sitting exactly on a level are not lost.
COMPARATOR_RESOLUTION = 1e-12


@dataclass(frozen=True)
class AdcConfig:
    """Everything a simulation run depends on.

    Voltages are in volts and times in seconds. The window ``(v_l, v_m, v_h)``
    must be symmetric so that one crossing always stands for one LSB.
    """

    v_h: float = 0.095
    v_m: float = 0.075
    v_l: float = 0.055
    supply: float = SUPPLY_V
    comparator_delay: float = 100e-9
    loop_delay: float = 200e-9
    refractory: RefractoryModel = field(default_factory=RefractoryModel)
    v_ref: float = 0.285
    droop_rate: float = 0.0
    input_offset_noise_sigma: float = 0.0
    dt: float = 20e-9
    gating_enabled: bool = True
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("v_h", "v_m", "v_l", "supply", "comparator_delay", "loop_delay",
                     "v_ref", "droop_rate", "input_offset_noise_sigma", "dt"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigurationError(f"{name} must be finite")
        if not (self.v_l < self.v_m < self.v_h):
            raise ConfigurationError("window levels must satisfy v_l < v_m < v_h")
        if abs((self.v_h - self.v_m) - (self.v_m - self.v_l)) > 1e-12:
            raise ConfigurationError("window must be symmetric: v_h - v_m == v_m - v_l")
        if self.comparator_delay < 0:
            raise ConfigurationError("comparator_delay must be >= 0")
        if self.loop_delay < self.comparator_delay:
            raise ConfigurationError("loop_delay must be >= comparator_delay")
        if self.input_offset_noise_sigma < 0:
            raise ConfigurationError("input_offset_noise_sigma must be >= 0")
        if not (0.0 <= self.v_ref <= self.supply):
            raise ConfigurationError(f"v_ref must lie in [0, {self.supply}] V")
        if self.dt <= 0:
            raise ConfigurationError("dt must be > 0")
        if self.dt > self.t_ref / 4 * (1 + _REL_TOL):
            raise ConfigurationError(
                f"dt = {self.dt:g} s is coarser than refractory_period/4 = {self.t_ref / 4:g} s"
            )

    @property
    def lsb(self) -> float:
        return self.v_h - self.v_m

    @property
    def t_ref(self) -> float:
        return refractory_period(self.refractory, self.v_ref, self.supply)

    def replace(self, **changes) -> "AdcConfig":
        return dataclasses.replace(self, **changes)

    def check_input_frequency(self, f_max):
        """Reject a step that cannot follow inputs up to ``f_max`` Hz."""
        if f_max > 0 and self.dt > 1.0 / (50.0 * f_max) * (1 + _REL_TOL):
            raise ConfigurationError(
                f"dt = {self.dt:g} s is coarser than 1/(50 * {f_max:g} Hz)"
            )


class SpikeEvent(NamedTuple):
    t: float
    polarity: int


class SpikeTrain:
    """Time-ordered UP/DN events of one run.

    Stored as two parallel arrays; ``events`` gives the list view.
    """

    def __init__(self, times, polarities, duration, config_snapshot: Optional[AdcConfig] = None):
        times = np.array(times, dtype=float).ravel()
        polarities = np.array(polarities, dtype=np.int8).ravel()
        if times.shape != polarities.shape:
            raise ValueError("times and polarities differ in length")
        if times.size and (not np.all(np.isfinite(times)) or times[0] < 0):
            raise ValueError("spike times must be finite and >= 0")
        if np.any(np.diff(times) <= 0):
            raise ValueError("spike times must be strictly increasing")
        if np.any((polarities != UP) & (polarities != DN)):
            raise ValueError("polarity must be +1 or -1")
        times.setflags(write=False)
        polarities.setflags(write=False)
        self.times = times
        self.polarities = polarities
        self.duration = float(duration)
        self.config_snapshot = config_snapshot

    def __len__(self):
        return self.times.size

    @property
    def events(self) -> List[SpikeEvent]:
        return [SpikeEvent(float(t), int(p)) for t, p in zip(self.times, self.polarities)]

    def __eq__(self, other):
        if not isinstance(other, SpikeTrain):
            return NotImplemented
        return (
            np.array_equal(self.times, other.times)
            and np.array_equal(self.polarities, other.polarities)
            and self.duration == other.duration
        )

    __hash__ = None

    def __repr__(self):
        return f"SpikeTrain({len(self)} events, duration={self.duration!r})"


@dataclass(frozen=True, eq=False)
class SimulationTrace:
    """Spikes plus the gating and folding history of one run.

    ``gate_off_intervals`` has shape ``(n, 2)`` holding ``(start, end)``;
    ``fold_history`` has shape ``(n, 2)`` holding ``(t_fold, new_reference)``.
    """

    spikes: SpikeTrain
    gate_off_intervals: np.ndarray
    fold_history: np.ndarray
    initial_reference: float

    @property
    def duration(self) -> float:
        return self.spikes.duration

    @property
    def spike_count(self) -> int:
        return len(self.spikes)

    @property
    def config(self) -> Optional[AdcConfig]:
        return self.spikes.config_snapshot

    def __eq__(self, other):
        if not isinstance(other, SimulationTrace):
            return NotImplemented
        return (
            self.spikes == other.spikes
            and np.array_equal(self.gate_off_intervals, other.gate_off_intervals)
            and np.array_equal(self.fold_history, other.fold_history)
            and self.initial_reference == other.initial_reference
        )

    __hash__ = None


def detect_crossing(prev, curr, v_h, v_l, resolution=0.0) -> Optional[int]:
    """Classify one comparator step.

    Returns ``UP`` if ``prev < v_h <= curr``, ``DN`` if ``prev > v_l >= curr``
    and ``None`` otherwise. When a single step spans both thresholds the one
    nearer to ``prev`` wins. ``resolution`` moves both thresholds inward.
    """
    v_h = v_h - resolution
    v_l = v_l + resolution
    up = prev < v_h <= curr
    dn = prev > v_l >= curr
    if up and dn:
        return UP if abs(v_h - prev) <= abs(prev - v_l) else DN
    if up:
        return UP
    if dn:
        return DN
    return None


class _Noise:
    """Per-step Gaussian noise with random access by step index."""

    def __init__(self, sigma, seed):
        self.sigma = float(sigma)
        self.seed = int(seed)
        self._blocks = {}

    def _block(self, b):
        blk = self._blocks.get(b)
        if blk is None:
            rng = np.random.default_rng([self.seed, b])
            blk = self.sigma * rng.standard_normal(_NOISE_BLOCK)
            if len(self._blocks) > 64:
                self._blocks.clear()
            self._blocks[b] = blk
        return blk

    def __call__(self, k):
        if self.sigma == 0.0:
            return 0.0 if np.ndim(k) == 0 else np.zeros(np.shape(k))
        k = np.asarray(k, dtype=np.int64)
        if k.ndim == 0:
            return float(self._block(int(k) // _NOISE_BLOCK)[int(k) % _NOISE_BLOCK])
        out = np.empty(k.shape)
        blocks = k // _NOISE_BLOCK
        for b in np.unique(blocks):
            sel = blocks == b
            out[sel] = self._block(int(b))[k[sel] % _NOISE_BLOCK]
        return out


def step_count(duration, dt):
    """Index of the last simulation step at or before ``duration``."""
    return int(math.floor(duration / dt * (1 + 1e-12)))


def _check_run(w: Waveform, cfg: AdcConfig):
    if not isinstance(w, Waveform):
        raise ConfigurationError("simulate expects a Waveform input")
    if not (w.duration > 0):
        raise ConfigurationError("waveform duration must be > 0")
    if cfg.dt > cfg.t_ref / 4 * (1 + _REL_TOL):
        raise ConfigurationError("dt is coarser than refractory_period/4")
    if cfg.dt >= w.duration:
        raise ConfigurationError(
            f"dt = {cfg.dt:g} s does not resolve a {w.duration:g} s waveform"
        )


def simulate(w: Waveform, cfg: AdcConfig) -> SimulationTrace:
    """Run the event-driven ADC model over the whole waveform.

    Time is measured from the first sample of ``w``. Comparisons happen on
    the grid ``k * cfg.dt``; a crossing time is refined by linear
    interpolation between the two bracketing comparator values. The instant
    the gate reopens is itself a comparison point, and if the folded input is
    already beyond a threshold there the crossing is placed at that instant
    (slope-overload catch-up).

    A crossing whose fold would land after the end of the record is dropped
    together with its spike, so every spike has a matching fold.

    Raises
    ------
    ConfigurationError
        If the configuration does not fit the waveform.
    """
    _check_run(w, cfg)
    dt = cfg.dt
    duration = w.duration
    v_m = cfg.v_m
    v_h, v_l = cfg.v_h - COMPARATOR_RESOLUTION, cfg.v_l + COMPARATOR_RESOLUTION
    droop = cfg.droop_rate
    t_ref = cfg.t_ref
    cd, ld = cfg.comparator_delay, cfg.loop_delay
    noise = _Noise(cfg.input_offset_noise_sigma, cfg.rng_seed)
    k_last = step_count(duration, dt)
    # the record end is a comparison point even when it falls between steps
    tail = duration - k_last * dt > duration * 1e-12
    t0 = w.t0

    def x_at(t):
        return sample_at(w, t0 + np.minimum(t, duration))

    ref = x_at(0.0)
    t_fold = 0.0
    gate_until = 0.0

    ev_t, ev_p, gates, folds = [], [], [], []

    while gate_until <= duration:
        # The gate-reopen instant acts as the first comparison point.
        s = gate_until
        k_s = min(int(math.floor(s / dt)), k_last)
        v_s = v_m + (x_at(s) - ref) - droop * (s - t_fold) + noise(k_s)

        t_x = None
        if v_s >= v_h:
            t_x, pol = s, UP
        elif v_s <= v_l:
            t_x, pol = s, DN
        else:
            k = k_s + 1
            t_prev, v_prev = s, v_s
            chunk = _CHUNK_MIN
            while k <= k_last + tail and t_x is None:
                ks = np.arange(k, min(k + chunk, k_last + 1 + tail), dtype=np.int64)
                ts = ks * dt
                if tail and ks[-1] == k_last + 1:
                    ts[-1] = duration
                    ks[-1] = k_last
                vs = v_m + (x_at(ts) - ref) - droop * (ts - t_fold) + noise(ks)
                prev = np.empty_like(vs)
                prev[0] = v_prev
                prev[1:] = vs[:-1]
                up = (prev < v_h) & (v_h <= vs)
                dn = (prev > v_l) & (v_l >= vs)
                hit = np.flatnonzero(up | dn)
                if hit.size:
                    i = int(hit[0])
                    p = float(prev[i])
                    c = float(vs[i])
                    tp = t_prev if i == 0 else float(ts[i - 1])
                    pol = detect_crossing(p, c, v_h, v_l)
                    if pol is None:
                        raise AssertionError("vectorized and scalar crossing tests disagree")
                    thr = v_h if pol == UP else v_l
                    t_x = tp + (thr - p) / (c - p) * (float(ts[i]) - tp)
                else:
                    t_prev, v_prev = float(ts[-1]), float(vs[-1])
                    k += ts.size
                    chunk = min(chunk * 2, _CHUNK_MAX)
        if t_x is None:
            break

        t_event = t_x + cd
        t_fold = t_x + ld
        if t_fold > duration:
            break
        ref = x_at(t_fold)
        gate_until = t_fold + t_ref
        ev_t.append(t_event)
        ev_p.append(pol)
        folds.append((t_fold, ref))
        gates.append((t_event, min(t_event + t_ref, duration)))

    train = SpikeTrain(ev_t, ev_p, duration, cfg)
    return SimulationTrace(
        spikes=train,
        gate_off_intervals=np.array(gates, dtype=float).reshape(-1, 2),
        fold_history=np.array(folds, dtype=float).reshape(-1, 2),
        initial_reference=float(x_at(0.0)),
    )


def comparator_input(w: Waveform, cfg: AdcConfig, t, reference, t_last_fold, step_index=None):
    """Folded comparator input ``v_m + (x(t) - reference) - droop * (t - t_last_fold)``.

    Noise is added when ``step_index`` is given and the configuration has a
    non-zero noise sigma.
    """
    v = cfg.v_m + (sample_at(w, w.t0 + t) - reference) - cfg.droop_rate * (t - t_last_fold)
    if step_index is not None:
        v = v + _Noise(cfg.input_offset_noise_sigma, cfg.rng_seed)(step_index)
    return v


def gate_intervals_for(times, t_ref, duration):
    """Gate-off intervals ``[t, t + t_ref]`` clipped to ``[0, duration]``."""
    times = np.asarray(times, dtype=float)
    start = np.clip(times, 0.0, duration)
    end = np.clip(times + t_ref, 0.0, duration)
    return np.column_stack([start, end]).reshape(-1, 2)


def save_spikes(train: SpikeTrain, stream: TextIO):
    """Write ``t_s,polarity`` rows in ascending time order."""
    stream.write(SPIKE_HEADER + "\n")
    for t, p in zip(train.times, train.polarities):
        stream.write(f"{float(t)!r},{'+1' if p > 0 else '-1'}\n")


def spikes_to_text(train: SpikeTrain) -> str:
    buf = io.StringIO()
    save_spikes(train, buf)
    return buf.getvalue()


def load_spikes(text_stream: Union[TextIO, str], duration=None, config=None) -> SpikeTrain:
    """Parse a ``t_s,polarity`` spike file.

    ``duration`` defaults to the last event time when not given.
    """
    if isinstance(text_stream, str):
        text_stream = io.StringIO(text_stream)
    lines = text_stream.read().split("\n")
    if not lines or lines[0].strip() != SPIKE_HEADER:
        raise FormatError(f"line 1: expected header {SPIKE_HEADER!r}")
    times, pols = [], []
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise FormatError(f"line {n}: expected 2 fields, got {len(parts)}")
        try:
            t = float(parts[0])
            p = int(parts[1])
        except ValueError:
            raise FormatError(f"line {n}: cannot parse {line.strip()!r}") from None
        if not math.isfinite(t) or t < 0:
            raise FormatError(f"line {n}: spike time must be finite and >= 0")
        if p not in (UP, DN):
            raise FormatError(f"line {n}: polarity must be +1 or -1")
        if times and t <= times[-1]:
            raise FormatError(f"line {n}: spike times must be strictly increasing")
        times.append(t)
        pols.append(p)
    if duration is None:
        duration = times[-1] if times else 0.0
    elif times and times[-1] > duration:
        raise RangeError("spike times extend past the stated duration")
    return SpikeTrain(times, pols, duration, config)
