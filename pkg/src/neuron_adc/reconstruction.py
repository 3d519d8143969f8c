"""Signal reconstruction from UP/DN spike trains.

Every event pins the signal to a known level (one LSB above or below the
previous one). The uniform output grid is then filled by local degree-5
Lagrange interpolation through the six level points nearest in time.
"""

from __future__ import annotations

import math
from typing import List, NamedTuple, Sequence

import numpy as np

from .core import SimulationTrace, SpikeTrain
from .errors import ParameterError
from .signal import Waveform

WINDOW = 6


class LevelPoint(NamedTuple):
    t: float
    v: float


def levels_from_spikes(train: SpikeTrain, lsb, v0=0.0) -> List[LevelPoint]:
    """Running-sum levels ``v0 + lsb * cumsum(polarity)`` at the event times.

    The anchor ``(0, v0)`` is always the first point.
    """
    if not lsb > 0:
        raise ParameterError("lsb must be > 0")
    t, v = level_arrays(train, lsb, v0)
    return [LevelPoint(float(a), float(b)) for a, b in zip(t, v)]


def level_arrays(train: SpikeTrain, lsb, v0=0.0):
    t = np.concatenate([[0.0], train.times])
    v = np.concatenate([[float(v0)], v0 + lsb * np.cumsum(train.polarities, dtype=float)])
    if t.size > 1 and t[1] == 0.0:
        # an event exactly at t = 0 replaces the anchor
        t, v = t[1:], v[1:]
    return t, v


def _nearest_windows(nodes, t, width):
    """Start index of the ``width`` nodes nearest to each ``t``.

    The nearest set is always contiguous, so it is enough to compare the
    candidate windows that contain the insertion point.
    """
    n = nodes.size
    ins = np.searchsorted(nodes, t)
    offsets = np.arange(-width, 1)
    cand = np.clip(ins[:, None] + offsets[None, :], 0, n - width)
    far = np.maximum(t[:, None] - nodes[cand], nodes[cand + width - 1] - t[:, None])
    return cand[np.arange(t.size), np.argmin(far, axis=1)]


def lagrange_eval(xs, ys, t):
    """Evaluate the interpolating polynomial through rows of ``(xs, ys)`` at ``t``.

    ``xs`` and ``ys`` have shape ``(m, k)``; ``t`` has shape ``(m,)``.
    """
    m, k = xs.shape
    du = t[:, None] - xs
    out = np.zeros(m)
    for j in range(k):
        basis = np.ones(m)
        for i in range(k):
            if i != j:
                basis *= du[:, i] / (xs[:, j] - xs[:, i])
        out += ys[:, j] * basis
    return out


def interpolate_poly5(points: Sequence, grid_rate, duration) -> Waveform:
    """Resample level points onto ``k / grid_rate`` for ``k = 0 .. floor(duration * grid_rate)``.

    Each grid time uses the six points nearest to it in time and evaluates
    their degree-5 interpolating polynomial. With fewer than six points the
    degree drops to ``len(points) - 1``. Grid times before the first or after
    the last point are held at that point's value instead of extrapolated.

    Raises
    ------
    ParameterError
        On zero points, duplicate timestamps or a non-positive grid rate.
    """
    if isinstance(points, tuple) and len(points) == 2 and np.ndim(points[0]) == 1:
        t_pts, v_pts = (np.asarray(a, dtype=float) for a in points)
    else:
        pts = list(points)
        t_pts = np.array([p[0] for p in pts], dtype=float)
        v_pts = np.array([p[1] for p in pts], dtype=float)
    if t_pts.size == 0:
        raise ParameterError("cannot interpolate zero points")
    if not (math.isfinite(grid_rate) and grid_rate > 0):
        raise ParameterError("grid_rate must be > 0")
    if not (math.isfinite(duration) and duration > 0):
        raise ParameterError("duration must be > 0")
    order = np.argsort(t_pts, kind="stable")
    t_pts, v_pts = t_pts[order], v_pts[order]
    if np.any(np.diff(t_pts) == 0):
        raise ParameterError("duplicate timestamps in level points")

    n_grid = int(math.floor(duration * grid_rate * (1 + 1e-12))) + 1
    grid = np.arange(n_grid) / grid_rate
    if t_pts.size == 1:
        return Waveform(grid_rate, np.full(n_grid, v_pts[0]))

    width = min(WINDOW, t_pts.size)
    tc = np.clip(grid, t_pts[0], t_pts[-1])
    start = _nearest_windows(t_pts, tc, width)
    idx = start[:, None] + np.arange(width)[None, :]
    values = lagrange_eval(t_pts[idx], v_pts[idx], tc)
    # Lagrange bases are exact at the nodes only up to rounding; pin them.
    hit = np.searchsorted(t_pts, tc)
    hit = np.minimum(hit, t_pts.size - 1)
    on_node = t_pts[hit] == tc
    values[on_node] = v_pts[hit[on_node]]
    return Waveform(grid_rate, values)


def reconstruct(source, grid_rate, duration=None, lsb=None, v0=None) -> Waveform:
    """Spike train (or trace) to a uniformly sampled waveform.

    ``lsb`` defaults to the window of the attached configuration and ``v0``
    to the trace's initial reference (or 0 for a bare spike train).
    """
    if isinstance(source, SimulationTrace):
        train = source.spikes
        if v0 is None:
            v0 = source.initial_reference
    else:
        train = source
    if v0 is None:
        v0 = 0.0
    if lsb is None:
        if train.config_snapshot is None:
            raise ParameterError("lsb is required for a spike train without a config")
        lsb = train.config_snapshot.lsb
    if duration is None:
        duration = train.duration
    return interpolate_poly5(level_arrays(train, lsb, v0), grid_rate, duration)
