"""Brute-force dense-time reference for :func:`neuron_adc.core.simulate`.

Same semantics, but thresholds are checked at every fine step and a crossing
is timed at the first fine step that meets the threshold. No interpolation,
no chunking. Slow on purpose; use it only for equivalence checks.
"""

from __future__ import annotations

import math

import numpy as np

from .core import COMPARATOR_RESOLUTION, DN, UP, AdcConfig, SimulationTrace, SpikeTrain, _check_run, step_count
from .errors import ConfigurationError, UnsupportedConfigurationError
from .signal import Waveform, sample_at


def simulate_dense(w: Waveform, cfg: AdcConfig, dt_fine=None) -> SimulationTrace:
    """Reference simulation on a grid of ``dt_fine`` (default ``cfg.dt / 10``)."""
    if cfg.input_offset_noise_sigma != 0:
        raise UnsupportedConfigurationError("the dense oracle is only defined for noise-free configs")
    _check_run(w, cfg)
    if dt_fine is None:
        dt_fine = cfg.dt / 10
    if not (0 < dt_fine <= cfg.dt / 10 * (1 + 1e-9)):
        raise ConfigurationError("dt_fine must satisfy 0 < dt_fine <= cfg.dt / 10")

    duration = w.duration
    n_last = step_count(duration, dt_fine)
    grid = np.arange(n_last + 1) * dt_fine
    if duration - grid[-1] > duration * 1e-12:
        grid = np.append(grid, duration)
        n_last += 1
    x = sample_at(w, w.t0 + np.minimum(grid, duration)).tolist()
    grid = grid.tolist()

    v_m = cfg.v_m
    v_h, v_l = cfg.v_h - COMPARATOR_RESOLUTION, cfg.v_l + COMPARATOR_RESOLUTION
    droop = cfg.droop_rate
    t_ref = cfg.t_ref
    cd, ld = cfg.comparator_delay, cfg.loop_delay

    ref = x[0]
    t_fold = 0.0
    gate_until = 0.0
    ev_t, ev_p, gates, folds = [], [], [], []

    j = 0
    prev = None
    while j <= n_last:
        t = grid[j]
        if t < gate_until:
            j = max(j + 1, int(math.ceil(gate_until / dt_fine - 1e-9)))
            if j > n_last and grid[n_last] >= gate_until:
                j = n_last
            prev = None
            continue
        v = v_m + (x[j] - ref) - droop * (t - t_fold)
        pol = None
        if prev is None:
            # first active step after the gate reopens
            if v >= v_h:
                pol, t_x = UP, gate_until
            elif v <= v_l:
                pol, t_x = DN, gate_until
        elif prev < v_h <= v:
            pol, t_x = UP, t
        elif prev > v_l >= v:
            pol, t_x = DN, t
        if pol is None:
            prev = v
            j += 1
            continue

        t_fold = t_x + ld
        if t_fold > duration:
            break
        ref = sample_at(w, w.t0 + t_fold)
        t_event = t_x + cd
        gate_until = t_fold + t_ref
        ev_t.append(t_event)
        ev_p.append(pol)
        folds.append((t_fold, ref))
        gates.append((t_event, min(t_event + t_ref, duration)))
        prev = None
        j += 1

    return SimulationTrace(
        spikes=SpikeTrain(ev_t, ev_p, duration, cfg),
        gate_off_intervals=np.array(gates, dtype=float).reshape(-1, 2),
        fold_history=np.array(folds, dtype=float).reshape(-1, 2),
        initial_reference=float(x[0]),
    )
