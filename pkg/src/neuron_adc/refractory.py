"""Refractory control voltage to refractory period mapping, and its calibration."""

from __future__ import annotations

import dataclasses
import io
import logging
import math
from dataclasses import dataclass
from typing import Iterable, TextIO, Union

from .errors import CalibrationError, FormatError, ParameterError

log = logging.getLogger(__name__)

SUPPLY_V = 0.6
CALIBRATION_HEADER = "v_ref_v,t_ref_s"

# Bisection bracket on the refractory period, seconds.
T_REF_BRACKET = (1e-9, 10e-3)
# Accepted off-fraction error of a calibration, as a fraction (0.5 percentage points).
OFF_FRACTION_TOL = 0.005
MIN_CALIBRATION_SPIKES = 20


@dataclass(frozen=True)
class RefractoryModel:
    """Exponential period model ``clamp(t_base * exp(-v_ref / v_scale), t_min, t_max)``.

    The defaults are placeholders. Calibrated values replace ``t_base``.
    """

    t_base: float = 1e-3
    v_scale: float = 0.060
    t_min: float = 100e-9
    t_max: float = 10e-3

    def __post_init__(self):
        for name in ("t_base", "v_scale", "t_min", "t_max"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"RefractoryModel.{name} must be finite and > 0, got {value!r}")
        if self.t_min > self.t_max:
            raise ParameterError("RefractoryModel requires t_min <= t_max")

    @classmethod
    def constant(cls, period, v_scale=0.060):
        """A model that returns ``period`` for every control voltage."""
        return cls(t_base=period, v_scale=v_scale, t_min=period, t_max=period)

    def with_period_at(self, v_ref, period):
        """Copy with ``t_base`` chosen so that ``v_ref`` maps to ``period``.

        The clamps are widened when they would hide the requested period.
        """
        t_base = period * math.exp(v_ref / self.v_scale)
        return dataclasses.replace(
            self,
            t_base=t_base,
            t_min=min(self.t_min, period),
            t_max=max(self.t_max, period),
        )


def refractory_period(m: RefractoryModel, v_ref, supply=SUPPLY_V):
    """Refractory period in seconds for control voltage ``v_ref``.

    Lower control voltage gives a longer period.
    """
    v_ref = float(v_ref)
    if not (0.0 <= v_ref <= supply):
        raise ParameterError(f"v_ref must lie in [0, {supply}] V, got {v_ref!r}")
    period = m.t_base * math.exp(-v_ref / m.v_scale)
    return min(max(period, m.t_min), m.t_max)


def _off_fraction_for(period, stimulus, cfg):
    from .core import simulate
    from .power import off_fraction

    dt = min(cfg.dt, period / 4)
    trial = dataclasses.replace(
        cfg,
        refractory=RefractoryModel.constant(period, cfg.refractory.v_scale),
        dt=dt,
    )
    trace = simulate(stimulus, trial)
    return off_fraction(trace), trace.spike_count


def calibrate_refractory(target_off_fraction, stimulus, cfg, *, tol=OFF_FRACTION_TOL, max_iter=80):
    """Find the refractory period that gates the comparators for a target fraction of time.

    Bisects on ``log(T_ref)`` over ``T_REF_BRACKET``. Each trial simulates
    ``stimulus`` with ``cfg`` and a fixed period; the simulation step is
    tightened to ``T_ref / 4`` when needed. The off-fraction grows with the
    period until it saturates, which is what makes bisection valid.

    Parameters
    ----------
    target_off_fraction : float
        Desired comparator off-time fraction, strictly between 0 and 1.
    stimulus : Waveform
        Input used for every trial run.
    cfg : AdcConfig
        Base configuration. Its refractory model is ignored.

    Returns
    -------
    float
        Refractory period in seconds.

    Raises
    ------
    CalibrationError
        If the target is not strictly inside (0, 1), is out of reach inside the
        bracket, or the solution produces fewer than 20 spikes.
    """
    target = float(target_off_fraction)
    if not (0.0 < target < 1.0):
        raise CalibrationError(f"target off-fraction must be strictly inside (0, 1), got {target!r}")

    lo, hi = T_REF_BRACKET
    f_hi, n_hi = _off_fraction_for(hi, stimulus, cfg)
    if f_hi < target - tol:
        raise CalibrationError(
            f"off-fraction saturates at {f_hi:.4f} below target {target:.4f} "
            f"(T_ref up to {hi:g} s)"
        )
    f_lo, n_lo = _off_fraction_for(lo, stimulus, cfg)
    if f_lo > target + tol:
        raise CalibrationError(
            f"off-fraction is already {f_lo:.4f} above target {target:.4f} at T_ref = {lo:g} s"
        )

    best = (abs(f_lo - target), lo, f_lo, n_lo)
    log_lo, log_hi = math.log(lo), math.log(hi)
    for _ in range(max_iter):
        mid = math.exp(0.5 * (log_lo + log_hi))
        f_mid, n_mid = _off_fraction_for(mid, stimulus, cfg)
        log.debug("calibrate_refractory: T_ref=%.6g s off=%.5f spikes=%d", mid, f_mid, n_mid)
        if abs(f_mid - target) < best[0]:
            best = (abs(f_mid - target), mid, f_mid, n_mid)
        if abs(f_mid - target) <= tol / 10:
            break
        if f_mid < target:
            log_lo = math.log(mid)
        else:
            log_hi = math.log(mid)
        if log_hi - log_lo < 1e-12:
            break

    err, period, achieved, spikes = best
    if err > tol:
        raise CalibrationError(
            f"bisection stalled at off-fraction {achieved:.4f} for target {target:.4f}"
        )
    if spikes < MIN_CALIBRATION_SPIKES:
        raise CalibrationError(
            f"stimulus yields only {spikes} spikes at the solution; need >= {MIN_CALIBRATION_SPIKES}"
        )
    return period


def save_calibration(pairs: Iterable, stream: TextIO):
    """Write ``(v_ref_v, t_ref_s)`` pairs as delimited text."""
    stream.write(CALIBRATION_HEADER + "\n")
    for v_ref, t_ref in pairs:
        stream.write(f"{float(v_ref)!r},{float(t_ref)!r}\n")


def load_calibration(text_stream: Union[TextIO, str]):
    """Read ``(v_ref_v, t_ref_s)`` pairs written by :func:`save_calibration`."""
    if isinstance(text_stream, str):
        text_stream = io.StringIO(text_stream)
    lines = text_stream.read().split("\n")
    if not lines or lines[0].strip() != CALIBRATION_HEADER:
        raise FormatError(f"line 1: expected header {CALIBRATION_HEADER!r}")
    pairs = []
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            v_ref, t_ref = (float(x) for x in line.split(","))
        except ValueError:
            raise FormatError(f"line {n}: cannot parse {line.strip()!r}") from None
        pairs.append((v_ref, t_ref))
    return pairs
