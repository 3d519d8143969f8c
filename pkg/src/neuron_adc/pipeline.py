"""End-to-end runs: analysis of a trace, parameter sweeps, anchor calibration
and oracle cross-checks. The command-line front end is a thin layer on top.
"""

from __future__ import annotations

import dataclasses
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Sequence, TextIO, Union

import numpy as np

from .config import RunConfig, Stimulus
from .core import SimulationTrace, gate_intervals_for, simulate
from .errors import CalibrationError, FormatError, NeuronAdcError, ParameterError
from .metrics import Metrics, compression_ratio, enob, fom, sndr
from .oracle import simulate_dense
from .power import PowerReport, calibrate_dynamic_energy, off_fraction, power_report
from .reconstruction import reconstruct
from .refractory import OFF_FRACTION_TOL, calibrate_refractory
from .signal import Waveform

log = logging.getLogger(__name__)

FFT_POINTS = 1 << 14
SWEEP_PARAMS = ("frequency", "v_ref")


def coherent_grid_rate(duration, f_in, points=FFT_POINTS):
    """Grid rate that puts ``points`` samples (a power of two) over ``duration``.

    A record holding a whole number of periods then lands on exact FFT bins.
    """
    while points / duration < 20 * f_in:
        points *= 2
    return points / duration


def nyquist_bits_for(amplitude, lsb):
    """Resolution ``M`` of a Nyquist converter with the same LSB over the full swing."""
    if amplitude <= 0:
        return 1
    return max(1, int(round(math.log2(2 * amplitude / lsb))))


@dataclass
class Analysis:
    metrics: Metrics
    power: PowerReport
    reconstruction: Waveform


def analyze(trace: SimulationTrace, f_in, run: RunConfig, grid_rate=None, nyquist_bits=None) -> Analysis:
    """Reconstruct ``trace`` and compute metrics plus the power report.

    FoM uses the total power and ``f_in`` as the bandwidth.
    """
    cfg = trace.config or run.adc
    if grid_rate is None:
        grid_rate = coherent_grid_rate(trace.duration, f_in)
    if nyquist_bits is None:
        nyquist_bits = nyquist_bits_for(run.stimulus.amplitude, cfg.lsb)
    power = power_report(trace, run.power, gating=cfg.gating_enabled)
    if trace.spike_count == 0:
        raise ParameterError("no spikes to reconstruct; SNDR is undefined")
    recon = reconstruct(trace, grid_rate)
    s = sndr(recon, f_in)
    e = enob(s)
    metrics = Metrics(
        sndr_db=s,
        enob_bits=e,
        fom_j_per_conv=fom(power.total, f_in, e) if power.total > 0 else math.nan,
        spike_count=trace.spike_count,
        mean_event_rate=trace.spike_count / trace.duration,
        compression_ratio=compression_ratio(trace.spikes, f_in, nyquist_bits, cfg.dt),
    )
    return Analysis(metrics, power, recon)


def trace_from_spikes(train, cfg, initial_reference=0.0) -> SimulationTrace:
    """Rebuild the gating history of a spike file from the configuration."""
    gates = gate_intervals_for(train.times, cfg.t_ref, train.duration)
    # fold voltages are not stored in spike files
    folds = np.column_stack([train.times, np.full(len(train), np.nan)])
    return SimulationTrace(train, gates, folds, float(initial_reference))


# -- sweeps ------------------------------------------------------------------

SWEEP_COLUMNS = ("sndr_db", "enob", "spike_count", "total_power_w", "off_fraction", "error")


def _sweep_point(args):
    run, param, value = args
    try:
        stim = run.stimulus
        adc = run.adc
        if param == "frequency":
            stim = stim.at_frequency(value)
        else:
            adc = adc.replace(v_ref=value)
        adc.check_input_frequency(stim.frequency)
        trace = simulate(stim.waveform(), adc)
        point = run.replace(adc=adc, stimulus=stim)
        power = power_report(trace, run.power, gating=adc.gating_enabled)
        try:
            a = analyze(trace, stim.frequency, point)
            s, e = a.metrics.sndr_db, a.metrics.enob_bits
        except NeuronAdcError as exc:
            s = e = math.nan
            log.warning("sweep %s=%g: %s", param, value, exc)
        return {
            "value": value,
            "sndr_db": s,
            "enob": e,
            "spike_count": trace.spike_count,
            "total_power_w": power.total,
            "off_fraction": power.off_fraction,
            "error": "",
        }
    except NeuronAdcError as exc:
        return {"value": value, "sndr_db": math.nan, "enob": math.nan, "spike_count": -1,
                "total_power_w": math.nan, "off_fraction": math.nan, "error": str(exc)}


def run_sweep(run: RunConfig, param, values: Sequence[float], jobs=1) -> List[dict]:
    """One row per value, in input order.

    ``param`` is ``"frequency"`` (stimulus keeps its periods and samples per
    period) or ``"v_ref"``. Failed points come back with a non-empty ``error``.
    """
    if param not in SWEEP_PARAMS:
        raise ParameterError(f"sweep parameter must be one of {SWEEP_PARAMS}, got {param!r}")
    values = [float(v) for v in values]
    if len(values) < 2:
        raise ParameterError("a sweep needs at least 2 values")
    tasks = [(run, param, v) for v in values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_point, tasks))
    return [_sweep_point(t) for t in tasks]


def format_sweep(param, rows) -> str:
    name = {"frequency": "frequency_hz", "v_ref": "v_ref_v"}[param]
    lines = [",".join((name,) + SWEEP_COLUMNS)]
    for r in rows:
        cells = [repr(r["value"])]
        for col in SWEEP_COLUMNS:
            v = r[col]
            cells.append(v.replace(",", ";") if isinstance(v, str) else repr(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# -- anchor calibration ------------------------------------------------------

ANCHOR_HEADER = "quantity,target,frequency_hz,v_ref_v,gating"
# fitting order within one pass
ANCHOR_QUANTITIES = ("off_fraction", "sndr_db", "total_power_w")
MAX_PASSES = 4
LOOP_DELAY_BRACKET = (1e-9, 1e-6)
SNDR_TOL_DB = 0.1


@dataclass(frozen=True)
class Anchor:
    quantity: str
    target: float
    frequency: float
    v_ref: float
    gating: bool


def parse_anchors(text_stream: Union[TextIO, str]) -> List[Anchor]:
    if isinstance(text_stream, str):
        text_stream = io.StringIO(text_stream)
    lines = text_stream.read().split("\n")
    if not lines or lines[0].strip() != ANCHOR_HEADER:
        raise FormatError(f"line 1: expected header {ANCHOR_HEADER!r}")
    anchors = []
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 5:
            raise FormatError(f"line {n}: expected 5 fields, got {len(parts)}")
        if parts[0] not in ANCHOR_QUANTITIES:
            raise FormatError(f"line {n}: unknown quantity {parts[0]!r}")
        try:
            anchors.append(Anchor(parts[0], float(parts[1]), float(parts[2]), float(parts[3]),
                                  parts[4].lower() in ("1", "true", "yes", "on")))
        except ValueError:
            raise FormatError(f"line {n}: cannot parse {line.strip()!r}") from None
    if not anchors:
        raise FormatError("anchors file lists no anchors")
    return anchors


@dataclass
class CalibrationRow:
    quantity: str
    target: float
    achieved: float
    ok: bool
    detail: str = ""


def _fit_dt(adc):
    # the simulation step must stay under a quarter of the shortest period
    return adc.replace(dt=min(adc.dt, adc.refractory.t_min / 4))


def fit_loop_delay(run: RunConfig, f_in, target_sndr_db, v_ref=None, gating=False, *, tol=SNDR_TOL_DB, max_iter=60):
    """Loop delay (comparator delay scaled along) that gives ``target_sndr_db`` at ``f_in``.

    SNDR falls as the loop delay grows, so this bisects over
    :data:`LOOP_DELAY_BRACKET`. Returns the updated :class:`AdcConfig`.
    """
    w = run.stimulus.at_frequency(f_in).waveform()
    ratio = run.adc.comparator_delay / run.adc.loop_delay if run.adc.loop_delay > 0 else 0.5
    base = run.adc.replace(gating_enabled=gating, v_ref=run.adc.v_ref if v_ref is None else v_ref)

    def measure(ld):
        adc = base.replace(loop_delay=ld, comparator_delay=ratio * ld)
        trace = simulate(w, adc)
        return analyze(trace, f_in, run.replace(adc=adc)).metrics.sndr_db

    lo, hi = LOOP_DELAY_BRACKET
    s_lo, s_hi = measure(lo), measure(hi)
    if not s_hi <= target_sndr_db <= s_lo:
        raise CalibrationError(
            f"target SNDR {target_sndr_db:g} dB is outside [{s_hi:.2f}, {s_lo:.2f}] dB "
            f"reachable with loop delays in {LOOP_DELAY_BRACKET}"
        )
    best, best_err = lo, abs(s_lo - target_sndr_db)
    for _ in range(max_iter):
        mid = math.sqrt(lo * hi)
        s_mid = measure(mid)
        err = abs(s_mid - target_sndr_db)
        if err < best_err:
            best, best_err = mid, err
        if err <= tol / 10:
            break
        if s_mid > target_sndr_db:
            lo = mid
        else:
            hi = mid
    if best_err > tol:
        raise CalibrationError(f"loop-delay fit stalled {best_err:.3f} dB away from {target_sndr_db:g} dB")
    return run.adc.replace(loop_delay=best, comparator_delay=ratio * best)


def _fit_anchor(run: RunConfig, a: Anchor, w):
    """Fit the parameter behind one anchor; returns the new config and a detail string."""
    if a.quantity == "off_fraction":
        probe = run.adc.replace(gating_enabled=a.gating, v_ref=a.v_ref)
        period = calibrate_refractory(a.target, w, probe)
        refr = run.adc.refractory.with_period_at(a.v_ref, period)
        adc = _fit_dt(dataclasses.replace(run.adc, refractory=refr, dt=min(run.adc.dt, period / 4)))
        return run.replace(adc=adc), f"t_ref_s={period!r}", (a.v_ref, period)
    if a.quantity == "sndr_db":
        adc = fit_loop_delay(run, a.frequency, a.target, a.v_ref, a.gating)
        return run.replace(adc=adc), f"loop_delay_s={adc.loop_delay!r}", None
    trace = simulate(w, run.adc.replace(gating_enabled=a.gating, v_ref=a.v_ref))
    energy = calibrate_dynamic_energy(a.target, trace, run.power.static_baseline, run.power.overhead_power, a.gating)
    power = dataclasses.replace(run.power, energy_per_event=energy)
    return run.replace(power=power), f"energy_per_event_j={energy!r}", None


def _measure_anchor(run: RunConfig, a: Anchor, w):
    adc = run.adc.replace(gating_enabled=a.gating, v_ref=a.v_ref)
    trace = simulate(w, adc)
    if a.quantity == "off_fraction":
        achieved = off_fraction(trace)
        return achieved, abs(achieved - a.target) <= OFF_FRACTION_TOL
    if a.quantity == "sndr_db":
        achieved = analyze(trace, a.frequency, run.replace(adc=adc)).metrics.sndr_db
        return achieved, abs(achieved - a.target) <= SNDR_TOL_DB
    achieved = power_report(trace, run.power, gating=a.gating).total
    return achieved, math.isclose(achieved, a.target, rel_tol=1e-9)


def calibrate_anchors(run: RunConfig, anchors: Sequence[Anchor]):
    """Fit the configuration to a set of anchors.

    Refractory and delay anchors shape the spike train and depend on each
    other, so they are refitted in turn until the ADC configuration stops
    changing (at most :data:`MAX_PASSES` rounds). Power anchors come last.
    Every achieved value is measured on the final configuration.

    Returns the calibrated :class:`RunConfig`, the achieved-vs-target rows and
    the ``(v_ref, t_ref)`` pairs found.
    """
    ordered = sorted(anchors, key=lambda a: ANCHOR_QUANTITIES.index(a.quantity))
    waves = [run.stimulus.at_frequency(a.frequency).waveform() for a in ordered]
    shaping = [i for i, a in enumerate(ordered) if a.quantity != "total_power_w"]
    coupled = len({ordered[i].quantity for i in shaping}) > 1
    details, errors, pairs = {}, {}, {}

    for _ in range(MAX_PASSES if coupled else 1):
        before = run.adc
        for i in shaping:
            try:
                run, details[i], pair = _fit_anchor(run, ordered[i], waves[i])
                errors.pop(i, None)
                if pair:
                    pairs[i] = pair
            except NeuronAdcError as exc:
                errors[i] = str(exc)
        if run.adc == before:
            break
    for i, a in enumerate(ordered):
        if a.quantity == "total_power_w":
            try:
                run, details[i], _ = _fit_anchor(run, a, waves[i])
            except NeuronAdcError as exc:
                errors[i] = str(exc)

    rows = []
    for i, a in enumerate(ordered):
        if i in errors:
            rows.append(CalibrationRow(a.quantity, a.target, math.nan, False, errors[i]))
            continue
        achieved, ok = _measure_anchor(run, a, waves[i])
        rows.append(CalibrationRow(a.quantity, a.target, achieved, ok, details[i]))
    return run, rows, [pairs[i] for i in sorted(pairs)]


def format_calibration_report(rows) -> str:
    lines = ["quantity,target,achieved,status,detail"]
    for r in rows:
        detail = r.detail.replace(",", ";")
        lines.append(f"{r.quantity},{r.target!r},{r.achieved!r},{'ok' if r.ok else 'FAILED'},{detail}")
    return "\n".join(lines) + "\n"


# -- oracle cross-check --------------------------------------------------------

@dataclass
class VerifyRow:
    stimulus: str
    main_count: int
    oracle_count: int
    max_abs_dt: float
    bound: float

    @property
    def delta_count(self):
        return abs(self.main_count - self.oracle_count)

    @property
    def ok(self):
        return self.delta_count == 0 and self.max_abs_dt <= self.bound


def compare_with_oracle(w: Waveform, cfg, name="input", dt_fine=None) -> VerifyRow:
    """Run both implementations and compare counts and event times."""
    main = simulate(w, cfg)
    dense = simulate_dense(w, cfg, dt_fine)
    a, b = main.spikes.times, dense.spikes.times
    n = min(a.size, b.size)
    max_dt = float(np.max(np.abs(a[:n] - b[:n]))) if n else 0.0
    return VerifyRow(name, a.size, b.size, max_dt, cfg.dt)


def verification_stimuli(run: RunConfig):
    """The configured stimulus plus a ramp climbing one LSB per millisecond."""
    stim = run.stimulus
    ramp = Stimulus(kind="ramp", amplitude=run.adc.lsb / 1e-3, frequency=stim.frequency,
                    duration=5.5e-3, sample_rate=1e6)
    return [(f"{stim.kind}", stim.waveform()), ("ramp", ramp.waveform())]


def verify(run: RunConfig) -> List[VerifyRow]:
    return [compare_with_oracle(w, run.adc, name) for name, w in verification_stimuli(run)]


def format_verify(rows) -> str:
    lines = ["stimulus,main_count,oracle_count,abs_delta_count,max_abs_dt_s,bound_s,status"]
    for r in rows:
        lines.append(
            f"{r.stimulus},{r.main_count},{r.oracle_count},{r.delta_count},"
            f"{r.max_abs_dt!r},{r.bound!r},{'ok' if r.ok else 'VIOLATION'}"
        )
    return "\n".join(lines) + "\n"
