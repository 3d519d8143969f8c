"""``neuron-adc`` command-line front end.

Verbs: simulate, analyze, sweep, calibrate, verify. Every verb takes
``--config`` (default: the calibrated configuration shipped with the package)
and writes plain-text artifacts into ``--out``.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import pipeline
from .config import default_config, format_config, load_config
from .core import load_spikes, save_spikes, simulate
from .errors import NeuronAdcError, UnsupportedConfigurationError
from .metrics import Metrics, compression_ratio, format_rows
from .power import power_report
from .refractory import save_calibration
from .signal import load_waveform

log = logging.getLogger("neuron_adc")


class CliError(Exception):
    """Failure that should end the command with a message and exit code 1."""


def _load_run(args):
    run = load_config(args.config) if args.config else default_config()
    if getattr(args, "seed", None) is not None:
        run = run.replace(adc=run.adc.replace(rng_seed=args.seed))
    return run


def _out_dir(args) -> Path:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"{out}: cannot create output directory ({exc.strerror})") from None
    return out


def _write(path: Path, text: str):
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"{path}: cannot write ({exc.strerror})") from None


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"{path}: cannot read ({exc.strerror})") from None


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_simulate(args) -> int:
    run = _load_run(args)
    if args.input:
        w = load_waveform(_read(args.input))
    else:
        w = run.stimulus.waveform()
    trace = simulate(w, run.adc)
    out = _out_dir(args)
    with open(out / "spikes.csv", "w", newline="\n") as fh:
        save_spikes(trace.spikes, fh)
    power = power_report(trace, run.power, gating=run.adc.gating_enabled)
    summary = {
        "duration_s": trace.duration,
        "initial_reference_v": trace.initial_reference,
        "spike_count": trace.spike_count,
        "fold_count": int(trace.fold_history.shape[0]),
        "off_fraction": power.off_fraction,
        "gate_off_intervals_s": trace.gate_off_intervals.tolist(),
    }
    _write(out / "trace.json", _json(summary))
    print(f"{trace.spike_count} spikes over {trace.duration:g} s -> {out}")
    return 0


def _trace_summary(spikes_path: Path):
    side = spikes_path.with_name("trace.json")
    if not side.exists():
        return None
    try:
        return json.loads(side.read_text())
    except (OSError, ValueError) as exc:
        raise CliError(f"{side}: cannot read trace summary ({exc})") from None


def cmd_analyze(args) -> int:
    run = _load_run(args)
    if not args.input:
        raise CliError("analyze needs --input SPIKES.csv")
    spikes_path = Path(args.input)
    summary = _trace_summary(spikes_path)
    duration = summary["duration_s"] if summary else run.stimulus.duration
    v0 = summary["initial_reference_v"] if summary else run.stimulus.offset
    try:
        train = load_spikes(_read(spikes_path), duration=duration, config=run.adc)
    except NeuronAdcError as exc:
        raise CliError(f"{spikes_path}: {exc}") from None
    f_in = args.fin if args.fin else run.stimulus.frequency
    trace = pipeline.trace_from_spikes(train, run.adc, v0)
    out = _out_dir(args)

    if trace.spike_count == 0:
        nbits = pipeline.nyquist_bits_for(run.stimulus.amplitude, run.adc.lsb)
        power = power_report(trace, run.power, gating=run.adc.gating_enabled)
        metrics = Metrics(math.nan, math.nan, math.nan, 0, 0.0,
                          compression_ratio(train, f_in, nbits, run.adc.dt))
        doc = metrics.to_dict()
        doc["sndr_error"] = "no spikes to reconstruct; SNDR is undefined"
        doc["power"] = power.to_dict()
        _write(out / "metrics.json", _json(doc))
        _write(out / "metrics.csv", format_rows(metrics.rows() + power.rows()))
        raise CliError(f"{spikes_path}: spike file is empty; SNDR is undefined")

    result = pipeline.analyze(trace, f_in, run, grid_rate=args.grid_rate)
    doc = result.metrics.to_dict()
    doc["power"] = result.power.to_dict()
    _write(out / "metrics.json", _json(doc))
    _write(out / "metrics.csv", format_rows(result.metrics.rows() + result.power.rows()))
    m = result.metrics
    print(f"SNDR {m.sndr_db:.2f} dB, ENOB {m.enob_bits:.2f} bit, FoM {m.fom_j_per_conv * 1e15:.1f} fJ/conv")
    return 0


def _parse_values(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"--values: cannot parse {text!r} as a comma-separated list of numbers") from None


def cmd_sweep(args) -> int:
    run = _load_run(args)
    if not args.param or args.values is None:
        raise CliError("sweep needs --param and --values")
    rows = pipeline.run_sweep(run, args.param, _parse_values(args.values), jobs=args.jobs)
    out = _out_dir(args)
    _write(out / "sweep.csv", pipeline.format_sweep(args.param, rows))
    failed = [r for r in rows if r["error"]]
    for r in failed:
        log.error("point %s=%g failed: %s", args.param, r["value"], r["error"])
    if len(failed) == len(rows):
        raise CliError("every sweep point failed")
    print(f"{len(rows) - len(failed)}/{len(rows)} points -> {out / 'sweep.csv'}")
    return 0


def cmd_calibrate(args) -> int:
    run = _load_run(args)
    if not args.input:
        raise CliError("calibrate needs --input ANCHORS.csv")
    try:
        anchors = pipeline.parse_anchors(_read(args.input))
    except NeuronAdcError as exc:
        raise CliError(f"{args.input}: {exc}") from None
    run, rows, pairs = pipeline.calibrate_anchors(run, anchors)
    out = _out_dir(args)
    _write(out / "calibrated.cfg", format_config(run))
    with open(out / "calibration.csv", "w", newline="\n") as fh:
        save_calibration(pairs, fh)
    _write(out / "calibration_report.csv", pipeline.format_calibration_report(rows))
    sys.stdout.write(pipeline.format_calibration_report(rows))
    if not all(r.ok for r in rows):
        raise CliError("one or more calibration anchors were not reached")
    return 0


def cmd_verify(args) -> int:
    run = _load_run(args)
    if run.adc.input_offset_noise_sigma != 0:
        raise UnsupportedConfigurationError("verify needs a noise-free configuration (noise_sigma_v = 0)")
    rows = pipeline.verify(run)
    table = pipeline.format_verify(rows)
    sys.stdout.write(table)
    if args.out:
        _write(_out_dir(args) / "verify.csv", table)
    if not all(r.ok for r in rows):
        raise CliError("main simulator and dense reference disagree beyond the bound")
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
    "calibrate": cmd_calibrate,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="neuron-adc", description="Behavioral Neuron-ADC simulator")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_default="out"):
        p.add_argument("--config", metavar="PATH", help="flat key=value config (default: shipped calibration)")
        p.add_argument("--out", metavar="DIR", default=out_default, help="output directory")
        p.add_argument("--seed", metavar="N", type=int, help="override rng_seed")

    p = sub.add_parser("simulate", help="run the converter on a waveform")
    common(p)
    p.add_argument("--input", metavar="PATH", help="t_s,v waveform (default: configured stimulus)")

    p = sub.add_parser("analyze", help="reconstruct a spike file and compute metrics")
    common(p)
    p.add_argument("--input", metavar="PATH", help="t_s,polarity spike file")
    p.add_argument("--fin", metavar="HZ", type=float, help="input frequency (default: stimulus frequency)")
    p.add_argument("--grid-rate", metavar="HZ", type=float, help="reconstruction grid rate (default: coherent 16384-point grid)")

    p = sub.add_parser("sweep", help="sweep input frequency or refractory voltage")
    common(p)
    p.add_argument("--param", choices=pipeline.SWEEP_PARAMS)
    p.add_argument("--values", metavar="CSV-list")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")

    p = sub.add_parser("calibrate", help="fit refractory and energy parameters to anchors")
    common(p)
    p.add_argument("--input", metavar="PATH", help=f"anchors file with header {pipeline.ANCHOR_HEADER}")

    p = sub.add_parser("verify", help="cross-check the simulator against the dense reference")
    common(p, out_default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (CliError, NeuronAdcError) as exc:
        print(f"neuron-adc {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
