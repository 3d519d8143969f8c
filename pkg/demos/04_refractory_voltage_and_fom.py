"""
Refractory voltage, power and figure of merit
=============================================

Raising the refractory control voltage shortens the refractory period, which
lets more spikes through. With gating off, total power then follows the spike
count.

The last part uses the high-rate configuration, whose loop delay is fitted so
that a 10 kHz input reaches 43.2 dB. At 229.8 nW that gives an energy per
conversion step just under 100 fJ.
"""

from importlib import resources

from neuron_adc import pipeline, refractory_period, simulate
from neuron_adc.config import default_config, parse_config

run = default_config()
run = run.replace(stimulus=run.stimulus.at_frequency(10e3), adc=run.adc.replace(gating_enabled=False))
values = [0.1, 0.15, 0.2, 0.25, 0.285]
rows = pipeline.run_sweep(run, "v_ref", values)
print("v_ref    T_ref     spikes  total power")
for v, r in zip(values, rows):
    t_ref = refractory_period(run.adc.refractory, v)
    print(f"{v * 1e3:4.0f} mV  {t_ref * 1e9:6.1f} ns  {r['spike_count']:6d}  {r['total_power_w'] * 1e9:.1f} nW")
# Below about 430 ns the period never blocks a crossing outright at 10 kHz;
# a late spike is only delayed by the catch-up rule, so counts stay flat.

high = parse_config(resources.files("neuron_adc").joinpath("data/anchored.cfg").read_text())
adc = high.adc.replace(gating_enabled=False, v_ref=0.285)
high = high.replace(adc=adc, stimulus=high.stimulus.at_frequency(10e3))
res = pipeline.analyze(simulate(high.stimulus.waveform(), adc), 10e3, high)
m = res.metrics
print(f"\nloop delay {adc.loop_delay * 1e9:.1f} ns: SNDR {m.sndr_db:.2f} dB, ENOB {m.enob_bits:.2f} bit, "
      f"{res.power.total * 1e9:.1f} nW, FoM {m.fom_j_per_conv * 1e15:.1f} fJ/conv")
