"""
Level crossings on a ramp and a sine
====================================

The converter compares the folded input against a window of +-1 LSB around
the midpoint. Every crossing emits an UP or DN spike and folds the input back
to the midpoint, so each spike stands for exactly one LSB of movement.
"""

import numpy as np

from neuron_adc import AdcConfig, RefractoryModel, make_ramp, make_sinusoid, simulate

# A 20 V/s ramp climbs one 20 mV level every millisecond. With no delays the
# spikes land exactly on the millisecond marks.
cfg = AdcConfig(comparator_delay=0.0, loop_delay=0.0, refractory=RefractoryModel.constant(10e-6), dt=1e-6)
ramp = make_ramp(20.0, 5.5e-3, 1e6)
trace = simulate(ramp, cfg)
print("ramp spikes (ms):", np.round(trace.spikes.times * 1e3, 9))

# A 640 mV sine spans 64 levels, crossed once going up and once going down:
# 128 spikes per period when the refractory period is short.
sine = make_sinusoid(0.64, 1e3, 0.0, 4e-3, 10e6)
fast = cfg.replace(refractory=RefractoryModel.constant(100e-9), dt=20e-9)
trace = simulate(sine, fast)
ups = int(np.sum(trace.spikes.polarities > 0))
print(f"sine: {trace.spike_count / 4:.1f} spikes per period ({ups} UP, {trace.spike_count - ups} DN)")

# Longer refractory periods blank the comparators after each spike. Once the
# input moves more than one LSB per period the converter falls behind and
# fires catch-up spikes every period instead.
for t_ref in (100e-9, 1e-6, 5e-6, 20e-6):
    c = fast.replace(refractory=RefractoryModel.constant(t_ref))
    n = simulate(sine, c).spike_count
    print(f"T_ref = {t_ref * 1e6:6.2f} us -> {n / 4:6.1f} spikes per period")

# The folded comparator input sits exactly at the midpoint at every fold.
tf, ref = trace.fold_history[10]
print(f"fold at {tf * 1e3:.6f} ms resets the reference to {ref * 1e3:.3f} mV")
