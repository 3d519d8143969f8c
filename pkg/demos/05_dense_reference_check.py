"""
Cross-checking against the dense reference
==========================================

The dense reference steps ten times finer than the main simulator and does
not interpolate: it puts each crossing at the first fine step past the
threshold. Counts match, but every late detection moves the fold a little
further along the input. That offset carries into the next crossing and
accumulates over a run of same-direction spikes. It is worst near the sine
peaks, where the slope is small.
"""

import numpy as np

from neuron_adc import AdcConfig, RefractoryModel, make_ramp, make_sinusoid, simulate, simulate_dense

cfg = AdcConfig(comparator_delay=0.0, loop_delay=0.0, refractory=RefractoryModel.constant(200e-9))
cases = {
    "ramp, 20 V/s": make_ramp(20.0, 5.5e-3, 1e6),
    "sine, 90 mV": make_sinusoid(0.09, 1e3, 0.0, 2.3e-3, 1e6, t0=1.7e-4),
    "sine, 640 mV": make_sinusoid(0.64, 1e3, 0.0, 2.3e-3, 1e6, t0=1.7e-4),
}
for name, w in cases.items():
    main = simulate(w, cfg)
    print(f"\n{name}: {main.spike_count} spikes")
    for div in (10, 100):
        dense = simulate_dense(w, cfg, cfg.dt / div)
        err = np.abs(main.spikes.times - dense.spikes.times) if dense.spike_count == main.spike_count else None
        worst = "count mismatch" if err is None else f"{err.max() / cfg.dt:.2f} dt"
        print(f"  reference at dt/{div:<3d}: {dense.spike_count} spikes, worst timing gap {worst}")
