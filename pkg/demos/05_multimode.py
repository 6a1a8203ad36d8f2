"""
Spectrally multimode sources
============================

A source with Schmidt number K > 1 spreads its pairs over modes with
amplitudes r_k = B lambda_k.  A heralding click no longer selects one mode,
so even a perfect resolving detector loses fidelity.
"""

import numpy as np

from pdc_herald import DetectorModel, build_modes, mu_from_schmidt, multimode_herald, schmidt_number

det = DetectorModel("pnr", 1.0)
for k in (1, 2, 5, 10):
    mu = mu_from_schmidt(k)
    modes = build_modes(mu, 1.0)
    print(f"K={k:<3} mu={mu:.5f} modes kept={modes.k_max:4d} K_eff={schmidt_number(modes):.6f}")
    for b in (0.1, 0.68, 1.36):
        rep = multimode_herald(build_modes(mu, b), det)
        print(f"    B={b:<5} p={rep.heralding_probability:.5f} F={rep.fidelity:.5f}")

# %%
# At weak gain the fidelity of an ideal resolving herald tends to 1 - mu^2.
mu = mu_from_schmidt(2)
print("small-gain fidelity, K=2:", multimode_herald(build_modes(mu, 1e-4), det).fidelity, "vs", 1 - mu**2)
