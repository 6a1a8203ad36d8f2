"""
Twin-beam photon statistics
===========================

A single-mode down-converter emits photon pairs with thermal statistics,
P(n) = (1 - x) x^n with x = tanh^2 r.  The series is cut adaptively so the
discarded tail stays below the policy tolerance.
"""

import numpy as np

from pdc_herald import TruncationPolicy, adaptive_cutoff, mean_photon_number, squeezing_db, thermal_distribution

# A few squeezing amplitudes from weak to strong
for r in (0.1, 0.5, 0.8814, 1.5):
    d = thermal_distribution(r)
    print(f"r={r:<7} dB={squeezing_db(r):6.3f} <n>={mean_photon_number(r):8.4f} "
          f"N_max={d.n_max:5d} deficit={d.truncation_deficit:.1e}  P(0..3)={np.round(d.probs[:4], 5)}")

# %%
# The cutoff grows like log(tol)/log(x); the policy caps it, which bounds the
# largest squeezing the library will evaluate.
policy = TruncationPolicy()
print("cutoff at x=0.99:", adaptive_cutoff(0.99, policy))
print("largest supported x:", policy.max_pair_parameter())
