"""
Best operating point
====================

Maximise the heralding rate subject to a fidelity floor.  For an ideal
resolving detector with F_min = 1 the optimum sits at x = 1/2, one photon on
average, about 7.66 dB of squeezing.
"""

from pdc_herald import DetectorModel, Infeasible, mean_photon_number, optimal_r, squeezing_db

opt = optimal_r(DetectorModel("pnr", 1.0), 1.0)
print(f"r*={opt.r:.10f} p*={opt.herald_prob:.10f} F={opt.fidelity} "
      f"<n>={mean_photon_number(opt.r):.6f} {squeezing_db(opt.r):.4f} dB")
print(f"rounded r=0.88 gives {squeezing_db(0.88):.3f} dB")

# %%
# Lossy detection: the floor binds and the optimum moves to lower squeezing.
for eta, f_min in ((0.5, 0.9), (0.8, 0.95), (0.9, 0.99)):
    opt = optimal_r(DetectorModel("pnr", eta), f_min)
    print(f"eta={eta} F_min={f_min}: r*={opt.r:.6f} p*={opt.herald_prob:.6f} F={opt.fidelity:.6f}")

# %%
# A binary detector never reaches F = 1.
try:
    optimal_r(DetectorModel("click", 1.0), 1.0)
except Infeasible as err:
    print("binary, F_min=1:", err)
