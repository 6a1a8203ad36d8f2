"""
Rate against fidelity, single mode
==================================

Heralding on a click trades fidelity for rate: with an ideal binary detector
p = x and F = 1 - x.  A resolving detector keeps F = 1 at eta = 1 and pays in
rate instead, peaking at p = 1/4.
"""

import numpy as np

from pdc_herald import DetectorModel, frontier

grid = np.array([0.2, 0.5, 0.88, 1.2, 2.0])
for det in (DetectorModel("click", 1.0), DetectorModel("click", 0.5),
            DetectorModel("pnr", 1.0), DetectorModel("pnr", 0.5)):
    print(f"{det.label} eta={det.efficiency}")
    for pt in frontier(det, grid):
        print(f"   r={pt.r:<5} p={pt.herald_prob:.5f} F={pt.fidelity:.5f}")

# %%
# The series and closed-form evaluators agree; both are available explicitly.
from pdc_herald import evaluate

det = DetectorModel("pnr", 0.7, dark_count=1e-3)
a, b = evaluate(0.9, det, method="series"), evaluate(0.9, det, method="closed_form")
print("series vs closed form:", a.heralding_probability - b.heralding_probability, a.fidelity - b.fidelity)
