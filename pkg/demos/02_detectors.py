"""
Detector models
===============

Binary (click / no-click) and photon-number-resolving detectors are both
diagonal in the Fock basis.  Efficiency eta acts as per-photon loss; dark
counts only change the vacuum coefficient.
"""

import numpy as np

from pdc_herald import DetectorModel, completeness_defect

n = np.arange(8)
for det in (DetectorModel("click", 0.6), DetectorModel("noclick", 0.6),
            DetectorModel("pnr", 0.6), DetectorModel("pnr", 0.6, herald_n=2),
            DetectorModel("click", 0.6, dark_count=0.01)):
    print(f"{det.label:8s} d={det.dark_count:<5} c_n = {np.round(det.series()(n), 4)}")

# %%
# The click/no-click pair and the resolved outcomes 0..N each form a complete POVM.
print("binary completeness defect:", completeness_defect(0.6, 50, "click"))
print("pnr completeness defect:   ", completeness_defect(0.6, 12, "pnr"))
