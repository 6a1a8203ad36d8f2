"""
Switched sources
================

n independent sources with per-pulse herald probability nu, routed without
loss, give 1 - (1 - nu)^n.  At the single-source optimum nu = 1/4, seventeen
sources beat 99 %.
"""

from pdc_herald import sources_needed, switched_probability

for n in (1, 2, 5, 10, 17):
    print(f"n={n:<3} P={switched_probability(0.25, n):.5f}")
for target in (0.9, 0.99, 0.999):
    print(f"target>{target}: {sources_needed(0.25, target)} sources")
