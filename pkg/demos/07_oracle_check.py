"""
Checking against brute force
============================

The oracle enumerates Fock amplitudes term by term, with no shared code path.
Here it certifies a lossy resolving herald on a four-mode source.
"""

from pdc_herald import DetectorModel, build_modes, evaluate, multimode_herald
from pdc_herald.oracle import JointTruncation, oracle_multimode, oracle_single_mode

det = DetectorModel("pnr", 0.8)
rep, o = evaluate(0.7, det), oracle_single_mode(0.7, det)
print("single mode  dp =", rep.heralding_probability - o.herald_prob, " dF =", rep.fidelity - o.fidelity)

modes = build_modes(0.6, 1.0, 4, tail_tol=1.0)
o = oracle_multimode(modes, det, JointTruncation(60, 4, 60))
rep = multimode_herald(modes, det)
print("four modes   dp =", rep.heralding_probability - o.herald_prob, " dF =", rep.fidelity - o.fidelity,
      " neglected =", o.neglected)
