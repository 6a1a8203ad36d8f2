"""The ten acceptance criteria, one test each, at their pinned tolerances.

Each test also enforces its runtime budget.  A summary line per criterion is
printed at the end of the pytest run (see ``conftest.py``) and to stdout.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from pdc_herald import (
    DetectorModel,
    TruncationPolicy,
    build_modes,
    complete_homogeneous,
    evaluate,
    mean_photon_number,
    multimode_herald,
    optimal_r,
    sources_needed,
    squeezing_db,
    switched_probability,
    total_photon_distribution,
)
from pdc_herald.oracle import JointTruncation, multiset_h, oracle_multimode, oracle_single_mode

R_STAR = math.atanh(2**-0.5)


@contextmanager
def budget(number, seconds):
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - t0
        print(f"criterion {number}: {'PASS' if ok and elapsed < seconds else 'FAIL'} in {elapsed:.2f} s")
    assert elapsed < seconds, f"runtime {elapsed:.2f} s exceeds {seconds} s"


def test_criterion_1_optimal_point():
    with budget(1, 1.0):
        opt = optimal_r(DetectorModel("pnr", 1.0, 0.0), 1.0)
        assert abs(opt.herald_prob - 0.25) < 1e-9
        assert abs(opt.fidelity - 1.0) < 1e-12
        assert abs(opt.r - R_STAR) < 1e-9
        assert abs(opt.r - 0.88) < 0.005


def test_criterion_2_derived_scalars():
    with budget(2, 1.0):
        opt = optimal_r(DetectorModel("pnr", 1.0, 0.0), 1.0)
        assert abs(mean_photon_number(opt.r) - 1.0) < 1e-9
        assert abs(squeezing_db(opt.r) - 7.6555) < 1e-3
        assert abs(squeezing_db(0.88) - 7.644) < 1e-3


def test_criterion_3_multiplexing():
    with budget(3, 1.0):
        assert sources_needed(0.25, 0.99) == 17
        assert switched_probability(0.25, 17) > 0.99


def test_criterion_4_ideal_binary_identity():
    with budget(4, 1.0):
        det = DetectorModel("click", 1.0, 0.0)
        for r in np.linspace(3.0 / 300, 3.0, 300):
            rep = evaluate(r, det)
            assert abs(rep.heralding_probability + rep.fidelity - 1) < 1e-12


def test_criterion_5_closed_form_vs_series():
    rng = np.random.default_rng(5)
    with budget(5, 5.0):
        for family in ("click", "pnr"):
            for r, eta, d in zip(rng.uniform(0, 2.5, 200), rng.uniform(0, 1, 200), rng.uniform(0, 0.1, 200)):
                det = DetectorModel(family, eta, d)
                s = evaluate(r, det, method="series")
                c = evaluate(r, det, method="closed_form")
                assert abs(s.heralding_probability - c.heralding_probability) < 1e-10
                assert abs(s.fidelity - c.fidelity) < 1e-10


def test_criterion_6_single_mode_oracle():
    rng = np.random.default_rng(6)
    families = [("click", 1), ("noclick", 0), ("pnr", 1), ("pnr", 2)]
    with budget(6, 10.0):
        for _ in range(50):
            family, k = families[rng.integers(len(families))]
            r = rng.uniform(0.01, 1.2)
            det = DetectorModel(family, rng.uniform(0.05, 1), rng.uniform(0, 0.05), herald_n=k)
            rep = evaluate(r, det)
            # 400 terms leave a tail below 1e-60 at r = 1.2
            o = oracle_single_mode(r, det, 400)
            assert o.neglected < 1e-13
            assert abs(rep.heralding_probability - o.herald_prob) < 1e-12
            assert abs(rep.fidelity - o.fidelity) < 1e-12


def _oracle_cutoff(modes, tail=1e-13):
    """Smallest total photon number whose neglected weight is below ``tail``."""
    dist = total_photon_distribution(modes, TruncationPolicy(tail / 10))
    below = np.nonzero(1 - np.cumsum(dist.probs) < tail)[0]
    return int(below[0]) if below.size else dist.n_max


def test_criterion_7_multimode_oracle():
    dets = [DetectorModel(f, eta) for f in ("click", "pnr") for eta in (0.7, 1.0)]
    with budget(7, 60.0):
        for mu in (0.3, 0.6):
            for b in (0.5, 1.0, 1.36):
                for k_max in (2, 4):
                    modes = build_modes(mu, b, k_max, tail_tol=1.0)
                    total = _oracle_cutoff(modes)
                    trunc = JointTruncation(total, k_max, total)
                    for det in dets:
                        o = oracle_multimode(modes, det, trunc)
                        assert o.neglected < 1e-12
                        rep = multimode_herald(modes, det)
                        assert abs(rep.heralding_probability - o.herald_prob) < 1e-10
                        assert abs(rep.fidelity - o.fidelity) < 1e-10
                        for n in range(7):
                            assert abs(rep.total_photon_distribution[n] - o.total_distribution[n]) < 1e-10


def test_criterion_8_symmetric_polynomials():
    rng = np.random.default_rng(8)
    with budget(8, 10.0):
        for _ in range(100):
            x = rng.uniform(0, 0.9, rng.integers(1, 6))
            h = complete_homogeneous(x, 6)
            for n in range(7):
                assert abs(h[n] - multiset_h(list(x), n)) < 1e-12


def test_criterion_9_single_mode_reduction():
    rng = np.random.default_rng(9)
    with budget(9, 5.0):
        for _ in range(50):
            r = rng.uniform(0.01, 2.0)
            det = DetectorModel(("click", "pnr")[rng.integers(2)], rng.uniform(0.05, 1), rng.uniform(0, 0.05))
            mm = multimode_herald(build_modes(0.0, r), det)
            sm = evaluate(r, det)
            assert abs(mm.heralding_probability - sm.heralding_probability) < 1e-12
            assert abs(mm.fidelity - sm.fidelity) < 1e-12


def test_criterion_10_fidelity_ceiling():
    rng = np.random.default_rng(10)
    det = DetectorModel("pnr", 1.0)
    with budget(10, 5.0):
        for _ in range(50):
            modes = build_modes(rng.uniform(0.01, 0.9), rng.uniform(0.01, 1.36))
            rep = multimode_herald(modes, det)
            assert abs(rep.fidelity - modes.x[0] / modes.x.sum()) < 1e-12
            assert np.count_nonzero(modes.r > 0) >= 2
            assert rep.fidelity < 1.0
