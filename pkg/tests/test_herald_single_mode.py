import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pdc_herald import (
    DegenerateHerald,
    DetectorModel,
    GridPointError,
    Infeasible,
    TruncationPolicy,
    UnsupportedFamily,
    closed_form_report,
    evaluate,
    frontier,
    heralded_state,
    heralding_probability,
    optimal_r,
    single_photon_fidelity,
)
from pdc_herald.herald_single_mode import golden_section_max

R_HALF = math.atanh(2**-0.5)
IDEAL_PNR = DetectorModel("pnr", 1.0)
IDEAL_CLICK = DetectorModel("click", 1.0)


def mp_herald(r, coeff, n_terms=400):
    """High-precision p and F by direct summation over the twin-beam expansion."""
    with mp.workdps(40):
        r = mp.mpf(r)
        s, t = mp.sech(r), mp.tanh(r)
        w = [coeff(n) * (s * t**n) ** 2 for n in range(n_terms)]
        p = mp.fsum(w)
        return float(p), float(w[1] / p) if p else None


def click_coeff(eta, d=0.0):
    return lambda n: mp.mpf(d) if n == 0 else 1 - (1 - mp.mpf(eta)) ** n


def pnr1_coeff(eta, d=0.0):
    return lambda n: mp.mpf(d) if n == 0 else n * (1 - mp.mpf(eta)) ** (n - 1) * mp.mpf(eta)


def test_heralding_probability_examples():
    assert heralding_probability(0.0, IDEAL_CLICK) == 0.0
    assert heralding_probability(R_HALF, IDEAL_PNR) == pytest.approx(0.25, abs=1e-15)
    expected, _ = mp_herald(0.88, click_coeff(1.0))
    assert heralding_probability(0.88, IDEAL_CLICK) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(0.4990282562, abs=1e-10)


def test_heralded_state_examples():
    st_ = heralded_state(0.7, IDEAL_PNR)
    assert st_[1] == pytest.approx(1.0, abs=1e-15)
    assert st_.total() == pytest.approx(1.0, abs=1e-15)
    st_ = heralded_state(R_HALF, IDEAL_CLICK)
    assert st_[0] == 0.0
    for n in range(1, 20):
        assert st_[n] == pytest.approx(0.5**n, rel=1e-12)
    dark = DetectorModel("click", 0.9, dark_count=0.01)
    st_ = heralded_state(0.0, dark)
    assert st_[0] == 1.0 and st_.n_max == 0


def test_degenerate_herald_is_an_error():
    with pytest.raises(DegenerateHerald):
        single_photon_fidelity(0.0, IDEAL_CLICK)
    with pytest.raises(DegenerateHerald):
        heralded_state(0.0, IDEAL_PNR)
    with pytest.raises(DegenerateHerald):
        evaluate(0.4, DetectorModel("click", 0.0))


def test_fidelity_examples():
    for r in (0.05, 0.5, 1.7):
        assert single_photon_fidelity(r, IDEAL_PNR) == 1.0
    _, expected = mp_herald(0.88, click_coeff(1.0))
    assert single_photon_fidelity(0.88, IDEAL_CLICK) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(0.5009717438, abs=1e-10)
    r = math.atanh(math.sqrt(0.5))
    f = single_photon_fidelity(r, DetectorModel("pnr", 0.5))
    _, oracle = mp_herald(r, pnr1_coeff(0.5))
    assert f == pytest.approx(0.5625, abs=1e-12)
    assert oracle == pytest.approx(0.5625, abs=1e-12)


def test_closed_form_report_examples():
    for r in (0.1, 0.9, 2.0):
        rep = closed_form_report(r, "click", 1.0)
        x = math.tanh(r) ** 2
        assert rep.heralding_probability == pytest.approx(x, abs=1e-14)
        assert rep.fidelity == pytest.approx(1 - x, abs=1e-14)
        rep = closed_form_report(r, "pnr", 1.0)
        assert rep.heralding_probability == pytest.approx(x * (1 - x), abs=1e-14)
        assert rep.fidelity == 1.0
    with pytest.raises(UnsupportedFamily):
        closed_form_report(0.5, "custom")
    with pytest.raises(UnsupportedFamily):
        evaluate(0.5, DetectorModel("custom", coefficients=[0, 1]), method="closed_form")


def test_closed_form_pnr_maximum():
    xs = np.linspace(0, 0.999, 100_001)
    p = xs * (1 - xs)
    i = int(np.argmax(p))
    assert xs[i] == pytest.approx(0.5, abs=1e-5)
    assert p[i] == pytest.approx(0.25, abs=1e-10)


def test_report_invariants():
    rep = evaluate(0.6, DetectorModel("pnr", 0.7, 0.01))
    assert 0 <= rep.heralding_probability <= 1
    assert 0 <= rep.fidelity <= 1
    assert rep.fidelity == pytest.approx(rep.heralded_state[1], abs=1e-12)
    assert rep.method == "closed_form"
    rep = evaluate(0.6, DetectorModel("custom", coefficients=[0.0, 0.9, 0.5, 0.2]))
    assert rep.method == "series"
    assert rep.fidelity == pytest.approx(rep.heralded_state[1], abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 2.0), st.one_of(st.just(0.0), st.floats(1e-9, 1.0)), st.floats(0.0, 0.1),
       st.sampled_from(["click", "pnr", "noclick"]))
def test_series_matches_closed_form(r, eta, d, family):
    det = DetectorModel(family, eta, d)
    p_s = heralding_probability(r, det, method="series")
    p_c = heralding_probability(r, det, method="closed_form")
    assert abs(p_s - p_c) < 1e-10
    if p_c > 0:
        f_s = single_photon_fidelity(r, det, method="series")
        f_c = single_photon_fidelity(r, det, method="closed_form")
        assert abs(f_s - f_c) < 1e-10


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-3, 3.0))
def test_ideal_binary_identity(r):
    rep = evaluate(r, IDEAL_CLICK)
    assert abs(rep.heralding_probability + rep.fidelity - 1) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-6, 2.5), st.floats(1e-9, 1.0))
def test_pnr1_fidelity_law(r, eta):
    x = math.tanh(r) ** 2
    f = single_photon_fidelity(r, DetectorModel("pnr", eta))
    assert abs(f - (1 - (1 - eta) * x) ** 2) < 1e-10


def test_ideal_binary_monotone():
    pts = frontier(IDEAL_CLICK, np.linspace(0.01, 3.0, 200))
    p = np.array([pt.herald_prob for pt in pts])
    f = np.array([pt.fidelity for pt in pts])
    assert np.all(np.diff(p) > 0)
    assert np.all(np.diff(f) < 0)


def test_frontier_examples():
    pts = frontier(IDEAL_CLICK, [0.1, 1.0])
    # F = sech^2 r, p = tanh^2 r
    assert pts[0].fidelity == pytest.approx(0.9900662908, abs=1e-10)
    assert pts[0].herald_prob == pytest.approx(0.0099337092, abs=1e-10)
    assert pts[1].fidelity == pytest.approx(0.4199743416, abs=1e-10)
    assert pts[1].herald_prob == pytest.approx(0.5800256584, abs=1e-10)
    (pt,) = frontier(IDEAL_PNR, [0.5])
    x = math.tanh(0.5) ** 2
    assert pt.fidelity == 1.0
    assert pt.herald_prob == pytest.approx(x * (1 - x), abs=1e-15)
    assert pt.herald_prob == pytest.approx(0.1679476963, abs=1e-10)
    (pt,) = frontier(IDEAL_PNR, [0.0])
    assert pt.status == "DegenerateHerald" and pt.fidelity is None and pt.herald_prob == 0.0


def test_frontier_order_and_jobs():
    grid = np.geomspace(0.01, 2.5, 57)
    serial = frontier(DetectorModel("pnr", 0.6), grid)
    threaded = frontier(DetectorModel("pnr", 0.6), grid, jobs=4)
    assert serial == threaded
    assert [pt.r for pt in serial] == list(grid)


def test_frontier_error_carries_index():
    det = DetectorModel("custom", coefficients=[0.0, 1.0, 1.0, 1.0])
    tight = TruncationPolicy(1e-12, 50)
    with pytest.raises(GridPointError) as info:
        frontier(det, [0.1, 0.5, 3.0], tight)
    assert info.value.index == 2
    pts = frontier(det, [0.1, 0.5, 3.0], tight, strict=False)
    assert pts[2].status == "TruncationCapExceeded" and pts[0].status == "ok"


def test_golden_section_max():
    a, b = golden_section_max(lambda x: -(x - 0.3) ** 2, 0.0, 1.0, tol=1e-9)
    assert b - a <= 1e-9
    assert 0.5 * (a + b) == pytest.approx(0.3, abs=1e-7)


def test_optimal_r_ideal_pnr():
    opt = optimal_r(IDEAL_PNR, 1.0)
    assert opt.r == pytest.approx(R_HALF, abs=1e-9)
    assert opt.r == pytest.approx(0.88, abs=0.005)
    assert opt.herald_prob == pytest.approx(0.25, abs=1e-9)
    assert opt.fidelity == pytest.approx(1.0, abs=1e-12)
    assert not opt.unbounded


def test_optimal_r_binary():
    opt = optimal_r(IDEAL_CLICK, 0.99)
    assert opt.x == pytest.approx(0.01, abs=1e-12)
    assert opt.herald_prob == pytest.approx(0.01, abs=1e-12)
    opt = optimal_r(IDEAL_CLICK, 0.0)
    assert opt.unbounded
    assert opt.x == pytest.approx(TruncationPolicy().max_pair_parameter())
    assert opt.herald_prob > 0.99
    with pytest.raises(Infeasible):
        optimal_r(IDEAL_CLICK, 1.0)
    with pytest.raises(Infeasible):
        optimal_r(DetectorModel("pnr", 0.9), 1.0)


def test_optimal_r_lossy_pnr_against_dense_scan():
    # F = (1 - x/2)^2 >= 0.9 binds at x = 2 (1 - sqrt 0.9)
    det = DetectorModel("pnr", 0.5)
    opt = optimal_r(det, 0.9)
    assert opt.x == pytest.approx(2 * (1 - math.sqrt(0.9)), abs=1e-12)
    x = opt.x
    p_oracle, f_oracle = mp_herald(math.atanh(math.sqrt(x)), pnr1_coeff(0.5))
    assert opt.herald_prob == pytest.approx(p_oracle, abs=1e-12)
    assert opt.fidelity == pytest.approx(0.9, abs=1e-12)
    xs = np.linspace(1e-6, 0.99, 20001)
    f = (1 - 0.5 * xs) ** 2
    p = (1 - xs) * 0.5 * xs / (1 - 0.5 * xs) ** 2
    assert opt.herald_prob >= p[f >= 0.9].max() - 1e-12


def test_optimal_r_with_dark_counts():
    det = DetectorModel("pnr", 0.8, dark_count=0.01)
    opt = optimal_r(det, 0.6)
    xs = np.linspace(1e-6, 0.99, 40001)
    g = 0.01 + 0.8 * xs / (1 - 0.2 * xs) ** 2
    f = 0.8 * xs / g
    p = (1 - xs) * g
    assert opt.fidelity >= 0.6 - 1e-12
    assert opt.herald_prob == pytest.approx(p[f >= 0.6].max(), abs=1e-6)
    assert opt.herald_prob >= p[f >= 0.6].max() - 1e-12
