r"""Heralding a single-mode twin-beam source with a diagonal detector.

For a detector outcome :math:`\sum_n c_n |n\rangle\langle n|` on the idler and
pair parameter :math:`x = \tanh^2 r`,

* heralding probability  :math:`p = \operatorname{sech}^2 r \, G(x)`,
* heralded signal state  :math:`\rho_s(n) = c_n x^n / G(x)`,
* single-photon fidelity :math:`F = c_1 x / G(x)`,

where :math:`G(x) = \sum_n c_n x^n`.  :math:`G` is evaluated either by
truncated summation or, for detector families with a known generating
function, in closed form.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .detector_povm import CLICK, PNR, CoefficientSeries, DetectorModel
from .errors import DegenerateHerald, GridPointError, Infeasible, PDCError, UnsupportedFamily
from .fock_core import (
    PhotonDistribution,
    SqueezeParam,
    TruncationPolicy,
    adaptive_cutoff,
    as_squeeze,
    geometric_tail,
    pair_parameter,
    squeezing_from_pair_parameter,
)

__all__ = [
    "SERIES",
    "CLOSED_FORM",
    "HeraldReport",
    "FrontierPoint",
    "Optimum",
    "as_series",
    "generating_sum",
    "heralding_probability",
    "heralded_state",
    "single_photon_fidelity",
    "evaluate",
    "closed_form_report",
    "frontier",
    "golden_section_max",
    "optimal_r",
]

SERIES = "series"
CLOSED_FORM = "closed_form"
AUTO = "auto"

# smallest pair parameter probed by the optimizer; below it p is negligible
X_FLOOR = 1e-12


def as_series(det) -> CoefficientSeries:
    if isinstance(det, CoefficientSeries):
        return det
    if isinstance(det, DetectorModel):
        return det.series()
    raise TypeError(f"expected DetectorModel or CoefficientSeries, got {type(det).__name__}")


def _resolve_method(series: CoefficientSeries, method: str) -> str:
    if method == AUTO:
        return CLOSED_FORM if series.has_closed_form else SERIES
    if method == CLOSED_FORM and not series.has_closed_form:
        raise UnsupportedFamily(f"detector {series.label!r} has no closed-form generating function")
    if method not in (SERIES, CLOSED_FORM):
        raise ValueError(f"unknown method {method!r}")
    return method


def _series_terms(series: CoefficientSeries, x, policy: TruncationPolicy):
    """Terms ``c_n x^n`` up to a cutoff whose tail is small relative to the partial sum."""
    n_max = adaptive_cutoff(x.real if isinstance(x, complex) else x, policy)
    n = np.arange(n_max + 1)
    terms = series.upto(n_max) * np.power(x, n)
    xr = x.real if isinstance(x, complex) else x
    partial = float(np.sum(terms.real))
    # tighten to a relative criterion so ratios such as the fidelity stay accurate
    while n_max < policy.hard_cap and geometric_tail(xr, n_max) > policy.tolerance * partial:
        n_max = min(policy.hard_cap, 2 * n_max + 1)
        n = np.arange(n_max + 1)
        terms = series.upto(n_max) * np.power(x, n)
        partial = float(np.sum(terms.real))
    return terms


def generating_sum(det, x: float, policy: TruncationPolicy | None = None, method: str = AUTO) -> float:
    r""":math:`G(x) = \sum_n c_n x^n` by closed form or truncated summation."""
    series = as_series(det)
    policy = policy or TruncationPolicy()
    if _resolve_method(series, method) == CLOSED_FORM:
        return series.generating_sum(x)
    return math.fsum(_series_terms(series, x, policy))


@dataclass(frozen=True)
class HeraldReport:
    """Heralding probability, fidelity and heralded signal state for one configuration."""

    heralding_probability: float
    fidelity: float
    heralded_state: PhotonDistribution
    method: str


def _core(x, vacuum, series, policy, method):
    g = generating_sum(series, x, policy, method)
    p = min(1.0, max(0.0, vacuum * g))
    return p, g


def _fidelity(series, x, g):
    if g <= 0.0:
        raise DegenerateHerald("heralding probability is zero; the heralded state is undefined")
    return min(1.0, max(0.0, series.coefficient(1) * x / g))


def heralding_probability(p, det, policy: TruncationPolicy | None = None, method: str = AUTO) -> float:
    p = as_squeeze(p)
    x = pair_parameter(p)
    return _core(x, 1.0 / math.cosh(p.r) ** 2, as_series(det), policy or TruncationPolicy(), method)[0]


def single_photon_fidelity(p, det, policy: TruncationPolicy | None = None, method: str = AUTO) -> float:
    series = as_series(det)
    x = pair_parameter(p)
    g = generating_sum(series, x, policy or TruncationPolicy(), method)
    return _fidelity(series, x, g)


def heralded_state(p, det, policy: TruncationPolicy | None = None, method: str = AUTO) -> PhotonDistribution:
    """Signal photon-number distribution conditioned on the detector outcome."""
    series = as_series(det)
    policy = policy or TruncationPolicy()
    x = pair_parameter(p)
    terms = _series_terms(series, x, policy)
    if _resolve_method(series, method) == CLOSED_FORM:
        g = series.generating_sum(x)
    else:
        g = math.fsum(terms)
    if g <= 0.0:
        raise DegenerateHerald("heralding probability is zero; the heralded state is undefined")
    probs = terms / g
    return PhotonDistribution(probs, max(0.0, 1.0 - math.fsum(probs)))


def evaluate(p, det, policy: TruncationPolicy | None = None, method: str = AUTO) -> HeraldReport:
    p = as_squeeze(p)
    series = as_series(det)
    policy = policy or TruncationPolicy()
    method = _resolve_method(series, method)
    x = pair_parameter(p)
    prob, g = _core(x, 1.0 / math.cosh(p.r) ** 2, series, policy, method)
    fid = _fidelity(series, x, g)
    state = heralded_state(p, series, policy, method)
    return HeraldReport(prob, fid, state, method)


def closed_form_report(p, family, eta: float = 1.0, dark_count: float = 0.0,
                       policy: TruncationPolicy | None = None) -> HeraldReport:
    """Analytic report for a binary click detector or a PNR detector.

    ``family`` may be a family name (``"click"``, ``"noclick"`` or ``"pnr"``,
    the latter heralding on one photon) or a :class:`DetectorModel`.
    """
    if isinstance(family, DetectorModel):
        model = family
    elif family == "custom":
        raise UnsupportedFamily("custom coefficient series have no closed form")
    else:
        model = DetectorModel(family, eta, dark_count, herald_n=1)
    if model.family == "custom":
        raise UnsupportedFamily("custom coefficient series have no closed form")
    return evaluate(p, model, policy, CLOSED_FORM)


class FrontierPoint(NamedTuple):
    """One grid point of a rate/fidelity curve; ``fidelity`` is ``None`` when degenerate."""

    r: float
    fidelity: float | None
    herald_prob: float | None
    status: str = "ok"


def _frontier_point(r, series, policy, method, strict, index):
    try:
        x = pair_parameter(r)
        prob, g = _core(x, 1.0 / math.cosh(r) ** 2, series, policy, method)
        try:
            fid = _fidelity(series, x, g)
        except DegenerateHerald:
            return FrontierPoint(r, None, prob, "DegenerateHerald")
        return FrontierPoint(r, fid, prob)
    except PDCError as err:
        if strict:
            raise GridPointError(index, err) from err
        return FrontierPoint(r, None, None, type(err).__name__)


def frontier(det, r_grid: Iterable, policy: TruncationPolicy | None = None, method: str = AUTO,
             strict: bool = True, jobs: int = 1) -> list[FrontierPoint]:
    """Rate/fidelity pairs along a grid of squeezing amplitudes, in grid order.

    Points where the herald has zero probability are flagged rather than
    raised.  Any other per-point failure is raised as :class:`GridPointError`
    unless ``strict`` is false, in which case it is flagged in ``status``.
    """
    series = as_series(det)
    policy = policy or TruncationPolicy()
    method = _resolve_method(series, method)
    rs = [as_squeeze(r).r for r in r_grid]
    if not rs:
        raise ValueError("r grid is empty")
    args = [(r, series, policy, method, strict, i) for i, r in enumerate(rs)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda a: _frontier_point(*a), args))
    return [_frontier_point(*a) for a in args]


INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, a: float, b: float, tol: float = 1e-10) -> tuple[float, float]:
    """Bracket ``[lo, hi]`` of width <= ``tol`` around the maximum of unimodal ``f`` on ``[a, b]``.

    Ties go to the left end, i.e. towards smaller squeezing.
    """
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return a, b


class Optimum(NamedTuple):
    """Best heralding rate under a fidelity constraint.

    ``unbounded`` marks an optimum pinned at the largest pair parameter the
    truncation policy supports while ``p`` is still rising.
    """

    r: float
    x: float
    herald_prob: float
    fidelity: float
    unbounded: bool = False


def _bisect_boundary(pred, good, bad, iters=200):
    """Last point where ``pred`` holds between ``good`` (true) and ``bad`` (false)."""
    for _ in range(iters):
        mid = 0.5 * (good + bad)
        if mid in (good, bad):
            break
        if pred(mid):
            good = mid
        else:
            bad = mid
    return good


def optimal_r(det, f_min: float = 1.0, policy: TruncationPolicy | None = None,
              method: str = AUTO, tol: float = 1e-10) -> Optimum:
    """Maximise the heralding probability over squeezing subject to ``F >= f_min``.

    The search runs in the pair parameter ``x``: a dense scan locates the
    feasible interval (checked to be a single interval), golden-section search
    brackets the best rate inside it, and the stationary point is then
    polished by bisection on the complex-step derivative of ``p(x)``.
    """
    if not 0.0 <= f_min <= 1.0:
        raise ValueError(f"f_min must lie in [0, 1], got {f_min!r}")
    series = as_series(det)
    policy = policy or TruncationPolicy()
    method = _resolve_method(series, method)
    x_cap = policy.max_pair_parameter()
    c1 = series.coefficient(1)

    def gsum(x):
        return generating_sum(series, x, policy, method)

    def prob(x):
        return (1.0 - x) * gsum(x)

    def fid(x):
        g = gsum(x)
        return c1 * x / g if g > 0 else 0.0

    def feasible(x):
        return fid(x) >= f_min

    def dprob(x, h=1e-30):
        if method == CLOSED_FORM:
            z = complex(x, h)
            val = (1.0 - z) * series.generating_sum(z)
        else:
            val = (1.0 - complex(x, h)) * complex(np.sum(_series_terms(series, complex(x, h), policy)))
        return val.imag / h

    grid = np.unique(np.concatenate([
        np.geomspace(X_FLOOR, 1e-2, 241),
        np.linspace(1e-2, x_cap, 760),
    ]))
    fids = np.array([fid(x) for x in grid])
    ok = fids >= f_min

    if not ok.any():
        # the feasible set may be narrower than the scan spacing
        i = int(np.argmax(fids))
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
        a, b = golden_section_max(fid, lo, hi, tol=1e-14)
        x_best = 0.5 * (a + b)
        if fid(x_best) < f_min:
            raise Infeasible(
                f"maximum fidelity {fid(x_best):.15g} is below the requested {f_min:.15g}"
            )
        ok_idx = np.array([], dtype=int)
        left, right = x_best, x_best
    else:
        ok_idx = np.flatnonzero(ok)
        if ok_idx[-1] - ok_idx[0] + 1 != ok_idx.size:
            raise PDCError("feasible set {x : F(x) >= f_min} is not an interval")
        left, right = grid[ok_idx[0]], grid[ok_idx[-1]]

    i0, i1 = (ok_idx[0], ok_idx[-1]) if ok_idx.size else (None, None)
    if i0 is not None and i0 > 0:
        left = _bisect_boundary(feasible, left, grid[i0 - 1])
    elif i0 == 0:
        left = grid[0]
    if i1 is not None and i1 < grid.size - 1:
        right = _bisect_boundary(feasible, right, grid[i1 + 1])

    inside = grid[(grid >= left) & (grid <= right)]
    candidates = np.unique(np.concatenate([[left, right], inside]))
    probs = np.array([prob(x) for x in candidates])
    j = int(np.argmax(probs))
    lo = candidates[max(j - 1, 0)]
    hi = candidates[min(j + 1, candidates.size - 1)]
    a, b = golden_section_max(prob, lo, hi, tol=tol)
    x_best = 0.5 * (a + b)

    # polish the stationary point: p'(x) changes sign from + to - across it
    if lo < x_best < hi:
        d_lo, d_hi = dprob(lo), dprob(hi)
        if d_lo > 0 > d_hi:
            x_best = _bisect_boundary(lambda x: dprob(x) > 0, lo, hi)

    best = max([(prob(x), -x) for x in (left, right, x_best)])
    x_star = -best[1]
    p_star = prob(x_star)
    unbounded = bool(x_star >= x_cap and dprob(x_star) > 0)
    sq = squeezing_from_pair_parameter(x_star)
    return Optimum(sq.r, float(x_star), float(p_star), float(fid(x_star)), unbounded)
