r"""Spectrally multimode twin-beam sources.

The source is a product of independent two-mode squeezers with amplitudes
:math:`r_k = B \lambda_k`, :math:`\lambda_k = \sqrt{1-\mu}\,\mu^k`. A detector
that cannot resolve frequency sees only the total photon number
:math:`N = \sum_k n_k`, whose distribution is

.. math::

    P(N) = A^2 h_N(x_0, x_1, \ldots), \qquad A^2 = \prod_k \operatorname{sech}^2 r_k,

with :math:`x_k = \tanh^2 r_k` and :math:`h_N` the complete homogeneous
symmetric polynomial of degree :math:`N`.  :math:`h_N` is generated from the
power sums :math:`p_i = \sum_k x_k^i` by Newton's identity
:math:`N h_N = \sum_{i=1}^N p_i h_{N-i}`; all terms are non-negative, so the
recursion is numerically stable.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateHerald, GridPointError, ModeTailTooHeavy, PDCError, TruncationCapExceeded
from .fock_core import PhotonDistribution, TruncationPolicy
from .herald_single_mode import FrontierPoint, as_series

__all__ = [
    "DEFAULT_MODE_TAIL",
    "ModeDistribution",
    "MultimodeHeraldReport",
    "build_modes",
    "modes_from_pair_parameters",
    "schmidt_number",
    "mu_from_schmidt",
    "complete_homogeneous",
    "total_photon_distribution",
    "multimode_herald",
    "multimode_frontier",
    "DEFAULT_B_MAX",
]

DEFAULT_MODE_TAIL = 1e-6
DEFAULT_B_MAX = 1.36


@dataclass(frozen=True)
class ModeDistribution:
    """Squeezing amplitudes of the retained broadband modes, strongest first.

    ``mu`` and ``gain`` are ``None`` when the modes were given directly
    rather than built from the exponential mode profile.
    """

    r: np.ndarray
    mu: float | None = None
    gain: float | None = None

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float).reshape(-1)
        if r.size == 0:
            raise ValueError("at least one mode is required")
        if not np.all(np.isfinite(r)) or np.any(r < 0):
            raise ValueError("mode amplitudes must be finite and non-negative")
        if np.any(np.diff(r) > 0):
            raise ValueError("mode amplitudes must be non-increasing")
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @property
    def k_max(self) -> int:
        return self.r.size

    @property
    def lambdas(self) -> np.ndarray:
        """Mode weights; equal to ``r / gain`` when built from a gain."""
        if self.gain:
            return self.r / self.gain
        if self.mu is not None:
            return math.sqrt(1.0 - self.mu) * self.mu ** np.arange(self.k_max)
        return self.r

    @property
    def x(self) -> np.ndarray:
        return np.tanh(self.r) ** 2

    @property
    def vacuum_prefactor(self) -> float:
        r""":math:`A^2 = \prod_k \operatorname{sech}^2 r_k`."""
        return math.exp(-2.0 * math.fsum(np.log(np.cosh(self.r))))


def build_modes(mu: float, gain: float, k_max: int | None = None,
                tail_tol: float = DEFAULT_MODE_TAIL) -> ModeDistribution:
    """Exponentially decaying mode profile with ``k_max`` retained modes.

    With ``k_max=None`` the smallest count with ``mu**k_max < tail_tol`` is
    used.  An explicit ``k_max`` leaving ``mu**k_max > tail_tol`` raises
    :class:`ModeTailTooHeavy`; pass ``tail_tol=1`` to study a deliberately
    truncated source.
    """
    if not 0.0 <= mu < 1.0:
        raise ValueError(f"mu must lie in [0, 1), got {mu!r}")
    if not (math.isfinite(gain) and gain >= 0):
        raise ValueError(f"gain must be finite and >= 0, got {gain!r}")
    if k_max is None:
        k_max = 1 if mu == 0 else max(1, math.floor(math.log(tail_tol) / math.log(mu)) + 1)
    elif int(k_max) != k_max or k_max < 1:
        raise ValueError(f"k_max must be an integer >= 1, got {k_max!r}")
    k_max = int(k_max)
    tail = mu**k_max
    if tail > tail_tol:
        raise ModeTailTooHeavy(
            f"mu**k_max = {tail:.3g} exceeds the mode-tail tolerance {tail_tol:.3g}; "
            "retain more modes"
        )
    lam = math.sqrt(1.0 - mu) * mu ** np.arange(k_max)
    return ModeDistribution(gain * lam, mu, gain)


def modes_from_pair_parameters(x: Sequence[float]) -> ModeDistribution:
    """Modes with prescribed pair parameters ``x_k = tanh^2 r_k`` (sorted descending)."""
    xs = np.sort(np.asarray(x, dtype=float))[::-1]
    if np.any(xs < 0) or np.any(xs >= 1):
        raise ValueError("pair parameters must lie in [0, 1)")
    return ModeDistribution(np.arctanh(np.sqrt(xs)))


def schmidt_number(modes: ModeDistribution | Sequence[float]) -> float:
    r"""Effective mode number :math:`(\sum\lambda_k^2)^2 / \sum\lambda_k^4`.

    Scale invariant, so it equals :math:`1/\sum\lambda_k^4` for a profile
    normalised to :math:`\sum\lambda_k^2 = 1`.
    """
    lam = modes.lambdas if isinstance(modes, ModeDistribution) else np.asarray(modes, dtype=float)
    l2 = lam**2
    s4 = math.fsum(l2**2)
    if s4 == 0:
        raise ValueError("all mode weights vanish")
    return math.fsum(l2) ** 2 / s4


def mu_from_schmidt(k_eff: float) -> float:
    """Decay parameter giving effective mode number ``k_eff`` for an untruncated profile."""
    if not k_eff >= 1:
        raise ValueError(f"effective mode number must be >= 1, got {k_eff!r}")
    return math.sqrt((k_eff - 1.0) / (k_eff + 1.0))


def complete_homogeneous(x: Sequence[float], n_max: int) -> np.ndarray:
    """``h_0 .. h_{n_max}`` of the variables ``x`` via Newton's identities."""
    x = np.asarray(x, dtype=float).reshape(-1)
    powers = np.empty(n_max + 1)
    powers[0] = x.size
    xi = np.ones_like(x)
    for i in range(1, n_max + 1):
        xi = xi * x
        powers[i] = xi.sum()
    h = np.zeros(n_max + 1)
    h[0] = 1.0
    for n in range(1, n_max + 1):
        h[n] = np.dot(powers[1 : n + 1], h[n - 1 :: -1][:n]) / n
    return h


def _total_weights(modes: ModeDistribution, policy: TruncationPolicy, series=None):
    """``A^2``, ``h_0 .. h_M`` and the neglected probability ``1 - A^2 sum h``.

    ``M`` grows until the tail bound ``h_M (1 - A^2)`` (from
    ``h_{M+m} <= h_M h_m``) is below ``policy.tolerance``; with a detector
    ``series`` it must also be below ``tolerance`` times the partial heralding
    probability, so that conditional quantities stay accurate.
    """
    a2 = modes.vacuum_prefactor
    x = modes.x
    if not np.any(x > 0):
        return a2, np.ones(1), 0.0
    n_max = 64
    while True:
        n_max = min(n_max, policy.hard_cap)
        h = complete_homogeneous(x, n_max)
        bound = h[-1] * (1.0 - a2)
        absolute_ok = bound <= policy.tolerance
        if series is not None and absolute_ok:
            partial = a2 * math.fsum(series.upto(n_max) * h)
            done = partial == 0.0 or bound <= policy.tolerance * partial
        else:
            done = absolute_ok
        if done or (absolute_ok and n_max >= policy.hard_cap):
            break
        if n_max >= policy.hard_cap:
            raise TruncationCapExceeded(n_max + 1, policy.hard_cap)
        n_max *= 2
    if series is None:
        # shortest prefix that still meets the bound
        tail = h * (1.0 - a2)
        keep = int(np.argmax(tail <= policy.tolerance)) + 1
        h = h[:keep]
    return a2, h, max(0.0, 1.0 - math.fsum(a2 * h))


def total_photon_distribution(modes: ModeDistribution, policy: TruncationPolicy | None = None):
    """Total photon-number distribution ``P(N)`` summed over all modes."""
    a2, h, deficit = _total_weights(modes, policy or TruncationPolicy())
    return PhotonDistribution(a2 * h, deficit)


@dataclass(frozen=True)
class MultimodeHeraldReport:
    heralding_probability: float
    fidelity: float
    total_photon_distribution: PhotonDistribution
    vacuum_prefactor: float


def multimode_herald(modes: ModeDistribution, det, policy: TruncationPolicy | None = None) -> MultimodeHeraldReport:
    """Heralding probability and fidelity to a single photon in the strongest mode.

    The detector applies ``c_N`` to the total photon number.  ``F`` is
    ``c_1 x_0 / sum_N c_N h_N``.
    """
    policy = policy or TruncationPolicy()
    series = as_series(det)
    a2, h, deficit = _total_weights(modes, policy, series)
    c = series.upto(h.size - 1)
    norm = math.fsum(c * h)
    p = min(1.0, max(0.0, a2 * norm))
    if norm <= 0.0:
        raise DegenerateHerald("heralding probability is zero; the heralded state is undefined")
    fid = min(1.0, max(0.0, series.coefficient(1) * float(modes.x[0]) / norm))
    return MultimodeHeraldReport(p, fid, PhotonDistribution(a2 * h, deficit), a2)


def multimode_frontier(mu: float, b_grid: Iterable[float] | None, det, policy: TruncationPolicy | None = None,
                       k_max: int | None = None, tail_tol: float = DEFAULT_MODE_TAIL,
                       strict: bool = True, jobs: int = 1) -> list[FrontierPoint]:
    """Rate/fidelity pairs over optical gains ``B`` at fixed ``mu``, in grid order.

    ``FrontierPoint.r`` holds the gain ``B`` of each point.  The default grid
    is 200 points on ``(0, 1.36]``.
    """
    policy = policy or TruncationPolicy()
    series = as_series(det)
    if b_grid is None:
        b_grid = np.linspace(DEFAULT_B_MAX / 200, DEFAULT_B_MAX, 200)
    bs = [float(b) for b in b_grid]
    if not bs:
        raise ValueError("gain grid is empty")

    def point(args):
        i, b = args
        try:
            modes = build_modes(mu, b, k_max, tail_tol)
            try:
                rep = multimode_herald(modes, series, policy)
            except DegenerateHerald:
                return FrontierPoint(b, None, 0.0, "DegenerateHerald")
            return FrontierPoint(b, rep.fidelity, rep.heralding_probability)
        except PDCError as err:
            if strict:
                raise GridPointError(i, err) from err
            return FrontierPoint(b, None, None, type(err).__name__)

    items = list(enumerate(bs))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(point, items))
    return [point(it) for it in items]
