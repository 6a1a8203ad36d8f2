r"""Photon statistics of a single-mode twin-beam squeezed state.

A two-mode squeezer with real amplitude :math:`r` emits

.. math::

    |\psi\rangle = \operatorname{sech} r \sum_n \tanh^n r \, |n_s, n_i\rangle,

so signal and idler each carry the thermal distribution
:math:`P(n) = (1 - x)\,x^n` with pair parameter :math:`x = \tanh^2 r`.

Infinite photon-number sums are truncated adaptively: every coefficient used
downstream lies in :math:`[0, 1]`, so the geometric tail
:math:`x^{N+1}/(1-x)` bounds whatever is dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import TruncationCapExceeded

__all__ = [
    "SqueezeParam",
    "TruncationPolicy",
    "PhotonDistribution",
    "as_squeeze",
    "pair_parameter",
    "mean_photon_number",
    "squeezing_db",
    "squeezing_from_pair_parameter",
    "geometric_tail",
    "adaptive_cutoff",
    "thermal_distribution",
]

DB_PER_NEPER = 20.0 / math.log(10.0)


@dataclass(frozen=True)
class SqueezeParam:
    """Real, non-negative two-mode squeezing amplitude ``r``."""

    r: float

    def __post_init__(self):
        r = float(self.r)
        if not math.isfinite(r) or r < 0:
            raise ValueError(f"squeezing amplitude must be finite and >= 0, got {self.r!r}")
        object.__setattr__(self, "r", r)

    @property
    def x(self) -> float:
        return pair_parameter(self)

    @property
    def mean_photons(self) -> float:
        return mean_photon_number(self)

    @property
    def db(self) -> float:
        return squeezing_db(self)


def as_squeeze(p) -> SqueezeParam:
    """Accept either a :class:`SqueezeParam` or a bare float amplitude."""
    return p if isinstance(p, SqueezeParam) else SqueezeParam(p)


@dataclass(frozen=True)
class TruncationPolicy:
    """How far infinite photon-number series are summed.

    ``tolerance`` bounds the neglected tail and ``hard_cap`` is the largest
    photon-number cutoff the evaluators will accept before giving up.
    """

    tolerance: float = 1e-12
    hard_cap: int = 4096

    def __post_init__(self):
        if not 0 < self.tolerance < 1:
            raise ValueError(f"tolerance must lie in (0, 1), got {self.tolerance!r}")
        if int(self.hard_cap) != self.hard_cap or self.hard_cap < 1:
            raise ValueError(f"hard_cap must be an integer >= 1, got {self.hard_cap!r}")
        object.__setattr__(self, "hard_cap", int(self.hard_cap))

    def max_pair_parameter(self) -> float:
        """Largest ``x`` whose adaptive cutoff still fits under ``hard_cap``."""
        n1 = self.hard_cap + 1
        log_tol = math.log(self.tolerance)

        # log of the tail bound at the cap, as a function of u = -log(1 - x)
        def excess(u):
            x = -math.expm1(-u)
            return n1 * math.log(x) + u - log_tol

        u = brentq(excess, 1e-12, 800.0, xtol=1e-15, rtol=1e-15)
        x = -math.expm1(-u)
        while geometric_tail(x, self.hard_cap) > self.tolerance:
            x = math.nextafter(x, 0.0)
        return x


@dataclass(frozen=True)
class PhotonDistribution:
    """Photon-number probabilities for ``n = 0..n_max`` plus the mass left out."""

    probs: np.ndarray
    truncation_deficit: float = 0.0

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probs must be a non-empty 1-d sequence")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "truncation_deficit", float(self.truncation_deficit))

    @property
    def n_max(self) -> int:
        return self.probs.size - 1

    def __getitem__(self, n: int) -> float:
        if n < 0:
            raise IndexError(n)
        return float(self.probs[n]) if n < self.probs.size else 0.0

    def __len__(self) -> int:
        return self.probs.size

    def mean(self) -> float:
        """Mean photon number of the retained entries (tail not included)."""
        return math.fsum(np.arange(self.probs.size) * self.probs)

    def total(self) -> float:
        return math.fsum(self.probs)


def pair_parameter(p) -> float:
    r"""Return :math:`x = \tanh^2 r`."""
    return math.tanh(as_squeeze(p).r) ** 2


def mean_photon_number(p) -> float:
    return math.sinh(as_squeeze(p).r) ** 2


def squeezing_db(p) -> float:
    """Squeezing in decibels, ``20 log10(e) * r`` (quadrature variance ratio ``exp(-2r)``)."""
    return DB_PER_NEPER * as_squeeze(p).r


def squeezing_from_pair_parameter(x: float) -> SqueezeParam:
    if not 0 <= x < 1:
        raise ValueError(f"pair parameter must lie in [0, 1), got {x!r}")
    return SqueezeParam(math.atanh(math.sqrt(x)))


def geometric_tail(x: float, n: int) -> float:
    r"""Upper bound :math:`x^{n+1}/(1-x)` on :math:`\sum_{m>n} c_m x^m` for :math:`c_m \le 1`."""
    if x == 0:
        return 0.0
    return math.exp((n + 1) * math.log(x) - math.log1p(-x))


def adaptive_cutoff(x: float, policy: TruncationPolicy | None = None) -> int:
    """Smallest ``N`` whose geometric tail bound does not exceed ``policy.tolerance``."""
    policy = policy or TruncationPolicy()
    if not 0 <= x < 1:
        raise ValueError(f"pair parameter must lie in [0, 1), got {x!r}")
    if x == 0:
        return 0
    tol = policy.tolerance
    guess = (math.log(tol) + math.log1p(-x)) / math.log(x) - 1.0
    n = max(0, math.ceil(guess) - 1)
    if n > policy.hard_cap + 1:
        raise TruncationCapExceeded(math.ceil(guess), policy.hard_cap)
    # the closed-form guess can be off by one in floating point
    while n > 0 and geometric_tail(x, n - 1) <= tol:
        n -= 1
    while geometric_tail(x, n) > tol:
        n += 1
    if n > policy.hard_cap:
        raise TruncationCapExceeded(n, policy.hard_cap)
    return n


def thermal_distribution(p, policy: TruncationPolicy | None = None) -> PhotonDistribution:
    r"""Thermal photon-number distribution :math:`\operatorname{sech}^2 r \tanh^{2n} r`."""
    p = as_squeeze(p)
    policy = policy or TruncationPolicy()
    x = pair_parameter(p)
    n_max = adaptive_cutoff(x, policy)
    vacuum = 1.0 / math.cosh(p.r) ** 2
    probs = vacuum * np.power(x, np.arange(n_max + 1))
    deficit = 0.0 if x == 0 else x ** (n_max + 1)
    return PhotonDistribution(probs, deficit)
