r"""Photon-number-diagonal detector POVMs.

Every outcome considered here is of the form
:math:`\hat\Pi = \sum_n c_n |n\rangle\langle n|` with :math:`0 \le c_n \le 1`.
A :class:`CoefficientSeries` evaluates :math:`c_n` lazily for arrays of
photon numbers and, where one exists, also carries the closed-form generating
function :math:`G(x) = \sum_n c_n x^n`.

Dark counts enter only through :math:`c_0`: a clicking outcome gets
:math:`c_0 = d` and the no-click outcome gets :math:`c_0 = 1 - d`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import comb

__all__ = [
    "CLICK",
    "NOCLICK",
    "PNR",
    "CUSTOM",
    "FAMILIES",
    "CoefficientSeries",
    "DetectorModel",
    "binary_coeffs",
    "pnr_coeffs",
    "custom_coeffs",
    "completeness_defect",
]

CLICK = "click"
NOCLICK = "noclick"
PNR = "pnr"
CUSTOM = "custom"
FAMILIES = (CLICK, NOCLICK, PNR, CUSTOM)


def _check_probability(name, value):
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class CoefficientSeries:
    """Diagonal POVM coefficients ``c_n`` for one detector outcome.

    ``func`` maps an integer array of photon numbers to coefficients.
    ``kind`` is the generating-function tag (``"click"``, ``"noclick"``,
    ``"pnr"`` or ``None``); tagged series can be summed in closed form.
    """

    func: Callable[[np.ndarray], np.ndarray]
    kind: str | None = None
    efficiency: float = 1.0
    dark_count: float = 0.0
    herald_n: int = 1
    label: str = field(default="custom", compare=False)

    def __call__(self, n):
        n_arr = np.asarray(n, dtype=np.int64)
        out = np.asarray(self.func(np.atleast_1d(n_arr)), dtype=float)
        return out.reshape(n_arr.shape) if n_arr.ndim else float(out.reshape(-1)[0])

    def coefficient(self, n: int) -> float:
        return self(int(n))

    def upto(self, n_max: int) -> np.ndarray:
        """``c_0 .. c_{n_max}`` as a float array."""
        return np.asarray(self(np.arange(n_max + 1)), dtype=float).reshape(-1)

    @property
    def has_closed_form(self) -> bool:
        return self.kind is not None

    def generating_sum(self, x: float) -> float:
        r"""Closed-form :math:`\sum_n c_n x^n` for ``0 <= x < 1``."""
        if self.kind is None:
            raise ValueError("series carries no generating-function tag")
        eta, d = self.efficiency, self.dark_count
        loss_x = (1.0 - eta) * x
        if self.kind == CLICK:
            # sum_{n>=1} [x^n - ((1-eta) x)^n], combined to avoid cancellation at small eta
            return d + eta * x / ((1.0 - x) * (1.0 - loss_x))
        if self.kind == NOCLICK:
            return (1.0 - d) + loss_x / (1.0 - loss_x)
        if self.kind == PNR:
            k = self.herald_n
            if k == 0:
                return (1.0 - d) + loss_x / (1.0 - loss_x)
            # sum_{N>=k} C(N,k) (1-eta)^{N-k} eta^k x^N = (eta x)^k / (1 - (1-eta) x)^{k+1}
            return d + (eta * x) ** k / (1.0 - loss_x) ** (k + 1)
        raise ValueError(f"unknown generating-function tag {self.kind!r}")


def binary_coeffs(eta: float, dark_count: float = 0.0, which: str = CLICK) -> CoefficientSeries:
    """Binary (on/off) detector: no-click ``(1-eta)^n``, click ``1 - (1-eta)^n``."""
    eta = _check_probability("efficiency", eta)
    d = _check_probability("dark_count", dark_count)
    loss = 1.0 - eta
    if which == CLICK:

        def func(n):
            c = -np.expm1(n * np.log1p(-eta)) if loss > 0 else (n > 0).astype(float)
            return np.where(n == 0, d, c)

    elif which == NOCLICK:

        def func(n):
            c = np.power(loss, n)
            return np.where(n == 0, 1.0 - d, c)

    else:
        raise ValueError(f"binary outcome must be {CLICK!r} or {NOCLICK!r}, got {which!r}")
    return CoefficientSeries(func, which, eta, d, 1 if which == CLICK else 0, label=which)


def pnr_coeffs(herald_n: int, eta: float, dark_count: float = 0.0) -> CoefficientSeries:
    """Photon-number-resolving outcome ``herald_n`` with independent per-photon loss."""
    if int(herald_n) != herald_n or herald_n < 0:
        raise ValueError(f"herald_n must be a non-negative integer, got {herald_n!r}")
    k = int(herald_n)
    eta = _check_probability("efficiency", eta)
    d = _check_probability("dark_count", dark_count)
    loss = 1.0 - eta

    def func(n):
        n = np.asarray(n, dtype=np.int64)
        out = np.zeros(n.shape, dtype=float)
        ok = n >= k
        m = n[ok]
        with np.errstate(divide="ignore", invalid="ignore"):
            # 0**0 = 1 handles the eta = 0 and eta = 1 corners
            out[ok] = comb(m, k, exact=False) * np.power(loss, m - k) * eta**k
        c0 = (1.0 - d) if k == 0 else d
        return np.where(n == 0, c0, out)

    return CoefficientSeries(func, PNR, eta, d, k, label=f"pnr{k}")


def custom_coeffs(values: Sequence[float], tail: float = 0.0) -> CoefficientSeries:
    """Explicit coefficients ``c_0 .. c_{m-1}``; every later ``c_n`` equals ``tail``."""
    vals = np.asarray([_check_probability("coefficient", v) for v in values], dtype=float)
    tail = _check_probability("tail", tail)

    def func(n):
        n = np.asarray(n, dtype=np.int64)
        out = np.full(n.shape, tail)
        inside = n < vals.size
        out[inside] = vals[n[inside]]
        return out

    return CoefficientSeries(func, None, float("nan"), float("nan"), -1, label=CUSTOM)


@dataclass(frozen=True)
class DetectorModel:
    """A detector family plus efficiency and dark-count probability.

    ``family`` is one of ``"click"``, ``"noclick"``, ``"pnr"`` (heralding on
    ``herald_n`` photons) or ``"custom"`` (explicit ``coefficients``).
    """

    family: str = PNR
    efficiency: float = 1.0
    dark_count: float = 0.0
    herald_n: int = 1
    coefficients: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown detector family {self.family!r}; expected one of {FAMILIES}")
        _check_probability("efficiency", self.efficiency)
        _check_probability("dark_count", self.dark_count)
        if int(self.herald_n) != self.herald_n or self.herald_n < 0:
            raise ValueError(f"herald_n must be a non-negative integer, got {self.herald_n!r}")
        if self.family == CUSTOM:
            if not self.coefficients:
                raise ValueError("custom detector needs a non-empty coefficient list")
            object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))

    @property
    def label(self) -> str:
        if self.family == PNR:
            return f"pnr{self.herald_n}"
        return self.family

    def series(self) -> CoefficientSeries:
        if self.family in (CLICK, NOCLICK):
            return binary_coeffs(self.efficiency, self.dark_count, self.family)
        if self.family == PNR:
            return pnr_coeffs(self.herald_n, self.efficiency, self.dark_count)
        return custom_coeffs(self.coefficients)


def completeness_defect(eta: float, n_check: int, family: str = PNR) -> float:
    """Worst ``|1 - sum over outcomes of c_n|`` for photon numbers ``n <= n_check``.

    For ``family="click"`` the outcomes are click/no-click; for ``"pnr"`` they
    are the resolved counts ``0..n_check``, which exhaust every outcome that
    ``n <= n_check`` photons can produce.
    """
    eta = _check_probability("efficiency", eta)
    if n_check < 1:
        raise ValueError("n_check must be >= 1")
    n = np.arange(n_check + 1)
    if family in (CLICK, NOCLICK):
        total = binary_coeffs(eta, 0.0, CLICK)(n) + binary_coeffs(eta, 0.0, NOCLICK)(n)
        return float(np.max(np.abs(1.0 - total)))
    if family != PNR:
        raise ValueError(f"completeness is defined for binary and pnr families, not {family!r}")
    worst = 0.0
    outcomes = [pnr_coeffs(k, eta)(n) for k in range(n_check + 1)]
    for m in range(n_check + 1):
        total = math.fsum(float(c[m]) for c in outcomes)
        worst = max(worst, abs(1.0 - total))
    return worst
