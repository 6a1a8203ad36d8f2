"""Brute-force reference values by exhaustive enumeration of Fock amplitudes.

Nothing here reuses the evaluators of the heralding modules: hyperbolic
functions are rebuilt from ``math.exp`` and ``math.expm1``, detector coefficients for a
:class:`DetectorModel` are recomputed from their defining formulas, and every
accumulation goes through ``math.fsum``.  It is slow on purpose.
"""

from __future__ import annotations

import math
from itertools import combinations_with_replacement
from dataclasses import dataclass
from typing import NamedTuple

from .detector_povm import CLICK, CUSTOM, NOCLICK, PNR, DetectorModel
from .errors import BudgetExceeded

__all__ = [
    "DEFAULT_BUDGET",
    "JointTruncation",
    "OracleResult",
    "literal_coefficient",
    "enumeration_size",
    "oracle_single_mode",
    "oracle_multimode",
    "multiset_h",
]

DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class JointTruncation:
    """Limits of the enumeration: photons per mode, number of modes, total photons."""

    per_mode_cutoff: int
    mode_count: int = 1
    total_cutoff: int | None = None
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        total = self.per_mode_cutoff if self.total_cutoff is None else self.total_cutoff
        object.__setattr__(self, "total_cutoff", total)
        for name in ("per_mode_cutoff", "mode_count", "total_cutoff"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


class OracleResult(NamedTuple):
    herald_prob: float
    fidelity: float | None
    total_distribution: list
    neglected: float


def _sech_tanh(r):
    # expm1 keeps tanh accurate at small r, where e - 1/e cancels
    e = math.exp(r)
    u = math.expm1(2.0 * r)
    return 2.0 / (e + 1.0 / e), u / (u + 2.0)


def literal_coefficient(det, n: int) -> float:
    """``c_n`` of a detector outcome, recomputed from its defining formula."""
    if not isinstance(det, DetectorModel):
        return float(det(n))
    eta, d = det.efficiency, det.dark_count
    if det.family == CLICK:
        return d if n == 0 else 1.0 - (1.0 - eta) ** n
    if det.family == NOCLICK:
        return 1.0 - d if n == 0 else (1.0 - eta) ** n
    if det.family == PNR:
        k = det.herald_n
        if n == 0:
            return 1.0 - d if k == 0 else d
        if n < k:
            return 0.0
        return math.comb(n, k) * (1.0 - eta) ** (n - k) * eta**k
    if det.family == CUSTOM:
        return det.coefficients[n] if n < len(det.coefficients) else 0.0
    raise ValueError(det.family)


def enumeration_size(per_mode_cutoff: int, mode_count: int, total_cutoff: int) -> int:
    """Number of occupation tuples with each entry <= cutoff and sum <= total."""
    ways = [1] + [0] * total_cutoff
    for _ in range(mode_count):
        nxt = [0] * (total_cutoff + 1)
        for s, w in enumerate(ways):
            if w:
                for n in range(min(per_mode_cutoff, total_cutoff - s) + 1):
                    nxt[s + n] += w
        ways = nxt
    return sum(ways)


def _tuples(cutoff, modes, total):
    """Occupation tuples in lexicographic order."""
    if modes == 0:
        yield ()
        return
    for n in range(min(cutoff, total) + 1):
        for rest in _tuples(cutoff, modes - 1, total - n):
            yield (n,) + rest


def oracle_single_mode(r: float, det, trunc: JointTruncation | int = 200) -> OracleResult:
    """Sum ``c_n |sech r tanh^n r|^2`` term by term up to the cutoff."""
    if isinstance(trunc, int):
        trunc = JointTruncation(trunc)
    cutoff = min(trunc.per_mode_cutoff, trunc.total_cutoff)
    if cutoff + 1 > trunc.budget:
        raise BudgetExceeded(f"{cutoff + 1} terms exceed budget {trunc.budget}")
    sech, tanh = _sech_tanh(r)
    probs = []
    amp = sech
    for n in range(cutoff + 1):
        probs.append(amp * amp)
        amp *= tanh
    weighted = [literal_coefficient(det, n) * q for n, q in enumerate(probs)]
    p = math.fsum(weighted)
    fid = weighted[1] / p if p > 0 and len(weighted) > 1 else None
    return OracleResult(p, fid, probs, 1.0 - math.fsum(probs))


def oracle_multimode(modes, det, trunc: JointTruncation) -> OracleResult:
    """Enumerate every per-mode occupation tuple ``(n_0, .., n_{K-1})``.

    ``modes`` is a sequence of squeezing amplitudes or any object with an
    ``r`` attribute holding them.  The tuple weight is
    ``|prod_k sech r_k tanh^{n_k} r_k|^2`` and the detector multiplies it by
    ``c_{sum n_k}``.  The fidelity is the conditional weight of one photon in
    mode 0 and vacuum elsewhere.
    """
    rs = [float(v) for v in getattr(modes, "r", modes)]
    if len(rs) > trunc.mode_count:
        raise ValueError(f"{len(rs)} modes given but truncation allows {trunc.mode_count}")
    size = enumeration_size(trunc.per_mode_cutoff, len(rs), trunc.total_cutoff)
    if size > trunc.budget:
        raise BudgetExceeded(f"{size} occupation tuples exceed budget {trunc.budget}")

    tables = []
    for r in rs:
        sech, tanh = _sech_tanh(r)
        amps, a = [], sech
        for _ in range(trunc.per_mode_cutoff + 1):
            amps.append(a)
            a *= tanh
        tables.append(amps)

    buckets = [[] for _ in range(trunc.total_cutoff + 1)]
    cutoff, k_last = trunc.per_mode_cutoff, len(rs) - 1

    # depth-first over (n_0, .., n_{K-1}) in lexicographic order
    def walk(k, amp, used):
        table = tables[k]
        for n in range(min(cutoff, trunc.total_cutoff - used) + 1):
            a = amp * table[n]
            if k == k_last:
                buckets[used + n].append(a * a)
            else:
                walk(k + 1, a, used + n)

    walk(0, 1.0, 0)
    single = 1.0
    for k, table in enumerate(tables):
        single *= table[1 if k == 0 else 0]
    single *= single

    dist = [math.fsum(b) for b in buckets]
    coeffs = [literal_coefficient(det, n) for n in range(len(dist))]
    p = math.fsum(c * q for c, q in zip(coeffs, dist))
    fid = coeffs[1] * single / p if p > 0 else None
    return OracleResult(p, fid, dist, 1.0 - math.fsum(dist))


def multiset_h(x, degree: int) -> float:
    """Complete homogeneous symmetric polynomial by listing every multiset."""
    terms = []
    for combo in combinations_with_replacement(range(len(x)), degree):
        t = 1.0
        for i in combo:
            t *= x[i]
        terms.append(t)
    return math.fsum(terms)
