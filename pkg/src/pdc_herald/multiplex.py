"""Switched (multiplexed) arrays of heralded sources with lossless routing."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import Unreachable

__all__ = ["SwitchedSetup", "switched_probability", "sources_needed"]


@dataclass(frozen=True)
class SwitchedSetup:
    """``n`` identical sources, each heralding with probability ``nu`` per pulse."""

    nu: float
    n: int = 1

    def __post_init__(self):
        if not 0.0 <= self.nu <= 1.0:
            raise ValueError(f"nu must lie in [0, 1], got {self.nu!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"number of sources must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def probability(self) -> float:
        return switched_probability(self)


def switched_probability(setup, n: int | None = None) -> float:
    """Probability that at least one of ``n`` sources heralds: ``1 - (1 - nu)**n``.

    Accepts a :class:`SwitchedSetup` or ``(nu, n)``.
    """
    if not isinstance(setup, SwitchedSetup):
        setup = SwitchedSetup(setup, 1 if n is None else n)
    elif n is not None:
        raise TypeError("pass either a SwitchedSetup or (nu, n), not both")
    if setup.nu == 1.0:
        return 1.0
    return -math.expm1(setup.n * math.log1p(-setup.nu))


def sources_needed(nu: float, target: float) -> int:
    """Smallest ``n`` with ``1 - (1 - nu)**n > target`` (strict)."""
    if not 0.0 <= nu <= 1.0:
        raise ValueError(f"nu must lie in [0, 1], got {nu!r}")
    if not 0.0 <= target < 1.0:
        raise ValueError(f"target must lie in [0, 1), got {target!r}")
    if nu == 0.0:
        raise Unreachable("a source that never heralds cannot reach any target")
    if nu == 1.0 or target == 0.0:
        return 1
    n = max(1, math.ceil(math.log1p(-target) / math.log1p(-nu)))
    # the logarithm ratio can land on or next to an integer; settle it directly
    while n > 1 and switched_probability(nu, n - 1) > target:
        n -= 1
    while switched_probability(nu, n) <= target:
        n += 1
    return n
