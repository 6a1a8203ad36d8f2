"""Exception hierarchy shared by every module of the package."""


class PDCError(Exception):
    """Base class for all errors raised by :mod:`pdc_herald`."""


class TruncationCapExceeded(PDCError):
    """The photon-number cutoff needed for the requested tolerance exceeds ``hard_cap``."""

    def __init__(self, required, hard_cap):
        self.required = required
        self.hard_cap = hard_cap
        super().__init__(
            f"photon-number cutoff {required} needed, hard cap is {hard_cap}; "
            "squeezing too large for this tolerance"
        )


class DegenerateHerald(PDCError):
    """Conditioning on a heralding event that has zero probability."""


class UnsupportedFamily(PDCError):
    """No closed form is available for this detector family."""


class Infeasible(PDCError):
    """No squeezing value reaches the requested minimum fidelity."""


class ModeTailTooHeavy(PDCError):
    """The retained spectral modes leave too much squeezing in the discarded tail."""


class Unreachable(PDCError):
    """A multiplexing target cannot be reached with any number of sources."""


class BudgetExceeded(PDCError):
    """The brute-force enumeration would exceed its configured size budget."""


class GridPointError(PDCError):
    """An error raised while evaluating one point of a grid, tagged with its index."""

    def __init__(self, index, cause):
        self.index = index
        self.cause = cause
        super().__init__(f"grid point {index}: {type(cause).__name__}: {cause}")
