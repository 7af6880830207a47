"""Exception types raised by the sefdm package."""


class SefdmError(Exception):
    """Base class for all sefdm-specific errors."""


class IllConditionedError(SefdmError):
    """The carrier matrix is too ill conditioned to invert reliably.

    Raised by the zero-forcing solve when the reciprocal condition number
    of the carrier matrix falls below the safety threshold.  The message
    names the offending configuration so sweep logs stay diagnosable.
    """

    def __init__(self, n_carriers: int, alpha: float, rcond: float) -> None:
        self.n_carriers = n_carriers
        self.alpha = alpha
        self.rcond = rcond
        super().__init__(
            f"carrier matrix not reliably invertible for n_carriers={n_carriers}, "
            f"alpha={alpha}: reciprocal condition {rcond:.3e} below 1e-12"
        )


class SearchSpaceTooLargeError(SefdmError):
    """Exhaustive search was requested over more candidates than the cap allows."""

    def __init__(self, n_candidates: int, cap: int) -> None:
        self.n_candidates = n_candidates
        self.cap = cap
        super().__init__(
            f"exhaustive search over {n_candidates} candidates exceeds the cap of {cap}"
        )


class FactorizationFailedError(SefdmError):
    """Cholesky factorization of the search Gram matrix failed."""


class CountingDisabledError(SefdmError):
    """Operation counts were requested from a detector run that did not record them."""
