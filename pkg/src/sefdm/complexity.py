"""Arithmetic-complexity accounting: predictions and measured counts.

Costs are expressed in real additions (RA) and real multiplications (RM).
Predictions follow one fixed convention:

* complex multiplication: 4 RM + 2 RA
* complex addition:       2 RA
* one length-n DFT via FFT: n log2(n) RM + 3 n log2(n) RA, so a modulator
  IFFT plus correlator FFT of length q cost 2 q log2(q) RM + 6 q log2(q) RA
* nearest/soft mapping of one symbol against L points: L RA
* forming the length-N linear combination of one iteration: 4N RA + 2N RM

Closed forms per detected block (L = constellation size, q = N / alpha):

* exhaustive search:   RA = 2 L^N q (3 log2(q) + 2 alpha)
                       RM = 2 L^N q (log2(q) + alpha)
* sphere decoder:      the same with L^(gamma N) visited candidates,
                       0 < gamma <= 1 supplied by the caller
* iterative, per iteration:
                       RA = N (L + 4 + (6 / alpha) log2(q))
                       RM = N ((2 / alpha) log2(q) + 2)

Measured counts are accumulated by the detectors under the same per-event
rules while they run, so a fast-path iterative detector measures exactly
its prediction.  Detectors that organise the work differently from the
prediction's strategy (the exhaustive search precomputes all candidate
products once, for instance) measure what they actually do; the report
makes the gap visible instead of hiding it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import CountingDisabledError

_METHODS = ("iterative", "ml", "sd", "zf")


@dataclass(frozen=True)
class OpCount:
    """A bag of real additions and real multiplications."""

    real_additions: float = 0.0
    real_multiplications: float = 0.0

    def __add__(self, other: "OpCount") -> "OpCount":
        return OpCount(
            self.real_additions + other.real_additions,
            self.real_multiplications + other.real_multiplications,
        )

    def scaled(self, factor: float) -> "OpCount":
        return OpCount(self.real_additions * factor, self.real_multiplications * factor)

    def as_tuple(self) -> tuple[float, float]:
        return (self.real_additions, self.real_multiplications)


class OpCounter:
    """Mutable accumulator detectors feed while running.

    Each method charges one kind of event at the package-wide rates.  A
    disabled counter accepts charges and discards them; reading its total
    raises, which keeps "no counts" distinct from "zero ops".
    """

    __slots__ = ("enabled", "_ra", "_rm")

    def __init__(self, enabled: bool = True) -> None:
        self.enabled = enabled
        self._ra = 0.0
        self._rm = 0.0

    def real_ops(self, ra: float = 0.0, rm: float = 0.0) -> None:
        if self.enabled:
            self._ra += ra
            self._rm += rm

    def complex_mul(self, count: float) -> None:
        self.real_ops(ra=2.0 * count, rm=4.0 * count)

    def complex_add(self, count: float) -> None:
        self.real_ops(ra=2.0 * count)

    def transform(self, length: int, count: float = 1.0) -> None:
        """Charge ``count`` DFTs of the given length."""
        lg = math.log2(length)
        self.real_ops(ra=3.0 * length * lg * count, rm=length * lg * count)

    def mapping(self, n_symbols: float, l_points: int) -> None:
        self.real_ops(ra=float(n_symbols) * l_points)

    def combination(self, n_carriers: int, count: float = 1.0) -> None:
        """Per-iteration linear combination of drive, state and operator terms."""
        self.real_ops(ra=4.0 * n_carriers * count, rm=2.0 * n_carriers * count)

    def total(self) -> OpCount:
        if not self.enabled:
            raise CountingDisabledError("operation counting was disabled for this run")
        return OpCount(self._ra, self._rm)


def predicted_ops(
    method: str,
    n_carriers: int,
    alpha: float,
    l_points: int,
    iterations: int = 1,
    gamma: float | None = None,
) -> OpCount:
    """Closed-form operation count for one detected block.

    ``method`` is one of "iterative", "ml", "sd".  The iterative count is
    per iteration times ``iterations``; the sphere-decoder count needs the
    empirical exponent ``gamma``.  There is no closed form for "zf"; asking
    for it raises ValueError.
    """
    if method not in _METHODS:
        raise ValueError(f"method must be one of {_METHODS}, got {method!r}")
    n = n_carriers
    if n < 2 or not (0.0 < alpha <= 1.0) or l_points < 2:
        raise ValueError("need n_carriers >= 2, 0 < alpha <= 1, l_points >= 2")
    q = n / alpha
    lg = math.log2(q)
    if method == "iterative":
        if iterations < 1:
            raise ValueError("iterations must be >= 1")
        ra = n * (l_points + 4.0 + (6.0 / alpha) * lg) * iterations
        rm = n * ((2.0 / alpha) * lg + 2.0) * iterations
        return OpCount(ra, rm)
    if method == "zf":
        raise ValueError("no closed-form prediction is defined for the zf detector")
    if method == "ml":
        candidates = float(l_points) ** n
    else:
        if gamma is None or not (0.0 < gamma <= 1.0):
            raise ValueError("sd prediction needs gamma in (0, 1]")
        candidates = float(l_points) ** (gamma * n)
    ra = 2.0 * candidates * q * (3.0 * lg + 2.0 * alpha)
    rm = 2.0 * candidates * q * (lg + alpha)
    return OpCount(ra, rm)


def measure_ops(result) -> OpCount:
    """Extract the measured counts from a detector result.

    Raises CountingDisabledError when the run recorded none.
    """
    counts = getattr(result, "op_counts", None)
    if counts is None:
        raise CountingDisabledError("the detector run did not record operation counts")
    if isinstance(counts, OpCount):
        return counts
    ra, rm = counts
    return OpCount(float(ra), float(rm))


def sd_gamma_estimate(visited_nodes: float, n_carriers: int, l_points: int) -> float:
    """Empirical search exponent: visited ~ L^(gamma N).

    Clamped below at 0; values near 1 mean the sphere search degenerated
    toward exhaustive enumeration.
    """
    v = max(float(visited_nodes), 1.0)
    return math.log(v) / (n_carriers * math.log(l_points))


@dataclass(frozen=True)
class ComplexityReport:
    """Side-by-side predicted and measured counts for one detector run."""

    method: str
    n_carriers: int
    alpha: float
    predicted: OpCount
    measured: OpCount
    gamma_estimate: float | None = None
    notes: str = ""

    @property
    def ra_ratio(self) -> float:
        return _ratio(self.measured.real_additions, self.predicted.real_additions)

    @property
    def rm_ratio(self) -> float:
        return _ratio(self.measured.real_multiplications, self.predicted.real_multiplications)


def _ratio(measured: float, predicted: float) -> float:
    if predicted == 0.0:
        return math.nan
    return measured / predicted
