"""System configuration and the carrier/self-interference matrices.

The transmitter stacks ``n_carriers`` subcarriers at a fraction ``alpha`` of
the orthogonal spacing.  Column ``n`` of the carrier matrix F holds the time
samples of subcarrier ``n``:

    F[k, n] = exp(2j * pi * alpha * n * k / N) / sqrt(N),   k, n = 0 .. N-1.

The Gram matrix M = F^H F describes the inter-carrier interference seen at
the output of a bank of correlators.  It is Hermitian Toeplitz with a unit
diagonal, and collapses to the identity at alpha = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .constellations import Constellation, make_constellation


@dataclass(frozen=True)
class SefdmConfig:
    """Static description of one transmitter/receiver configuration.

    Attributes
    ----------
    n_carriers : int
        Number of subcarriers N, at least 2.
    alpha : float
        Bandwidth compression factor in (0, 1].  alpha = 1 is plain OFDM.
    constellation : Constellation
        Symbol alphabet used on every subcarrier.
    symbol_period : float
        Kept for dimensional bookkeeping; the sampled model normalises it
        to 1, and other values are rejected.
    """

    n_carriers: int
    alpha: float
    constellation: Constellation
    symbol_period: float = 1.0

    def __post_init__(self) -> None:
        if not isinstance(self.n_carriers, (int, np.integer)) or self.n_carriers < 2:
            raise ValueError(f"n_carriers must be an integer >= 2, got {self.n_carriers!r}")
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if self.symbol_period != 1.0:
            raise ValueError("the sampled model fixes symbol_period = 1")
        if not isinstance(self.constellation, Constellation):
            raise TypeError("constellation must be a Constellation instance")

    @property
    def bits_per_block(self) -> int:
        return self.n_carriers * self.constellation.bits_per_symbol

    @property
    def subcarrier_spacing(self) -> float:
        """Spacing between adjacent subcarriers in units of 1/symbol_period."""
        return self.alpha / self.symbol_period


def default_config(n_carriers: int, alpha: float, scheme: str = "qam4") -> SefdmConfig:
    """Convenience constructor used by the harness and the CLI."""
    return SefdmConfig(n_carriers, float(alpha), make_constellation(scheme))


@dataclass(frozen=True)
class CarrierMatrices:
    """Carrier matrix, its Gram matrix, and a conditioning summary.

    ``condition_estimate`` is the 2-norm condition number of the Gram
    matrix, computed from its singular values.  It is 1.0 exactly when
    the carriers are orthogonal and grows as alpha shrinks.
    """

    f_matrix: np.ndarray
    gram: np.ndarray
    condition_estimate: float


@lru_cache(maxsize=128)
def _build_matrices(n_carriers: int, alpha: float) -> CarrierMatrices:
    n = n_carriers
    k = np.arange(n)
    f = np.exp(2j * np.pi * alpha * np.outer(k, k) / n) / np.sqrt(n)
    gram = f.conj().T @ f
    # Force the structure that holds in exact arithmetic.
    gram = (gram + gram.conj().T) / 2.0
    np.fill_diagonal(gram, 1.0)
    cond = float(np.linalg.cond(gram))
    f.setflags(write=False)
    gram.setflags(write=False)
    return CarrierMatrices(f_matrix=f, gram=gram, condition_estimate=cond)


def carrier_matrix(config: SefdmConfig) -> CarrierMatrices:
    """Return the (cached) carrier matrices for a configuration.

    Matrices are immutable and shared between callers, so repeated sweep
    cells with the same (n_carriers, alpha) pay the construction cost once
    per process.
    """
    return _build_matrices(config.n_carriers, float(config.alpha))


def gram_entry(n_carriers: int, alpha: float, i: int, m: int) -> complex:
    """Closed-form entry M[i, m] of the Gram matrix.

    Off the diagonal this is the geometric-series sum
    (1 - exp(2j pi alpha (m - i))) / (N (1 - exp(2j pi alpha (m - i) / N))).
    Used as an independent cross-check of the matrix product.
    """
    if i == m:
        return 1.0 + 0.0j
    n = n_carriers
    delta = m - i
    num = 1.0 - np.exp(2j * np.pi * alpha * delta)
    den = 1.0 - np.exp(2j * np.pi * alpha * delta / n)
    return complex(num / (n * den))


def fast_transform_length(n_carriers: int, alpha: float) -> int | None:
    """Padded transform length Q = N / alpha, or None when it is not an integer.

    When Q is an integer the modulator is an inverse DFT of length Q applied
    to the zero-padded symbol vector, and the correlator bank is the matching
    forward DFT.  Both ends can then run on FFTs.
    """
    q = n_carriers / alpha
    q_int = round(q)
    if q_int >= n_carriers and abs(q - q_int) < 1e-9:
        return int(q_int)
    return None
