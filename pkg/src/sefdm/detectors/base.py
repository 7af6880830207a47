"""Shared estimator plumbing for the block detectors.

Detectors follow the scikit-learn estimator protocol: constructor arguments
are stored verbatim, ``fit`` builds the derived state (carrier matrices,
factorizations) as trailing-underscore attributes, and ``predict`` maps a
batch of correlator outputs to symbol decisions.  ``fit`` can infer the
carrier count from the width of the array it is given, or run off the
``n_carriers`` constructor argument when called with no data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ..complexity import OpCount
from ..constellations import Constellation, make_constellation
from ..system import SefdmConfig, CarrierMatrices, carrier_matrix, fast_transform_length
from ..validation import as_2d_blocks


@dataclass
class DetectorResult:
    """Everything a detector can say about one block.

    ``symbols`` are the hard decisions, ``raw`` the final pre-decision
    complex vector (equal to ``symbols`` for detectors that only ever
    produce points).  ``per_iteration_undecided`` is empty for one-shot
    detectors.  ``op_counts`` is None when counting was disabled.
    """

    symbols: np.ndarray
    raw: np.ndarray
    iterations_used: int
    per_iteration_undecided: list[int]
    op_counts: OpCount | None
    metric: float
    diagnostics: dict[str, Any] = field(default_factory=dict)


class SefdmDetectorBase(BaseEstimator):
    """Base class wiring configuration, validation, and batch plumbing."""

    # Subclasses define __init__ storing their parameters, plus
    # _prepare(self) to build detector-specific fitted state and
    # _detect_batch(self, r) -> (symbols, info dict).

    def fit(self, X=None, y=None):
        """Build the carrier matrices and detector state.

        ``X`` is only used for its trailing-axis width; pass None to use
        the ``n_carriers`` constructor argument instead.
        """
        n = self._resolve_n(X)
        scheme = self.constellation
        constellation = (
            scheme if isinstance(scheme, Constellation) else make_constellation(scheme)
        )
        self.config_ = SefdmConfig(n, float(self.alpha), constellation)
        self.constellation_ = constellation
        self.matrices_ = carrier_matrix(self.config_)
        self.n_features_in_ = n
        self.fast_length_ = fast_transform_length(n, float(self.alpha))
        self._prepare()
        return self

    def _resolve_n(self, X) -> int:
        declared = getattr(self, "n_carriers", None)
        if X is not None:
            arr = np.asarray(X.r if hasattr(X, "r") else X)
            n = int(arr.shape[-1])
            if declared is not None and int(declared) != n:
                raise ValueError(
                    f"n_carriers={declared} but the data has {n} carriers"
                )
            return n
        if declared is None:
            raise ValueError("pass data to fit() or set n_carriers")
        return int(declared)

    def _check_fitted(self) -> None:
        if not hasattr(self, "config_"):
            raise NotFittedError(
                f"{type(self).__name__} is not fitted; call fit() first"
            )

    def _blocks(self, X) -> tuple[np.ndarray, bool]:
        self._check_fitted()
        return as_2d_blocks(X, self.config_.n_carriers, name="X")

    # Detection entry points -------------------------------------------------

    def predict(self, X) -> np.ndarray:
        """Hard symbol decisions, one row per block."""
        r, was_1d = self._blocks(X)
        symbols, _ = self._detect_batch(r)
        return symbols[0] if was_1d else symbols

    def predict_bits(self, X) -> np.ndarray:
        """Hard bit decisions via the constellation's Gray labels."""
        r, was_1d = self._blocks(X)
        symbols, _ = self._detect_batch(r)
        bits = self.constellation_.bits_from_symbols(symbols)
        return bits[0] if was_1d else bits

    def detect_batch(self, X) -> tuple[np.ndarray, dict[str, Any]]:
        """Decisions plus run diagnostics for a batch of blocks.

        The info dict always carries ``op_counts`` (an OpCount totalled
        over the batch, or None when counting is off), ``blocks``, and
        ``metrics`` (residual power per block); iterative and sphere
        detectors add their own entries.
        """
        r, _ = self._blocks(X)
        return self._detect_batch(r)

    def detect_block(self, r) -> DetectorResult:
        """Detect a single block and return the full result record."""
        blocks, _ = self._blocks(r)
        if blocks.shape[0] != 1:
            raise ValueError("detect_block takes exactly one block")
        symbols, info = self._detect_batch(blocks)
        per_block_ops = info.get("op_counts_per_block")
        undecided = info.get("per_iteration_undecided")
        diagnostics = {
            k: v
            for k, v in info.items()
            if k not in ("op_counts", "op_counts_per_block", "metrics",
                         "per_iteration_undecided", "blocks")
        }
        return DetectorResult(
            symbols=symbols[0],
            raw=info.get("raw", symbols)[0],
            iterations_used=info.get("iterations_used", 1),
            per_iteration_undecided=(
                [int(u[0]) for u in undecided] if undecided is not None else []
            ),
            op_counts=per_block_ops,
            metric=float(info["metrics"][0]),
            diagnostics=diagnostics,
        )

    def score(self, X, y) -> float:
        """Fraction of symbols decided correctly against reference blocks."""
        r, _ = self._blocks(X)
        truth, _ = as_2d_blocks(y, self.config_.n_carriers, name="y")
        symbols, _ = self._detect_batch(r)
        return float(np.mean(np.isclose(symbols, truth, atol=1e-9)))

    # Shared numerics ---------------------------------------------------------

    def _gram_apply(self, s: np.ndarray) -> np.ndarray:
        """M @ s for a batch: modulate then correlate, via FFTs when possible."""
        q = self.fast_length_
        if q is None:
            return s @ self.matrices_.gram.T
        n = self.config_.n_carriers
        x = np.fft.ifft(s, n=q, axis=-1)[..., :n] * (q / np.sqrt(n))
        return np.fft.fft(x, n=q, axis=-1)[..., :n] / np.sqrt(n)

    def _residual_metrics(self, r: np.ndarray, symbols: np.ndarray) -> np.ndarray:
        resid = r - self._gram_apply(symbols)
        return np.sum(np.abs(resid) ** 2, axis=-1)
