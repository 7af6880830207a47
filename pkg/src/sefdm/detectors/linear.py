"""Zero-forcing front end: invert the carrier Gram matrix outright.

Solving M s0 = r recovers the transmitted symbols exactly in the absence
of noise, at the price of noise enhancement that grows with the condition
number of M.  The solve is carried out as two triangular-free dense solves
against F (first F^H w = r, then F s0 = w), which is the same linear map
as M^{-1} r but keeps the conditioning of a single F factor per step.

The hard-mapped version of this estimate is also what the sphere decoder
uses to open its initial search radius, and the iterative detector can
start from it instead of the raw correlator outputs.
"""

from __future__ import annotations

import numpy as np

from functools import lru_cache

from ..complexity import OpCount, OpCounter
from ..errors import IllConditionedError
from ..system import SefdmConfig, CarrierMatrices, carrier_matrix
from .base import SefdmDetectorBase
from .mapping import hard_map

_RCOND_FLOOR = 1e-12


@lru_cache(maxsize=128)
def _rcond_f(n: int, alpha: float) -> float:
    # The Gram matrix's condition saturates at 1/eps long before F is
    # actually singular, so the guard works from F's own singular values.
    from ..system import default_config

    f = carrier_matrix(default_config(n, alpha)).f_matrix
    return float(1.0 / np.linalg.cond(f))


def _check_invertible(matrices: CarrierMatrices, n: int, alpha: float) -> None:
    rcond = _rcond_f(n, float(alpha))
    if not (rcond >= _RCOND_FLOOR):
        raise IllConditionedError(n, alpha, rcond)


def _zf_solve(r2d: np.ndarray, matrices: CarrierMatrices) -> np.ndarray:
    f = matrices.f_matrix
    w = np.linalg.solve(f.conj().T, r2d.T)
    return np.linalg.solve(f, w).T


def initial_estimate(r, config: SefdmConfig) -> np.ndarray:
    """Zero-forcing symbol estimate from correlator outputs.

    Solves M s0 = r for each block (last axis = carriers).  At alpha = 1
    this is the identity.  Raises IllConditionedError when the carrier
    matrix cannot be inverted reliably.
    """
    from ..validation import as_2d_blocks

    matrices = carrier_matrix(config)
    _check_invertible(matrices, config.n_carriers, config.alpha)
    r2d, was_1d = as_2d_blocks(r, config.n_carriers, name="r")
    s0 = _zf_solve(r2d, matrices)
    return s0[0] if was_1d else s0


class ZeroForcingDetector(SefdmDetectorBase):
    """Zero-forcing solve followed by a hard nearest-point decision.

    Parameters
    ----------
    alpha : float
        Bandwidth compression factor.
    constellation : str or Constellation
        Symbol alphabet, "qam4" or "bpsk".
    n_carriers : int or None
        Carrier count; may instead be inferred from data passed to fit().
    count_ops : bool
        Record real-operation counts while detecting.
    """

    def __init__(self, alpha=1.0, constellation="qam4", n_carriers=None, count_ops=True):
        self.alpha = alpha
        self.constellation = constellation
        self.n_carriers = n_carriers
        self.count_ops = count_ops

    def _prepare(self) -> None:
        _check_invertible(self.matrices_, self.config_.n_carriers, self.config_.alpha)

    def _per_block_ops(self) -> OpCount:
        n = self.config_.n_carriers
        l_points = self.constellation_.size
        counter = OpCounter(True)
        # Two dense solves against F, charged as matrix-vector work.
        counter.complex_mul(2 * n * n)
        counter.complex_add(2 * n * (n - 1))
        counter.mapping(n, l_points)
        return counter.total()

    def _detect_batch(self, r2d: np.ndarray):
        raw = _zf_solve(r2d, self.matrices_)
        symbols = hard_map(raw, self.constellation_)
        blocks = r2d.shape[0]
        per_block = self._per_block_ops() if self.count_ops else None
        info = {
            "blocks": blocks,
            "raw": raw,
            "iterations_used": 1,
            "op_counts": per_block.scaled(blocks) if per_block else None,
            "op_counts_per_block": per_block,
            "metrics": self._residual_metrics(r2d, symbols),
        }
        return symbols, info
