"""Exhaustive maximum-likelihood detection over the correlator outputs.

Minimises || R - M s ||_2 over every candidate symbol vector s drawn from
the constellation.  The candidate count L^N explodes quickly, so a hard cap
(default 2^24) turns oversized requests into a SearchSpaceTooLargeError
instead of an unbounded run.  Ties take the candidate that enumerates
first, i.e. the lexicographically smallest index vector.

Candidate products M s are evaluated once per fit and the per-block metric
uses the expansion ||R - c||^2 = ||R||^2 - 2 Re<R, c> + ||c||^2, dropping
the constant ||R||^2 term.  Above a memory threshold the candidate table
is streamed in chunks instead of stored.
"""

from __future__ import annotations

import itertools

import numpy as np

from ..complexity import OpCounter
from ..errors import SearchSpaceTooLargeError
from .base import SefdmDetectorBase

_DEFAULT_CAP = 2**24
_STORE_LIMIT = 2**17


def _index_chunks(l_points: int, n: int, chunk: int):
    """Yield (start, index array) covering the L^N lexicographic grid."""
    total = l_points**n
    it = itertools.product(range(l_points), repeat=n)
    start = 0
    while start < total:
        size = min(chunk, total - start)
        block = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(it, size)),
            dtype=np.int64,
            count=size * n,
        ).reshape(size, n)
        yield start, block
        start += size


class MLDetector(SefdmDetectorBase):
    """Brute-force search over all constellation candidate vectors.

    Parameters
    ----------
    alpha : float
    constellation : str or Constellation
    n_carriers : int or None
    max_candidates : int
        Refuse to fit when L^N exceeds this cap.
    count_ops : bool
    """

    def __init__(
        self,
        alpha=1.0,
        constellation="qam4",
        n_carriers=None,
        max_candidates=_DEFAULT_CAP,
        count_ops=True,
    ):
        self.alpha = alpha
        self.constellation = constellation
        self.n_carriers = n_carriers
        self.max_candidates = max_candidates
        self.count_ops = count_ops

    def _prepare(self) -> None:
        n = self.config_.n_carriers
        l_points = self.constellation_.size
        total = l_points**n
        if total > self.max_candidates:
            raise SearchSpaceTooLargeError(total, self.max_candidates)
        self.n_candidates_ = total
        if total <= _STORE_LIMIT:
            chunks = list(_index_chunks(l_points, n, total))
            self._stored_ = [(s, self._products(idx)) for s, idx in chunks]
        else:
            self._stored_ = None

    def _products(self, index_chunk: np.ndarray):
        """(candidate symbols, M @ candidates, ||M c||^2) for an index chunk."""
        cands = self.constellation_.points[index_chunk]
        mc = self._gram_apply(cands)
        return cands, mc, np.sum(np.abs(mc) ** 2, axis=-1).real

    def _chunks(self):
        if self._stored_ is not None:
            yield from self._stored_
            return
        l_points = self.constellation_.size
        n = self.config_.n_carriers
        for start, idx in _index_chunks(l_points, n, _STORE_LIMIT):
            yield start, self._products(idx)

    def _detect_batch(self, r2d: np.ndarray):
        blocks, n = r2d.shape
        best_metric = np.full(blocks, np.inf)
        best_symbols = np.zeros((blocks, n), dtype=np.complex128)
        for _start, (cands, mc, mc_norm2) in self._chunks():
            cross = r2d @ mc.conj().T
            metric = mc_norm2[None, :] - 2.0 * cross.real
            arg = np.argmin(metric, axis=1)
            better = metric[np.arange(blocks), arg] < best_metric
            best_metric[better] = metric[better, arg[better]]
            best_symbols[better] = cands[arg[better]]

        counter = OpCounter(self.count_ops)
        # One residual-norm evaluation per candidate per block; the
        # candidate products themselves are a one-time fit cost.
        counter.real_ops(
            ra=4.0 * n * self.n_candidates_ * blocks,
            rm=2.0 * n * self.n_candidates_ * blocks,
        )
        total = counter.total() if self.count_ops else None
        info = {
            "blocks": blocks,
            "raw": best_symbols,
            "iterations_used": 1,
            "op_counts": total,
            "op_counts_per_block": total.scaled(1.0 / blocks) if total else None,
            "metrics": self._residual_metrics(r2d, best_symbols),
        }
        return best_symbols, info
