"""Iterative detection with per-iteration soft mapping.

Write the correlator output as R = M S + noise.  The detector runs the
fixed-point iteration

    S_k = Q( lam * R + (I - lam * M) S_{k-1} , d_k )

starting from S_0 = R, where Q(., d) is the adaptive soft mapper and lam a
relaxation weight.  Without the mapper the update is the classic Richardson
iteration for the linear system M S = R: any fixed point satisfies
lam * R + S - lam * M S = S, i.e. M S = R, and the error contracts by the
factor (I - lam * M) per pass whenever its spectral radius is below one.
The mapper accelerates and stabilises this by pinning confidently decided
symbols, with the confidence band widening as d shrinks from d_start to
d_end over the iterations.

The per-iteration arithmetic is fixed: one application of M (two FFTs of
the padded length when N/alpha is an integer), one length-N linear
combination, and one mapping pass.  There is no early exit, so measured
operation counts for a given configuration are constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..complexity import OpCounter
from ..validation import check_in
from .base import SefdmDetectorBase
from .linear import _check_invertible, _zf_solve
from .mapping import MappingRegion, soft_map_with_mask, hard_map

_SCHEDULES = ("linear", "constant")


@dataclass(frozen=True)
class IterativeConfig:
    """Iteration controls: relaxation weight and mapping-width schedule."""

    relaxation: float = 1.0
    max_iterations: int = 10
    d_start: float = 1.0
    d_end: float = 0.0
    schedule: str = "linear"

    def __post_init__(self) -> None:
        if not (self.relaxation > 0.0):
            raise ValueError(f"relaxation must be > 0, got {self.relaxation!r}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations!r}")
        if not (0.0 <= self.d_end <= self.d_start):
            raise ValueError(
                f"need 0 <= d_end <= d_start, got d_start={self.d_start!r}, "
                f"d_end={self.d_end!r}"
            )
        check_in(self.schedule, _SCHEDULES, "schedule")


def d_schedule(iteration: int, config: IterativeConfig) -> float:
    """Mapping width for a 1-based iteration index.

    The linear schedule moves d from d_start to d_end in equal steps,
    reaching d_end exactly at the final iteration; a single-iteration run
    uses d_end outright.  The constant schedule stays at d_start.
    """
    if not (1 <= iteration <= config.max_iterations):
        raise ValueError(
            f"iteration must be in 1..{config.max_iterations}, got {iteration}"
        )
    if config.schedule == "constant":
        return config.d_start
    if config.max_iterations == 1:
        return config.d_end
    frac = (iteration - 1) / (config.max_iterations - 1)
    return config.d_start + (config.d_end - config.d_start) * frac


class IterativeDetector(SefdmDetectorBase):
    """Soft-mapped Richardson iteration on the correlator outputs.

    Parameters
    ----------
    alpha : float
        Bandwidth compression factor.
    constellation : str or Constellation
        "qam4" or "bpsk".
    n_carriers : int or None
        Carrier count; inferred from fit() data when None.
    relaxation : float
        Weight lam on the correction step.
    n_iterations : int
        Fixed number of passes; there is no early exit.
    d_start, d_end : float
        Mapping-width schedule endpoints (d_start at the first iteration).
    schedule : {"linear", "constant"}
    mapping : {"soft", "hard", "none"}
        "soft" is the adaptive mapper, "hard" maps every entry each pass
        (d = 0 throughout), "none" runs the bare linear iteration with a
        single hard decision at the end.
    initial : {"received", "zf"}
        Starting vector: the correlator outputs themselves, or the
        zero-forcing estimate (the drive term stays R either way).
    freeze_decided : bool
        Keep the value of any symbol once a mapping pass decides it,
        instead of re-evaluating it on later passes.
    transform_path : {"auto", "fast", "direct"}
        How M is applied; "auto" uses FFTs whenever N/alpha is an integer.
    count_ops : bool
        Record real-operation counts while detecting.
    """

    def __init__(
        self,
        alpha=1.0,
        constellation="qam4",
        n_carriers=None,
        relaxation=1.0,
        n_iterations=10,
        d_start=1.0,
        d_end=0.0,
        schedule="linear",
        mapping="soft",
        initial="received",
        freeze_decided=False,
        transform_path="auto",
        count_ops=True,
    ):
        self.alpha = alpha
        self.constellation = constellation
        self.n_carriers = n_carriers
        self.relaxation = relaxation
        self.n_iterations = n_iterations
        self.d_start = d_start
        self.d_end = d_end
        self.schedule = schedule
        self.mapping = mapping
        self.initial = initial
        self.freeze_decided = freeze_decided
        self.transform_path = transform_path
        self.count_ops = count_ops

    def _prepare(self) -> None:
        self.iter_config_ = IterativeConfig(
            relaxation=float(self.relaxation),
            max_iterations=int(self.n_iterations),
            d_start=float(self.d_start),
            d_end=float(self.d_end),
            schedule=self.schedule,
        )
        check_in(self.mapping, ("soft", "hard", "none"), "mapping")
        check_in(self.initial, ("received", "zf"), "initial")
        check_in(self.transform_path, ("auto", "fast", "direct"), "transform_path")
        if self.transform_path == "direct":
            self.fast_length_ = None
        elif self.transform_path == "fast" and self.fast_length_ is None:
            raise ValueError(
                f"no integer transform length for n_carriers={self.config_.n_carriers}, "
                f"alpha={self.config_.alpha}"
            )
        if self.initial == "zf":
            _check_invertible(self.matrices_, self.config_.n_carriers, self.config_.alpha)

    def _charge_iteration(self, counter: OpCounter, blocks: int) -> None:
        n = self.config_.n_carriers
        q = self.fast_length_
        if q is None:
            counter.complex_mul(n * n * blocks)
            counter.complex_add(n * (n - 1) * blocks)
        else:
            counter.transform(q, 2.0 * blocks)
        counter.combination(n, blocks)
        if self.mapping != "none":
            counter.mapping(n * blocks, self.constellation_.size)

    def _detect_batch(self, r2d: np.ndarray):
        cfg = self.iter_config_
        lam = cfg.relaxation
        blocks, n = r2d.shape
        counter = OpCounter(self.count_ops)

        if self.initial == "zf":
            s = _zf_solve(r2d, self.matrices_)
            counter.complex_mul(2 * n * n * blocks)
            counter.complex_add(2 * n * (n - 1) * blocks)
        else:
            s = r2d.copy()

        frozen = np.zeros_like(r2d, dtype=bool)
        undecided_per_iter = []
        for it in range(1, cfg.max_iterations + 1):
            v = lam * r2d + s - lam * self._gram_apply(s)
            if self.freeze_decided and frozen.any():
                v[frozen] = s[frozen]
            if self.mapping == "none":
                mapped, decided = v, np.zeros_like(frozen)
            else:
                d = d_schedule(it, cfg) if self.mapping == "soft" else 0.0
                mapped, decided = soft_map_with_mask(
                    v, MappingRegion(d, self.constellation_)
                )
            undecided_per_iter.append(n - decided.sum(axis=1))
            frozen |= decided
            s = mapped
            self._charge_iteration(counter, blocks)

        raw = s
        symbols = hard_map(raw, self.constellation_)
        if self.mapping == "none":
            counter.mapping(n * blocks, self.constellation_.size)

        total = counter.total() if self.count_ops else None
        info = {
            "blocks": blocks,
            "raw": raw,
            "iterations_used": cfg.max_iterations,
            "per_iteration_undecided": undecided_per_iter,
            "op_counts": total,
            "op_counts_per_block": total.scaled(1.0 / blocks) if total else None,
            "metrics": self._residual_metrics(r2d, symbols),
        }
        return symbols, info
