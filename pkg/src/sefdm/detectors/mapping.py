"""Adaptive soft decision mapping.

A soft mapper snaps a noisy value to a constellation point only when it is
confidently inside that point's region; everything else passes through
unchanged.  The confidence band is controlled by a width parameter d,
measured in units of the per-axis point coordinate:

* 4-QAM (coordinate magnitude A = 1/sqrt(2) per axis): a value is decided
  when min(|Re z|, |Im z|) >= d * A, and snaps to the point whose quadrant
  it sits in.  Values on an axis boundary go to the positive side.
* BPSK: decided when |Re z| >= d; snaps to +-1 and drops any imaginary part.

d = 0 decides everything (hard nearest-point mapping); d = 1 decides only
values at least as far from the axes as the points themselves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..constellations import Constellation

_SUPPORTED = ("qam4", "bpsk")


@dataclass(frozen=True)
class MappingRegion:
    """Decision geometry for one soft-mapping pass."""

    d: float
    constellation: Constellation

    def __post_init__(self) -> None:
        if not (self.d >= 0.0):
            raise ValueError(f"d must be >= 0, got {self.d!r}")
        if self.constellation.name not in _SUPPORTED:
            raise ValueError(
                f"soft mapping supports {_SUPPORTED}, got {self.constellation.name!r}"
            )


def soft_map_with_mask(s: np.ndarray, region: MappingRegion):
    """Map and also return the boolean mask of decided entries."""
    z = np.asarray(s, dtype=np.complex128)
    c = region.constellation
    if c.name == "qam4":
        a = 1.0 / np.sqrt(2.0)
        threshold = region.d * a
        re, im = z.real, z.imag
        decided = (np.abs(re) >= threshold) & (np.abs(im) >= threshold)
        snapped = np.where(re >= 0.0, a, -a) + 1j * np.where(im >= 0.0, a, -a)
    else:
        re = z.real
        decided = np.abs(re) >= region.d
        snapped = np.where(re >= 0.0, 1.0, -1.0).astype(np.complex128)
    return np.where(decided, snapped, z), decided


def soft_map(s: np.ndarray, region: MappingRegion) -> np.ndarray:
    """Snap confidently received values to constellation points.

    Entries outside every decision region are returned unchanged.  With
    d = 0 this is the hard nearest-point decision, and mapping an already
    mapped vector changes nothing.
    """
    out, _ = soft_map_with_mask(s, region)
    return out


def hard_map(s: np.ndarray, constellation: Constellation) -> np.ndarray:
    """Nearest-point decision for every entry (d = 0 soft map)."""
    return soft_map(s, MappingRegion(0.0, constellation))
