"""Small input-validation helpers shared across the package."""

from __future__ import annotations

import numpy as np


def check_blocks(x, n_carriers: int | None = None, name: str = "X") -> np.ndarray:
    """Coerce to a complex array whose last axis is the carrier axis.

    Accepts anything array-like, or an object with an ``r`` attribute
    (a correlator output).  Raises ValueError on a carrier-axis mismatch.
    """
    if hasattr(x, "r"):
        x = x.r
    arr = np.asarray(x)
    if arr.ndim == 0:
        raise ValueError(f"{name} must have at least one axis")
    if not np.issubdtype(arr.dtype, np.number):
        raise ValueError(f"{name} must be numeric, got dtype {arr.dtype}")
    arr = arr.astype(np.complex128, copy=False)
    if n_carriers is not None and arr.shape[-1] != n_carriers:
        raise ValueError(
            f"{name} has {arr.shape[-1]} entries on the carrier axis, "
            f"expected {n_carriers}"
        )
    return arr


def as_2d_blocks(x, n_carriers: int | None = None, name: str = "X"):
    """Like :func:`check_blocks` but flattened to (n_blocks, n_carriers).

    Returns (array, was_1d) so callers can restore a single block's shape.
    """
    arr = check_blocks(x, n_carriers, name=name)
    if arr.ndim == 1:
        return arr[None, :], True
    if arr.ndim == 2:
        return arr, False
    return arr.reshape(-1, arr.shape[-1]), False


def check_bits(bits, name: str = "bits") -> np.ndarray:
    arr = np.asarray(bits)
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError(f"{name} must contain only 0 and 1")
    return arr.astype(np.uint8, copy=False)


def as_rng(rng: int | np.random.Generator | None) -> np.random.Generator:
    """Accept a seed, a Generator, or None (fresh OS entropy)."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def check_in(value, allowed, name: str):
    if value not in allowed:
        raise ValueError(f"{name} must be one of {sorted(allowed)}, got {value!r}")
    return value
