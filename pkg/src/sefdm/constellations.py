"""Unit-energy constellations with Gray bit labelling.

Two schemes are supported: 4-QAM (QPSK) and BPSK.  Points are normalised to
unit average symbol energy, and a point's index doubles as the integer value
of its bit label, so mapping and demapping are plain table lookups.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SQRT2 = float(np.sqrt(2.0))


@dataclass(frozen=True)
class Constellation:
    """An ordered set of complex points and their Gray-coded bit labels.

    Attributes
    ----------
    name : str
        Scheme identifier, "qam4" or "bpsk" for the built-in sets.
    points : ndarray of complex128, shape (size,)
        Constellation points with unit average energy.  Read only.
    labels : ndarray of uint8, shape (size, bits_per_symbol)
        Bit pattern of each point.  Row ``l`` spells ``l`` in binary, most
        significant bit first, so index arithmetic replaces label search.
    """

    name: str
    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        points = np.ascontiguousarray(self.points, dtype=np.complex128)
        labels = np.ascontiguousarray(self.labels, dtype=np.uint8)
        if points.ndim != 1 or len(points) < 2:
            raise ValueError("a constellation needs a 1-d array of at least 2 points")
        size = len(points)
        if size & (size - 1):
            raise ValueError(f"constellation size must be a power of two, got {size}")
        bps = size.bit_length() - 1
        if labels.shape != (size, bps):
            raise ValueError(f"labels must have shape {(size, bps)}, got {labels.shape}")
        weights = 1 << np.arange(bps - 1, -1, -1)
        if not np.array_equal(labels @ weights, np.arange(size)):
            raise ValueError("label rows must spell their own index in binary")
        energy = float(np.mean(np.abs(points) ** 2))
        if abs(energy - 1.0) > 1e-12:
            raise ValueError(f"average symbol energy must be 1, got {energy!r}")
        if len(np.unique(points)) != size:
            raise ValueError("constellation points must be distinct")
        points.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def bits_per_symbol(self) -> int:
        return self.size.bit_length() - 1

    def map_bits(self, bits: np.ndarray) -> np.ndarray:
        """Map bits to symbols along the last axis.

        ``bits`` must have a last-axis length divisible by ``bits_per_symbol``;
        groups of ``bits_per_symbol`` consecutive bits become one symbol.
        """
        b = np.asarray(bits)
        bps = self.bits_per_symbol
        if b.shape[-1] % bps:
            raise ValueError(
                f"last axis of bits has length {b.shape[-1]}, "
                f"not a multiple of bits_per_symbol={bps}"
            )
        if b.size and (b.min() < 0 or b.max() > 1):
            raise ValueError("bits must be 0 or 1")
        grouped = b.reshape(*b.shape[:-1], -1, bps).astype(np.int64)
        weights = 1 << np.arange(bps - 1, -1, -1)
        return self.points[grouped @ weights]

    def nearest_index(self, symbols: np.ndarray) -> np.ndarray:
        """Index of the closest constellation point for each entry.

        Ties break toward the smallest index.
        """
        s = np.asarray(symbols, dtype=np.complex128)
        d2 = np.abs(s[..., None] - self.points) ** 2
        return np.argmin(d2, axis=-1)

    def bits_from_symbols(self, symbols: np.ndarray) -> np.ndarray:
        """Demap symbols to bits along the last axis (nearest-point decision)."""
        idx = self.nearest_index(symbols)
        out = self.labels[idx]
        return out.reshape(*idx.shape[:-1], -1)


def make_constellation(scheme: str) -> Constellation:
    """Build a named constellation.

    Parameters
    ----------
    scheme : str
        "qam4" (Gray-labelled QPSK, points (+-1 +- 1j)/sqrt(2)) or "bpsk".

    The 4-QAM labelling assigns the first bit to the real axis and the second
    to the imaginary axis, bit 0 meaning the positive half.  Crossing one
    decision boundary therefore flips exactly one bit.
    """
    key = scheme.strip().lower()
    if key == "qam4":
        a = 1.0 / _SQRT2
        points = np.array(
            [a + 1j * a, a - 1j * a, -a + 1j * a, -a - 1j * a], dtype=np.complex128
        )
        labels = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=np.uint8)
        return Constellation("qam4", points, labels)
    if key == "bpsk":
        points = np.array([1.0 + 0.0j, -1.0 + 0.0j], dtype=np.complex128)
        labels = np.array([[0], [1]], dtype=np.uint8)
        return Constellation("bpsk", points, labels)
    raise ValueError(f"unknown constellation scheme {scheme!r}; use 'qam4' or 'bpsk'")
