"""Transmitter, AWGN channel, and correlator-bank receiver front end.

Signal path for one block of N symbols S:

    X = F S                      (time samples, modulate)
    Y = X + noise                (complex AWGN added in the time domain)
    R = F^H Y = M S + F^H noise  (correlator outputs, correlate)

Noise is injected only in the time domain.  The correlator colours it:
its covariance at the correlator output is sigma2 * M, so the per-carrier
noise variance stays sigma2 while off-diagonal correlation appears for
alpha < 1.

SNR convention: snr_db is Es/N0 per subcarrier with Es = 1, so
sigma2 = 10 ** (-snr_db / 10) per complex time-domain sample (half per
real component).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .system import SefdmConfig, carrier_matrix, fast_transform_length
from .validation import as_rng, check_blocks


@dataclass(frozen=True)
class NoiseModel:
    """Complex AWGN level, fixed by the Es/N0 target.

    ``sigma2`` is derived from ``snr_db`` and is the total variance of one
    complex time-domain sample.  ``snr_db = math.inf`` gives a noiseless
    channel.
    """

    snr_db: float
    sigma2: float = field(init=False)

    def __post_init__(self) -> None:
        sigma2 = 10.0 ** (-self.snr_db / 10.0) if self.snr_db != math.inf else 0.0
        if not (sigma2 >= 0.0):
            raise ValueError(f"snr_db={self.snr_db!r} does not give a usable noise variance")
        object.__setattr__(self, "sigma2", sigma2)

    def eb_n0_db(self, bits_per_symbol: int) -> float:
        """Translate the per-carrier Es/N0 to Eb/N0 for a given bit load."""
        return self.snr_db - 10.0 * math.log10(bits_per_symbol)


@dataclass(frozen=True)
class CorrelatorOutput:
    """Correlator-bank outputs plus the context detectors may want.

    ``r`` has the carrier index on the last axis; leading axes, if any,
    enumerate blocks.  ``snr_db`` is the channel Es/N0 the block was
    produced at (NaN when unknown) and ``noise_seed`` the integer seed,
    when one was used.
    """

    r: np.ndarray
    snr_db: float = math.nan
    noise_seed: int | None = None


def _resolve_path(config: SefdmConfig, path: str) -> int | None:
    """Return the FFT length to use, or None for the dense matrix path."""
    if path not in ("auto", "fast", "direct"):
        raise ValueError(f"path must be 'auto', 'fast' or 'direct', got {path!r}")
    if path == "direct":
        return None
    q = fast_transform_length(config.n_carriers, config.alpha)
    if path == "fast" and q is None:
        raise ValueError(
            f"no integer transform length for n_carriers={config.n_carriers}, "
            f"alpha={config.alpha}; use the direct path"
        )
    return q


def modulate(s: np.ndarray, config: SefdmConfig, path: str = "auto") -> np.ndarray:
    """Modulate symbol blocks onto the compressed carriers.

    Parameters
    ----------
    s : ndarray, shape (..., n_carriers)
        Symbol vectors; any number of leading block axes.
    config : SefdmConfig
    path : {"auto", "fast", "direct"}
        "fast" forces the zero-padded IFFT (valid only when N/alpha is an
        integer), "direct" forces the dense matrix product, and "auto"
        picks the FFT whenever it applies.  Both paths agree to within
        1e-10 relative error.

    Returns
    -------
    ndarray, shape (..., n_carriers)
        Time samples X = F S.
    """
    n = config.n_carriers
    s = check_blocks(s, n, name="s")
    q = _resolve_path(config, path)
    if q is None:
        f = carrier_matrix(config).f_matrix
        return s @ f.T
    x = np.fft.ifft(s, n=q, axis=-1)[..., :n]
    return x * (q / np.sqrt(n))


def add_awgn(
    x: np.ndarray,
    noise: NoiseModel,
    rng: int | np.random.Generator | None = None,
) -> np.ndarray:
    """Add circularly symmetric complex AWGN to time-domain samples.

    ``rng`` may be an integer seed (same seed, same noise, bit for bit) or
    a Generator to draw from an ongoing stream.  The variance of each
    complex sample is ``noise.sigma2``, split evenly between the real and
    imaginary parts.
    """
    x = np.asarray(x, dtype=np.complex128)
    if noise.sigma2 == 0.0:
        return x.copy()
    gen = as_rng(rng)
    scale = math.sqrt(noise.sigma2 / 2.0)
    w = gen.normal(0.0, scale, x.shape) + 1j * gen.normal(0.0, scale, x.shape)
    return x + w


def correlate(
    x: np.ndarray,
    config: SefdmConfig,
    path: str = "auto",
    snr_db: float = math.nan,
    noise_seed: int | None = None,
)  -> CorrelatorOutput:
    """Project received samples onto the carrier bank: R = F^H x.

    Accepts the same shapes and path choices as :func:`modulate`.  The
    optional ``snr_db`` and ``noise_seed`` are carried through untouched so
    downstream consumers can recover the channel context.
    """
    n = config.n_carriers
    x = check_blocks(x, n, name="x")
    q = _resolve_path(config, path)
    if q is None:
        f = carrier_matrix(config).f_matrix
        r = x @ f.conj()
    else:
        r = np.fft.fft(x, n=q, axis=-1)[..., :n] / np.sqrt(n)
    return CorrelatorOutput(r=r, snr_db=snr_db, noise_seed=noise_seed)


def transmit(
    s: np.ndarray,
    config: SefdmConfig,
    noise: NoiseModel,
    rng: int | np.random.Generator | None = None,
    path: str = "auto",
) -> CorrelatorOutput:
    """Run symbols through the whole front end in one call."""
    x = add_awgn(modulate(s, config, path=path), noise, rng)
    seed = rng if isinstance(rng, int) else None
    return correlate(x, config, path=path, snr_db=noise.snr_db, noise_seed=seed)
