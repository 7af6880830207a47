"""Spectrally compressed multicarrier (SEFDM) link simulation.

Carriers are packed at a fraction alpha of the orthogonal spacing, which
buys bandwidth at the price of self-interference.  The package provides
the transmit/receive chain, detectors ranging from zero forcing through
an iterative soft-mapping scheme to exact maximum likelihood and sphere
decoding, arithmetic-complexity accounting, and a deterministic Monte
Carlo BER harness with a CLI.
"""

from .complexity import (
    ComplexityReport,
    OpCount,
    OpCounter,
    measure_ops,
    predicted_ops,
    sd_gamma_estimate,
)
from .constellations import Constellation, make_constellation
from .detectors import (
    DetectorResult,
    IterativeConfig,
    IterativeDetector,
    MLDetector,
    MappingRegion,
    SphereDetector,
    ZeroForcingDetector,
    d_schedule,
    hard_map,
    initial_estimate,
    soft_map,
)
from .errors import (
    CountingDisabledError,
    FactorizationFailedError,
    IllConditionedError,
    SearchSpaceTooLargeError,
    SefdmError,
)
from .harness import (
    BerRecord,
    CellSpec,
    SweepSpec,
    bpsk_awgn_ber,
    cell_seed,
    figure_spec,
    qpsk_awgn_ber,
    run_cell,
    run_sweep,
    write_csv,
)
from .system import (
    CarrierMatrices,
    SefdmConfig,
    carrier_matrix,
    default_config,
    fast_transform_length,
    gram_entry,
)
from .txrx import CorrelatorOutput, NoiseModel, add_awgn, correlate, modulate, transmit

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "SefdmConfig", "CarrierMatrices", "carrier_matrix", "default_config",
    "fast_transform_length", "gram_entry",
    "Constellation", "make_constellation",
    "NoiseModel", "CorrelatorOutput", "modulate", "add_awgn", "correlate", "transmit",
    "MappingRegion", "soft_map", "hard_map", "d_schedule",
    "IterativeConfig", "IterativeDetector", "ZeroForcingDetector",
    "MLDetector", "SphereDetector", "DetectorResult", "initial_estimate",
    "OpCount", "OpCounter", "predicted_ops", "measure_ops", "sd_gamma_estimate",
    "ComplexityReport",
    "SweepSpec", "CellSpec", "BerRecord", "run_cell", "run_sweep", "write_csv",
    "cell_seed", "figure_spec", "qpsk_awgn_ber", "bpsk_awgn_ber",
    "SefdmError", "IllConditionedError", "SearchSpaceTooLargeError",
    "FactorizationFailedError", "CountingDisabledError",
]
