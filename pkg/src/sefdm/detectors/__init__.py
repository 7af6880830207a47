"""Block detectors for the compressed-carrier link."""

from .base import DetectorResult, SefdmDetectorBase
from .iterative import IterativeConfig, IterativeDetector, d_schedule
from .linear import ZeroForcingDetector, initial_estimate
from .mapping import MappingRegion, hard_map, soft_map, soft_map_with_mask
from .ml import MLDetector
from .sphere import SphereDetector

__all__ = [
    "DetectorResult",
    "SefdmDetectorBase",
    "IterativeConfig",
    "IterativeDetector",
    "d_schedule",
    "ZeroForcingDetector",
    "initial_estimate",
    "MappingRegion",
    "hard_map",
    "soft_map",
    "soft_map_with_mask",
    "MLDetector",
    "SphereDetector",
]
