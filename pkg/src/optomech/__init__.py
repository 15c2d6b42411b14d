"""Optically trapped membrane mechanics: mode spectra, dissipation limits, cavity finesse."""

__version__ = "0.1.0"

from . import cavity, coupling, plate, scenarios, spring, tether, thermo
from .core import (
    SIN,
    ApodizedThickness,
    BathParams,
    DiskGeometry,
    GaussianBeam,
    IntensityProfile,
    MaterialParams,
    NumericIntensity,
    OpticalParams,
    PlaneWave,
    TetherGeometry,
    ThicknessProfile,
    UniformThickness,
    local_trap_frequency,
)
from .errors import (
    ConfigurationError,
    ConfigValidationError,
    InfeasibleError,
    InvalidInputError,
    NumericalFailureError,
    OptomechError,
)

__all__ = [
    "__version__",
    "cavity",
    "coupling",
    "plate",
    "scenarios",
    "spring",
    "tether",
    "thermo",
    "SIN",
    "ApodizedThickness",
    "BathParams",
    "DiskGeometry",
    "GaussianBeam",
    "IntensityProfile",
    "MaterialParams",
    "NumericIntensity",
    "OpticalParams",
    "PlaneWave",
    "TetherGeometry",
    "ThicknessProfile",
    "UniformThickness",
    "local_trap_frequency",
    "OptomechError",
    "InvalidInputError",
    "ConfigurationError",
    "ConfigValidationError",
    "NumericalFailureError",
    "InfeasibleError",
]
