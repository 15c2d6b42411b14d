"""Shared units, material/geometry/field descriptions, and the local trap frequency.

Conventions used across the whole package:

* every quantity is in SI base units;
* angular frequencies are in rad/s internally (Hz appears only at CLI I/O);
* all types are immutable after construction and all operations are pure.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as _C_LIGHT

from .errors import InvalidInputError

__all__ = [
    "MaterialParams",
    "SIN",
    "ThicknessProfile",
    "UniformThickness",
    "ApodizedThickness",
    "DiskGeometry",
    "TetherGeometry",
    "IntensityProfile",
    "PlaneWave",
    "GaussianBeam",
    "NumericIntensity",
    "OpticalParams",
    "BathParams",
    "local_trap_frequency",
]


@dataclass(frozen=True)
class MaterialParams:
    """Elastic, dielectric, and thermal constants of the membrane material.

    Attributes
    ----------
    youngs_modulus:
        Young's modulus E [Pa].
    poisson_ratio:
        Poisson ratio sigma, dimensionless, in (0, 0.5).
    density:
        Mass density rho [kg/m^3].
    dielectric_constant:
        Relative permittivity epsilon (real; the film is treated as lossless).
    heat_capacity_vol:
        Volumetric heat capacity c_V [J/(m^3 K)].
    thermal_conductivity:
        kappa_th [W/(m K)].
    thermal_expansion_vol:
        Linear thermal expansion coefficient alpha [1/K].
    """

    youngs_modulus: float
    poisson_ratio: float
    density: float
    dielectric_constant: float
    heat_capacity_vol: float
    thermal_conductivity: float
    thermal_expansion_vol: float

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not self.youngs_modulus > 0:
            raise InvalidInputError("youngs_modulus must be > 0")
        if not 0 < self.poisson_ratio < 0.5:
            raise InvalidInputError("poisson_ratio must lie in (0, 0.5)")
        if not self.density > 0:
            raise InvalidInputError("density must be > 0")
        if not self.dielectric_constant > 1:
            raise InvalidInputError("dielectric_constant must be > 1")
        if not self.heat_capacity_vol > 0:
            raise InvalidInputError("heat_capacity_vol must be > 0")
        if not self.thermal_conductivity > 0:
            raise InvalidInputError("thermal_conductivity must be > 0")
        if self.thermal_expansion_vol < 0:
            raise InvalidInputError("thermal_expansion_vol must be >= 0")

    @property
    def flexural_rigidity_factor(self) -> float:
        """E / (12 (1 - sigma^2)) — multiply by d(r)^3 for the local bending stiffness."""
        return self.youngs_modulus / (12.0 * (1.0 - self.poisson_ratio**2))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "MaterialParams":
        return cls(**data)


#: Stoichiometric silicon nitride film constants.
SIN = MaterialParams(
    youngs_modulus=270e9,
    poisson_ratio=0.25,
    density=2700.0,
    dielectric_constant=4.0,
    heat_capacity_vol=2e6,
    thermal_conductivity=20.0,
    thermal_expansion_vol=4.8e-6,
)


class ThicknessProfile:
    """Radial thickness law d(r) of a disk of outer radius ``a``.

    Subclasses provide the thickness itself and analytic derivatives of the
    bending-stiffness weight g(r) = d(r)^3, which the plate solver needs in
    expanded form.
    """

    def thickness(self, r, a):
        raise NotImplementedError

    def g(self, r, a):
        """Stiffness weight g(r) = d(r)^3."""
        raise NotImplementedError

    def g_d1(self, r, a):
        """dg/dr."""
        raise NotImplementedError

    def g_d2(self, r, a):
        """d^2 g/dr^2."""
        raise NotImplementedError

    def max_thickness(self) -> float:
        raise NotImplementedError

    def volume(self, a: float) -> float:
        """Disk volume = integral of d(r) over the disk area."""
        raise NotImplementedError


@dataclass(frozen=True)
class UniformThickness(ThicknessProfile):
    d: float

    def __post_init__(self):
        if not self.d > 0:
            raise InvalidInputError("thickness d must be > 0")

    def thickness(self, r, a):
        return np.full_like(np.asarray(r, dtype=float), self.d)

    def g(self, r, a):
        return np.full_like(np.asarray(r, dtype=float), self.d**3)

    def g_d1(self, r, a):
        return np.zeros_like(np.asarray(r, dtype=float))

    def g_d2(self, r, a):
        return np.zeros_like(np.asarray(r, dtype=float))

    def max_thickness(self) -> float:
        return self.d

    def volume(self, a: float) -> float:
        return math.pi * a**2 * self.d


@dataclass(frozen=True)
class ApodizedThickness(ThicknessProfile):
    """Thickness tapering smoothly to zero at the rim: d(r) = d0 (1 - (r/a)^2)^2."""

    d0: float

    def __post_init__(self):
        if not self.d0 > 0:
            raise InvalidInputError("center thickness d0 must be > 0")

    def thickness(self, r, a):
        u2 = (np.asarray(r, dtype=float) / a) ** 2
        return self.d0 * (1.0 - u2) ** 2

    def g(self, r, a):
        u2 = (np.asarray(r, dtype=float) / a) ** 2
        return self.d0**3 * (1.0 - u2) ** 6

    def g_d1(self, r, a):
        # g = d0^3 (1-u^2)^6 with u = r/a, so dg/dr = -12 d0^3 u (1-u^2)^5 / a
        u = np.asarray(r, dtype=float) / a
        return -12.0 * self.d0**3 * u * (1.0 - u**2) ** 5 / a

    def g_d2(self, r, a):
        u = np.asarray(r, dtype=float) / a
        return -12.0 * self.d0**3 * (1.0 - u**2) ** 4 * (1.0 - 11.0 * u**2) / a**2

    def max_thickness(self) -> float:
        return self.d0

    def volume(self, a: float) -> float:
        # 2*pi*a^2*d0 * int_0^1 (1-u^2)^2 u du = pi a^2 d0 / 3
        return math.pi * a**2 * self.d0 / 3.0


#: Aspect ratio d/a above which the thin-plate (Kirchhoff) model loses accuracy.
THIN_PLATE_ASPECT_LIMIT = 0.05


@dataclass(frozen=True)
class DiskGeometry:
    """Circular disk: outer radius plus a radial thickness profile."""

    radius: float
    thickness: ThicknessProfile

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidInputError("radius must be > 0")
        aspect = self.thickness.max_thickness() / self.radius
        if aspect > THIN_PLATE_ASPECT_LIMIT:
            warnings.warn(
                f"thickness/radius = {aspect:.3g} exceeds {THIN_PLATE_ASPECT_LIMIT}; "
                "thin-plate results become unreliable",
                stacklevel=2,
            )

    def thickness_at(self, r):
        return self.thickness.thickness(r, self.radius)

    def g_at(self, r):
        return self.thickness.g(r, self.radius)

    def g_d1_at(self, r):
        return self.thickness.g_d1(r, self.radius)

    def g_d2_at(self, r):
        return self.thickness.g_d2(r, self.radius)

    def volume(self) -> float:
        return self.thickness.volume(self.radius)

    def mass(self, material: MaterialParams) -> float:
        return material.density * self.volume()


@dataclass(frozen=True)
class TetherGeometry:
    """Straight tether of length L with a square cross-section of width b."""

    length: float
    width: float

    def __post_init__(self):
        if not self.length > 0:
            raise InvalidInputError("tether length must be > 0")
        if not self.width > 0:
            raise InvalidInputError("tether width must be > 0")


class IntensityProfile:
    """Radial optical intensity law I(r) >= 0 [W/m^2]."""

    def at(self, r):
        raise NotImplementedError


@dataclass(frozen=True)
class PlaneWave(IntensityProfile):
    i0: float

    def __post_init__(self):
        if self.i0 < 0:
            raise InvalidInputError("intensity must be >= 0")

    def at(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.i0)


@dataclass(frozen=True)
class GaussianBeam(IntensityProfile):
    """I(r) = i0 exp(-2 r^2 / waist^2)."""

    i0: float
    waist: float

    def __post_init__(self):
        if self.i0 < 0:
            raise InvalidInputError("intensity must be >= 0")
        if not self.waist > 0:
            raise InvalidInputError("waist must be > 0")

    def at(self, r):
        r = np.asarray(r, dtype=float)
        return self.i0 * np.exp(-2.0 * r**2 / self.waist**2)


class NumericIntensity(IntensityProfile):
    """Tabulated intensity samples, interpolated linearly in r.

    Outside the sampled range the nearest endpoint value is used (the profiles
    fed in here are smooth and even in r, so clamping at r=0 is exact to the
    sample spacing).
    """

    def __init__(self, radii, values):
        radii = np.asarray(radii, dtype=float)
        values = np.asarray(values, dtype=float)
        if radii.ndim != 1 or radii.shape != values.shape or radii.size < 2:
            raise InvalidInputError("radii and values must be matching 1D arrays (>= 2 samples)")
        if np.any(np.diff(radii) <= 0):
            raise InvalidInputError("radii must be strictly increasing")
        if np.any(values < 0):
            raise InvalidInputError("intensity samples must be >= 0")
        self._radii = radii.copy()
        self._radii.setflags(write=False)
        self._values = values.copy()
        self._values.setflags(write=False)

    def at(self, r):
        return np.interp(np.asarray(r, dtype=float), self._radii, self._values)


@dataclass(frozen=True)
class OpticalParams:
    """Trap-light parameters; default wavelength 1 micrometre."""

    wavelength: float = 1e-6

    def __post_init__(self):
        if not self.wavelength > 0:
            raise InvalidInputError("wavelength must be > 0")

    @property
    def wavevector(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def angular_frequency(self) -> float:
        """omega_0 = 2 pi c / wavelength."""
        return 2.0 * math.pi * _C_LIGHT / self.wavelength


@dataclass(frozen=True)
class BathParams:
    temperature: float = 300.0

    def __post_init__(self):
        if not self.temperature > 0:
            raise InvalidInputError("temperature must be > 0")


def local_trap_frequency(
    material: MaterialParams,
    optics: OpticalParams,
    intensity: IntensityProfile,
    r,
):
    """Harmonic trap frequency of the standing-wave gradient force at radius r.

    omega_opt(r) = sqrt(2 k^2 I(r) (epsilon - 1) / (rho c)), in rad/s.

    Accepts scalar or array ``r`` and vectorizes accordingly.
    """
    i_r = np.asarray(intensity.at(r), dtype=float)
    if np.any(i_r < 0):
        raise InvalidInputError("intensity must be >= 0 everywhere")
    k = optics.wavevector
    omega_sq = (
        2.0
        * k**2
        * i_r
        * (material.dielectric_constant - 1.0)
        / (material.density * _C_LIGHT)
    )
    out = np.sqrt(omega_sq)
    return float(out) if out.ndim == 0 else out
