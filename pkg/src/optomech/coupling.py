"""Opto-mechanical coupling of disk modes to a concentric Gaussian readout beam.

The linear coupling rate of a mechanical mode ``zeta(r, theta) = f(r) cos(m
theta)`` to a readout beam of waist w is proportional to the overlap

    g  propto  z_zp * Int e^{-2 r^2 / w^2} zeta(r, theta) dA / max|zeta|,

and the figure of merit reported here is the ratio g/g0, where g0 is the same
overlap for pure rigid (center-of-mass) motion, f = 1.  The zero-point
amplitude z_zp and every other prefactor cancel in the ratio, which is purely
geometric: it does not depend on the membrane mass or on any amplitude
normalization beyond max|f| = 1, which ModeSolution already guarantees.

For any azimuthal index m >= 1 the angular integral of cos(m theta) vanishes,
so the coupling to a concentric beam is exactly zero (odd/even reflection
symmetry); the ratio is returned as 0.0 without quadrature.  Off-axis readout
beams are out of scope: the readout is assumed concentric with the trap.

A tightly focused, strong trap stiffens the illuminated center of the
membrane, so as the trap intensity (equivalently, the CM frequency) rises the
lowest m = 0 mode is progressively expelled from the beam spot: the center is
pinned while the rim keeps moving.  ``pinning_profile`` exports the radial
displacement together with a rim-to-center contrast that quantifies this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DiskGeometry
from .errors import ConfigurationError, InvalidInputError
from .plate import ModeSolution

__all__ = ["coupling_ratio", "pinning_profile", "RadialProfile", "RIM_FRACTION"]

#: Radii r >= RIM_FRACTION * a count as "rim" for the pinning contrast.
RIM_FRACTION = 0.8


def coupling_ratio(mode: ModeSolution, readout_waist: float, disk: DiskGeometry) -> float:
    """g/g0 for a readout beam of waist ``readout_waist`` [m], dimensionless.

    Exactly the ratio of Gaussian-weighted area integrals

        Int f(r) e^{-2 r^2 / w^2} r dr  /  Int e^{-2 r^2 / w^2} r dr,

    evaluated on the mode's own quadrature grid.  Satisfies |g/g0| <= 1 for
    m = 0 (the weights are positive and max|f| = 1), equals 0.0 identically
    for m >= 1, and tends to the mass-weighted mean of f — 1 for pure CM
    motion — as w/a tends to infinity.
    """
    if not readout_waist > 0:
        raise InvalidInputError("readout_waist must be > 0")
    if not math.isclose(mode.grid.radius, disk.radius, rel_tol=1e-12):
        raise ConfigurationError(
            f"mode was solved on radius {mode.grid.radius}, disk has radius {disk.radius}"
        )
    if mode.m >= 1:
        return 0.0
    r = mode.grid.nodes
    w_r = mode.grid.weights * r
    gauss = np.exp(-2.0 * r**2 / readout_waist**2)
    return float(np.sum(w_r * gauss * mode.profile) / np.sum(w_r * gauss))


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Radial displacement export with the rim/center pinning contrast.

    ``rim_center_ratio`` is max|f| over the rim band (r >= RIM_FRACTION * a)
    divided by max|f| over the center region (r <= center_radius); +inf when
    the center is fully pinned. A free CM mode gives 1; values > 1 indicate
    the center is suppressed relative to the rim.
    """

    radii: np.ndarray
    values: np.ndarray
    center_radius: float
    rim_center_ratio: float


def pinning_profile(mode: ModeSolution, center_radius: float | None = None) -> RadialProfile:
    """Export f(r) of a mode along with its rim-to-center displacement ratio.

    ``center_radius`` bounds the "center" region; it defaults to 0.6 a and
    would normally be set to the trap waist.
    """
    a = mode.grid.radius
    if center_radius is None:
        center_radius = 0.6 * a
    if not 0 < center_radius <= a:
        raise InvalidInputError("center_radius must be in (0, disk radius]")
    r = mode.grid.nodes
    f = np.abs(mode.profile)
    in_center = r <= center_radius
    if not np.any(in_center):
        raise InvalidInputError("center_radius excludes every grid node")
    center = float(np.max(f[in_center]))
    rim = float(np.max(f[r >= RIM_FRACTION * a]))
    ratio = rim / center if center > 0.0 else math.inf
    return RadialProfile(
        radii=mode.grid.nodes,
        values=mode.profile,
        center_radius=float(center_radius),
        rim_center_ratio=ratio,
    )
