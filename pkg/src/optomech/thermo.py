"""Thermoelastic dissipation per mode and the resulting Q·f and coherence limits.

The per-cycle thermoelastic work uses the closed low-frequency/weak-coupling
form of the driven heat equation,

    dW = pi * omega_m * alpha^2 * E^2 * T / (1080 * kappa_th * (1-sigma)^2)
         * Int d(r)^5 (Lap zeta)^2 dA,

with the plate's local thickness d(r)^5 kept inside the area integral (the
per-column heat flow depends only on the local thickness; for uniform plates
this reduces to the usual d^5 prefactor).  The validity boundary of the closed
form is not modelled; instead the thermal diffusion rate kappa_th/(c_V d^2) is
reported alongside so the user can compare it with omega_m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar, k as k_B

from .core import BathParams, DiskGeometry, MaterialParams
from .errors import InvalidInputError
from .plate import ModeSolution

__all__ = [
    "ThermoResult",
    "thermoelastic_work",
    "q_thermoelastic",
    "qf_product_limit",
    "n_osc_th",
    "ground_state_threshold",
    "thermal_diffusion_rate",
    "thermo_summary",
]


@dataclass(frozen=True)
class ThermoResult:
    """Per-mode thermoelastic summary.

    delta_w: work dissipated per cycle [J]; q_factor: 2 pi (U_opt+U_mech)/delta_w;
    qf_product: q_factor * omega/(2 pi) [Hz]; n_osc_th: coherent oscillations
    before one thermal phonon; diffusion_rate: kappa_th/(c_V d^2) [1/s], the
    thermal relaxation scale the closed form assumes to be fast.
    """

    delta_w: float
    q_factor: float
    qf_product: float
    n_osc_th: float
    diffusion_rate: float

    def __post_init__(self):
        if self.delta_w < 0:
            raise InvalidInputError("delta_w must be >= 0")


def thermoelastic_work(
    mode: ModeSolution,
    disk: DiskGeometry,
    material: MaterialParams,
    bath: BathParams,
) -> float:
    """Work per cycle [J] done driving the irreversible heat flow of one mode."""
    r = mode.grid.nodes
    d5 = disk.thickness_at(r) ** 5
    ang = 2.0 * math.pi if mode.m == 0 else math.pi
    area_integral = ang * float(np.sum(mode.grid.weights * r * d5 * mode.lam_profile**2))
    pref = (
        math.pi
        * mode.omega
        * material.thermal_expansion_vol**2
        * material.youngs_modulus**2
        * bath.temperature
        / (1080.0 * material.thermal_conductivity * (1.0 - material.poisson_ratio) ** 2)
    )
    return pref * area_integral


def q_thermoelastic(
    mode: ModeSolution,
    disk: DiskGeometry,
    material: MaterialParams,
    bath: BathParams,
) -> float:
    """Q = 2 pi (U_opt + U_mech) / dW; +inf for dissipation-free (flat) modes."""
    dw = thermoelastic_work(mode, disk, material, bath)
    total = mode.u_opt + mode.u_mech
    if dw <= 0.0 or dw < 1e-300 * max(total, 1.0):
        return math.inf
    return 2.0 * math.pi * total / dw


def qf_product_limit(
    material: MaterialParams,
    d: float,
    bath: BathParams,
    energy_ratio: float,
) -> float:
    """Thermoelastically limited Q·f [Hz] for a plate of thickness d.

    Q_th * f = (45 kappa_th / (pi E d^2 T alpha^2)) * ((1-sigma)/(1+sigma))
               * (1 + U_opt/U_mech).
    """
    if not d > 0:
        raise InvalidInputError("thickness d must be > 0")
    if energy_ratio < 0:
        raise InvalidInputError("energy_ratio must be >= 0")
    base = (
        45.0
        * material.thermal_conductivity
        / (
            math.pi
            * material.youngs_modulus
            * d**2
            * bath.temperature
            * material.thermal_expansion_vol**2
        )
        * (1.0 - material.poisson_ratio)
        / (1.0 + material.poisson_ratio)
    )
    return base * (1.0 + energy_ratio)  # propagates inf


def n_osc_th(qf_product: float, bath: BathParams) -> float:
    """Coherent oscillations before one thermal phonon: N = Q f hbar / (k_B T)."""
    if qf_product < 0:
        raise InvalidInputError("qf_product must be >= 0")
    return qf_product * hbar / (k_B * bath.temperature)


def ground_state_threshold(bath: BathParams) -> float:
    """k_B T / h [Hz] — the Q·f value above which ground-state cooling is possible."""
    return k_B * bath.temperature / (2.0 * math.pi * hbar)


def thermal_diffusion_rate(material: MaterialParams, d: float) -> float:
    """kappa_th / (c_V d^2) [1/s], the through-thickness thermal relaxation rate."""
    if not d > 0:
        raise InvalidInputError("thickness d must be > 0")
    return material.thermal_conductivity / (material.heat_capacity_vol * d**2)


def thermo_summary(
    mode: ModeSolution,
    disk: DiskGeometry,
    material: MaterialParams,
    bath: BathParams,
) -> ThermoResult:
    """Assemble the per-mode ThermoResult from the direct dW integral."""
    dw = thermoelastic_work(mode, disk, material, bath)
    q = q_thermoelastic(mode, disk, material, bath)
    qf = q * mode.omega / (2.0 * math.pi) if math.isfinite(q) else math.inf
    return ThermoResult(
        delta_w=dw,
        q_factor=q,
        qf_product=qf,
        n_osc_th=n_osc_th(qf, bath) if math.isfinite(qf) else math.inf,
        diffusion_rate=thermal_diffusion_rate(material, disk.thickness.max_thickness()),
    )
