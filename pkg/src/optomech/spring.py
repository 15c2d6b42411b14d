"""Dynamic optical spring: cavity-backaction stiffening and its decoherence cost.

A mechanical oscillator (frequency omega_m, mass m) couples linearly to a
driven cavity mode with detuning delta and linewidth kappa = pi c / (F L).
Eliminating the cavity gives the effective susceptibility

    chi(omega)^-1 = omega_m^2 - omega^2
                    + 16 omega_m delta Omega_m^2 / (4 delta^2 + (kappa - 2 i omega)^2),

with Omega_m = g |alpha|, g = omega' sqrt(hbar / (2 m omega_m)), and
alpha = i Omega_L / (kappa/2 - i delta) the steady-state field from a drive
Omega_L = sqrt(kappa P_i / (2 hbar omega_L)). For blue detuning the spring
stiffens the mode but anti-damps it, and the Raman-scattering decoherence
rate obeys omega_eff / Gamma_d -> 2 delta / kappa at large detuning, so large
coherence demands far-off-resonant driving and, in turn, very large input
power compared with a static trap at the same frequency.

The decoherence rate Gamma_d is reconstructed as the sum of the Stokes and
anti-Stokes Lorentzians with the same prefactor as the damping-rate
difference formula; the source derivation states the sum without writing
the prefactor explicitly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from scipy.constants import c, hbar

from .core import MaterialParams, OpticalParams
from .errors import InfeasibleError, InvalidInputError

__all__ = [
    "SpringConfig",
    "DecoherenceRatio",
    "inverse_susceptibility",
    "effective_frequency_and_damping",
    "decoherence_ratio",
    "coherent_oscillations",
    "required_input_power",
    "focused_intensity",
    "static_trap_intensity",
]


@dataclass(frozen=True)
class SpringConfig:
    """Cavity and oscillator parameters for the dynamic-spring formulas."""

    cavity_length: float
    finesse: float
    detuning: float
    input_power: float
    effective_mass: float
    natural_omega: float
    wavelength: float = 1e-6
    coupling: float | None = None  # cavity pull omega' [rad/s per m]; None -> omega_0 / L

    def __post_init__(self):
        positive = {
            "cavity_length": self.cavity_length,
            "finesse": self.finesse,
            "effective_mass": self.effective_mass,
            "natural_omega": self.natural_omega,
            "wavelength": self.wavelength,
        }
        for name, value in positive.items():
            if value <= 0:
                raise InvalidInputError(f"{name} must be > 0, got {value}")
        if self.input_power < 0:
            raise InvalidInputError(f"input_power must be >= 0, got {self.input_power}")
        if self.coupling is not None and self.coupling <= 0:
            raise InvalidInputError(f"coupling must be > 0, got {self.coupling}")

    @property
    def kappa(self) -> float:
        """Cavity linewidth pi c / (F L) [rad/s]."""
        return math.pi * c / (self.finesse * self.cavity_length)

    @property
    def laser_omega(self) -> float:
        return 2.0 * math.pi * c / self.wavelength

    @property
    def cavity_pull(self) -> float:
        """omega': cavity frequency shift per unit displacement [rad/s per m]."""
        if self.coupling is not None:
            return self.coupling
        return self.laser_omega / self.cavity_length

    @property
    def zero_point_amplitude(self) -> float:
        return math.sqrt(hbar / (2.0 * self.effective_mass * self.natural_omega))

    @property
    def single_photon_coupling(self) -> float:
        """g = omega' z_zp [rad/s]."""
        return self.cavity_pull * self.zero_point_amplitude

    @property
    def drive_amplitude(self) -> float:
        """Omega_L for perfect in-coupling [rad/s]."""
        return math.sqrt(self.kappa * self.input_power / (2.0 * hbar * self.laser_omega))

    @property
    def field_amplitude(self) -> complex:
        """Steady-state cavity field alpha = i Omega_L / (kappa/2 - i delta)."""
        return 1j * self.drive_amplitude / (0.5 * self.kappa - 1j * self.detuning)

    @property
    def pump_amplitude(self) -> float:
        """Omega_m = g |alpha| [rad/s]."""
        return self.single_photon_coupling * abs(self.field_amplitude)


def inverse_susceptibility(omega: float, cfg: SpringConfig) -> complex:
    """chi(omega)^-1 [rad^2/s^2] of the optically dressed oscillator."""
    wm = cfg.natural_omega
    backaction = (
        16.0 * wm * cfg.detuning * cfg.pump_amplitude**2
        / (4.0 * cfg.detuning**2 + (cfg.kappa - 2j * omega) ** 2)
    )
    return wm**2 - omega**2 + backaction


def _omega_eff(cfg: SpringConfig) -> float:
    """Quasi-static spring-shifted frequency sqrt(omega_m^2 + 4 Omega_m^2 omega_m / delta).

    Reduces to the bare frequency without drive and to 2 Omega_m sqrt(omega_m/delta)
    when the spring dominates.
    """
    wm = cfg.natural_omega
    if cfg.detuning == 0.0:
        return wm
    shifted_sq = wm**2 + 4.0 * cfg.pump_amplitude**2 * wm / cfg.detuning
    if shifted_sq <= 0.0:
        raise InfeasibleError(
            "optical spring softens the oscillator past zero frequency "
            f"(omega_eff^2 = {shifted_sq:.3e} rad^2/s^2)"
        )
    return math.sqrt(shifted_sq)


def _lorentzians(cfg: SpringConfig, omega_eff: float) -> tuple[float, float]:
    anti_stokes = 1.0 / ((0.5 * cfg.kappa) ** 2 + (cfg.detuning + omega_eff) ** 2)
    stokes = 1.0 / ((0.5 * cfg.kappa) ** 2 + (cfg.detuning - omega_eff) ** 2)
    return anti_stokes, stokes


def effective_frequency_and_damping(cfg: SpringConfig) -> tuple[float, float]:
    """(omega_eff, gamma_eff): spring-shifted frequency and optical damping rate.

    gamma_eff < 0 for blue detuning (anti-damping); its sign follows the sign
    of the detuning. The Lorentzian denominators are strictly positive for
    any kappa > 0, so no singularity guard is needed.
    """
    w_eff = _omega_eff(cfg)
    anti_stokes, stokes = _lorentzians(cfg, w_eff)
    gamma_eff = (
        cfg.pump_amplitude**2 * cfg.kappa * (cfg.natural_omega / w_eff)
        * (anti_stokes - stokes)
    )
    return w_eff, gamma_eff


class DecoherenceRatio(NamedTuple):
    exact: float
    asymptote: float


def decoherence_ratio(cfg: SpringConfig) -> DecoherenceRatio:
    """omega_eff / Gamma_d with Gamma_d the Stokes + anti-Stokes rate sum.

    The asymptote 2 delta / kappa holds at large detuning; the exact form
    converges onto it as the detuning grows.
    """
    w_eff = _omega_eff(cfg)
    anti_stokes, stokes = _lorentzians(cfg, w_eff)
    gamma_d = (
        cfg.pump_amplitude**2 * cfg.kappa * (cfg.natural_omega / w_eff)
        * (anti_stokes + stokes)
    )
    if gamma_d == 0.0:
        return DecoherenceRatio(math.inf, 2.0 * cfg.detuning / cfg.kappa)
    return DecoherenceRatio(w_eff / gamma_d, 2.0 * cfg.detuning / cfg.kappa)


def coherent_oscillations(cfg: SpringConfig) -> float:
    """N_osc = omega_eff / (2 pi Gamma_d), approaching delta / (pi kappa)."""
    return decoherence_ratio(cfg).exact / (2.0 * math.pi)


def required_input_power(
    target_n_osc: float, target_omega_eff: float, cfg: SpringConfig
) -> float:
    """Input power [W] delivering both a coherence and a frequency target.

    Fixes the detuning through delta = pi kappa N_osc, then inverts the
    spring relation for the pump amplitude and the steady-state field for
    the drive power. The template's detuning and input_power are ignored.
    """
    if target_n_osc <= 0:
        raise InvalidInputError(f"target_n_osc must be > 0, got {target_n_osc}")
    wm = cfg.natural_omega
    if target_omega_eff <= wm:
        raise InfeasibleError(
            f"target omega_eff {target_omega_eff:.4g} rad/s does not exceed the "
            f"bare frequency {wm:.4g} rad/s; the blue-detuned spring only stiffens"
        )
    delta = math.pi * cfg.kappa * target_n_osc
    pump = 0.5 * math.sqrt((target_omega_eff**2 - wm**2) * delta / wm)
    alpha_sq = (pump / cfg.single_photon_coupling) ** 2
    return (
        2.0 * hbar * cfg.laser_omega * alpha_sq
        * ((0.5 * cfg.kappa) ** 2 + delta**2) / cfg.kappa
    )


def focused_intensity(power: float, radius: float) -> float:
    """Intensity [W/m^2] of a beam of the given power focused to the radius."""
    if radius <= 0:
        raise InvalidInputError(f"radius must be > 0, got {radius}")
    return power / (math.pi * radius**2)


def static_trap_intensity(
    material: MaterialParams, optics: OpticalParams, omega_m: float
) -> float:
    """Plane-wave intensity [W/m^2] a static trap needs for the same frequency."""
    if omega_m < 0:
        raise InvalidInputError(f"omega_m must be >= 0, got {omega_m}")
    k = optics.wavevector
    return omega_m**2 * material.density * c / (2.0 * k**2 * (material.dielectric_constant - 1.0))
