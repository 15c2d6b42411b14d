"""Rigid membrane on an Euler-Bernoulli tether: spectrum, shapes, energies.

A membrane of mass M hangs at the end of a clamped tether of length L and
square cross-section b, and feels an optical restoring force M*omega_opt^2
at its attachment point. Transverse displacements phi(x) e^{-i omega t}
satisfy the beam equation, so

    phi(x) = c1 (sin kx - sinh kx) + c2 (cos kx - cosh kx),
    omega  = k^2 b sqrt(E / (12 rho)),

and the end conditions (zero moment, force balance on the mass) give the
characteristic equation

    M (omega^2 - omega_opt^2) (cos g sinh g - sin g cosh g)
        + (E b^4 beta^3 omega^{3/2} / 12) (1 + cos g cosh g) = 0,

with g = beta L sqrt(omega) and beta = (12 rho / (E b^2))^{1/4}. All
hyperbolics are folded into u = e^{-g} analytically (the residual is the
left side times 2 e^{-g}, then normalized), so no overflow guard is needed
at any g. Away from degeneracies the spectrum is a center-of-mass branch
near sqrt(omega_p^2 + omega_opt^2) plus nearly flat tether branches at the
roots of tan g = tanh g, with avoided crossings of fractional half-width
sqrt(m_t / 2M) / g where the branches meet.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from .core import MaterialParams, TetherGeometry
from .errors import InvalidInputError, NumericalFailureError

__all__ = [
    "RigidTetherSystem",
    "TetherMode",
    "characteristic_residual",
    "tether_asymptotes",
    "avoided_crossing_half_gap",
    "solve_tether_spectrum",
    "tether_mode_shape",
    "tether_energy_ratio",
    "composed_energy_ratio",
]

#: modes within this many half-gaps of a tether asymptote count as "near" it
CROSSING_PROXIMITY = 5.0
#: shape-grid size for energy integrals (Simpson; power of two plus one)
SHAPE_GRID_POINTS = 8193


@dataclass(frozen=True)
class RigidTetherSystem:
    """Membrane of mass M on a single clamped tether with an optical trap."""

    membrane_mass: float
    tether: TetherGeometry
    material: MaterialParams
    omega_opt: float = 0.0

    def __post_init__(self):
        if self.membrane_mass <= 0:
            raise InvalidInputError(f"membrane_mass must be > 0, got {self.membrane_mass}")
        if self.omega_opt < 0:
            raise InvalidInputError(f"omega_opt must be >= 0, got {self.omega_opt}")

    @property
    def tether_mass(self) -> float:
        return self.material.density * self.tether.width**2 * self.tether.length

    @property
    def mass_ratio(self) -> float:
        """Membrane-to-tether mass ratio M / m_t."""
        return self.membrane_mass / self.tether_mass

    @property
    def beta(self) -> float:
        """Dispersion constant [s^(1/2)/m]: k = beta sqrt(omega)."""
        b = self.tether.width
        return (12.0 * self.material.density / (self.material.youngs_modulus * b**2)) ** 0.25

    @property
    def bending_stiffness(self) -> float:
        """Flexural rigidity E I of the square tether [N m^2]."""
        return self.material.youngs_modulus * self.tether.width**4 / 12.0

    @property
    def pendulum_omega(self) -> float:
        """Low-frequency mode: static tip stiffness 3 E I / L^3 against M."""
        return math.sqrt(
            3.0 * self.bending_stiffness / (self.membrane_mass * self.tether.length**3)
        )

    def gamma(self, omega):
        """Dimensionless tether phase g = beta L sqrt(omega)."""
        return self.beta * self.tether.length * np.sqrt(omega)

    def omega_from_gamma(self, gamma):
        return (gamma / (self.beta * self.tether.length)) ** 2


@dataclass(frozen=True, eq=False)
class TetherMode:
    """One solved mode. Coefficients are the e^{-gamma}-scaled (c1, c2)."""

    omega: float
    gamma: float
    c1: float
    c2: float
    x: np.ndarray
    shape: np.ndarray
    kind: str  # "CM" | "Tether" | "Mixed"
    tether_index: int | None
    u_opt: float
    u_mech: float
    phi_end: float


def characteristic_residual(omega, sys: RigidTetherSystem):
    """Scaled residual of the characteristic equation; zero at eigenfrequencies.

    Equals the determinant times 2 e^{-gamma}, divided by a positive envelope
    so values are O(1) near roots at any gamma. Accepts scalars or arrays.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise InvalidInputError("omega must be > 0")
    g = sys.gamma(omega)
    u = np.exp(-g)
    s, c = np.sin(g), np.cos(g)
    inertial = sys.membrane_mass * (omega**2 - sys.omega_opt**2)
    elastic = sys.bending_stiffness * sys.beta**3 * omega**1.5
    a_fold = c * (1.0 - u**2) - s * (1.0 + u**2)  # 2 e^-g (cos sinh - sin cosh)
    b_fold = 2.0 * u + c * (1.0 + u**2)  # 2 e^-g (1 + cos cosh)
    envelope = 2.0 * sys.membrane_mass * (omega**2 + sys.omega_opt**2) + 2.0 * elastic
    out = (inertial * a_fold + elastic * b_fold) / envelope
    return float(out) if out.ndim == 0 else out


def _asymptote_equation(g):
    u = np.exp(-g)
    return np.cos(g) * (1.0 - u**2) - np.sin(g) * (1.0 + u**2)


def tether_asymptotes(sys: RigidTetherSystem, omega_max: float) -> list[tuple[int, float]]:
    """Flat-branch frequencies: (n, omega_n) with tan g = tanh g, g_n ~ pi(n + 1/4)."""
    if omega_max <= 0:
        raise InvalidInputError("omega_max must be > 0")
    g_max = float(sys.gamma(omega_max))
    out = []
    n = 1
    while True:
        center = math.pi * (n + 0.25)
        if center - 0.35 > g_max:
            break
        g_n = brentq(_asymptote_equation, center - 0.35, center + 0.35, rtol=1e-15)
        omega_n = sys.omega_from_gamma(g_n)
        if omega_n <= omega_max:
            out.append((n, omega_n))
        n += 1
    return out


def avoided_crossing_half_gap(sys: RigidTetherSystem, omega_n: float) -> float:
    """Half-splitting [rad/s] of the avoided crossing at the asymptote omega_n."""
    g_n = float(sys.gamma(omega_n))
    return omega_n * math.sqrt(sys.tether_mass / (2.0 * sys.membrane_mass)) / g_n


def _shape_arrays(sys: RigidTetherSystem, omega: float, x: np.ndarray):
    """Scaled mode shape and curvature at the raw (un-normalized) amplitude.

    Works with phit = e^{-gamma} phi so every exponential has a non-positive
    argument; returns (c1s, c2s, phit, phit_xx).
    """
    g = float(sys.gamma(omega))
    k = sys.beta * math.sqrt(omega)
    u = math.exp(-g)
    s, c = math.sin(g), math.cos(g)
    c1s = -(c * u + 0.5 * (1.0 + u**2))
    c2s = s * u + 0.5 * (1.0 - u**2)
    q = k * x
    tail = (
        -0.5 * (s - c) * np.exp(q - g)
        + 0.5 * np.exp(q - 2.0 * g)
        - 0.5 * ((s + c) * u + 1.0) * np.exp(-q)
    )
    phit = c1s * np.sin(q) + c2s * np.cos(q) + tail
    phit_xx = k**2 * (-c1s * np.sin(q) - c2s * np.cos(q) + tail)
    return c1s, c2s, phit, phit_xx


def tether_mode_shape(omega: float, sys: RigidTetherSystem, n_grid: int = SHAPE_GRID_POINTS) -> TetherMode:
    """Build the mode at a solved frequency: shape, energies, classification.

    Normalized to phi(L) = 1 when the endpoint carries meaningful amplitude
    (|phi(L)| > 1e-6 max|phi|), otherwise to max|phi| = 1.
    """
    if omega <= 0:
        raise InvalidInputError(f"omega must be > 0, got {omega}")
    L = sys.tether.length
    x = np.linspace(0.0, L, n_grid)
    c1s, c2s, phit, phit_xx = _shape_arrays(sys, omega, x)
    peak = float(np.max(np.abs(phit)))
    end = float(phit[-1])
    scale = end if abs(end) > 1e-6 * peak else float(phit[np.argmax(np.abs(phit))])
    shape = phit / scale
    curv = phit_xx / scale
    u_mech = 0.5 * sys.bending_stiffness * float(simpson(curv**2, x=x))
    phi_end = float(shape[-1])
    u_opt = 0.5 * sys.membrane_mass * sys.omega_opt**2 * phi_end**2
    kind, index = _classify(sys, omega)
    return TetherMode(
        omega=float(omega),
        gamma=float(sys.gamma(omega)),
        c1=c1s / scale,
        c2=c2s / scale,
        x=x,
        shape=shape,
        kind=kind,
        tether_index=index,
        u_opt=u_opt,
        u_mech=u_mech,
        phi_end=phi_end,
    )


def _classify(sys: RigidTetherSystem, omega: float) -> tuple[str, int | None]:
    """Label a root CM / Tether / Mixed by proximity to the flat branches.

    A root within CROSSING_PROXIMITY half-gaps of an asymptote is a tether
    mode, unless the CM branch sqrt(omega_p^2 + omega_opt^2) also runs within
    that window - then the branches hybridize and the root is Mixed.
    """
    g = float(sys.gamma(omega))
    n_near = max(1, round(g / math.pi - 0.25))
    omega_cm = math.hypot(sys.pendulum_omega, sys.omega_opt)
    best = None
    for n in (n_near - 1, n_near, n_near + 1):
        if n < 1:
            continue
        center = math.pi * (n + 0.25)
        g_n = brentq(_asymptote_equation, center - 0.35, center + 0.35, rtol=1e-15)
        omega_n = sys.omega_from_gamma(g_n)
        if best is None or abs(omega - omega_n) < abs(omega - best[1]):
            best = (n, omega_n)
    n, omega_n = best
    window = CROSSING_PROXIMITY * avoided_crossing_half_gap(sys, omega_n)
    if abs(omega - omega_n) < window:
        if abs(omega_cm - omega_n) < window:
            return "Mixed", n
        return "Tether", n
    return "CM", None


def tether_energy_ratio(mode: TetherMode, sys: RigidTetherSystem) -> float:
    """U_opt / U_mech for a solved mode (inf if the tether stores nothing)."""
    if mode.u_mech <= 0.0:
        return math.inf
    return mode.u_opt / mode.u_mech


def composed_energy_ratio(disk_ratio: float, tether_ratio: float) -> float:
    """Series composition: the strain energies add at shared optical energy."""
    if disk_ratio < 0 or tether_ratio < 0:
        raise InvalidInputError("energy ratios must be >= 0")
    if disk_ratio == 0.0 or tether_ratio == 0.0:
        return 0.0
    if math.isinf(disk_ratio):
        return tether_ratio
    if math.isinf(tether_ratio):
        return disk_ratio
    return 1.0 / (1.0 / disk_ratio + 1.0 / tether_ratio)


def _scan_roots(sys: RigidTetherSystem, g_lo: float, g_hi: float, step: float) -> list[float]:
    """Bracket sign changes of the residual on a gamma grid and polish each."""
    grid = [np.arange(g_lo, g_hi + step, step)]
    # extra density around each flat-branch asymptote, where the crossing
    # pair of roots straddles the branch within a fraction of a half-gap
    n = 1
    while math.pi * (n + 0.25) < g_hi + 0.5:
        center = math.pi * (n + 0.25)
        grid.append(center + np.linspace(-0.2, 0.2, 401))
        n += 1
    g = np.unique(np.concatenate(grid))
    g = g[(g >= g_lo) & (g <= g_hi)]
    res = characteristic_residual(sys.omega_from_gamma(g), sys)
    sign = np.sign(res)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    roots = []
    for i in flips:
        g_root = brentq(
            lambda gg: characteristic_residual(sys.omega_from_gamma(gg), sys),
            g[i],
            g[i + 1],
            rtol=1e-15,
        )
        roots.append(float(sys.omega_from_gamma(g_root)))
    hits = np.nonzero(res == 0.0)[0]
    roots.extend(float(sys.omega_from_gamma(g[i])) for i in hits)
    roots.sort()
    dedup = []
    for r in roots:
        if not dedup or r - dedup[-1] > 1e-10 * r:
            dedup.append(r)
    return dedup


def solve_tether_spectrum(sys: RigidTetherSystem, omega_max: float) -> list[TetherMode]:
    """All modes with 0 < omega <= omega_max, in increasing frequency.

    Scans the residual on a gamma grid (uniform plus windows around the flat
    branches), brackets sign changes, and polishes with a derivative-free
    solver. The scan is repeated 4x denser until the root multiset stops
    changing; if it never stabilizes, raises with the suspect interval.
    """
    if omega_max <= 0:
        raise InvalidInputError(f"omega_max must be > 0, got {omega_max}")
    g_lo = 0.3 * float(sys.gamma(sys.pendulum_omega))
    g_hi = float(sys.gamma(omega_max))
    if g_hi <= g_lo:
        return []
    found = None
    for step in (math.pi / 400, math.pi / 1600, math.pi / 6400):
        roots = _scan_roots(sys, g_lo, g_hi, step)
        if found is not None and len(roots) == len(found):
            if all(abs(a - b) <= 1e-8 * b for a, b in zip(found, roots)):
                found = roots
                break
        found = roots
    else:
        coarse = _scan_roots(sys, g_lo, g_hi, math.pi / 1600)
        missing = [r for r in found if all(abs(r - c) > 1e-6 * r for c in coarse)]
        raise NumericalFailureError(
            "tether root scan failed to stabilize",
            report={"suspect_omegas": missing or found, "omega_max": omega_max},
        )
    for r in found:
        if abs(characteristic_residual(r, sys)) >= 1e-8:
            raise NumericalFailureError(
                "tether root polish left a large residual",
                report={"omega": r, "residual": characteristic_residual(r, sys)},
            )
    return [tether_mode_shape(r, sys) for r in found]
