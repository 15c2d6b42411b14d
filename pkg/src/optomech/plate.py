"""Flexural eigenmodes of a free circular disk in an optical trap.

The transverse displacement is separated as ``zeta = f(r) cos(m theta)`` and the
radial problem is solved by a Rayleigh–Ritz (weak/variational) method.  The
strain energy of a thin plate with radially varying thickness d(r), writing
g(r) = d(r)^3 and Lam_m = d^2/dr^2 + (1/r) d/dr - m^2/r^2, is

    U_mech = (E / (24 (1 - sigma^2))) * ang *
             Int g(r) [ (Lam_m f)^2
                        + 2 (1 - sigma) ( m^2 (f'/r - f/r^2)^2
                                          - f'' (f'/r - m^2 f/r^2) ) ] r dr

with ``ang`` the angular integral of cos^2(m theta): 2*pi for m=0, pi otherwise.
The kinetic/mass form is Int rho d(r) f^2 r dr (same angular factor), and a
radially varying harmonic trap adds Int rho d(r) omega_opt(r)^2 f^2 r dr.

Free-edge boundary conditions
-----------------------------
Taking the first variation of U_mech with f and f' unconstrained at r=a gives
the natural (free-edge) conditions of the general-curve form specialized to a
circle (n = r, l = theta).  Derived once from the functional above:

    moment:  f'' + sigma (f'/r - m^2 f/r^2) = 0                      at r = a
    shear:   g * [ (Lam_m f)' - (1-sigma) (m^2/r^2) (f' - f/r) ]
             + g' * [ f'' + sigma (f'/r - m^2 f/r^2) ] = 0           at r = a

i.e. the variable-thickness shear condition is the uniform-thickness shear
condition plus g' times the moment condition; where g(a) != 0 and the moment
condition holds it reduces to (Lam_m f)' - (1-sigma)(m^2/r^2)(f' - f/r) = 0.
Because the method is variational these conditions are *natural*: they are not
imposed on the basis but are satisfied weakly by the converged eigenmodes (and
hold exactly in the limit).  This also avoids any special treatment of an
apodized rim where g(a) = 0: the energy integrand simply vanishes there, so no
domain truncation is required.

Basis and quadrature
--------------------
Radial trial functions are the orthonormalized one-sided Jacobi (Zernike-like)
polynomials

    f_k(r) = sqrt(2 (m + 2k + 1)) * x^m * P_k^(0,m)(2 x^2 - 1),   x = r/a,

which build in smoothness at the origin for each m exactly (f'(0)=0 for m=0,
f(0)=0 for m>=1) and contain the rigid modes exactly: f = const (m=0, CM) and
f = r (m=1, tilt) are basis members, so the corresponding zero eigenvalues are
exact to rounding.  Integrals use Gauss–Legendre quadrature on (0, a); with the
defaults every stiffness/mass integrand that is polynomial (uniform or apodized
thickness, plane-wave trap) is integrated exactly.

Eigenvalues from the dense symmetric-definite solve are polished with a
Rayleigh quotient per eigenvector, which removes the O(eps * lambda_max)
solver noise that would otherwise contaminate differences such as the
quadrature law omega(I0)^2 - omega(0)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.constants import c as _C_LIGHT

from .core import (
    DiskGeometry,
    IntensityProfile,
    MaterialParams,
    OpticalParams,
    local_trap_frequency,
)
from .errors import ConfigurationError, InvalidInputError, NumericalFailureError

__all__ = [
    "RadialGrid",
    "PlateOperator",
    "ModeSolution",
    "assemble_plate_operator",
    "solve_modes",
    "strain_energy",
    "strain_energy_parts",
    "optical_energy",
    "energy_ratio",
    "evaluate_mode",
    "intensity_for_cm_frequency",
    "ENERGY_RATIO_INF_THRESHOLD",
]

#: u_mech below this (J, at max|f|=1 normalization) counts as "zero strain".
ENERGY_RATIO_INF_THRESHOLD = 1e-30

DEFAULT_N_POINTS = 240
DEFAULT_N_BASIS = 40


def _jacobi_table(n_max: int, alpha: int, beta: int, u: np.ndarray) -> np.ndarray:
    """P_k^(alpha,beta)(u) for k = 0..n_max-1 by the three-term recurrence."""
    out = np.zeros((max(n_max, 1), u.size))
    out[0] = 1.0
    if n_max >= 2:
        out[1] = 0.5 * (alpha - beta + (alpha + beta + 2) * u)
    for n in range(1, n_max - 1):
        a1 = 2 * (n + 1) * (n + alpha + beta + 1) * (2 * n + alpha + beta)
        a2 = (2 * n + alpha + beta + 1) * (alpha**2 - beta**2)
        a3 = (2 * n + alpha + beta) * (2 * n + alpha + beta + 1) * (2 * n + alpha + beta + 2)
        a4 = 2 * (n + alpha) * (n + beta) * (2 * n + alpha + beta + 2)
        out[n + 1] = ((a2 + a3 * u) * out[n] - a4 * out[n - 1]) / a1
    return out[:n_max]


def _basis_tables(m: int, n_basis: int, x: np.ndarray):
    """Values and first two x-derivatives of the radial basis at x = r/a in (0,1]."""
    u = 2.0 * x**2 - 1.0
    P = _jacobi_table(n_basis, 0, m, u)
    # dP_k^(0,m)/du = (k+m+1)/2 * P_{k-1}^(1,m+1);  d2/du2 adds another shift
    P1 = _jacobi_table(n_basis, 1, m + 1, u)
    P2 = _jacobi_table(n_basis, 2, m + 2, u)
    F = np.zeros((n_basis, x.size))
    F1 = np.zeros_like(F)
    F2 = np.zeros_like(F)
    xm = x**m
    xm1 = m * x ** (m - 1) if m >= 1 else np.zeros_like(x)
    xm2 = m * (m - 1) * x ** (m - 2) if m >= 2 else np.zeros_like(x)
    for k in range(n_basis):
        nrm = math.sqrt(2.0 * (m + 2 * k + 1))
        p = P[k]
        p1 = 0.5 * (k + m + 1) * P1[k - 1] if k >= 1 else 0.0
        p2 = 0.25 * (k + m + 1) * (k + m + 2) * P2[k - 2] if k >= 2 else 0.0
        F[k] = nrm * xm * p
        F1[k] = nrm * (xm1 * p + 4.0 * x ** (m + 1) * p1)
        F2[k] = nrm * (xm2 * p + (8 * m + 4) * xm * p1 + 16.0 * x ** (m + 2) * p2)
    return F, F1, F2


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Gauss–Legendre quadrature grid on (0, a] plus the azimuthal index m."""

    m: int
    radius: float
    nodes: np.ndarray  # strictly increasing, in (0, a)
    weights: np.ndarray  # quadrature weights for Int . dr over (0, a)
    n_basis: int

    def __post_init__(self):
        if self.m < 0 or self.m != int(self.m):
            raise InvalidInputError("azimuthal index m must be a nonnegative integer")
        if not self.radius > 0:
            raise InvalidInputError("grid radius must be > 0")
        if self.n_basis < 4:
            raise InvalidInputError("n_basis must be at least 4")

    @property
    def n_points(self) -> int:
        return self.nodes.size

    @staticmethod
    def build(
        radius: float,
        m: int,
        n_points: int = DEFAULT_N_POINTS,
        n_basis: int = DEFAULT_N_BASIS,
    ) -> "RadialGrid":
        if n_points < 2 * n_basis:
            raise InvalidInputError("n_points must be at least 2*n_basis for exact quadrature")
        xq, wq = np.polynomial.legendre.leggauss(n_points)
        nodes = 0.5 * (xq + 1.0) * radius
        weights = 0.5 * wq * radius
        return RadialGrid(
            m=int(m),
            radius=float(radius),
            nodes=_freeze(nodes),
            weights=_freeze(weights),
            n_basis=int(n_basis),
        )


@dataclass(frozen=True, eq=False)
class PlateOperator:
    """Stiffness/mass pair over a RadialGrid, trap term included in k_total.

    ``k_struct`` is the strain-energy form, ``k_trap`` the optical-potential
    form, ``k_total = k_struct + k_trap``, and ``mass`` the kinetic form; all
    include the angular factor so that U = 0.5 c^T K c is a physical energy [J]
    for basis coefficients c.
    """

    grid: RadialGrid
    disk: DiskGeometry
    material: MaterialParams
    k_struct: np.ndarray
    k_trap: np.ndarray
    mass: np.ndarray
    omega_opt_sq: np.ndarray  # omega_opt(r)^2 at the grid nodes
    basis_f: np.ndarray
    basis_d1: np.ndarray
    basis_d2: np.ndarray

    @property
    def k_total(self) -> np.ndarray:
        return self.k_struct + self.k_trap

    @property
    def angular_factor(self) -> float:
        return 2.0 * math.pi if self.grid.m == 0 else math.pi


@dataclass(frozen=True, eq=False)
class ModeSolution:
    """One mechanical eigenmode, normalized to max|f| = 1 on the grid."""

    m: int
    n: int
    omega: float
    profile: np.ndarray
    u_opt: float
    u_mech: float
    grid: RadialGrid
    coeffs: np.ndarray
    d1_profile: np.ndarray
    lam_profile: np.ndarray  # Lam_m f at the grid nodes (the in-plane Laplacian of zeta)


def assemble_plate_operator(
    disk: DiskGeometry,
    material: MaterialParams,
    optics: OpticalParams,
    intensity: IntensityProfile,
    m: int,
    grid: RadialGrid | None = None,
) -> PlateOperator:
    """Build the Ritz stiffness and mass matrices for azimuthal index m."""
    if grid is None:
        grid = RadialGrid.build(disk.radius, m)
    if grid.m != m:
        raise ConfigurationError(f"grid was built for m={grid.m}, requested m={m}")
    if not math.isclose(grid.radius, disk.radius, rel_tol=1e-12):
        raise ConfigurationError(
            f"grid radius {grid.radius} does not match disk radius {disk.radius}"
        )
    a = disk.radius
    r = grid.nodes
    x = r / a
    F, F1x, F2x = _basis_tables(m, grid.n_basis, x)
    F1 = F1x / a
    F2 = F2x / a**2
    lam = F2 + F1 / r - m**2 * F / r**2
    b_tilt = F1 / r - F / r**2  # f'/r - f/r^2
    b_mom = F1 / r - m**2 * F / r**2  # f'/r - m^2 f/r^2

    ang = 2.0 * math.pi if m == 0 else math.pi
    w_r = grid.weights * r  # r dr measure
    g = disk.g_at(r)
    rho_d = material.density * disk.thickness_at(r)

    def form(wgt, Pa, Pb):
        return (Pa * (wgt * w_r)) @ Pb.T

    dflex = material.flexural_rigidity_factor  # E / (12 (1 - sigma^2))
    sig = material.poisson_ratio
    # 0.5 c^T K c = (dflex/2) * ang * Int g [ (Lam f)^2 + 2(1-sig)(m^2 b_tilt^2 - f'' b_mom) ]
    cross = form(g, F2, b_mom)
    k_struct = (dflex * ang) * (
        form(g, lam, lam)
        + 2.0 * (1.0 - sig) * (m**2 * form(g, b_tilt, b_tilt) - 0.5 * (cross + cross.T))
    )

    omega_opt = local_trap_frequency(material, optics, intensity, r)
    omega_opt_sq = np.asarray(omega_opt, dtype=float) ** 2
    mass = ang * form(rho_d, F, F)
    k_trap = ang * form(rho_d * omega_opt_sq, F, F)

    return PlateOperator(
        grid=grid,
        disk=disk,
        material=material,
        k_struct=_freeze(k_struct),
        k_trap=_freeze(k_trap),
        mass=_freeze(mass),
        omega_opt_sq=_freeze(omega_opt_sq),
        basis_f=_freeze(F),
        basis_d1=_freeze(F1),
        basis_d2=_freeze(F2),
    )


def _count_nodal_circles(profile: np.ndarray) -> int:
    """Interior sign changes of f(r), ignoring samples below noise threshold."""
    thresh = 1e-8 * np.max(np.abs(profile))
    significant = profile[np.abs(profile) > thresh]
    if significant.size < 2:
        return 0
    signs = np.sign(significant)
    return int(np.sum(signs[1:] != signs[:-1]))


def solve_modes(op: PlateOperator, k_modes: int) -> list[ModeSolution]:
    """Lowest k_modes eigenmodes of the trapped disk, sorted by frequency."""
    n_basis = op.grid.n_basis
    if not 1 <= k_modes <= n_basis:
        raise InvalidInputError(f"k_modes must be in 1..{n_basis}")
    K = op.k_total
    M = op.mass
    try:
        w2, V = sla.eigh(K, M)
    except (sla.LinAlgError, ValueError) as exc:
        raise NumericalFailureError(
            "generalized eigensolve failed",
            report=f"m={op.grid.m}, n_basis={n_basis}: {exc}",
        ) from exc
    # Rayleigh-quotient polish: the raw eigenvalues carry absolute noise of
    # order eps*lambda_max, which would swamp small frequency differences; the
    # quotient of the computed eigenvectors is accurate to second order.
    num = np.einsum("ji,jk,ki->i", V, K, V)
    den = np.einsum("ji,jk,ki->i", V, M, V)
    w2 = num / den
    order = np.argsort(w2)
    w2 = w2[order]
    V = V[:, order]

    scale = max(abs(w2[0]), abs(w2[min(k_modes, len(w2)) - 1]), 1.0)
    if w2[0] < -1e-6 * scale:
        raise NumericalFailureError(
            "eigensolve produced a significantly negative eigenvalue",
            report=f"min eigenvalue {w2[0]:.6g} at m={op.grid.m}",
        )

    modes: list[ModeSolution] = []
    m = op.grid.m
    r = op.grid.nodes
    for i in range(k_modes):
        c = V[:, i].copy()
        f = op.basis_f.T @ c
        # normalize max|f| = 1; sign anchor: center value positive for m=0
        # (when it is significant), otherwise peak positive
        peak = int(np.argmax(np.abs(f)))
        c = c / f[peak]
        f = op.basis_f.T @ c
        if m == 0 and abs(f[0]) > 1e-8 and f[0] < 0:
            c = -c
            f = -f
        d1 = op.basis_d1.T @ c
        d2 = op.basis_d2.T @ c
        lam = d2 + d1 / r - m**2 * f / r**2
        u_mech = 0.5 * float(c @ op.k_struct @ c)
        u_opt = 0.5 * float(c @ op.k_trap @ c)
        omega = math.sqrt(max(w2[i], 0.0))
        modes.append(
            ModeSolution(
                m=m,
                n=_count_nodal_circles(f),
                omega=omega,
                profile=_freeze(f),
                u_opt=max(u_opt, 0.0),
                u_mech=max(u_mech, 0.0),
                grid=op.grid,
                coeffs=_freeze(c),
                d1_profile=_freeze(d1),
                lam_profile=_freeze(lam),
            )
        )
    return modes


def evaluate_mode(mode: ModeSolution, r) -> np.ndarray:
    """Evaluate the mode profile f(r) at arbitrary radii via the basis."""
    r = np.asarray(r, dtype=float)
    x = np.clip(r / mode.grid.radius, 0.0, 1.0)
    F, _, _ = _basis_tables(mode.m, mode.grid.n_basis, x)
    return F.T @ mode.coeffs


def strain_energy_parts(
    mode: ModeSolution, disk: DiskGeometry, material: MaterialParams
) -> tuple[float, float]:
    """Split the bending energy [J] into (laplacian_part, gaussian_part).

    The first term integrates (lap f)^2 — the squared sum of principal
    curvatures, which sets the local dilatation and hence all thermoelastic
    heat flow. The second is the (1 - sigma) Gaussian-curvature term, which
    reduces to a contour integral around the rim and may take either sign.
    For free edges it need not be small: nearly developable saddle shapes
    (small lap f, large twist) store most of their energy here.
    """
    grid = mode.grid
    m = mode.m
    r = grid.nodes
    f, d1, lam = mode.profile, mode.d1_profile, mode.lam_profile
    d2 = lam - d1 / r + m**2 * f / r**2
    b_tilt = d1 / r - f / r**2
    b_mom = d1 / r - m**2 * f / r**2
    g = disk.g_at(r)
    ang = 2.0 * math.pi if m == 0 else math.pi
    pref = material.flexural_rigidity_factor / 2.0 * ang
    lap_part = pref * float(np.sum(grid.weights * r * g * lam**2))
    gauss_part = pref * 2.0 * (1.0 - material.poisson_ratio) * float(
        np.sum(grid.weights * r * g * (m**2 * b_tilt**2 - d2 * b_mom))
    )
    return lap_part, gauss_part


def strain_energy(mode: ModeSolution, disk: DiskGeometry, material: MaterialParams) -> float:
    """Bending strain energy [J] of the mode at its stored (unit-max) amplitude.

    Evaluates the same variational integrand as the stiffness assembly, from
    the stored profile and its derivatives on the mode's grid, including the
    (1 - sigma) Gaussian-curvature term.
    """
    lap_part, gauss_part = strain_energy_parts(mode, disk, material)
    return max(lap_part + gauss_part, 0.0)


def optical_energy(
    mode: ModeSolution,
    disk: DiskGeometry,
    material: MaterialParams,
    optics: OpticalParams,
    intensity: IntensityProfile,
) -> float:
    """Potential energy stored in the optical trap: 0.5 Int rho d(r) omega_opt^2 f^2 dA."""
    grid = mode.grid
    r = grid.nodes
    omega_opt = np.asarray(local_trap_frequency(material, optics, intensity, r), dtype=float)
    rho_d = material.density * disk.thickness_at(r)
    ang = 2.0 * math.pi if mode.m == 0 else math.pi
    return 0.5 * ang * float(np.sum(grid.weights * r * rho_d * omega_opt**2 * mode.profile**2))


def energy_ratio(mode: ModeSolution) -> float:
    """U_opt / U_mech, with +inf when the strain energy is numerically zero."""
    if mode.u_mech < ENERGY_RATIO_INF_THRESHOLD:
        return math.inf
    return mode.u_opt / mode.u_mech


def intensity_for_cm_frequency(
    disk: DiskGeometry,
    material: MaterialParams,
    optics: OpticalParams,
    intensity_factory,
    target_omega: float,
    grid: RadialGrid | None = None,
    rel_tol: float = 1e-12,
) -> tuple[float, ModeSolution]:
    """Peak intensity that tunes the lowest m=0 mode to ``target_omega`` [rad/s].

    ``intensity_factory(i0)`` must return an IntensityProfile that scales
    linearly with its argument (i0 acts as a peak-intensity multiplier), e.g.
    ``lambda i0: GaussianBeam(i0, waist)``.  Returns ``(i0, mode)`` with the
    mode solved at the final intensity.

    The lowest generalized eigenvalue of K_struct + i0*K_trap is a pointwise
    minimum of affine functions of i0, hence concave and (for a strictly
    positive intensity profile) strictly increasing and unbounded, so the
    Hellmann-Feynman Newton iteration used here converges monotonically after
    at most one overshoot; no bracketing is required.
    """
    if not target_omega > 0:
        raise InvalidInputError("target_omega must be > 0")
    if grid is None:
        grid = RadialGrid.build(disk.radius, 0)
    elif grid.m != 0:
        raise ConfigurationError("intensity_for_cm_frequency requires an m=0 grid")

    r_test = np.array([0.0, disk.radius / 3.0, disk.radius])
    base = np.asarray(intensity_factory(1.0).at(r_test), dtype=float)
    doubled = np.asarray(intensity_factory(2.0).at(r_test), dtype=float)
    if not np.allclose(doubled, 2.0 * base, rtol=1e-9, atol=0.0):
        raise ConfigurationError(
            "intensity_factory must scale linearly with its argument"
        )

    op1 = assemble_plate_operator(disk, material, optics, intensity_factory(1.0), 0, grid)
    k_struct, k_trap1, mass = op1.k_struct, op1.k_trap, op1.mass
    if not np.any(k_trap1):
        raise InvalidInputError("intensity_factory(1.0) produces no trapping potential")

    target_sq = target_omega**2
    # Plane-wave-equivalent starting point (exact when the profile is uniform).
    i0 = (
        target_sq
        * material.density
        * _C_LIGHT
        / (2.0 * optics.wavevector**2 * (material.dielectric_constant - 1.0))
    )
    lam = -math.inf
    for _ in range(200):
        try:
            w2, V = sla.eigh(k_struct + i0 * k_trap1, mass, subset_by_index=(0, 0))
        except (sla.LinAlgError, ValueError) as exc:
            raise NumericalFailureError(
                "eigensolve failed during intensity root-finding",
                report=f"i0={i0:.6g}: {exc}",
            ) from exc
        v = V[:, 0]
        vmv = float(v @ mass @ v)
        lam = float(v @ (k_struct + i0 * k_trap1) @ v) / vmv
        if abs(math.sqrt(max(lam, 0.0)) - target_omega) <= rel_tol * target_omega:
            break
        slope = float(v @ k_trap1 @ v) / vmv
        if not slope > 0.0:
            raise NumericalFailureError(
                "trap term does not raise the CM frequency",
                report=f"i0={i0:.6g}, d(omega^2)/d(i0)={slope:.6g}",
            )
        i0 = max(i0 - (lam - target_sq) / slope, 0.0)
    else:
        raise NumericalFailureError(
            "intensity root-finding did not converge",
            report=f"target={target_omega:.6g} rad/s, last omega^2={lam:.6g}",
        )

    op = assemble_plate_operator(disk, material, optics, intensity_factory(i0), 0, grid)
    return i0, solve_modes(op, 1)[0]
