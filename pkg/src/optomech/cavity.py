"""Fox-Li eigenmodes of a symmetric Fabry-Perot cavity with a membrane inside.

The field is scalar and paraxial, axisymmetric, and completely described by
its transverse profile E(r) on a quasi-discrete Hankel grid (Bessel-zero
sampling).  Free propagation multiplies the order-0 Hankel transform by
exp(i k z - i k_r^2 z / (2 k)); reflection off a spherical mirror of curvature
radius R_c multiplies the real-space field by sqrt(R_m) exp(-2ik(R_c -
sqrt(R_c^2 - r^2))) inside the mirror aperture r_m and discards the rest.
With the exp(+ikz) carrier convention the mirror sag phase must carry the
minus sign (the surface at radius r sits *closer* by the sag, shortening the
path), which is what makes the resonator refocus rather than defocus.

The membrane at the cavity center reflects and transmits with the lossless
thin-dielectric-slab amplitudes evaluated at the local thickness d(r),

    r_s = (1 - n) / (1 + n),  phi = n k d(r),  n = sqrt(epsilon),
    r = r_s (1 - e^{2 i phi}) / (1 - r_s^2 e^{2 i phi}),
    t = (1 - r_s^2) e^{i phi} / (1 - r_s^2 e^{2 i phi}),

so |r|^2 + |t|^2 = 1 pointwise.  Because the membrane sits at the symmetry
plane, the round-trip operator block-diagonalizes into a symmetric family
(even field, r + t recombination, intensity antinode at the membrane - the
trapped configuration) and an antisymmetric family (r - t).  One half-trip
of a family is

    T = (r +/- t) * [ propagate(L/2) -> mirror -> propagate(L/2) ],

and the full round trip is T^2, so the round-trip field eigenvalue is the
square of the dominant eigenvalue of T.  The dominant eigenpair is extracted
by a restarted Krylov (Arnoldi) power method: plain power iteration cannot
separate the near-unimodular transverse eigenvalues of a low-loss resonator,
which differ mostly in (Gouy) phase, while the Krylov Ritz values resolve
them cleanly.  Round-trip loss, linewidth, and finesse follow as

    loss = 1 - |lambda_rt|^2,  kappa = loss * c / (2 L),  F = pi c / (kappa L).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as _C_LIGHT
from scipy.constants import hbar as _HBAR
from scipy.optimize import brentq
from scipy.special import j0 as _bessel_j0
from scipy.special import j1 as _bessel_j1
from scipy.special import jn_zeros as _bessel_zeros

from .core import ApodizedThickness, DiskGeometry, MaterialParams, OpticalParams
from .errors import (
    ConfigurationError,
    InvalidInputError,
    NumericalFailureError,
)

__all__ = [
    "HankelGrid",
    "FieldProfile",
    "CavitySetup",
    "CavityModeResult",
    "gaussian_field",
    "build_grid",
    "qdht",
    "propagate",
    "mirror_reflect",
    "sheet_amplitudes",
    "sheet_scatter",
    "solve_cavity_mode",
    "recoil_n_osc",
    "recoil_n_osc_momentum_route",
    "recoil_photon_rate",
    "n_osc_total",
    "membrane_peak_intensity_for_cm",
    "BudgetPoint",
    "coherence_budget",
    "DEFAULT_N_POINTS",
    "DEFAULT_APERTURE_FACTOR",
]

#: Default number of Bessel-zero samples of the Hankel grid.
DEFAULT_N_POINTS = 1024
#: Grid aperture radius as a multiple of the mirror aperture r_m (the mirror
#: mask is the outermost feature the grid must represent).
DEFAULT_APERTURE_FACTOR = 1.2
#: Longitudinal sampling planes for the mode-volume integral.
DEFAULT_N_PLANES = 64


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class HankelGrid:
    """Order-0 quasi-discrete Hankel transform grid on Bessel-zero samples.

    Radii sit at r_j = alpha_j R / S with alpha_j the j-th zero of J0 and
    S = alpha_{N+1}; conjugate spatial frequencies at k_j = alpha_j / R.  The
    scaled transform matrix is symmetric and orthonormal to ~1e-13, so
    forward followed by inverse reproduces a field on the grid exactly to
    rounding.  ``weights`` integrates Int f(r) r dr over (0, R); the dual
    weights for Int F(k) k dk follow by R <-> S/R duality and make the
    transform exactly Parseval on the grid.
    """

    n_points: int
    aperture_radius: float
    alpha: np.ndarray
    s_bound: float  # alpha_{N+1}
    radii: np.ndarray
    frequencies: np.ndarray
    j1: np.ndarray  # |J1(alpha_j)|
    c_matrix: np.ndarray
    weights: np.ndarray
    orthonormality_defect: float

    order = 0

    @staticmethod
    def build(aperture_radius: float, n_points: int = DEFAULT_N_POINTS) -> "HankelGrid":
        if not aperture_radius > 0:
            raise InvalidInputError("aperture_radius must be > 0")
        if n_points < 8:
            raise InvalidInputError("n_points must be at least 8")
        zeros = _bessel_zeros(0, n_points + 1)
        alpha, s_bound = zeros[:n_points], zeros[n_points]
        radii = alpha * (aperture_radius / s_bound)
        freqs = alpha / aperture_radius
        j1 = np.abs(_bessel_j1(alpha))
        c_matrix = (2.0 / s_bound) * _bessel_j0(np.outer(alpha, alpha) / s_bound) / np.outer(j1, j1)
        defect = float(np.max(np.abs(c_matrix @ c_matrix - np.eye(n_points))))
        # the quasi-orthogonality tightens with grid size (~1e-9 at 64
        # samples, ~5e-13 at 1024); the gate only has to catch real breakage
        if defect > 1e-7:
            raise NumericalFailureError(
                "Hankel transform matrix failed the orthonormality check",
                report=f"n_points={n_points}: max |C C - I| = {defect:.3e}",
            )
        weights = 2.0 * aperture_radius**2 / (s_bound**2 * j1**2)
        return HankelGrid(
            n_points=int(n_points),
            aperture_radius=float(aperture_radius),
            alpha=_freeze(alpha),
            s_bound=float(s_bound),
            radii=_freeze(radii),
            frequencies=_freeze(freqs),
            j1=_freeze(j1),
            c_matrix=_freeze(c_matrix),
            weights=_freeze(weights),
            orthonormality_defect=defect,
        )

    @property
    def frequency_weights(self) -> np.ndarray:
        """Quadrature weights for Int F(k) k dk on the frequency samples."""
        return 2.0 / (self.aperture_radius**2 * self.j1**2)


@dataclass(frozen=True, eq=False)
class FieldProfile:
    """Complex field samples on a HankelGrid, in radius or frequency domain."""

    grid: HankelGrid
    values: np.ndarray
    wavelength: float
    domain: str = "radius"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n_points,):
            raise InvalidInputError("field values must match the grid size")
        if not np.all(np.isfinite(values.view(float))):
            raise InvalidInputError("field values must be finite")
        if not self.wavelength > 0:
            raise InvalidInputError("wavelength must be > 0")
        if self.domain not in ("radius", "frequency"):
            raise InvalidInputError("domain must be 'radius' or 'frequency'")
        object.__setattr__(self, "values", _freeze(values))

    @property
    def wavevector(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def power(self) -> float:
        """Int |E|^2 r dr (or its Parseval dual in the frequency domain)."""
        w = self.grid.weights if self.domain == "radius" else self.grid.frequency_weights
        return float(np.sum(w * np.abs(self.values) ** 2))


def gaussian_field(grid: HankelGrid, waist: float, wavelength: float) -> FieldProfile:
    """Unit-peak Gaussian E(r) = exp(-r^2/waist^2) on the grid."""
    if not waist > 0:
        raise InvalidInputError("waist must be > 0")
    return FieldProfile(grid, np.exp(-(grid.radii**2) / waist**2), wavelength)


def qdht(field: FieldProfile, direction: str = "forward") -> FieldProfile:
    """Quasi-discrete order-0 Hankel transform between radius and frequency.

    ``forward`` maps a radius-domain field to F(k_m) = Int E(r) J0(k_m r) r dr;
    ``inverse`` maps back.  Applying one after the other reproduces the input
    to the grid's orthonormality defect (~1e-13).
    """
    grid = field.grid
    if direction == "forward":
        if field.domain != "radius":
            raise ConfigurationError("forward transform expects a radius-domain field")
        scale = grid.aperture_radius**2 / grid.s_bound
        out_domain = "frequency"
    elif direction == "inverse":
        if field.domain != "frequency":
            raise ConfigurationError("inverse transform expects a frequency-domain field")
        scale = (grid.s_bound / grid.aperture_radius) ** 2 / grid.s_bound
        out_domain = "radius"
    else:
        raise InvalidInputError("direction must be 'forward' or 'inverse'")
    values = scale * grid.j1 * (grid.c_matrix @ (field.values / grid.j1))
    return FieldProfile(grid, values, field.wavelength, out_domain)


def propagate(field: FieldProfile, distance: float) -> FieldProfile:
    """Paraxial free propagation over ``distance`` [m] (either sign).

    Multiplies the Hankel transform by exp(i k z - i k_r^2 z / (2k)); unitary,
    and additive in z by construction.
    """
    if field.domain != "radius":
        raise ConfigurationError("propagate expects a radius-domain field")
    if distance == 0.0:
        return field
    k = field.wavevector
    spectrum = qdht(field, "forward")
    phase = np.exp(1j * (k * distance - field.grid.frequencies**2 * distance / (2.0 * k)))
    shifted = FieldProfile(field.grid, spectrum.values * phase, field.wavelength, "frequency")
    return qdht(shifted, "inverse")


@dataclass(frozen=True)
class CavitySetup:
    """Symmetric two-mirror cavity with an optional membrane at its center."""

    length: float = 1.99e-2
    mirror_curvature: float = 1.0e-2
    mirror_reflectance: float = 1.0
    mirror_aperture: float = 0.95e-3
    membrane: DiskGeometry | None = None
    material: MaterialParams | None = None

    def __post_init__(self):
        if not self.length > 0:
            raise InvalidInputError("cavity length must be > 0")
        if not self.mirror_curvature > 0:
            raise InvalidInputError("mirror curvature radius must be > 0")
        if not 0 < self.mirror_reflectance <= 1:
            raise InvalidInputError("mirror reflectance must lie in (0, 1]")
        if not 0 < self.mirror_aperture <= self.mirror_curvature:
            raise InvalidInputError("mirror aperture must lie in (0, mirror curvature]")
        if (self.membrane is None) != (self.material is None):
            raise ConfigurationError("membrane and material must be provided together")

    @property
    def free_spectral_range(self) -> float:
        """Longitudinal mode spacing [rad/s]."""
        return math.pi * _C_LIGHT / self.length


def build_grid(setup: CavitySetup, n_points: int = DEFAULT_N_POINTS,
               aperture_factor: float = DEFAULT_APERTURE_FACTOR) -> HankelGrid:
    """Hankel grid sized to contain the mirror aperture with margin."""
    if not aperture_factor > 1:
        raise InvalidInputError("aperture_factor must exceed 1")
    return HankelGrid.build(aperture_factor * setup.mirror_aperture, n_points)


def mirror_reflect(field: FieldProfile, setup: CavitySetup) -> FieldProfile:
    """Spherical-mirror reflection: sag phase inside r_m, zero outside.

    The exact sag phase -2k(R_c - sqrt(R_c^2 - r^2)) expands to -k r^2 / R_c
    near the axis (curvature magnitude 2k/(2 R_c)); the sign follows the
    exp(+ikz) carrier convention (see module docstring).
    """
    if field.domain != "radius":
        raise ConfigurationError("mirror_reflect expects a radius-domain field")
    grid = field.grid
    if grid.aperture_radius < setup.mirror_aperture:
        raise ConfigurationError(
            f"grid aperture {grid.aperture_radius} is smaller than the mirror "
            f"aperture {setup.mirror_aperture}"
        )
    r = grid.radii
    r_c = setup.mirror_curvature
    inside = r <= setup.mirror_aperture
    sag = r_c - np.sqrt(np.maximum(r_c**2 - np.where(inside, r, 0.0) ** 2, 0.0))
    values = np.where(
        inside,
        math.sqrt(setup.mirror_reflectance)
        * field.values
        * np.exp(-2j * field.wavevector * sag),
        0.0,
    )
    return FieldProfile(grid, values, field.wavelength)


def sheet_amplitudes(thickness, material: MaterialParams, wavevector: float):
    """Lossless-slab reflection/transmission amplitudes at local thickness.

    Vectorized over ``thickness``; returns (r, t) with |r|^2 + |t|^2 = 1
    pointwise, identical from either side (symmetric slab).
    """
    n = math.sqrt(material.dielectric_constant)
    r_s = (1.0 - n) / (1.0 + n)
    phi = n * wavevector * np.asarray(thickness, dtype=float)
    e2 = np.exp(2j * phi)
    denom = 1.0 - r_s**2 * e2
    refl = r_s * (1.0 - e2) / denom
    trans = (1.0 - r_s**2) * np.exp(1j * phi) / denom
    return refl, trans


def sheet_scatter(
    field: FieldProfile, disk: DiskGeometry, material: MaterialParams
) -> tuple[FieldProfile, FieldProfile]:
    """Split a field incident on the membrane into (reflected, transmitted).

    The local thickness d(r) is taken from the disk profile inside its radius
    and is zero outside, so beyond the rim r = 0 and t = 1 exactly.
    """
    if field.domain != "radius":
        raise ConfigurationError("sheet_scatter expects a radius-domain field")
    r = field.grid.radii
    thickness = np.where(r <= disk.radius, disk.thickness_at(r), 0.0)
    refl, trans = sheet_amplitudes(thickness, material, field.wavevector)
    reflected = FieldProfile(field.grid, refl * field.values, field.wavelength)
    transmitted = FieldProfile(field.grid, trans * field.values, field.wavelength)
    return reflected, transmitted


@dataclass(frozen=True, eq=False)
class CavityModeResult:
    """Dominant cavity eigenmode of one symmetry family and its budget inputs.

    ``eigenvalue`` is the half-trip (membrane -> mirror -> membrane, scatter)
    field eigenvalue; the full round trip covers both mirrors, so the
    round-trip eigenvalue is its square.  ``mode`` is the field at the
    membrane plane normalized to max |E| = 1.  ``membrane_envelope`` is the
    standing-wave intensity envelope at the membrane plane in units of the
    *global* envelope peak (so multiplying it by a physical peak intensity
    I_max gives the physical trap profile I(r)); ``i_max`` is that global
    peak in mode-normalized units (max-plane envelope / membrane-plane peak;
    1.0 when the cavity field peaks at the membrane).  ``mode_volume`` is
    V_c = Int I_env dV / max(I_env) including the factor 1/2 from the axial
    cos^2 standing-wave average, which reproduces pi w0^2 L / 4 for an empty
    cavity.  ``competing_eigenvalue`` is the largest other Ritz value of the
    final Krylov factorization; it can exceed ``eigenvalue`` in modulus when
    a weakly coupled branch is less lossy than the tracked mode.
    """

    setup: CavitySetup
    family: str
    eigenvalue: complex
    round_trip_eigenvalue: complex
    round_trip_loss: float
    kappa: float
    finesse: float
    resonance_offset: float
    mode: FieldProfile
    membrane_envelope: np.ndarray
    mode_volume: float
    i_max: float
    i_max_location: tuple[float, float]
    degenerate: bool
    competing_eigenvalue: complex
    matvec_count: int


def _arnoldi_dominant(matvec, v0: np.ndarray, krylov_dim: int, tol: float,
                      max_matvecs: int):
    """Trial-tracked eigenpair of a complex linear operator, restarted Arnoldi.

    Each restart builds a Krylov space from the current start vector and
    selects the Ritz pair with the largest overlap with that start vector
    (|y[0]|, since the start vector is the first basis vector).  This is the
    accelerated form of the classic launch-field power iteration: it follows
    the mode branch the trial field actually excites.  A low-loss resonator
    spectrum is clustered in modulus - the eigenvalues differ mostly in
    round-trip phase, and weakly coupled branches (e.g. halo modes skirting a
    membrane edge) can even beat the physical mode in modulus - so selecting
    by maximum |theta| would be nondeterministic or land on a mode the launch
    field barely excites.  Returns (theta, vector, theta_competing, matvecs,
    residual); convergence is declared when the tracked Ritz value moves by
    less than ``tol`` (in units of its modulus) between restarts, or on exact
    Krylov breakdown.  ``theta_competing`` is the largest remaining Ritz
    value of the final factorization (it may exceed ``theta`` in modulus).

    Fox-Li operators are strongly non-normal, so the eigenvector residual
    can plateau at the pseudospectral level long after the Ritz value has
    converged; the residual is therefore reported but not gated on.  Vector
    quality is ensured by a minimum of three restarts (each one passes the
    iterate through a fresh Krylov refinement).
    """
    n = v0.size
    k_dim = min(krylov_dim, n)
    v = v0 / np.linalg.norm(v0)
    theta_prev = None
    theta = theta_competing = 0.0 + 0.0j
    matvecs = 0
    restarts = 0
    residual = math.inf
    x = v
    while matvecs < max_matvecs:
        basis = np.empty((k_dim + 1, n), dtype=complex)
        hess = np.zeros((k_dim + 1, k_dim), dtype=complex)
        basis[0] = v
        m_used = k_dim
        broke_down = False
        for j in range(k_dim):
            w = matvec(basis[j])
            matvecs += 1
            # modified Gram-Schmidt with one reorthogonalization pass
            for _ in range(2):
                for i in range(j + 1):
                    h = np.vdot(basis[i], w)
                    hess[i, j] += h
                    w -= h * basis[i]
            h_next = np.linalg.norm(w)
            hess[j + 1, j] = h_next
            if h_next < 1e-14:
                m_used = j + 1
                broke_down = True
                break
            basis[j + 1] = w / h_next
        h_square = hess[:m_used, :m_used]
        evals, evecs = np.linalg.eig(h_square)
        picked = int(np.argmax(np.abs(evecs[0, :])))
        theta = evals[picked]
        others = np.abs(evals).copy()
        others[picked] = -np.inf
        theta_competing = (
            evals[int(np.argmax(others))] if m_used > 1 else 0.0 + 0.0j
        )
        y = evecs[:, picked]
        x = basis[:m_used].T @ y
        x = x / np.linalg.norm(x)
        residual = abs(hess[m_used, m_used - 1] * y[-1]) if not broke_down else 0.0
        restarts += 1
        if broke_down:
            return theta, x, theta_competing, matvecs, residual
        if (
            restarts >= 3
            and theta_prev is not None
            and abs(theta - theta_prev) <= tol * abs(theta)
        ):
            return theta, x, theta_competing, matvecs, residual
        theta_prev = theta
        v = x
    raise NumericalFailureError(
        "cavity eigenmode iteration did not converge",
        report=(
            f"{matvecs} operator applications; last Ritz value {theta:.12g}, "
            f"residual estimate {residual:.3e}"
        ),
    )


def _half_trip_factory(setup: CavitySetup, grid: HankelGrid, wavelength: float,
                       family: str):
    """Matrix-free half-trip operator v -> (r +/- t) * P(L/2) M P(L/2) v."""
    if family not in ("symmetric", "antisymmetric"):
        raise InvalidInputError("family must be 'symmetric' or 'antisymmetric'")
    if setup.membrane is not None:
        r = grid.radii
        thickness = np.where(r <= setup.membrane.radius,
                             setup.membrane.thickness_at(r), 0.0)
        refl, trans = sheet_amplitudes(thickness, setup.material,
                                       2.0 * math.pi / wavelength)
        combine = refl + trans if family == "symmetric" else refl - trans
    else:
        combine = np.ones(grid.n_points, dtype=complex)
        if family == "antisymmetric":
            combine = -combine

    half = setup.length / 2.0

    def matvec(values: np.ndarray) -> np.ndarray:
        field = FieldProfile(grid, values, wavelength)
        field = propagate(field, half)
        field = mirror_reflect(field, setup)
        field = propagate(field, half)
        return combine * field.values

    return matvec


def _standing_envelope(mode: FieldProfile, length: float, n_planes: int):
    """Standing-wave intensity envelope e(r, z) on half-cavity planes.

    The envelope at height z is ((|E_+| + |E_-|)/2)^2 with E_+ = P_z v and
    E_- = P_{-z} v (the leftward branch of the symmetric family at +z equals
    the rightward branch at -z); at the membrane plane it reduces to |v|^2.
    By symmetry e(r, -z) = e(r, z), so planes on [0, L/2] suffice.
    """
    z_planes = np.linspace(0.0, length / 2.0, n_planes)
    env = np.empty((n_planes, mode.grid.n_points))
    env[0] = np.abs(mode.values) ** 2
    for i, z in enumerate(z_planes[1:], start=1):
        e_plus = propagate(mode, z).values
        e_minus = propagate(mode, -z).values
        env[i] = 0.25 * (np.abs(e_plus) + np.abs(e_minus)) ** 2
    return z_planes, env


def solve_cavity_mode(
    setup: CavitySetup,
    trial: FieldProfile,
    family: str = "symmetric",
    krylov_dim: int = 80,
    tol: float = 1e-8,
    max_matvecs: int = 2000,
    n_planes: int = DEFAULT_N_PLANES,
) -> CavityModeResult:
    """Dominant Fox-Li eigenmode of one symmetry family of the cavity.

    ``trial`` provides the grid, wavelength, and starting field, and it
    *selects the mode*: the solver follows the eigenvalue branch with the
    largest overlap with the trial (the accelerated form of a launch-field
    power iteration), so the trial should resemble the sought mode - a
    Gaussian near the empty-cavity waist is the natural choice.  Raises
    NumericalFailureError if the Krylov iteration does not settle within
    ``max_matvecs`` operator applications; flags ``degenerate`` when a
    competing branch's eigenvalue modulus lies within 1% of the tracked one
    (common in low-loss resonators, where eigenvalues differ mostly in
    round-trip phase).
    """
    grid = trial.grid
    if grid.aperture_radius < setup.mirror_aperture:
        raise ConfigurationError(
            "grid aperture is smaller than the mirror aperture"
        )
    v0 = np.asarray(trial.values, dtype=complex)
    if not np.any(v0):
        raise InvalidInputError("trial field must be nonzero")
    matvec = _half_trip_factory(setup, grid, trial.wavelength, family)
    theta, vec, theta_competing, matvecs, _residual = _arnoldi_dominant(
        matvec, v0, krylov_dim, tol, max_matvecs
    )
    lam_rt = theta**2
    mod_rt = abs(lam_rt)
    if mod_rt > 1.0 + 1e-9:
        raise NumericalFailureError(
            "round-trip eigenvalue exceeds unity (non-physical gain)",
            report=f"|lambda_rt| = {mod_rt:.12f}",
        )
    loss = max(1.0 - mod_rt**2, 0.0)
    kappa = loss * _C_LIGHT / (2.0 * setup.length)
    finesse = math.pi * _C_LIGHT / (kappa * setup.length) if kappa > 0 else math.inf

    # Normalize the membrane-plane field to unit peak with a real-positive
    # peak sample (removes the arbitrary eigenvector phase).
    peak = vec[int(np.argmax(np.abs(vec)))]
    mode = FieldProfile(grid, vec / peak, trial.wavelength)

    z_planes, env = _standing_envelope(mode, setup.length, n_planes)
    i_flat = int(np.argmax(env))
    iz, ir = divmod(i_flat, grid.n_points)
    env_max = float(env[iz, ir])
    radial = 2.0 * math.pi * np.einsum("j,zj->z", grid.weights, env)
    # Both cavity halves (factor 2) and the axial cos^2 average (factor 1/2).
    mode_volume = float(np.trapezoid(radial, z_planes)) / env_max

    resonance = _resonance_offset(lam_rt, setup.length)

    degenerate = abs(theta_competing) >= 0.99 * abs(theta)
    return CavityModeResult(
        setup=setup,
        family=family,
        eigenvalue=complex(theta),
        round_trip_eigenvalue=complex(lam_rt),
        round_trip_loss=loss,
        kappa=kappa,
        finesse=finesse,
        resonance_offset=resonance,
        mode=mode,
        membrane_envelope=_freeze(env[0] / env_max),
        mode_volume=mode_volume,
        i_max=env_max,
        i_max_location=(float(grid.radii[ir]), float(z_planes[iz])),
        degenerate=degenerate,
        competing_eigenvalue=complex(theta_competing),
        matvec_count=matvecs,
    )


def _resonance_offset(lam_rt: complex, length: float) -> float:
    """Frequency offset [rad/s] that brings the round trip onto resonance.

    Resonance requires arg(lambda_rt e^{2 i L delta / c}) = 0; the root of
    this scalar phase equation is located inside one free spectral range with
    a bracketed root find around the principal-value solution.
    """
    guess = -np.angle(lam_rt) * _C_LIGHT / (2.0 * length)
    if np.angle(lam_rt * np.exp(2j * length * guess / _C_LIGHT)) == 0.0:
        return float(guess)
    half_window = 0.1 * _C_LIGHT / (2.0 * length)

    def wrapped_phase(delta):
        return np.angle(lam_rt * np.exp(2j * length * delta / _C_LIGHT))

    return float(brentq(wrapped_phase, guess - half_window, guess + half_window,
                        xtol=1e-6, rtol=1e-15))


def _mass_weighted_envelope(result: CavityModeResult, disk: DiskGeometry,
                            material: MaterialParams) -> float:
    """Mass-weighted mean of the membrane-plane envelope over the disk."""
    from numpy.polynomial.legendre import leggauss

    xq, wq = leggauss(200)
    r = 0.5 * (xq + 1.0) * disk.radius
    w = 0.5 * wq * disk.radius
    env = np.interp(r, result.mode.grid.radii, result.membrane_envelope)
    weight = material.density * disk.thickness_at(r) * r
    return float(np.sum(w * weight * env) / np.sum(w * weight))


def membrane_peak_intensity_for_cm(
    result: CavityModeResult,
    disk: DiskGeometry,
    material: MaterialParams,
    optics: OpticalParams,
    omega_m: float,
) -> float:
    """Peak cavity intensity [W/m^2] giving a rigid-CM trap frequency omega_m.

    Inverts omega_m^2 = (2 k^2 (eps-1) / rho c) I_max <env> with <env> the
    mass-weighted membrane-plane envelope; exact for a rigid disk, and a good
    starting point for the deformable solve (see intensity_for_cm_frequency).
    """
    if not omega_m > 0:
        raise InvalidInputError("omega_m must be > 0")
    mean_env = _mass_weighted_envelope(result, disk, material)
    if mean_env <= 0:
        raise NumericalFailureError(
            "membrane-plane envelope vanishes over the disk",
            report="cannot infer a trapping intensity from this cavity mode",
        )
    return (
        omega_m**2
        * material.density
        * _C_LIGHT
        / (2.0 * optics.wavevector**2 * (material.dielectric_constant - 1.0) * mean_env)
    )


def _recoil_inputs(result, disk, material, optics, omega_m, peak_intensity):
    if not omega_m > 0:
        raise InvalidInputError("omega_m must be > 0")
    if not result.kappa > 0:
        raise InvalidInputError("recoil heating needs a lossy cavity (kappa > 0)")
    if peak_intensity is None:
        peak_intensity = membrane_peak_intensity_for_cm(
            result, disk, material, optics, omega_m
        )
    elif not peak_intensity > 0:
        raise InvalidInputError("peak_intensity must be > 0")
    return peak_intensity


def recoil_n_osc(
    result: CavityModeResult,
    disk: DiskGeometry,
    material: MaterialParams,
    optics: OpticalParams,
    omega_m: float,
    peak_intensity: float | None = None,
) -> float:
    """Coherent oscillations before one recoil phonon jump.

    N = (1/2pi) (V/V_c) (omega_0/kappa) omega_m^2 / (k^2 I_max / rho c), with
    V the disk volume, V_c the cavity mode volume, and I_max the peak cavity
    intensity.  ``peak_intensity`` is I_max in physical units; when omitted
    it is inferred from omega_m via the rigid-CM trap relation (pass the
    intensity found by a deformable-mode solve when available).
    """
    i_max = _recoil_inputs(result, disk, material, optics, omega_m, peak_intensity)
    return (
        (1.0 / (2.0 * math.pi))
        * (disk.volume() / result.mode_volume)
        * (optics.angular_frequency / result.kappa)
        * omega_m**2
        * material.density
        * _C_LIGHT
        / (optics.wavevector**2 * i_max)
    )


def recoil_photon_rate(result: CavityModeResult, peak_intensity: float) -> float:
    """Photon scattering rate R_sc = kappa U_cav / (hbar omega_0) [1/s].

    The stored intracavity energy of the standing wave is U_cav =
    2 I_max V_c / c (the factor 2 undoes the cos^2 axial average folded into
    V_c; electric and magnetic energies average to a z-uniform density).
    With perfectly reflective mirrors every lost photon is a membrane
    scattering event.
    """
    if not peak_intensity > 0:
        raise InvalidInputError("peak_intensity must be > 0")
    u_cav = 2.0 * peak_intensity * result.mode_volume / _C_LIGHT
    omega_0 = 2.0 * math.pi * _C_LIGHT / result.mode.wavelength
    return result.kappa * u_cav / (_HBAR * omega_0)


def recoil_n_osc_momentum_route(
    result: CavityModeResult,
    disk: DiskGeometry,
    material: MaterialParams,
    optics: OpticalParams,
    omega_m: float,
    peak_intensity: float | None = None,
) -> float:
    """Same N via momentum diffusion d<p^2>/dt = (hbar k)^2 R_sc.

    Each scattered photon kicks the membrane by at most hbar k along the
    axis; converting the diffusion into a phonon jump rate gives
    N = M omega_m^2 / (pi hbar k^2 R_sc), which must agree with
    ``recoil_n_osc``.
    """
    i_max = _recoil_inputs(result, disk, material, optics, omega_m, peak_intensity)
    rate = recoil_photon_rate(result, i_max)
    mass = disk.mass(material)
    return mass * omega_m**2 / (math.pi * _HBAR * optics.wavevector**2 * rate)


def n_osc_total(n_th: float, n_sc: float) -> float:
    """Parallel sum of coherence budgets: N_tot = (1/N_th + 1/N_sc)^-1."""
    if not n_th > 0 or not n_sc > 0:
        raise InvalidInputError("both oscillation numbers must be > 0")
    if math.isinf(n_th):
        return n_sc
    if math.isinf(n_sc):
        return n_th
    return 1.0 / (1.0 / n_th + 1.0 / n_sc)


@dataclass(frozen=True)
class BudgetPoint:
    """One disk radius of the coherence budget sweep."""

    radius: float
    finesse: float
    kappa: float
    mode_volume: float
    peak_intensity: float
    n_th: float
    n_sc: float
    n_tot: float


def coherence_budget(
    disk_radii,
    omega_m: float,
    thickness_peak: float = 30e-9,
    material: MaterialParams | None = None,
    optics: OpticalParams | None = None,
    bath=None,
    setup_template: CavitySetup | None = None,
    n_points: int = DEFAULT_N_POINTS,
    trial_waist: float = 15e-6,
    max_matvecs: int = 4000,
) -> list[BudgetPoint]:
    """Thermal + recoil coherence budget across apodized disk radii.

    For each radius: solve the cavity mode with the membrane in place; find
    the peak intensity that traps the (deformable) disk's fundamental at
    ``omega_m`` with the membrane-plane envelope as the trap profile; take
    the thermal budget from the trapped mode's thermoelastic dissipation and
    the recoil budget from the cavity linewidth; combine in parallel.  The
    Hankel grid and trial field are built once and shared across radii.
    """
    from dataclasses import replace as _replace

    from .core import SIN, BathParams, NumericIntensity
    from .plate import intensity_for_cm_frequency
    from .thermo import thermo_summary

    if material is None:
        material = SIN
    if optics is None:
        optics = OpticalParams()
    if bath is None:
        bath = BathParams()
    if setup_template is None:
        setup_template = CavitySetup()
    if setup_template.membrane is not None:
        raise ConfigurationError(
            "setup_template must not carry a membrane; the sweep supplies one"
        )
    radii = [float(a) for a in np.atleast_1d(np.asarray(disk_radii, dtype=float))]
    if not radii:
        raise InvalidInputError("disk_radii must be non-empty")
    if any(not a > 0 for a in radii):
        raise InvalidInputError("disk radii must be > 0")

    grid = HankelGrid.build(
        DEFAULT_APERTURE_FACTOR * setup_template.mirror_aperture, n_points
    )
    trial = gaussian_field(grid, trial_waist, optics.wavelength)

    points = []
    for a in radii:
        disk = DiskGeometry(radius=a, thickness=ApodizedThickness(thickness_peak))
        setup = _replace(setup_template, membrane=disk, material=material)
        result = solve_cavity_mode(setup, trial, max_matvecs=max_matvecs)

        def factory(i0, env=result.membrane_envelope, r_grid=grid.radii):
            return NumericIntensity(r_grid, i0 * env)

        i_peak, mode = intensity_for_cm_frequency(
            disk, material, optics, factory, omega_m
        )
        n_th = thermo_summary(mode, disk, material, bath).n_osc_th
        n_sc = recoil_n_osc(
            result, disk, material, optics, omega_m, peak_intensity=i_peak
        )
        points.append(
            BudgetPoint(
                radius=a,
                finesse=result.finesse,
                kappa=result.kappa,
                mode_volume=result.mode_volume,
                peak_intensity=i_peak,
                n_th=n_th,
                n_sc=n_sc,
                n_tot=n_osc_total(n_th, n_sc),
            )
        )
    return points
