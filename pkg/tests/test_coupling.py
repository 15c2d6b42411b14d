import dataclasses
import math

import numpy as np
import pytest

from optomech import (
    SIN,
    ConfigurationError,
    DiskGeometry,
    GaussianBeam,
    InvalidInputError,
    OpticalParams,
    PlaneWave,
    UniformThickness,
)
from optomech.coupling import RadialProfile, coupling_ratio, pinning_profile
from optomech.plate import (
    RadialGrid,
    assemble_plate_operator,
    intensity_for_cm_frequency,
    solve_modes,
)

# Readout geometry: 30 nm disk of 25 um radius, 15 um beam waist.
DISK = DiskGeometry(25e-6, UniformThickness(30e-9))
OPT = OpticalParams()
WAIST = 15e-6
GRID0 = RadialGrid.build(DISK.radius, 0)

SWEEP_HZ = np.linspace(30e3, 300e3, 10)


def gaussian_factory(i0):
    return GaussianBeam(i0, WAIST)


@pytest.fixture(scope="module")
def sweep():
    """(i0, mode) of the lowest m=0 branch at each target CM frequency."""
    out = []
    for f_hz in SWEEP_HZ:
        i0, mode = intensity_for_cm_frequency(
            DISK, SIN, OPT, gaussian_factory, 2 * math.pi * f_hz, GRID0
        )
        assert math.isclose(mode.omega, 2 * math.pi * f_hz, rel_tol=1e-9)
        out.append((i0, mode))
    return out


def test_free_cm_mode_has_unit_ratio_and_flat_profile():
    op = assemble_plate_operator(DISK, SIN, OPT, GaussianBeam(0.0, WAIST), 0, GRID0)
    cm = solve_modes(op, 1)[0]
    assert abs(coupling_ratio(cm, WAIST, DISK) - 1.0) < 1e-12
    prof = pinning_profile(cm, WAIST)
    assert abs(prof.rim_center_ratio - 1.0) < 1e-9
    assert np.ptp(prof.values) < 1e-9


def test_uniform_trap_does_not_pin():
    # A plane-wave trap on a uniform disk adds a potential proportional to the
    # mass form, so the CM mode stays exactly rigid no matter how stiff the
    # trap: pinning requires a *focused* beam.
    i0 = (2 * math.pi * 300e3) ** 2 * SIN.density * 299792458.0 / (
        2 * OPT.wavevector**2 * (SIN.dielectric_constant - 1)
    )
    op = assemble_plate_operator(DISK, SIN, OPT, PlaneWave(i0), 0, GRID0)
    cm = solve_modes(op, 1)[0]
    assert math.isclose(cm.omega, 2 * math.pi * 300e3, rel_tol=1e-9)
    assert abs(coupling_ratio(cm, WAIST, DISK) - 1.0) < 1e-9
    assert abs(pinning_profile(cm, WAIST).rim_center_ratio - 1.0) < 1e-9


def test_azimuthal_modes_couple_exactly_zero():
    for m in (1, 2, 3):
        grid = RadialGrid.build(DISK.radius, m)
        op = assemble_plate_operator(DISK, SIN, OPT, gaussian_factory(1e10), m, grid)
        for mode in solve_modes(op, 3):
            assert coupling_ratio(mode, WAIST, DISK) == 0.0


def test_wide_beam_limit_is_mass_weighted_mean(sweep):
    _, mode = sweep[3]
    r, w = mode.grid.nodes, mode.grid.weights
    mean_f = float(np.sum(w * r * mode.profile) / np.sum(w * r))
    assert abs(coupling_ratio(mode, 1.0, DISK) - mean_f) < 1e-9


def test_sweep_ratio_magnitude_strictly_decreasing(sweep):
    gs = [coupling_ratio(mode, WAIST, DISK) for _, mode in sweep]
    mags = [abs(g) for g in gs]
    assert all(b < a for a, b in zip(mags, mags[1:]))
    assert all(m <= 1.0 for m in mags)
    assert gs[0] > 0.9  # weak trap: almost pure CM
    # On the f(0) > 0 sign convention the pinned branch acquires a nodal
    # circle and the signed overlap crosses zero inside the sweep.
    assert gs[-1] < 0.0
    assert mags[-1] < 0.1


def test_pinning_contrast_grows_with_trap_frequency(sweep):
    ratios = [pinning_profile(mode, WAIST).rim_center_ratio for _, mode in sweep]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    assert ratios[0] < 1.5  # barely pinned at 30 kHz
    assert ratios[-1] > 2.0  # strongly rim-dominated at 300 kHz


def test_center_suppressed_at_300khz(sweep):
    _, mode = sweep[-1]
    prof = pinning_profile(mode, WAIST)
    r = mode.grid.nodes
    center_max = float(np.max(np.abs(mode.profile[r <= WAIST])))
    rim_max = float(np.max(np.abs(mode.profile)))
    assert center_max < 0.3 * rim_max
    assert prof.rim_center_ratio == pytest.approx(rim_max / center_max)


def test_ratio_is_mass_scale_invariant(sweep):
    # Scaling rho, E, and I0 together leaves the mode shape (and frequency)
    # unchanged while the mass — and with it z_zp — changes: the coupling
    # ratio must not move.  Probe near the sign flip, where the overlap is
    # most shape-sensitive.
    i0, mode = sweep[4]
    scale = 4.0
    heavy = dataclasses.replace(
        SIN,
        density=scale * SIN.density,
        youngs_modulus=scale * SIN.youngs_modulus,
    )
    op = assemble_plate_operator(DISK, heavy, OPT, gaussian_factory(scale * i0), 0, GRID0)
    heavy_mode = solve_modes(op, 1)[0]
    assert math.isclose(heavy_mode.omega, mode.omega, rel_tol=1e-9)
    g_light = coupling_ratio(mode, WAIST, DISK)
    g_heavy = coupling_ratio(heavy_mode, WAIST, DISK)
    assert abs(g_light - g_heavy) < 1e-12


def test_intensity_root_finder_validation():
    with pytest.raises(InvalidInputError):
        intensity_for_cm_frequency(DISK, SIN, OPT, gaussian_factory, 0.0, GRID0)
    with pytest.raises(ConfigurationError):
        intensity_for_cm_frequency(
            DISK, SIN, OPT, lambda i0: GaussianBeam(1.0 + i0, WAIST), 2 * math.pi * 1e5, GRID0
        )
    with pytest.raises(InvalidInputError):
        intensity_for_cm_frequency(
            DISK, SIN, OPT, lambda i0: PlaneWave(0.0), 2 * math.pi * 1e5, GRID0
        )
    with pytest.raises(ConfigurationError):
        intensity_for_cm_frequency(
            DISK, SIN, OPT, gaussian_factory, 2 * math.pi * 1e5, RadialGrid.build(DISK.radius, 1)
        )


def test_coupling_input_validation(sweep):
    _, mode = sweep[0]
    with pytest.raises(InvalidInputError):
        coupling_ratio(mode, 0.0, DISK)
    with pytest.raises(ConfigurationError):
        coupling_ratio(mode, WAIST, DiskGeometry(10e-6, UniformThickness(30e-9)))
    with pytest.raises(InvalidInputError):
        pinning_profile(mode, 2 * DISK.radius)
    with pytest.raises(InvalidInputError):
        pinning_profile(mode, DISK.radius * 1e-9)
    prof = pinning_profile(mode)
    assert isinstance(prof, RadialProfile)
    assert prof.center_radius == pytest.approx(0.6 * DISK.radius)
