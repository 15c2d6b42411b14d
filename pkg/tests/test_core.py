import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.constants import c as C_LIGHT

from optomech import (
    SIN,
    ApodizedThickness,
    DiskGeometry,
    GaussianBeam,
    InvalidInputError,
    MaterialParams,
    NumericIntensity,
    OpticalParams,
    PlaneWave,
    TetherGeometry,
    UniformThickness,
    local_trap_frequency,
)


def test_sin_preset_values():
    assert SIN.youngs_modulus == 270e9
    assert SIN.poisson_ratio == 0.25
    assert SIN.density == 2700.0
    assert SIN.dielectric_constant == 4.0
    assert SIN.heat_capacity_vol == 2e6
    assert SIN.thermal_conductivity == 20.0
    assert SIN.thermal_expansion_vol == 4.8e-6


def test_sin_preset_serialization_round_trip_bit_exact():
    d = SIN.to_dict()
    again = MaterialParams.from_dict(d)
    assert again == SIN
    for k, v in again.to_dict().items():
        assert v == d[k]


@pytest.mark.parametrize(
    "field,value",
    [
        ("youngs_modulus", -1.0),
        ("poisson_ratio", 0.5),
        ("poisson_ratio", 0.0),
        ("density", 0.0),
        ("dielectric_constant", 1.0),
        ("heat_capacity_vol", 0.0),
        ("thermal_conductivity", -2.0),
        ("thermal_expansion_vol", -1e-6),
    ],
)
def test_material_validation_rejects_bad_values(field, value):
    kwargs = SIN.to_dict()
    kwargs[field] = value
    with pytest.raises(ValueError):
        MaterialParams(**kwargs)


def test_trap_frequency_zero_intensity():
    assert local_trap_frequency(SIN, OpticalParams(), PlaneWave(0.0), 0.0) == 0.0


def test_trap_frequency_inversion_oracle():
    # oracle: invert omega^2 = 2 k^2 I (eps-1)/(rho c) for I at 2*pi*1 MHz
    target = 2 * math.pi * 1e6
    k = 2 * math.pi / 1e-6
    i0 = target**2 * SIN.density * C_LIGHT / (2 * k**2 * (SIN.dielectric_constant - 1))
    assert i0 == pytest.approx(1.349e11, rel=1e-3)
    got = local_trap_frequency(SIN, OpticalParams(), PlaneWave(i0), 0.0)
    assert got == pytest.approx(target, rel=1e-12)


def test_gaussian_at_waist_equals_plane_wave_at_reduced_intensity():
    i0 = 3.7e10
    w = 35e-6
    gauss = local_trap_frequency(SIN, OpticalParams(), GaussianBeam(i0, w), w)
    plane = local_trap_frequency(SIN, OpticalParams(), PlaneWave(i0 * math.exp(-2)), 0.0)
    assert gauss == pytest.approx(plane, rel=1e-12)


@given(st.floats(min_value=1e3, max_value=1e14))
def test_trap_frequency_sqrt_intensity_scaling(i0):
    base = local_trap_frequency(SIN, OpticalParams(), PlaneWave(i0), 0.0)
    doubled = local_trap_frequency(SIN, OpticalParams(), PlaneWave(2 * i0), 0.0)
    assert doubled == pytest.approx(math.sqrt(2) * base, rel=1e-12)


def test_trap_frequency_vectorized():
    r = np.linspace(0, 30e-6, 7)
    w = local_trap_frequency(SIN, OpticalParams(), GaussianBeam(1e10, 15e-6), r)
    assert w.shape == r.shape
    assert np.all(np.diff(w) < 0)  # Gaussian decays with r


def test_numeric_intensity_interpolation_and_validation():
    radii = np.linspace(0, 1e-5, 11)
    vals = np.linspace(5.0, 1.0, 11)
    prof = NumericIntensity(radii, vals)
    assert prof.at(0.0) == pytest.approx(5.0)
    assert prof.at(5e-6) == pytest.approx(3.0)
    # clamping outside the sampled range
    assert prof.at(2e-5) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        NumericIntensity(radii, -vals)
    with pytest.raises(ValueError):
        NumericIntensity(radii[::-1], vals)


def test_apodized_thickness_profile_shape():
    prof = ApodizedThickness(50e-9)
    a = 10e-6
    assert prof.thickness(0.0, a) == pytest.approx(50e-9)
    assert prof.thickness(a, a) == pytest.approx(0.0, abs=1e-30)
    # half-radius value: d0 (1 - 1/4)^2 = d0 * 9/16
    assert prof.thickness(a / 2, a) == pytest.approx(50e-9 * 9 / 16)


def test_stiffness_weight_derivatives_match_finite_differences():
    prof = ApodizedThickness(50e-9)
    a = 10e-6
    r = np.linspace(0.05 * a, 0.95 * a, 41)
    h = 1e-4 * a
    g = lambda x: prof.g(x, a)
    fd1 = (g(r + h) - g(r - h)) / (2 * h)
    fd2 = (g(r + h) - 2 * g(r) + g(r - h)) / h**2
    assert np.allclose(prof.g_d1(r, a), fd1, rtol=1e-6)
    assert np.allclose(prof.g_d2(r, a), fd2, rtol=1e-4)


def test_disk_volume_formulas():
    a = 10e-6
    assert DiskGeometry(a, UniformThickness(50e-9)).volume() == pytest.approx(
        math.pi * a**2 * 50e-9
    )
    assert DiskGeometry(a, ApodizedThickness(60e-9)).volume() == pytest.approx(
        math.pi * a**2 * 60e-9 / 3
    )
    assert DiskGeometry(a, UniformThickness(50e-9)).mass(SIN) == pytest.approx(
        2700.0 * math.pi * a**2 * 50e-9
    )


def test_thin_plate_warning():
    with pytest.warns(UserWarning, match="thin-plate"):
        DiskGeometry(1e-6, UniformThickness(100e-9))
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        DiskGeometry(10e-6, UniformThickness(50e-9))  # no warning


def test_geometry_validation():
    with pytest.raises(ValueError):
        DiskGeometry(-1.0, UniformThickness(50e-9))
    with pytest.raises(ValueError):
        UniformThickness(0.0)
    with pytest.raises(ValueError):
        TetherGeometry(0.0, 50e-9)
    with pytest.raises(ValueError):
        TetherGeometry(50e-6, -1e-9)
    with pytest.raises(ValueError):
        OpticalParams(0.0)


def test_optical_params_defaults():
    opt = OpticalParams()
    assert opt.wavelength == 1e-6
    assert opt.wavevector == pytest.approx(2 * math.pi * 1e6)
    assert opt.angular_frequency == pytest.approx(2 * math.pi * C_LIGHT / 1e-6)
