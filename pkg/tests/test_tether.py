import math

import numpy as np
import pytest

from beam_oracle import beam_spectrum_fd
from optomech import InvalidInputError, SIN, TetherGeometry
from optomech.tether import (
    RigidTetherSystem,
    avoided_crossing_half_gap,
    characteristic_residual,
    composed_energy_ratio,
    solve_tether_spectrum,
    tether_asymptotes,
    tether_energy_ratio,
    tether_mode_shape,
)

DISK_MASS = SIN.density * math.pi * (10e-6) ** 2 * 50e-9  # a = 10 um, d = 50 nm
TETHER = TetherGeometry(50e-6, 50e-9)


def system(omega_opt=0.0, mass=DISK_MASS):
    return RigidTetherSystem(mass, TETHER, SIN, omega_opt)


def test_mass_ratio_and_pendulum_frequency():
    s = system()
    assert s.mass_ratio == pytest.approx(125.66, rel=1e-3)
    assert s.pendulum_omega / (2 * math.pi) == pytest.approx(1419.76, rel=1e-4)
    assert s.beta == pytest.approx(83.24, rel=1e-2)


def test_untrapped_spectrum_matches_fd_oracle():
    s = system()
    modes = solve_tether_spectrum(s, 2 * math.pi * 3e6)
    got = np.array([m.omega for m in modes])
    oracle = beam_spectrum_fd(DISK_MASS, 50e-6, 50e-9, SIN, 0.0, n_nodes=800, k_modes=len(got))
    assert np.all(np.abs(got - oracle) / oracle < 5e-3)
    assert len(modes) == len(tether_asymptotes(s, 2 * math.pi * 3e6)) + 1


def test_trapped_spectrum_matches_fd_oracle():
    w_opt = 2 * math.pi * 1e6
    s = system(w_opt)
    modes = solve_tether_spectrum(s, 2 * math.pi * 3e6)
    got = np.array([m.omega for m in modes])
    oracle = beam_spectrum_fd(DISK_MASS, 50e-6, 50e-9, SIN, w_opt, n_nodes=1600, k_modes=len(got))
    assert np.all(np.abs(got - oracle) / oracle < 5e-3)
    assert [f"{m.kind}{m.tether_index or ''}" for m in modes] == [
        "Tether1", "Tether2", "Tether3", "CM", "Tether4", "Tether5",
    ]
    assert np.all(np.diff(got) > 0)


def test_oracle_reproduces_clamped_free_constant():
    om = beam_spectrum_fd(1e-30, 50e-6, 50e-9, SIN, 0.0, n_nodes=800, k_modes=1)[0]
    s = system(mass=1e-30)
    gamma1 = float(s.gamma(om))
    assert gamma1 == pytest.approx(1.87510, rel=1e-4)


def test_pendulum_root():
    s = system()
    modes = solve_tether_spectrum(s, 2 * math.pi * 10e3)
    assert len(modes) == 1
    low = modes[0]
    assert low.omega == pytest.approx(s.pendulum_omega, rel=0.01)
    assert low.kind == "CM"
    assert tether_energy_ratio(low, s) == 0.0  # no trap, no optical energy


def test_cm_branch_frequency_renormalizes():
    # away from crossings the CM root tracks sqrt(omega_p^2 + omega_opt^2)
    s0 = system()
    for gamma_mid in (math.pi * 1.75, math.pi * 2.75, math.pi * 3.75):
        w_opt = float(s0.omega_from_gamma(gamma_mid))
        s = system(w_opt)
        modes = solve_tether_spectrum(s, 1.4 * w_opt)
        cm = [m for m in modes if m.kind == "CM"]
        assert len(cm) == 1
        expected = math.hypot(s.pendulum_omega, w_opt)
        assert cm[0].omega == pytest.approx(expected, rel=0.01)


def test_asymptotes_sit_near_quarter_offsets():
    s = system()
    for n, omega_n in tether_asymptotes(s, 2 * math.pi * 3e6):
        g_n = float(s.gamma(omega_n))
        assert g_n == pytest.approx(math.pi * (n + 0.25), abs=0.01 if n > 1 else 0.02)
        assert abs(math.tan(g_n) - math.tanh(g_n)) < 1e-9


def test_avoided_crossing_gap_and_mass_scaling():
    s0 = system()
    w3 = dict(tether_asymptotes(s0, 2 * math.pi * 3e6))[3]
    gaps = {}
    for fac in (1.0, 4.0):
        s = system(w3, mass=fac * DISK_MASS)
        modes = solve_tether_spectrum(s, 1.6 * w3)
        near = sorted(modes, key=lambda m: abs(m.omega - w3))[:2]
        assert {m.kind for m in near} == {"Mixed"}
        gaps[fac] = abs(near[0].omega - near[1].omega)
        assert gaps[fac] == pytest.approx(2 * avoided_crossing_half_gap(s, w3), rel=0.02)
    assert gaps[4.0] / gaps[1.0] == pytest.approx(0.5, rel=0.02)


def test_energy_ratio_plateau_and_crossing_dip():
    s0 = system()
    w_mid = float(s0.omega_from_gamma(math.pi * 3.75))
    s_mid = system(w_mid)
    cm = [m for m in solve_tether_spectrum(s_mid, 1.4 * w_mid) if m.kind == "CM"][0]
    plateau = tether_energy_ratio(cm, s_mid)
    target = 8 * s_mid.mass_ratio
    assert 0.5 * target < plateau < 2.0 * target
    assert plateau / target == pytest.approx(1.093, rel=0.03)  # measured at gamma ~ 3.75 pi

    w3 = dict(tether_asymptotes(s0, 2 * math.pi * 3e6))[3]
    s_x = system(w3)
    near = sorted(solve_tether_spectrum(s_x, 1.6 * w3), key=lambda m: abs(m.omega - w3))[:2]
    for m in near:
        assert tether_energy_ratio(m, s_x) < plateau / 10


def test_mode_shape_invariants():
    s = system(2 * math.pi * 1e6)
    from optomech.tether import _shape_arrays

    for mode in solve_tether_spectrum(s, 2 * math.pi * 3e6):
        assert abs(characteristic_residual(mode.omega, s)) < 1e-8
        peak = float(np.abs(mode.shape).max())
        assert mode.shape[0] == pytest.approx(0.0, abs=1e-9 * peak)
        k = s.beta * math.sqrt(mode.omega)
        h = mode.x[1] - mode.x[0]
        slope0 = (4 * mode.shape[1] - mode.shape[2]) / (2 * h)
        assert abs(slope0) < 1e-3 * k * peak
        # analytic curvature at the loaded end vanishes identically
        _, _, phit, phit_xx = _shape_arrays(s, mode.omega, mode.x)
        assert abs(phit_xx[-1]) < 1e-10 * k**2 * float(np.abs(phit).max())
        assert mode.phi_end == pytest.approx(1.0)  # endpoint-normalized branch


def test_cm_mode_endpoint_dominates_in_mass_weighted_sense():
    s = system(2 * math.pi * 1e6)
    cm = [m for m in solve_tether_spectrum(s, 2 * math.pi * 3e6) if m.kind == "CM"][0]
    interior = float(np.abs(cm.shape[:-1]).max())
    assert interior / s.mass_ratio < 0.1 * abs(cm.phi_end)
    assert interior < 10 * abs(cm.phi_end)


def test_large_gamma_shape_approximation():
    s = system(2 * math.pi * 1e6)
    mode = [m for m in solve_tether_spectrum(s, 2 * math.pi * 3e6) if m.tether_index == 5][0]
    k = s.beta * math.sqrt(mode.omega)
    q = k * mode.x
    approx = np.sin(q) - np.cos(q) + np.exp(-q)
    sl = mode.x <= 0.6 * TETHER.length
    amp = mode.shape[sl] @ approx[sl] / (approx[sl] @ approx[sl])
    err = np.abs(mode.shape[sl] - amp * approx[sl]).max() / np.abs(mode.shape[sl]).max()
    assert err < 1e-4


def test_characteristic_residual_landmarks():
    s0 = system()
    # leading-order pendulum root
    assert abs(characteristic_residual(s0.pendulum_omega, s0)) < 0.05
    # doubly-degenerate point: trap tuned onto a tether branch
    w3 = dict(tether_asymptotes(s0, 2 * math.pi * 3e6))[3]
    assert abs(characteristic_residual(w3, system(w3))) < 1e-3
    # huge mass ratio, gamma = pi(n + 1/4): both folded factors vanish
    s_heavy = system(mass=1.0)
    w = float(s_heavy.omega_from_gamma(math.pi * 20.25))
    assert abs(characteristic_residual(w, s_heavy)) < 1e-6


def test_heavy_mass_limit_pins_tether_branches():
    s = system(mass=1e-6)  # M/m_t ~ 3e9
    modes = solve_tether_spectrum(s, 2 * math.pi * 3e6)
    tether_modes = [m for m in modes if m.kind == "Tether"]
    assert len(tether_modes) >= 4
    for m in tether_modes:
        g = m.gamma
        u = math.exp(-g)
        folded = math.cos(g) * (1 - u**2) - math.sin(g) * (1 + u**2)
        assert abs(folded) < 1e-6


def test_composed_energy_ratio():
    assert composed_energy_ratio(math.inf, 42.0) == 42.0
    assert composed_energy_ratio(42.0, math.inf) == 42.0
    assert composed_energy_ratio(math.inf, math.inf) == math.inf
    assert composed_energy_ratio(3.0, 6.0) == pytest.approx(2.0)
    assert composed_energy_ratio(0.0, 5.0) == 0.0
    with pytest.raises(InvalidInputError):
        composed_energy_ratio(-1.0, 2.0)


def test_validation_errors():
    with pytest.raises(InvalidInputError):
        RigidTetherSystem(0.0, TETHER, SIN, 0.0)
    with pytest.raises(InvalidInputError):
        RigidTetherSystem(DISK_MASS, TETHER, SIN, -1.0)
    with pytest.raises(InvalidInputError):
        solve_tether_spectrum(system(), 0.0)
    with pytest.raises(InvalidInputError):
        characteristic_residual(-5.0, system())
    with pytest.raises(InvalidInputError):
        tether_mode_shape(0.0, system())
    assert solve_tether_spectrum(system(), 1e-2) == []
