import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.constants import hbar

from conftest import OMEGA0, cavity, drive
from nanofiber_cqed.cavity import (
    CavityParams,
    CavitySpec,
    DriveSpec,
    cavity_params,
    damping_rate,
    empty_cavity_photon_number,
    pumping_rate,
    transmission,
    transmitted_power,
)
from nanofiber_cqed.errors import ConfigError, ExpansionDomain


def test_kappa_anchor(mode, gamma0):
    vg = mode.group_velocity
    assert damping_rate(cavity(0.1), vg) / gamma0 == pytest.approx(7.02, rel=0.05)
    assert damping_rate(cavity(1e-3), vg) / gamma0 == pytest.approx(702, rel=0.05)


def test_kappa_inverse_length(mode):
    vg = mode.group_velocity
    k1, k2 = damping_rate(cavity(0.1), vg), damping_rate(cavity(0.03), vg)
    assert k1 / k2 == pytest.approx(0.03 / 0.1, rel=1e-15)


def test_kappa_monotone_in_reflectivity(mode):
    vg = mode.group_velocity
    kappas = [damping_rate(cavity(0.1, r2), vg) for r2 in np.linspace(0.5, 0.9999, 40)]
    assert np.all(np.diff(kappas) < 0)
    assert kappas[-1] < 1e-3 * kappas[0]


def test_finesse(mode):
    cav = cavity()
    R = math.sqrt(0.9)
    assert cav.finesse == pytest.approx(math.pi * R / (1 - R**2), rel=1e-15)
    assert cav.finesse == pytest.approx(29.8, abs=0.05)
    vg = mode.group_velocity
    assert damping_rate(cav, vg) == pytest.approx(math.pi * vg / (cav.finesse * cav.length), rel=1e-12)


@pytest.mark.parametrize("power, nbar", [(1e-12, 0.04), (5e-12, 0.2), (10e-12, 0.4)])
def test_empty_cavity_anchor(mode, power, nbar):
    cp = cavity_params(cavity(), drive(power), mode.group_velocity)
    assert empty_cavity_photon_number(cp) == pytest.approx(nbar, rel=0.10)


def test_zero_drive(mode):
    assert pumping_rate(cavity(), drive(0.0), mode.group_velocity) == 0.0
    assert empty_cavity_photon_number(CavityParams(1.0, 0.0, 30.0, 0.3)) == 0.0
    assert transmitted_power(1.0, OMEGA0, 0.0) == 0.0


def test_lorentzian_half_width():
    cp = CavityParams(kappa=2.0, eta=0.7, finesse=30.0, detuning=0.0)
    peak = empty_cavity_photon_number(cp)
    for d in (-1.0, 1.0):
        half = empty_cavity_photon_number(CavityParams(2.0, 0.7, 30.0, d))
        assert half == pytest.approx(peak / 2, rel=1e-15)


def test_transmission_resonance_and_half_width(mode):
    cav, vg = cavity(), mode.group_velocity
    kappa = damping_rate(cav, vg)
    assert transmission(cav, vg, OMEGA0) == pytest.approx(1.0, rel=1e-15)
    for sign in (-1, 1):
        # adding kappa/2 to an optical frequency costs ~9 digits
        assert transmission(cav, vg, OMEGA0 + sign * kappa / 2) == pytest.approx(0.5, rel=1e-8)


def test_transmission_fwhm_anchor(mode, gamma0):
    cav, vg = cavity(), mode.group_velocity
    d = np.linspace(0, 10 * gamma0, 20001)
    t = transmission(cav, vg, OMEGA0 + d)
    hwhm = np.interp(0.5, t[::-1], d[::-1])
    assert 2 * hwhm / gamma0 == pytest.approx(7.02, rel=0.05)


def test_transmission_even(mode):
    cav, vg = cavity(), mode.group_velocity
    d = np.linspace(0, 2 * damping_rate(cav, vg), 50)
    np.testing.assert_allclose(transmission(cav, vg, OMEGA0 + d), transmission(cav, vg, OMEGA0 - d), rtol=1e-12)


def test_transmission_warns_outside_expansion(mode):
    cav, vg = cavity(), mode.group_velocity
    with pytest.warns(ExpansionDomain):
        transmission(cav, vg, OMEGA0 + 0.5 * vg / cav.length)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        transmission(cav, vg, OMEGA0 + 0.1 * vg / cav.length)


def test_output_equals_input_on_resonance(mode):
    cp = cavity_params(cavity(), drive(7e-12), mode.group_velocity)
    nbar = empty_cavity_photon_number(cp)
    assert transmitted_power(cp.kappa, OMEGA0, nbar) == pytest.approx(7e-12, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    r2=st.floats(0.05, 0.999),
    length=st.floats(1e-4, 1.0),
    power=st.floats(1e-15, 1e-9),
)
def test_power_loop_identity(mode, r2, length, power):
    cav = CavitySpec.from_power_reflectivity(r2, length, OMEGA0)
    cp = cavity_params(cav, DriveSpec(OMEGA0, power), mode.group_velocity)
    p_out = cp.eta**2 * 4 / cp.kappa**2 * 0.5 * hbar * OMEGA0 * cp.kappa
    assert p_out == pytest.approx(power, rel=1e-12)
    assert cp.eta**2 == pytest.approx(cp.kappa / 2 * power / (hbar * OMEGA0), rel=1e-12)


def test_invalid_specs():
    with pytest.raises(ConfigError):
        CavitySpec(1.0, 0.1, OMEGA0)
    with pytest.raises(ConfigError):
        CavitySpec(0.9, -0.1, OMEGA0)
    with pytest.raises(ConfigError):
        DriveSpec(OMEGA0, -1.0)
