"""Shared fixtures: a canonical test atom and spectrum factories.

The canonical atom is an alkali D1 lambda system with a 6.83 GHz ground
splitting; Gamma is kept at 330 MHz so the sideband-spacing validity check
stays quiet in fixtures.  All constants are angular rad/s.
"""

import math

import pytest

from cptsim import AtomParams, FieldSpectrum, ModulationParams, bessel_spectrum
from cptsim.sweep import symmetrizing_detuning

TWO_PI = 2.0 * math.pi

OMEGA_G = TWO_PI * 6.834682610904e9
OMEGA = OMEGA_G / 2.0
OMEGA_E = TWO_PI * 816.656e6
GAMMA_OPT = TWO_PI * 330e6
GAMMA_G = TWO_PI * 300.0
GAMMA_E = TWO_PI * 6e6
DELTA_L = -TWO_PI * 28e6
E_TOTAL = TWO_PI * 750e3
POWER = E_TOTAL * E_TOTAL


def make_atom(**overrides) -> AtomParams:
    params = dict(
        omega_g=OMEGA_G,
        omega_e=OMEGA_E,
        Gamma=GAMMA_OPT,
        Gamma_g=GAMMA_G,
        gamma=GAMMA_E,
        dipole_ratio_sq=1.0 / 3.0,
        Delta_L=DELTA_L,
    )
    params.update(overrides)
    return AtomParams(**params)


def make_spectrum(m=2.4, epsilon=0.0, k_max=5, total_power=POWER) -> FieldSpectrum:
    return bessel_spectrum(
        m=m, epsilon=epsilon, k_max=k_max, total_power=total_power, Omega=OMEGA
    )


def pair_spectrum(total_power=POWER, ratio=1.0) -> FieldSpectrum:
    """Resonant sidebands only; E_-1^2 / E_+1^2 = ratio at fixed total power."""
    E_R = math.sqrt(total_power / (1.0 + ratio))
    E_L = math.sqrt(total_power * ratio / (1.0 + ratio))
    return FieldSpectrum(Omega=OMEGA, components={-1: E_L, 1: E_R})


def make_modulation(a=0.2, omega_m=None, alpha=0.0) -> ModulationParams:
    if omega_m is None:
        omega_m = 0.5 * GAMMA_G
    return ModulationParams(a=a, omega_m=omega_m, alpha=alpha)


@pytest.fixture
def atom() -> AtomParams:
    return make_atom()


@pytest.fixture
def sym_atom() -> AtomParams:
    """Atom at the symmetrizing one-photon detuning (K = 0 exactly)."""
    root = symmetrizing_detuning(GAMMA_OPT, OMEGA_E, 1.0 / 3.0)
    return make_atom(Delta_L=root)
