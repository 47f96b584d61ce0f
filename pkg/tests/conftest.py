"""Shared fixtures: a reference trap, particle, and heating law.

The numbers mirror the bundled CLI defaults (500 nm diamond sphere,
two-axis trap with x the stiffer axis) so tests and examples agree.
"""

import math

import pytest

import hotbrownian as hb


@pytest.fixture(scope="session")
def axes_pair():
    return (
        hb.TrapAxis(label="x", stiffness_coefficient=2 * math.pi * 1.807e5,
                    detection_gain=1.0e9),
        hb.TrapAxis(label="y", stiffness_coefficient=2 * math.pi * 1.549e5,
                    detection_gain=0.8e9),
    )


@pytest.fixture(scope="session")
def sphere_particle():
    return hb.ParticleModel(shape=hb.Sphere(radius=500e-9), density=3500.0)


@pytest.fixture(scope="session")
def heating17():
    return hb.HeatingLaw(kappa_heat=17.0, T0=294.0)


@pytest.fixture(scope="session")
def gas45():
    return hb.GasEnvironment(pressure=45.0)
