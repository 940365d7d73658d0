"""Shared fixtures: the measured device table and standard drive settings."""

import pytest

from aqecsim import model

# Measured device frequency table (MHz)
DEVICE_KWARGS = dict(
    omega_q1=3204.9,
    omega_q2=3662.5,
    alpha_1=-116.4,
    alpha_2=-159.6,
    omega_r1=4994.6,
    omega_r2=5450.5,
)


@pytest.fixture(scope="session")
def device():
    return model.DeviceParams(**DEVICE_KWARGS)


@pytest.fixture(scope="session")
def device_with_shifts():
    return model.DeviceParams(chi_1=-0.2, chi_2=-0.2, zz_ff1=0.6, zz_ff2=2.2,
                              **DEVICE_KWARGS)


@pytest.fixture(scope="session")
def full_drive():
    """All six sidebands on, at the full-correction operating point."""
    return model.DriveConfig(w_r=1.45, w_b=1.25, nu_r=0.8, nu_b=-0.9,
                             omega_qr1=0.39, omega_qr2=0.39)
