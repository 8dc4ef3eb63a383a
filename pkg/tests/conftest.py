import numpy as np
import pytest

import chronobell as cb


@pytest.fixture
def rng():
    return np.random.default_rng(20250810)


@pytest.fixture
def singlet():
    return cb.make_singlet()


@pytest.fixture
def zz_settings():
    return (
        cb.BlochSetting.from_angle(0.0, "A"),
        cb.BlochSetting.from_angle(0.0, "B"),
    )


@pytest.fixture
def chsh_settings():
    """The quadruple that maximizes the fixed-form CHSH value on the singlet."""
    return (
        cb.BlochSetting.from_angle(0.0, "A"),
        cb.BlochSetting.from_angle(90.0, "A"),
        cb.BlochSetting.from_angle(45.0, "B"),
        cb.BlochSetting.from_angle(-45.0, "B"),
    )
