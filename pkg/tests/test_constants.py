import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from asymdot.constants import (
    CONSTANTS,
    LO_PHONON_ENERGY,
    X_MAX,
    cm_to_nm,
    effective_mass,
    band_offset,
    ev_to_mev,
    material_for,
    mev_to_ev,
    nm_to_cm,
)
from asymdot.errors import DomainError


def test_constants_positive_and_consistent():
    c = CONSTANTS
    for value in (c.hbar, c.hbar_c, c.coulomb_k, c.electron_mass_energy, c.fine_structure):
        assert value > 0
    assert c.coulomb_k == pytest.approx(c.fine_structure * c.hbar_c, rel=1e-6)
    assert c.coulomb_k == pytest.approx(1.43996, rel=1e-4)


def test_pure_gaas():
    m = material_for(0.0)
    assert m.band_offset == 0.0
    assert m.effective_mass == 0.067
    assert m.epsilon_r == 12.9
    assert m.lo_phonon_energy == pytest.approx(36.2e-3)


def test_offset_at_x_03():
    # 0.6 * 1.247 * 0.3
    assert material_for(0.3).band_offset == pytest.approx(0.22446, rel=1e-12)


@pytest.mark.parametrize("x", [0.5, -0.01, math.nan, math.inf])
def test_out_of_range(x):
    with pytest.raises(DomainError, match=r"\[0.0, 0.45\]"):
        material_for(x)


def test_monotone_in_x():
    xs = [i * X_MAX / 90 for i in range(91)]
    masses = [effective_mass(x) for x in xs]
    offsets = [band_offset(x) for x in xs]
    assert all(b >= a for a, b in zip(masses, masses[1:]))
    assert all(b > a for a, b in zip(offsets, offsets[1:]))
    assert all(material_for(x).lo_phonon_energy == LO_PHONON_ENERGY for x in xs)


@given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
def test_unit_round_trip(value):
    assert mev_to_ev(ev_to_mev(value)) == pytest.approx(value, rel=1e-12, abs=1e-300)
    assert cm_to_nm(nm_to_cm(value)) == pytest.approx(value, rel=1e-12, abs=1e-300)
