"""Physical constants and the Al(x)Ga(1-x)As material model.

Internal units throughout the package: energies in eV, lengths in nm,
times in s, electric fields in kV/cm (converted with :data:`KV_PER_CM`).
Conversions to meV, ns, ps etc. only happen at the reporting boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

from scipy import constants as _sc

from .errors import DomainError

X_MIN = 0.0
X_MAX = 0.45  # direct-gap limit of AlGaAs

GAAS_MASS = 0.067
MASS_SLOPE = 0.083
GAP_SLOPE = 1.247  # eV, direct-gap difference per unit x
CB_FRACTION = 0.6  # conduction-band share of the gap difference
GAAS_EPSILON_R = 12.9
LO_PHONON_ENERGY = 36.2e-3  # eV

# e * (1 kV/cm) * (1 nm) expressed in eV
KV_PER_CM = 1.0e-4


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float  # eV s
    hbar_c: float  # eV nm
    coulomb_k: float  # e^2/(4 pi eps0), eV nm
    electron_mass_energy: float  # m0 c^2, eV
    fine_structure: float

    @property
    def kinetic_prefactor(self) -> float:
        """hbar^2/(2 m0) in eV nm^2; divide by the relative mass to get hbar^2/(2 m*)."""
        return self.hbar_c**2 / (2.0 * self.electron_mass_energy)


def _codata() -> PhysicalConstants:
    pc = _sc.physical_constants
    alpha = _sc.fine_structure
    hbar_c = pc["reduced Planck constant times c in MeV fm"][0]  # MeV fm == eV nm
    return PhysicalConstants(
        hbar=pc["reduced Planck constant in eV s"][0],
        hbar_c=hbar_c,
        coulomb_k=alpha * hbar_c,
        electron_mass_energy=pc["electron mass energy equivalent in MeV"][0] * 1e6,
        fine_structure=alpha,
    )


CONSTANTS = _codata()


# -- boundary conversions ---------------------------------------------------

def mev_to_ev(value):
    return value * 1e-3


def ev_to_mev(value):
    return value * 1e3


def nm_to_cm(value):
    return value * 1e-7


def cm_to_nm(value):
    return value * 1e7


def s_to_ns(value):
    return value * 1e9


def ns_to_s(value):
    return value * 1e-9


def s_to_ps(value):
    return value * 1e12


def ps_to_s(value):
    return value * 1e-12


# -- material model ---------------------------------------------------------

@dataclass(frozen=True)
class MaterialParams:
    """Material parameters of Al(x)Ga(1-x)As relevant to the conduction band."""

    x: float
    effective_mass: float  # units of m0
    band_offset: float  # eV, conduction-band step relative to GaAs
    epsilon_r: float = GAAS_EPSILON_R
    lo_phonon_energy: float = LO_PHONON_ENERGY  # eV


def effective_mass(x: float) -> float:
    return GAAS_MASS + MASS_SLOPE * x


def band_offset(x: float) -> float:
    return CB_FRACTION * GAP_SLOPE * x


def check_mole_fraction(x: float) -> float:
    x = float(x)
    if not (X_MIN <= x <= X_MAX):  # also rejects NaN
        raise DomainError(
            f"Al mole fraction x={x!r} outside the direct-gap range [{X_MIN}, {X_MAX}]"
        )
    return x


def material_for(x: float) -> MaterialParams:
    """Material parameters for Al mole fraction ``x``.

    Raises
    ------
    DomainError
        If ``x`` is outside [0, 0.45].
    """
    x = check_mole_fraction(x)
    return MaterialParams(x=x, effective_mass=effective_mass(x), band_offset=band_offset(x))


GAAS = material_for(0.0)
