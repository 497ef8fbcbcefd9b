"""Qubit figures of merit computed from a solved dot.

All inputs and outputs are in internal units: eV, nm, s, dipoles in e*nm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CONSTANTS, GAAS_EPSILON_R, MaterialParams, material_for
from .errors import DomainError
from .schrodinger import DotGeometry, EigenSolution

# lifetime returned for a forbidden (D = 0) transition
NO_DECAY = math.inf

SUB_MEV_THRESHOLD = 1e-3  # eV
DEFAULT_WINDOW_HALFWIDTH = 3e-3  # eV
R12_RULES = ("center", "edge")


@dataclass(frozen=True)
class PhononVerdict:
    ok: bool
    rule: str | None = None  # "sub_meV" or "lo_window" on violation
    reason: str = ""

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class DotCharacterization:
    """Observables of one dot.

    ``z00``/``z11`` are position expectations in the grid frame (nm);
    ``origin`` is their midpoint, about which the two state dipoles are
    +/- ``builtin_dipole``.  ``lifetime`` is :data:`NO_DECAY` when the
    transition is dipole-forbidden.
    """

    delta_e: float
    z00: float
    z11: float
    origin: float
    builtin_dipole: float
    dipole_matrix_element: float
    lifetime: float
    phonon_verdict: PhononVerdict

    @property
    def radiative(self) -> bool:
        return math.isfinite(self.lifetime)


@dataclass(frozen=True)
class PulseWindow:
    t_min: float  # s
    t_max: float  # s
    n_ops: float


def position_matrix(solution: EigenSolution, i: int, j: int) -> float:
    """<i|z|j> by trapezoid quadrature on the solution grid (nm)."""
    z = solution.grid
    psi = solution.wavefunctions
    return float(np.trapezoid(psi[i] * z * psi[j], z))


def characterize(
    solution: EigenSolution,
    geometry: DotGeometry,
    window_halfwidth: float = DEFAULT_WINDOW_HALFWIDTH,
    d_tolerance: float = 1e-9,
) -> DotCharacterization:
    """Reduce the two lowest states of ``solution`` to qubit observables.

    A dipole matrix element smaller than ``d_tolerance * L`` is treated as
    a forbidden transition; a built-in dipole below the same bound is
    round-off of a symmetric well and is set to zero.
    """
    if solution.n_states < 2:
        raise DomainError("characterize needs at least two computed states")
    delta_e = float(solution.energies[1] - solution.energies[0])
    z00 = position_matrix(solution, 0, 0)
    z11 = position_matrix(solution, 1, 1)
    dme = position_matrix(solution, 0, 1)

    floor = d_tolerance * geometry.total_length
    dipole = 0.5 * (z11 - z00)
    if abs(dipole) <= floor:
        dipole = 0.0
    if abs(dme) <= floor:
        lifetime = NO_DECAY
    else:
        lifetime = spontaneous_lifetime(dme, delta_e)

    return DotCharacterization(
        delta_e=delta_e,
        z00=z00,
        z11=z11,
        origin=0.5 * (z00 + z11),
        builtin_dipole=dipole,
        dipole_matrix_element=dme,
        lifetime=lifetime,
        phonon_verdict=phonon_window_check(
            delta_e, material_for(geometry.mole_fraction), window_halfwidth
        ),
    )


def dipole_dipole_coupling(
    d1: float, d2: float, r12: float, epsilon_r: float = GAAS_EPSILON_R
) -> float:
    """Electrostatic coupling 2|d1||d2| / (eps_r R^3) with dipoles in e*nm; returns eV."""
    if not r12 > 0:
        raise DomainError(f"dot separation must be positive, got {r12!r}")
    if not epsilon_r > 0:
        raise DomainError(f"dielectric constant must be positive, got {epsilon_r!r}")
    return 2.0 * CONSTANTS.coulomb_k * abs(d1 * d2) / (epsilon_r * r12**3)


def dot_separation(length1: float, length2: float, barrier: float, rule: str = "center") -> float:
    """Distance R12 between two stacked dots separated by ``barrier`` nm.

    ``"center"`` measures centre to centre, ``"edge"`` uses the barrier width.
    """
    if rule == "center":
        return 0.5 * (length1 + length2) + barrier
    if rule == "edge":
        return barrier
    raise DomainError(f"unknown R12 rule {rule!r}; choose from {R12_RULES}")


def spontaneous_lifetime(dme: float, delta_e: float) -> float:
    """Radiative lifetime 3 hbar (hbar c)^3 / (4 e^2 D^2 dE^3) in seconds.

    Uses e^2 = alpha * hbar c; ``dme`` in nm, ``delta_e`` in eV.  Returns
    :data:`NO_DECAY` when ``dme`` is exactly zero.
    """
    if not delta_e > 0:
        raise DomainError(f"transition energy must be positive, got {delta_e!r}")
    if dme == 0:
        return NO_DECAY
    c = CONSTANTS
    return 3.0 * c.hbar * c.hbar_c**2 / (4.0 * c.fine_structure * dme**2 * delta_e**3)


def pulse_window(v_dd: float, t_d: float) -> PulseWindow:
    """Admissible pi-pulse durations hbar/(2 V_dd) << T_p << T_d."""
    if not v_dd > 0:
        raise DomainError(f"coupling energy must be positive, got {v_dd!r}")
    if not t_d > 0:
        raise DomainError(f"dephasing time must be positive, got {t_d!r}")
    t_min = CONSTANTS.hbar / (2.0 * v_dd)
    return PulseWindow(t_min=t_min, t_max=t_d, n_ops=t_d / t_min)


def phonon_window_check(
    delta_e: float,
    params: MaterialParams | None = None,
    window_halfwidth: float = DEFAULT_WINDOW_HALFWIDTH,
) -> PhononVerdict:
    """Check a level spacing against the phonon-bottleneck rules.

    Passes when the spacing exceeds 1 meV and stays more than
    ``window_halfwidth`` away from the LO-phonon energy.
    """
    if not window_halfwidth > 0:
        raise DomainError(f"window half-width must be positive, got {window_halfwidth!r}")
    if params is None:
        params = material_for(0.0)
    if not delta_e > SUB_MEV_THRESHOLD:
        return PhononVerdict(
            False, "sub_meV", f"level spacing {delta_e * 1e3:.4g} meV does not exceed 1 meV"
        )
    lo = params.lo_phonon_energy
    if abs(delta_e - lo) <= window_halfwidth:
        return PhononVerdict(
            False,
            "lo_window",
            f"level spacing {delta_e * 1e3:.4g} meV within {window_halfwidth * 1e3:.4g} meV "
            f"of the LO phonon energy {lo * 1e3:.4g} meV",
        )
    return PhononVerdict(True)
