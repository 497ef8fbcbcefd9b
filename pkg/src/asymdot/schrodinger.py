"""Effective-mass eigenproblem along the growth axis of a step-potential dot.

The dot occupies 0 < z < L between infinite walls.  An Al(x)Ga(1-x)As step
of thickness B sits at 0 < z < B and GaAs fills B < z < L; an optional DC
field adds a linear tilt.  The BenDaniel-Duke operator

    -(hbar^2/2) d/dz (1/m*(z)) d/dz + V(z)

is discretised with second-order central differences, masses evaluated at
cell midpoints, which reduces the problem to a symmetric tridiagonal
eigenproblem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .constants import CONSTANTS, GAAS_MASS, KV_PER_CM, check_mole_fraction, material_for
from .errors import ConfigurationError, DomainError, SolverError

DEFAULT_POINTS = 2001
MIN_POINTS = 200
MASS_MODELS = ("uniform", "position_dependent")
DEFAULT_MASS_MODEL = "uniform"

# fraction of max|psi| a sample must exceed to count as the start of the first lobe
_LOBE_THRESHOLD = 1e-3


@dataclass(frozen=True)
class DotGeometry:
    """Layer stack of one dot.

    Lengths in nm, ``bias_field`` in kV/cm.
    """

    barrier_thickness: float
    total_length: float
    mole_fraction: float
    bias_field: float = 0.0

    def __post_init__(self):
        B, L, F = self.barrier_thickness, self.total_length, self.bias_field
        for name, value in (("barrier_thickness", B), ("total_length", L), ("bias_field", F)):
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if L <= 0:
            raise DomainError(f"total_length must be positive, got {L!r}")
        if not (0 <= B < L):
            raise DomainError(f"barrier_thickness must satisfy 0 <= B < L, got B={B!r}, L={L!r}")
        check_mole_fraction(self.mole_fraction)

    @classmethod
    def from_ratio(cls, ratio: float, length: float, x: float, field: float = 0.0) -> "DotGeometry":
        if not (0 <= ratio < 1):
            raise DomainError(f"asymmetry ratio B/L must lie in [0, 1), got {ratio!r}")
        return cls(ratio * length, length, x, field)

    @property
    def asymmetry_ratio(self) -> float:
        return self.barrier_thickness / self.total_length


@dataclass(frozen=True, eq=False)
class PotentialProfile:
    """Sampled conduction-band edge and effective mass.

    ``half_mass`` holds the mass on the N-1 cell midpoints, which is what the
    discretised kinetic operator uses.  ``barrier_thickness`` is the step
    position after snapping onto the grid.
    """

    grid: np.ndarray
    potential: np.ndarray
    mass: np.ndarray
    half_mass: np.ndarray
    barrier_thickness: float
    geometry: DotGeometry
    mass_model: str = DEFAULT_MASS_MODEL

    @property
    def spacing(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @property
    def n_points(self) -> int:
        return int(self.grid.size)


@dataclass(frozen=True, eq=False)
class EigenSolution:
    """Lowest eigenpairs; ``wavefunctions[i]`` is psi_i sampled on ``grid`` (nm^-1/2)."""

    energies: np.ndarray
    wavefunctions: np.ndarray
    grid: np.ndarray
    profile: PotentialProfile | None = field(default=None, repr=False)

    @property
    def n_states(self) -> int:
        return int(self.energies.size)


def bias_potential(grid: np.ndarray, field_kv_cm: float) -> np.ndarray:
    """Electrostatic energy e*F*z (eV) of an electron in a uniform field."""
    return field_kv_cm * KV_PER_CM * grid


def build_potential(
    geometry: DotGeometry,
    n_points: int = DEFAULT_POINTS,
    mass_model: str = DEFAULT_MASS_MODEL,
) -> PotentialProfile:
    """Sample V(z) and m*(z) for ``geometry`` on a uniform grid over [0, L].

    The step edge is moved to the nearest grid node (at most half a grid
    spacing); the node on the edge carries the mean of the two potential
    values, which keeps the scheme second-order accurate.

    ``mass_model`` is ``"uniform"`` (GaAs mass everywhere) or
    ``"position_dependent"`` (AlGaAs mass inside the step layer).
    """
    if int(n_points) != n_points or n_points < MIN_POINTS:
        raise ConfigurationError(f"grid needs at least {MIN_POINTS} points, got {n_points!r}")
    if mass_model not in MASS_MODELS:
        raise ConfigurationError(f"unknown mass model {mass_model!r}; choose from {MASS_MODELS}")
    n_points = int(n_points)

    L = geometry.total_length
    material = material_for(geometry.mole_fraction)
    grid = np.linspace(0.0, L, n_points)
    h = L / (n_points - 1)
    k = int(round(geometry.barrier_thickness / h))
    k = min(k, n_points - 2)
    barrier = k * h

    barrier_mass = material.effective_mass if mass_model == "position_dependent" else GAAS_MASS

    potential = np.zeros(n_points)
    mass = np.full(n_points, GAAS_MASS)
    half_mass = np.full(n_points - 1, GAAS_MASS)
    if k > 0:
        potential[:k] = material.band_offset
        potential[k] = 0.5 * material.band_offset
        mass[:k] = barrier_mass
        mass[k] = 0.5 * (barrier_mass + GAAS_MASS)
        half_mass[:k] = barrier_mass
    if geometry.bias_field != 0:
        potential = potential + bias_potential(grid, geometry.bias_field)

    return PotentialProfile(
        grid=grid,
        potential=potential,
        mass=mass,
        half_mass=half_mass,
        barrier_thickness=barrier,
        geometry=geometry,
        mass_model=mass_model,
    )


def _fix_sign(psi: np.ndarray) -> np.ndarray:
    amp = np.abs(psi)
    first = int(np.argmax(amp > _LOBE_THRESHOLD * amp.max()))
    return -psi if psi[first] < 0 else psi


def solve(profile: PotentialProfile, n_states: int = 2) -> EigenSolution:
    """Lowest ``n_states`` eigenpairs with psi(0) = psi(L) = 0.

    Wavefunctions are normalised so that the trapezoid integral of |psi|^2
    over the grid is one, and signed so their first lobe is positive.
    """
    n = profile.n_points
    if n_states < 2 or n_states > n - 2:
        raise ConfigurationError(f"n_states must be in [2, {n - 2}], got {n_states!r}")
    h = profile.spacing
    coupling = CONSTANTS.kinetic_prefactor / (profile.half_mass * h * h)

    diag = coupling[:-1] + coupling[1:] + profile.potential[1:-1]
    off = -coupling[1:-1]
    try:
        energies, vectors = eigh_tridiagonal(
            diag, off, select="i", select_range=(0, n_states - 1), lapack_driver="stebz"
        )
    except LinAlgError as exc:
        raise SolverError(f"tridiagonal eigensolver failed: {exc}", n) from exc
    if energies.size != n_states or not np.all(np.isfinite(energies)):
        raise SolverError("eigensolver returned incomplete or non-finite eigenvalues", n)

    wavefunctions = np.zeros((n_states, n))
    wavefunctions[:, 1:-1] = vectors.T / math.sqrt(h)
    for i in range(n_states):
        wavefunctions[i] = _fix_sign(wavefunctions[i])

    return EigenSolution(
        energies=energies, wavefunctions=wavefunctions, grid=profile.grid, profile=profile
    )


def solve_geometry(
    geometry: DotGeometry,
    n_states: int = 2,
    n_points: int = DEFAULT_POINTS,
    mass_model: str = DEFAULT_MASS_MODEL,
) -> EigenSolution:
    return solve(build_potential(geometry, n_points, mass_model), n_states)


def probability_density(solution: EigenSolution, state: int) -> np.ndarray:
    """|psi_state(z)|^2 on the solution grid."""
    if not (0 <= state < solution.n_states):
        raise IndexError(f"state {state} not computed (have {solution.n_states})")
    return solution.wavefunctions[state] ** 2


def region_probability(solution: EigenSolution, state: int, z_lo: float, z_hi: float) -> float:
    """Probability of finding the electron of ``state`` in [z_lo, z_hi]."""
    z = solution.grid
    rho = probability_density(solution, state)
    inside = (z >= z_lo) & (z <= z_hi)
    return float(np.trapezoid(rho[inside], z[inside]))
