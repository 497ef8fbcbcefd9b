"""Design toolkit for asymmetric GaAs/AlGaAs single-electron quantum-dot qubits."""

from .constants import CONSTANTS, MaterialParams, PhysicalConstants, material_for
from .design import (
    BaselineResult,
    OptimalResult,
    RegisterDesign,
    SweepRow,
    SweepSpec,
    design_register,
    find_optimal,
    sweep_coupling,
    sweep_lifetime,
    sweep_transition_energy,
    symmetric_baseline,
)
from .errors import (
    AsymDotError,
    ConfigurationError,
    DomainError,
    InfeasibleDesignError,
    SolverError,
)
from .observables import (
    NO_DECAY,
    DotCharacterization,
    PhononVerdict,
    PulseWindow,
    characterize,
    dipole_dipole_coupling,
    phonon_window_check,
    pulse_window,
    spontaneous_lifetime,
)
from .schrodinger import (
    DotGeometry,
    EigenSolution,
    PotentialProfile,
    build_potential,
    probability_density,
    solve,
    solve_geometry,
)
from .tables import emit_table, read_table

__version__ = "0.1.0"
