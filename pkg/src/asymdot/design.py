"""Parameter sweeps, asymmetry optimisation and register layout.

Every sweep row is an independent solve, so rows are farmed out to a
process pool and gathered back in input order; the output does not depend
on the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import combinations, product

import numpy as np

from .constants import check_mole_fraction
from .errors import ConfigurationError, DomainError, InfeasibleDesignError, SolverError
from .observables import (
    DEFAULT_WINDOW_HALFWIDTH,
    DotCharacterization,
    PulseWindow,
    characterize,
    dipole_dipole_coupling,
    dot_separation,
    pulse_window,
)
from .schrodinger import DEFAULT_MASS_MODEL, DEFAULT_POINTS, DotGeometry, solve_geometry

WORKERS_ENV = "ASYMDOT_WORKERS"
BL_MAX = 0.95
DEFAULT_BARRIER = 10.0
DEFAULT_PAIR = (19.0, 21.0)
OBJECTIVES = ("max_n_ops", "max_lifetime", "max_coupling")
MAX_SEARCH_STEP = 0.005
NEXT_NEAREST_LIMIT = 0.2

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigurationError(f"{WORKERS_ENV}={raw!r} is not an integer") from None
    if workers < 1:
        raise ConfigurationError(f"{WORKERS_ENV} must be >= 1, got {workers}")
    return workers


@dataclass(frozen=True)
class SweepSpec:
    """Axes and device settings of a B/L x Al-fraction sweep (lengths in nm)."""

    bl_values: tuple[float, ...]
    x_values: tuple[float, ...]
    length: float = 20.0
    pair_lengths: tuple[float, float] = DEFAULT_PAIR
    barrier_width: float = DEFAULT_BARRIER
    n_points: int = DEFAULT_POINTS
    mass_model: str = DEFAULT_MASS_MODEL
    r12_rule: str = "center"
    window_halfwidth: float = DEFAULT_WINDOW_HALFWIDTH
    workers: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "bl_values", tuple(float(v) for v in self.bl_values))
        object.__setattr__(self, "x_values", tuple(float(v) for v in self.x_values))
        object.__setattr__(self, "pair_lengths", tuple(float(v) for v in self.pair_lengths))
        if not self.bl_values or not self.x_values:
            raise DomainError("sweep needs at least one B/L value and one x value")
        for bl in self.bl_values:
            if not (0.0 <= bl <= BL_MAX):
                raise DomainError(f"B/L={bl!r} outside [0, {BL_MAX}]")
        for x in self.x_values:
            check_mole_fraction(x)
        if len(self.pair_lengths) != 2:
            raise DomainError("pair_lengths needs exactly two dot lengths")
        for name, value in (
            ("length", self.length),
            ("pair length", self.pair_lengths[0]),
            ("pair length", self.pair_lengths[1]),
            ("barrier_width", self.barrier_width),
        ):
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")
        if self.workers is not None and self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")

    def points(self) -> list[tuple[float, float]]:
        """(x, bl) pairs in output order."""
        return list(product(self.x_values, self.bl_values))


@dataclass(frozen=True)
class SweepRow:
    """One sweep sample.  ``v_dd`` is None for single-dot sweeps.

    Paired sweeps report the characterisation of the first dot of the pair;
    ``phonon_ok`` then requires both dots to pass.
    """

    bl: float
    x: float
    delta_e: float
    d: float
    D: float
    v_dd: float | None
    t_d: float
    phonon_ok: bool
    phonon_rule: str | None = None


def row_from(bl: float, x: float, char: DotCharacterization, v_dd: float | None = None) -> SweepRow:
    return SweepRow(
        bl=bl,
        x=x,
        delta_e=char.delta_e,
        d=char.builtin_dipole,
        D=char.dipole_matrix_element,
        v_dd=v_dd,
        t_d=char.lifetime,
        phonon_ok=char.phonon_verdict.ok,
        phonon_rule=char.phonon_verdict.rule,
    )


def characterize_geometry(
    geometry: DotGeometry,
    n_points: int = DEFAULT_POINTS,
    mass_model: str = DEFAULT_MASS_MODEL,
    window_halfwidth: float = DEFAULT_WINDOW_HALFWIDTH,
) -> DotCharacterization:
    solution = solve_geometry(geometry, 2, n_points, mass_model)
    return characterize(solution, geometry, window_halfwidth)


def _dot(spec: SweepSpec, bl: float, x: float, length: float) -> DotCharacterization:
    geometry = DotGeometry.from_ratio(bl, length, x)
    return characterize_geometry(geometry, spec.n_points, spec.mass_model, spec.window_halfwidth)


def evaluate_row(spec: SweepSpec, x: float, bl: float, paired: bool = False) -> SweepRow:
    """Evaluate one sweep sample standalone."""
    try:
        if not paired:
            return row_from(bl, x, _dot(spec, bl, x, spec.length))
        l1, l2 = spec.pair_lengths
        first = _dot(spec, bl, x, l1)
        second = _dot(spec, bl, x, l2)
    except (DomainError, ConfigurationError) as exc:
        raise type(exc)(f"at x={x}, B/L={bl}: {exc}") from exc
    except SolverError as exc:
        raise SolverError(f"at x={x}, B/L={bl}: {exc}", exc.n_points, exc.iterations) from exc
    r12 = dot_separation(l1, l2, spec.barrier_width, spec.r12_rule)
    v_dd = dipole_dipole_coupling(first.builtin_dipole, second.builtin_dipole, r12)
    row = row_from(bl, x, first, v_dd)
    if row.phonon_ok and not second.phonon_verdict.ok:
        row = replace(row, phonon_ok=False, phonon_rule=second.phonon_verdict.rule)
    return row


def _evaluate_star(args):
    return evaluate_row(*args)


def _parallel_map(func, items: list, workers: int) -> list:
    if workers <= 1 or len(items) < 2:
        return [func(item) for item in items]
    chunk = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=chunk))


def _run(spec: SweepSpec, paired: bool) -> list[SweepRow]:
    workers = spec.workers if spec.workers is not None else default_workers()
    items = [(spec, x, bl, paired) for x, bl in spec.points()]
    return _parallel_map(_evaluate_star, items, workers)


def sweep_transition_energy(spec: SweepSpec) -> list[SweepRow]:
    """Single-dot rows of length ``spec.length``, ordered by (x, bl)."""
    return _run(spec, paired=False)


def sweep_lifetime(spec: SweepSpec) -> list[SweepRow]:
    """Single-dot rows carrying T_d (``NO_DECAY`` for forbidden transitions)."""
    return _run(spec, paired=False)


def sweep_coupling(spec: SweepSpec) -> list[SweepRow]:
    """Paired-dot rows with V_dd between dots of ``spec.pair_lengths``."""
    return _run(spec, paired=True)


def bl_grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive, evenly spaced B/L values, rounded to suppress float drift."""
    if not (step > 0 and math.isfinite(step)):
        raise ConfigurationError(f"B/L step must be positive, got {step!r}")
    if stop < start:
        raise ConfigurationError(f"B/L stop {stop!r} below start {start!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 10) for i in range(count))


# -- symmetric baseline ------------------------------------------------------

@dataclass(frozen=True)
class BaselineResult:
    geometry: DotGeometry
    characterization: DotCharacterization
    v_dd: float
    window: PulseWindow | None

    def row(self) -> SweepRow:
        return row_from(0.0, self.geometry.mole_fraction, self.characterization, self.v_dd)


def symmetric_baseline(
    length: float = 20.0,
    field_kv_cm: float = 112.0,
    barrier: float = DEFAULT_BARRIER,
    n_points: int = DEFAULT_POINTS,
    mass_model: str = DEFAULT_MASS_MODEL,
    r12_rule: str = "center",
) -> BaselineResult:
    """Symmetric GaAs dot under a DC field, coupled to an identical copy."""
    if not (math.isfinite(field_kv_cm) and field_kv_cm >= 0):
        raise DomainError(f"bias field must be finite and >= 0, got {field_kv_cm!r}")
    geometry = DotGeometry(0.0, length, 0.0, field_kv_cm)
    char = characterize_geometry(geometry, n_points, mass_model)
    r12 = dot_separation(length, length, barrier, r12_rule)
    v_dd = dipole_dipole_coupling(char.builtin_dipole, char.builtin_dipole, r12)
    window = pulse_window(v_dd, char.lifetime) if v_dd > 0 else None
    return BaselineResult(geometry, char, v_dd, window)


# -- optimisation --------------------------------------------------------------

@dataclass(frozen=True)
class OptimalResult:
    bl: float
    row: SweepRow
    objective: str
    value: float
    grid_bl: float  # best grid point before refinement
    grid_value: float


def _objective_value(row: SweepRow, objective: str) -> float:
    if objective == "max_lifetime":
        return row.t_d
    if objective == "max_coupling":
        return row.v_dd
    if row.v_dd <= 0:
        return 0.0
    return pulse_window(row.v_dd, row.t_d).n_ops


@dataclass(frozen=True)
class _SelfPaired:
    """Picklable objective: dot of length L coupled to a copy of itself."""

    x: float
    length: float
    barrier: float
    n_points: int
    mass_model: str
    r12_rule: str
    window_halfwidth: float

    def __call__(self, bl: float) -> SweepRow:
        geometry = DotGeometry.from_ratio(bl, self.length, self.x)
        char = characterize_geometry(geometry, self.n_points, self.mass_model, self.window_halfwidth)
        r12 = dot_separation(self.length, self.length, self.barrier, self.r12_rule)
        v_dd = dipole_dipole_coupling(char.builtin_dipole, char.builtin_dipole, r12)
        return row_from(bl, self.x, char, v_dd)


def _golden_max(f, a: float, b: float, tol: float):
    """Golden-section search for the maximum of ``f`` on [a, b]; returns (x, f(x))."""
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def find_optimal(
    x: float,
    length: float = 20.0,
    objective: str = "max_n_ops",
    step: float = MAX_SEARCH_STEP,
    bl_range: tuple[float, float] = (0.0, BL_MAX),
    barrier: float = DEFAULT_BARRIER,
    n_points: int = DEFAULT_POINTS,
    mass_model: str = DEFAULT_MASS_MODEL,
    r12_rule: str = "center",
    window_halfwidth: float = DEFAULT_WINDOW_HALFWIDTH,
    workers: int | None = None,
) -> OptimalResult:
    """Maximise ``objective`` over B/L among phonon-window-compliant designs.

    A grid scan at ``step`` locates the best feasible sample; golden-section
    search over its two neighbouring intervals refines it.  The refined
    point is kept only if it is feasible and at least as good.

    Objectives: ``max_n_ops`` (T_d over the minimum pulse width),
    ``max_lifetime`` and ``max_coupling``; couplings are for the dot paired
    with an identical copy across ``barrier``.
    """
    if objective not in OBJECTIVES:
        raise ConfigurationError(f"unknown objective {objective!r}; choose from {OBJECTIVES}")
    if not (0 < step <= MAX_SEARCH_STEP):
        raise ConfigurationError(f"B/L search step must be in (0, {MAX_SEARCH_STEP}], got {step!r}")
    lo, hi = bl_range
    if not (0.0 <= lo < hi <= BL_MAX):
        raise DomainError(f"B/L range {bl_range!r} must satisfy 0 <= lo < hi <= {BL_MAX}")
    check_mole_fraction(x)

    evaluate = _SelfPaired(x, length, barrier, n_points, mass_model, r12_rule, window_halfwidth)
    grid = bl_grid(lo, hi, step)
    workers = workers if workers is not None else default_workers()
    rows = _parallel_map(evaluate, list(grid), workers)

    feasible = [i for i, row in enumerate(rows) if row.phonon_ok]
    if not feasible:
        rules = sorted({row.phonon_rule for row in rows if row.phonon_rule})
        raise InfeasibleDesignError(
            f"no B/L in [{lo}, {hi}] passes the phonon window at x={x}, L={length} nm", rules
        )
    values = [_objective_value(row, objective) for row in rows]
    k = max(feasible, key=lambda i: (values[i], -i))
    best_bl, best_row, best_value = grid[k], rows[k], values[k]
    grid_bl, grid_value = best_bl, best_value

    cache: dict[float, SweepRow] = {}

    def score(bl: float) -> float:
        row = cache.get(bl)
        if row is None:
            row = cache[bl] = evaluate(bl)
        return _objective_value(row, objective) if row.phonon_ok else -math.inf

    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, len(grid) - 1)]
    if b > a:
        bl_ref, value_ref = _golden_max(score, a, b, tol=1e-4)
        if value_ref > best_value:
            best_bl, best_row, best_value = bl_ref, cache[bl_ref], value_ref

    return OptimalResult(best_bl, best_row, objective, best_value, grid_bl, grid_value)


# -- register --------------------------------------------------------------------

@dataclass(frozen=True)
class RegisterDesign:
    """A vertical stack of dots sharing B/L and Al fraction.

    ``adjacent_couplings[i]`` and ``pulse_windows[i]`` refer to dots i, i+1.
    ``next_nearest_ratio`` is the largest V_dd(i, i+2) / min adjacent coupling
    of the triple (None for two dots).
    """

    dots: tuple[DotGeometry, ...]
    barrier_width: float
    asymmetry_ratio: float
    characterizations: tuple[DotCharacterization, ...]
    adjacent_couplings: tuple[float, ...]
    pulse_windows: tuple[PulseWindow, ...]
    min_separation: float
    closest_pair: tuple[int, int]
    n_ops: float
    next_nearest_ratio: float | None = None
    separation_factor: float = 10.0
    optimum: OptimalResult | None = field(default=None, repr=False, compare=False)

    def rows(self) -> list[SweepRow]:
        """One row per dot; ``v_dd`` couples it to the next dot (None for the last)."""
        out = []
        for i, (geom, char) in enumerate(zip(self.dots, self.characterizations)):
            v = self.adjacent_couplings[i] if i < len(self.adjacent_couplings) else None
            out.append(row_from(geom.asymmetry_ratio, geom.mole_fraction, char, v))
        return out


def design_register(
    n: int,
    length_center: float = 20.0,
    length_spread: float = 1.0,
    barrier: float = DEFAULT_BARRIER,
    x: float = 0.3,
    bl: float | None = None,
    objective: str = "max_n_ops",
    separation_factor: float = 10.0,
    n_points: int = DEFAULT_POINTS,
    mass_model: str = DEFAULT_MASS_MODEL,
    r12_rule: str = "center",
    window_halfwidth: float = DEFAULT_WINDOW_HALFWIDTH,
    workers: int | None = None,
) -> RegisterDesign:
    """Lay out ``n`` dots with lengths evenly spread over L_center +/- L_spread.

    All dots share ``x`` and the asymmetry ratio, taken from
    :func:`find_optimal` on the centre dot unless ``bl`` is given.

    Raises
    ------
    InfeasibleDesignError
        If a dot violates the phonon window, dots are spectrally
        indistinguishable (closest pair of transition energies closer than
        ``separation_factor`` times the largest adjacent coupling), or
        next-nearest coupling is not suppressed.
    """
    if int(n) != n or n < 2:
        raise DomainError(f"a register needs at least two dots, got n={n!r}")
    n = int(n)
    if not (math.isfinite(length_spread) and length_spread >= 0):
        raise DomainError(f"length spread must be finite and >= 0, got {length_spread!r}")
    if length_center - length_spread <= 0:
        raise DomainError("smallest dot length must be positive")
    if not separation_factor > 0:
        raise DomainError(f"separation factor must be positive, got {separation_factor!r}")

    optimum = None
    if bl is None:
        optimum = find_optimal(
            x, length_center, objective, barrier=barrier, n_points=n_points,
            mass_model=mass_model, r12_rule=r12_rule, window_halfwidth=window_halfwidth,
            workers=workers,
        )
        bl = optimum.bl

    lengths = [float(v) for v in np.linspace(length_center - length_spread, length_center + length_spread, n)]
    dots = tuple(DotGeometry.from_ratio(bl, L, x) for L in lengths)
    chars = tuple(characterize_geometry(g, n_points, mass_model, window_halfwidth) for g in dots)

    bad = [
        f"dot {i}: {c.phonon_verdict.rule} ({c.phonon_verdict.reason})"
        for i, c in enumerate(chars)
        if not c.phonon_verdict.ok
    ]
    if bad:
        raise InfeasibleDesignError("phonon window violated: " + "; ".join(bad), bad)

    def coupling(i: int, j: int) -> float:
        r = dot_separation(lengths[i], lengths[j], barrier, r12_rule)
        if j - i > 1:
            r += sum(lengths[i + 1 : j]) + (j - i - 1) * barrier
        return dipole_dipole_coupling(chars[i].builtin_dipole, chars[j].builtin_dipole, r)

    adjacent = tuple(coupling(i, i + 1) for i in range(n - 1))
    if min(adjacent) <= 0:
        raise InfeasibleDesignError(
            f"B/L={bl} gives no built-in dipole; adjacent dots are uncoupled", ["no_coupling"]
        )
    windows = tuple(
        pulse_window(v, min(chars[i].lifetime, chars[i + 1].lifetime))
        for i, v in enumerate(adjacent)
    )

    i_min, j_min = min(
        combinations(range(n), 2), key=lambda p: abs(chars[p[0]].delta_e - chars[p[1]].delta_e)
    )
    min_sep = abs(chars[i_min].delta_e - chars[j_min].delta_e)
    required = separation_factor * max(adjacent)
    if min_sep < required:
        raise InfeasibleDesignError(
            f"dots {i_min} and {j_min} have transition energies "
            f"{chars[i_min].delta_e * 1e3:.6g} and {chars[j_min].delta_e * 1e3:.6g} meV "
            f"(separation {min_sep * 1e3:.4g} meV); need at least {required * 1e3:.4g} meV",
            ["distinguishability"],
        )

    nn_ratio = None
    if n >= 3:
        nn_ratio = max(
            coupling(i, i + 2) / min(adjacent[i], adjacent[i + 1]) for i in range(n - 2)
        )
        if nn_ratio > NEXT_NEAREST_LIMIT:
            raise InfeasibleDesignError(
                f"next-nearest coupling is {nn_ratio:.3g} of the adjacent coupling "
                f"(limit {NEXT_NEAREST_LIMIT})",
                ["next_nearest"],
            )

    return RegisterDesign(
        dots=dots,
        barrier_width=barrier,
        asymmetry_ratio=bl,
        characterizations=chars,
        adjacent_couplings=adjacent,
        pulse_windows=windows,
        min_separation=min_sep,
        closest_pair=(i_min, j_min),
        n_ops=min(w.n_ops for w in windows),
        next_nearest_ratio=nn_ratio,
        separation_factor=separation_factor,
        optimum=optimum,
    )
