import numpy as np
import pytest

from asymdot import design
from asymdot.design import (
    SweepSpec,
    bl_grid,
    design_register,
    evaluate_row,
    find_optimal,
    sweep_coupling,
    sweep_lifetime,
    sweep_transition_energy,
    symmetric_baseline,
)
from asymdot.errors import ConfigurationError, DomainError, InfeasibleDesignError, SolverError
from asymdot.observables import characterize, dipole_dipole_coupling, pulse_window
from asymdot.schrodinger import DotGeometry, solve_geometry
from asymdot.tables import render
from oracles import infinite_well_energy


@pytest.fixture(scope="module")
def coupling_rows():
    spec = SweepSpec(bl_grid(0.0, 0.95, 0.01), (0.2, 0.3, 0.4))
    return sweep_coupling(spec)


@pytest.fixture(scope="module")
def lifetime_rows():
    spec = SweepSpec(bl_grid(0.0, 0.95, 0.005), (0.2, 0.3, 0.4))
    return sweep_lifetime(spec)


def test_bl_grid():
    assert bl_grid(0.0, 0.1, 0.025) == (0.0, 0.025, 0.05, 0.075, 0.1)
    assert len(bl_grid(0.0, 0.95, 0.005)) == 191
    with pytest.raises(ConfigurationError):
        bl_grid(0.0, 1.0, 0.0)


@pytest.mark.parametrize(
    "kwargs",
    [dict(bl_values=(), x_values=(0.3,)), dict(bl_values=(0.99,), x_values=(0.3,)),
     dict(bl_values=(0.5,), x_values=(0.6,)), dict(bl_values=(0.5,), x_values=(0.3,), length=-1.0)],
)
def test_spec_validation(kwargs):
    with pytest.raises(DomainError):
        SweepSpec(**kwargs)


def test_transition_sweep_rows():
    spec = SweepSpec((0.0, 0.5, 0.75), (0.3, 0.2))
    rows = sweep_transition_energy(spec)
    assert [(r.x, r.bl) for r in rows] == [(0.3, 0.0), (0.3, 0.5), (0.3, 0.75),
                                           (0.2, 0.0), (0.2, 0.5), (0.2, 0.75)]
    # flat-well splitting is 3 E_1
    assert rows[0].delta_e == pytest.approx(3 * infinite_well_energy(1, 20.0, 0.067), rel=1e-4)
    assert rows[0].delta_e * 1e3 == pytest.approx(42.1, abs=0.05)
    assert rows[2].delta_e > rows[0].delta_e
    for row in rows:
        geometry = DotGeometry.from_ratio(row.bl, 20.0, row.x)
        c = characterize(solve_geometry(geometry), geometry)
        assert row.delta_e == c.delta_e
        assert row.t_d == c.lifetime
        assert row.v_dd is None


def test_higher_x_gives_larger_splitting():
    spec = SweepSpec(bl_grid(0.5, 0.85, 0.05), (0.2, 0.4))
    rows = sweep_transition_energy(spec)
    low, high = rows[: len(spec.bl_values)], rows[len(spec.bl_values):]
    assert all(h.delta_e >= l.delta_e for l, h in zip(low, high))


def test_symmetric_pair_has_no_coupling(coupling_rows):
    for row in coupling_rows:
        if row.bl == 0.0:
            assert row.v_dd == 0.0


def test_coupling_peak(coupling_rows):
    best = max(coupling_rows, key=lambda r: r.v_dd)
    assert 0.10e-3 <= best.v_dd <= 0.19e-3
    assert 0.65 <= best.bl <= 0.9


def test_coupling_rows_use_paired_dipoles(coupling_rows):
    row = next(r for r in coupling_rows if r.x == 0.3 and r.bl == 0.8)
    d = []
    for L in (19.0, 21.0):
        g = DotGeometry.from_ratio(0.8, L, 0.3)
        d.append(characterize(solve_geometry(g), g).builtin_dipole)
    assert row.d == d[0]
    assert row.v_dd == pytest.approx(dipole_dipole_coupling(d[0], d[1], 30.0), rel=1e-12)


def test_inverse_cube_in_sweep():
    near = sweep_coupling(SweepSpec((0.8,), (0.3,), barrier_width=10.0))[0]
    far = sweep_coupling(SweepSpec((0.8,), (0.3,), barrier_width=40.0))[0]
    assert near.v_dd == pytest.approx(8 * far.v_dd, rel=1e-12)


def test_lifetime_design_point(lifetime_rows):
    row = next(r for r in lifetime_rows if r.x == 0.3 and r.bl == 0.8)
    assert 2300e-9 <= row.t_d <= 3900e-9


def test_lifetime_maxima(lifetime_rows):
    peaks = {x: max(r.t_d for r in lifetime_rows if r.x == x) for x in (0.2, 0.3, 0.4)}
    for peak in peaks.values():
        assert 3000e-9 <= peak <= 7500e-9
    assert peaks[0.4] >= peaks[0.3] >= peaks[0.2]


def test_rows_reproducible_standalone():
    spec = SweepSpec((0.3, 0.8), (0.25, 0.35))
    for paired, rows in ((False, sweep_transition_energy(spec)), (True, sweep_coupling(spec))):
        for row in rows:
            again = evaluate_row(spec, row.x, row.bl, paired)
            assert again == row


def test_parallel_sweep_is_deterministic():
    spec = SweepSpec(bl_grid(0.6, 0.9, 0.05), (0.2, 0.3), workers=1)
    serial = render(sweep_coupling(spec), "csv")
    parallel = render(sweep_coupling(SweepSpec(spec.bl_values, spec.x_values, workers=3)), "csv")
    assert serial.encode() == parallel.encode()


def test_workers_from_environment(monkeypatch):
    monkeypatch.setenv(design.WORKERS_ENV, "2")
    assert design.default_workers() == 2
    monkeypatch.setenv(design.WORKERS_ENV, "many")
    with pytest.raises(ConfigurationError):
        design.default_workers()


def test_solver_errors_are_annotated(monkeypatch):
    def boom(*args, **kwargs):
        raise SolverError("no convergence", 2001, 7)

    monkeypatch.setattr(design, "solve_geometry", boom)
    with pytest.raises(SolverError, match=r"x=0.3, B/L=0.5") as info:
        sweep_transition_energy(SweepSpec((0.5,), (0.3,)))
    assert info.value.n_points == 2001
    assert info.value.iterations == 7


# -- baseline ----------------------------------------------------------------------

def test_baseline():
    result = symmetric_baseline(20.0, 112.0)
    assert 0.028e-3 <= result.v_dd <= 0.048e-3
    assert 800e-9 <= result.characterization.lifetime <= 1350e-9
    assert result.window.n_ops == pytest.approx(
        pulse_window(result.v_dd, result.characterization.lifetime).n_ops
    )
    unbiased = symmetric_baseline(20.0, 0.0)
    assert unbiased.v_dd == 0.0
    assert unbiased.window is None
    with pytest.raises(DomainError):
        symmetric_baseline(20.0, -5.0)


# -- optimiser ---------------------------------------------------------------------

@pytest.fixture(scope="module")
def n_ops_optimum():
    return find_optimal(0.3, 20.0, "max_n_ops")


def _self_paired_objective(bl, objective):
    row = design._SelfPaired(0.3, 20.0, 10.0, 2001, "uniform", "center", 3e-3)(bl)
    return row, design._objective_value(row, objective)


def test_optimal_asymmetry(n_ops_optimum):
    assert 0.7 <= n_ops_optimum.bl <= 0.9
    assert n_ops_optimum.row.phonon_ok
    assert n_ops_optimum.value >= n_ops_optimum.grid_value


def test_optimum_beats_every_grid_point(n_ops_optimum):
    for bl in bl_grid(0.0, 0.95, 0.005):
        row, value = _self_paired_objective(bl, "max_n_ops")
        if row.phonon_ok:
            assert n_ops_optimum.value >= value


def test_optimum_order_of_magnitude_over_baseline(n_ops_optimum):
    assert n_ops_optimum.value >= 10 * symmetric_baseline(20.0, 112.0).window.n_ops


def test_max_coupling_local_optimality():
    result = find_optimal(0.3, 20.0, "max_coupling")
    for bl in (0.75, 0.85):
        _, value = _self_paired_objective(bl, "max_coupling")
        assert result.value >= value


def test_max_lifetime_respects_phonon_window():
    result = find_optimal(0.3, 20.0, "max_lifetime")
    assert result.row.phonon_ok
    assert abs(result.row.delta_e - 36.2e-3) > 3e-3


def test_infeasible_optimisation():
    with pytest.raises(InfeasibleDesignError) as info:
        find_optimal(0.3, 20.0, window_halfwidth=1.0)
    assert info.value.violations == ["lo_window"]


@pytest.mark.parametrize("kwargs", [dict(objective="fastest"), dict(step=0.01)])
def test_optimiser_configuration(kwargs):
    with pytest.raises(ConfigurationError):
        find_optimal(0.3, 20.0, **kwargs)


# -- register ----------------------------------------------------------------------

def _audit(reg):
    des = [c.delta_e for c in reg.characterizations]
    seps = [abs(a - b) for i, a in enumerate(des) for b in des[i + 1:]]
    assert min(seps) >= reg.separation_factor * max(reg.adjacent_couplings)
    assert all(c.phonon_verdict.ok for c in reg.characterizations)
    assert all(w.n_ops > 1 for w in reg.pulse_windows)


def test_two_dot_register():
    reg = design_register(2, 20.0, 1.0, 10.0, 0.3)
    _audit(reg)
    assert [g.total_length for g in reg.dots] == [19.0, 21.0]
    assert 0.7 <= reg.asymmetry_ratio <= 0.9
    assert reg.adjacent_couplings[0] == pytest.approx(0.14e-3, rel=0.25)
    assert reg.pulse_windows[0].t_min == pytest.approx(2.4e-12, rel=0.25)
    assert reg.next_nearest_ratio is None


def test_register_at_design_point():
    reg = design_register(2, 20.0, 1.0, 10.0, 0.3, bl=0.8)
    _audit(reg)
    assert 0.10e-3 <= reg.adjacent_couplings[0] <= 0.18e-3
    for c in reg.characterizations:
        assert 2300e-9 <= c.lifetime <= 3900e-9
    rows = reg.rows()
    assert rows[0].v_dd == reg.adjacent_couplings[0]
    assert rows[1].v_dd is None


@pytest.mark.parametrize("n", [3, 4])
def test_larger_register(n):
    reg = design_register(n, 20.0, 1.5, 10.0, 0.3, bl=0.8)
    _audit(reg)
    assert len(reg.adjacent_couplings) == n - 1
    assert reg.next_nearest_ratio <= 0.2
    lengths = [g.total_length for g in reg.dots]
    assert np.allclose(np.diff(lengths), 3.0 / (n - 1))


def test_identical_dots_are_indistinguishable():
    with pytest.raises(InfeasibleDesignError, match="dots 0 and 1") as info:
        design_register(2, 20.0, 0.0, 10.0, 0.3, bl=0.8)
    assert info.value.violations == ["distinguishability"]


def test_register_rejects_phonon_violation():
    with pytest.raises(InfeasibleDesignError, match="phonon"):
        design_register(2, 20.0, 1.0, 10.0, 0.3, bl=0.8, window_halfwidth=1.0)


@pytest.mark.parametrize("kwargs", [dict(n=1), dict(n=2, length_spread=-1.0), dict(n=2, length_center=1.0, length_spread=1.0)])
def test_register_domain(kwargs):
    with pytest.raises(DomainError):
        design_register(**kwargs)
