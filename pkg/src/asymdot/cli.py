"""Command-line front end.

Boundary units: lengths in nm, fields in kV/cm, energies in meV, times in
ns.  Exit codes: 0 success, 2 invalid input, 3 numerical failure or
infeasible design, 4 output I/O error.  Failures print a one-line JSON
error record to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .constants import ev_to_mev, mev_to_ev, s_to_ns, s_to_ps
from .design import (
    BL_MAX,
    DEFAULT_BARRIER,
    MAX_SEARCH_STEP,
    OBJECTIVES,
    SweepSpec,
    bl_grid,
    default_workers,
    design_register,
    find_optimal,
    row_from,
    sweep_coupling,
    sweep_lifetime,
    sweep_transition_energy,
    symmetric_baseline,
)
from .errors import ConfigurationError, DomainError, InfeasibleDesignError, SolverError
from .observables import R12_RULES, characterize
from .schrodinger import (
    DEFAULT_MASS_MODEL,
    DEFAULT_POINTS,
    MASS_MODELS,
    MIN_POINTS,
    DotGeometry,
    build_potential,
    solve,
)
from .tables import FORMATS, emit_table, render_density

COMMANDS = ("solve", "sweep", "optimal", "register", "baseline")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

# figure presets: (kind, x family, B/L start, stop, step)
FIGURE_PRESETS = {
    2: ("transition", (0.2, 0.3, 0.4), 0.0, BL_MAX, 0.01),
    3: ("coupling", (0.2, 0.3, 0.4), 0.0, BL_MAX, 0.01),
    4: ("lifetime", (0.2, 0.3, 0.4), 0.0, BL_MAX, 0.01),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)

    def exit(self, status=0, message=None):
        if status:
            raise UsageError(message or "invalid arguments")
        super().exit(status, message)


def _finite(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return value


def _count(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False, allow_abbrev=False)
    common.add_argument("--format", choices=FORMATS, default="csv")
    common.add_argument("--output", "-o", help="table path, '-' for stdout (default: <command>.<format>)")
    common.add_argument("--points", type=_count, default=DEFAULT_POINTS, help="grid points")
    common.add_argument("--workers", type=_count, default=None, help="default from $ASYMDOT_WORKERS")
    common.add_argument("--mass-model", choices=MASS_MODELS, default=DEFAULT_MASS_MODEL)
    common.add_argument("--r12", choices=R12_RULES, default="center", help="dot separation rule")
    common.add_argument("--window", type=_finite, default=3.0, help="LO window half-width (meV)")
    common.add_argument("--config", help="flat 'key = value' file; its values override flags")

    parser = _Parser(prog="asymdot", description=__doc__, allow_abbrev=False,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], allow_abbrev=False, help="characterise one dot")
    p.add_argument("--B", type=_finite, default=15.0, help="step layer thickness (nm)")
    p.add_argument("--L", type=_finite, default=20.0, help="dot length (nm)")
    p.add_argument("--x", type=_finite, default=0.3, help="Al mole fraction of the step")
    p.add_argument("--F", type=_finite, default=0.0, help="DC bias field (kV/cm)")
    p.add_argument("--states", type=_count, default=2)
    p.add_argument("--density", help="also write z, V, |psi_i|^2 as CSV to this path")

    p = sub.add_parser("sweep", parents=[common], allow_abbrev=False, help="B/L x composition sweep")
    p.add_argument("--fig", type=int, choices=sorted(FIGURE_PRESETS), help="figure preset")
    p.add_argument("--kind", choices=("transition", "coupling", "lifetime"), default=None)
    p.add_argument("--x", type=_finite, nargs="+", default=None)
    p.add_argument("--bl-start", type=_finite, default=None)
    p.add_argument("--bl-stop", type=_finite, default=None)
    p.add_argument("--bl-step", type=_finite, default=None)
    p.add_argument("--L", type=_finite, default=20.0)
    p.add_argument("--L1", type=_finite, default=19.0)
    p.add_argument("--L2", type=_finite, default=21.0)
    p.add_argument("--barrier", type=_finite, default=DEFAULT_BARRIER)

    p = sub.add_parser("optimal", parents=[common], allow_abbrev=False, help="optimise B/L")
    p.add_argument("--x", type=_finite, default=0.3)
    p.add_argument("--L", type=_finite, default=20.0)
    p.add_argument("--objective", choices=OBJECTIVES, default="max_n_ops")
    p.add_argument("--step", type=_finite, default=MAX_SEARCH_STEP)
    p.add_argument("--barrier", type=_finite, default=DEFAULT_BARRIER)

    p = sub.add_parser("register", parents=[common], allow_abbrev=False, help="design a dot stack")
    p.add_argument("--n", type=_count, default=2)
    p.add_argument("--L-center", type=_finite, default=20.0)
    p.add_argument("--L-spread", type=_finite, default=1.0)
    p.add_argument("--barrier", type=_finite, default=DEFAULT_BARRIER)
    p.add_argument("--x", type=_finite, default=0.3)
    p.add_argument("--bl", type=_finite, default=None, help="fix B/L instead of optimising")
    p.add_argument("--objective", choices=OBJECTIVES, default="max_n_ops")
    p.add_argument("--separation-factor", type=_finite, default=10.0)

    p = sub.add_parser("baseline", parents=[common], allow_abbrev=False,
                       help="DC-biased symmetric dot")
    p.add_argument("--F", type=_finite, default=112.0)
    p.add_argument("--L", type=_finite, default=20.0)
    p.add_argument("--barrier", type=_finite, default=DEFAULT_BARRIER)
    return parser


def _subparser(parser: argparse.ArgumentParser, command: str) -> argparse.ArgumentParser:
    for action in parser._subparsers._group_actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[command]
    raise UsageError(f"unknown command {command!r}")


def apply_config(parser: argparse.ArgumentParser, args: argparse.Namespace, path: str) -> None:
    """Overwrite parsed flag values with the entries of a ``key = value`` file."""
    sub = _subparser(parser, args.command)
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key = key.strip().lstrip("-").replace("-", "_")
        raw = raw.strip()
        if not sep or not key:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        action = actions.get(key)
        if action is None:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r} for command {args.command!r}")
        parts = raw.split() if action.nargs == "+" else [raw]
        try:
            values = [action.type(p) if action.type else p for p in parts]
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"{path}:{lineno}: {key}: {exc}") from None
        if action.choices is not None and any(v not in action.choices for v in values):
            raise UsageError(f"{path}:{lineno}: {key} must be one of {list(action.choices)}")
        setattr(args, key, values if action.nargs == "+" else values[0])


@dataclass
class RunConfig:
    command: str
    params: dict
    fmt: str = "csv"
    output: str | None = None
    n_points: int = DEFAULT_POINTS
    workers: int = 1
    mass_model: str = DEFAULT_MASS_MODEL
    r12_rule: str = "center"
    window_halfwidth: float = mev_to_ev(3.0)
    extra: dict = field(default_factory=dict)

    @property
    def output_path(self) -> str:
        return self.output if self.output else f"{self.command}.{self.fmt}"


_COMMON = {"command", "format", "output", "points", "workers", "mass_model", "r12", "window", "config"}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Validate parsed arguments against the model preconditions."""
    if args.points < MIN_POINTS:
        raise ConfigurationError(f"--points must be at least {MIN_POINTS}, got {args.points}")
    workers = args.workers if args.workers is not None else default_workers()
    if workers < 1:
        raise ConfigurationError(f"--workers must be >= 1, got {workers}")
    if args.window <= 0:
        raise DomainError(f"--window must be positive, got {args.window}")
    params = {k: v for k, v in vars(args).items() if k not in _COMMON}
    config = RunConfig(
        command=args.command,
        params=params,
        fmt=args.format,
        output=args.output,
        n_points=args.points,
        workers=workers,
        mass_model=args.mass_model,
        r12_rule=args.r12,
        window_halfwidth=mev_to_ev(args.window),
    )
    _validate(config)
    return config


def _sweep_spec(config: RunConfig) -> tuple[str, SweepSpec]:
    p = config.params
    kind, xs, start, stop, step = "transition", (0.3,), 0.0, BL_MAX, 0.01
    if p.get("fig") is not None:
        kind, xs, start, stop, step = FIGURE_PRESETS[p["fig"]]
    if p.get("kind"):
        kind = p["kind"]
    if p.get("x"):
        xs = tuple(p["x"])
    start = p["bl_start"] if p.get("bl_start") is not None else start
    stop = p["bl_stop"] if p.get("bl_stop") is not None else stop
    step = p["bl_step"] if p.get("bl_step") is not None else step
    spec = SweepSpec(
        bl_values=bl_grid(start, stop, step),
        x_values=xs,
        length=p["L"],
        pair_lengths=(p["L1"], p["L2"]),
        barrier_width=p["barrier"],
        n_points=config.n_points,
        mass_model=config.mass_model,
        r12_rule=config.r12_rule,
        window_halfwidth=config.window_halfwidth,
        workers=config.workers,
    )
    return kind, spec


def _positive(name: str, value: float) -> None:
    if not value > 0:
        raise DomainError(f"--{name} must be positive, got {value}")


def _validate(config: RunConfig) -> None:
    p = config.params
    if config.command == "solve":
        DotGeometry(p["B"], p["L"], p["x"], p["F"])
        if not (2 <= p["states"] <= config.n_points - 2):
            raise ConfigurationError(f"--states must be in [2, {config.n_points - 2}]")
    elif config.command == "sweep":
        config.extra["sweep"] = _sweep_spec(config)
    elif config.command == "optimal":
        DotGeometry(0.0, p["L"], p["x"])
        _positive("barrier", p["barrier"])
        if not (0 < p["step"] <= MAX_SEARCH_STEP):
            raise ConfigurationError(f"--step must be in (0, {MAX_SEARCH_STEP}]")
    elif config.command == "register":
        if p["n"] < 2:
            raise DomainError(f"--n must be at least 2, got {p['n']}")
        if p["n"] > 50:
            raise DomainError(f"--n above 50 is not supported, got {p['n']}")
        if p["L_spread"] < 0:
            raise DomainError("--L-spread must be >= 0")
        DotGeometry(0.0, p["L_center"] - p["L_spread"], p["x"])
        _positive("barrier", p["barrier"])
        _positive("separation-factor", p["separation_factor"])
        if p["bl"] is not None and not (0 <= p["bl"] <= BL_MAX):
            raise DomainError(f"--bl must lie in [0, {BL_MAX}]")
    elif config.command == "baseline":
        if p["F"] < 0:
            raise DomainError("--F must be >= 0")
        DotGeometry(0.0, p["L"], 0.0, p["F"])
        _positive("barrier", p["barrier"])


def _fmt_row_summary(delta_e, d, D, t_d) -> str:
    td = f"{s_to_ns(t_d):.6g} ns" if math.isfinite(t_d) else "no decay"
    return f"dE={ev_to_mev(delta_e):.6g} meV d={d:.6g} e*nm D={D:.6g} nm T_d={td}"


def _execute(config: RunConfig):
    """Run the command; return (rows, summary line)."""
    p = config.params
    common = dict(n_points=config.n_points, mass_model=config.mass_model)

    if config.command == "solve":
        geometry = DotGeometry(p["B"], p["L"], p["x"], p["F"])
        profile = build_potential(geometry, config.n_points, config.mass_model)
        solution = solve(profile, p["states"])
        char = characterize(solution, geometry, config.window_halfwidth)
        if p.get("density"):
            Path(p["density"]).write_text(render_density(solution), encoding="utf-8")
        row = row_from(geometry.asymmetry_ratio, geometry.mole_fraction, char)
        verdict = "ok" if char.phonon_verdict.ok else char.phonon_verdict.rule
        summary = (
            f"solve B={profile.barrier_thickness:.6g} nm L={geometry.total_length:.6g} nm "
            f"x={geometry.mole_fraction:.6g}: "
            + _fmt_row_summary(char.delta_e, char.builtin_dipole, char.dipole_matrix_element, char.lifetime)
            + f" phonon={verdict}"
        )
        return [row], summary

    if config.command == "sweep":
        kind, spec = config.extra["sweep"]
        if kind == "coupling":
            rows = sweep_coupling(spec)
            best = max(rows, key=lambda r: r.v_dd)
            summary = (f"sweep coupling: {len(rows)} rows, peak V_dd={ev_to_mev(best.v_dd):.6g} meV "
                       f"at B/L={best.bl:.6g} x={best.x:.6g}")
        elif kind == "lifetime":
            rows = sweep_lifetime(spec)
            best = max(rows, key=lambda r: r.t_d)
            summary = (f"sweep lifetime: {len(rows)} rows, peak T_d={s_to_ns(best.t_d):.6g} ns "
                       f"at B/L={best.bl:.6g} x={best.x:.6g}")
        else:
            rows = sweep_transition_energy(spec)
            lo = min(r.delta_e for r in rows)
            hi = max(r.delta_e for r in rows)
            summary = (f"sweep transition: {len(rows)} rows, dE range "
                       f"{ev_to_mev(lo):.6g}-{ev_to_mev(hi):.6g} meV")
        return rows, summary

    if config.command == "optimal":
        result = find_optimal(
            p["x"], p["L"], p["objective"], step=p["step"], barrier=p["barrier"],
            r12_rule=config.r12_rule, window_halfwidth=config.window_halfwidth,
            workers=config.workers, **common,
        )
        r = result.row
        summary = (f"optimal {result.objective}: B/L*={result.bl:.6g} value={result.value:.6g} "
                   + _fmt_row_summary(r.delta_e, r.d, r.D, r.t_d)
                   + f" V_dd={ev_to_mev(r.v_dd):.6g} meV")
        return [r], summary

    if config.command == "register":
        design = design_register(
            p["n"], p["L_center"], p["L_spread"], p["barrier"], p["x"], bl=p["bl"],
            objective=p["objective"], separation_factor=p["separation_factor"],
            r12_rule=config.r12_rule, window_halfwidth=config.window_halfwidth,
            workers=config.workers, **common,
        )
        window = min(design.pulse_windows, key=lambda w: w.n_ops)
        summary = (
            f"register n={len(design.dots)} B/L={design.asymmetry_ratio:.6g}: "
            f"max V_dd={ev_to_mev(max(design.adjacent_couplings)):.6g} meV "
            f"min dE separation={ev_to_mev(design.min_separation):.6g} meV "
            f"pulse window {s_to_ps(window.t_min):.4g} ps << T_p << {s_to_ps(window.t_max):.4g} ps "
            f"n_ops={design.n_ops:.4g}"
        )
        return design.rows(), summary

    result = symmetric_baseline(
        p["L"], p["F"], p["barrier"], r12_rule=config.r12_rule, **common
    )
    c = result.characterization
    summary = (f"baseline L={p['L']:.6g} nm F={p['F']:.6g} kV/cm: "
               f"V_dd={ev_to_mev(result.v_dd):.6g} meV " + _fmt_row_summary(c.delta_e, c.builtin_dipole, c.dipole_matrix_element, c.lifetime))
    if result.window is not None:
        summary += f" n_ops={result.window.n_ops:.4g}"
    return [result.row()], summary


def _error(code: int, kind: str, message: str, **extra) -> int:
    record = {"status": "error", "exit_code": code, "kind": kind, "message": message, **extra}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    return code


def run(config: RunConfig) -> int:
    """Execute a validated configuration, write its table, print a summary."""
    try:
        rows, summary = _execute(config)
    except InfeasibleDesignError as exc:
        return _error(EXIT_NUMERIC, "infeasible", str(exc), violations=exc.violations)
    except SolverError as exc:
        return _error(EXIT_NUMERIC, "numeric", str(exc), n_points=exc.n_points,
                      iterations=exc.iterations)
    except (DomainError, ConfigurationError) as exc:
        return _error(EXIT_USAGE, "usage", str(exc))
    except OSError as exc:
        return _error(EXIT_IO, "io", str(exc))
    try:
        emit_table(rows, config.fmt, config.output_path)
    except OSError as exc:
        return _error(EXIT_IO, "io", f"cannot write {config.output_path!r}: {exc}")
    print(summary, file=sys.stderr if config.output_path == "-" else sys.stdout)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            apply_config(parser, args, args.config)
        config = config_from_args(args)
    except UsageError as exc:
        return _error(EXIT_USAGE, "usage", str(exc))
    except (DomainError, ConfigurationError) as exc:
        return _error(EXIT_USAGE, "usage", str(exc))
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
