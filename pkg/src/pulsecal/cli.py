"""Batch runner for the gate tables, trajectory figures and state-preparation sweeps.

Examples
--------
    pulsecal --table ypi --amp-fractions 0.1 --out results
    pulsecal --figure fig1
    pulsecal --sweep 33 --shapes square
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from . import gates
from .calibration import CalibratedPulse, CalibrationError, Scheme
from .dynamics import STEP_TOLERANCE, STEPS_PER_PERIOD, IntegrationError, IntegratorConfig, propagate, verify_step
from .model import AMP_FRACTIONS, GROUND, OMEGA_D_MAX_RAW, OMEGA_Q_RAW, PulseSchedule, Shape, nondimensionalize

log = logging.getLogger("pulsecal")

TABLE_HEADER = ["table", "shape", "scheme", "amp_fraction", "metric", "value", "duration", "width", "c_eff", "n_periods"]
TRAJECTORY_STRIDE = 10
FIGURE_DRIVE_SCALE = 100.0

_GAUSSIAN_PI = (
    Scheme.RWA,
    Scheme.RWA_FULL_PERIODS,
    Scheme.RWA_TDEP_CORR_ZERO_CROSS,
    Scheme.RWA_EFF_MEAN_CORR,
    Scheme.RWA_EFF_OPT_CORR,
    Scheme.RWA_EFF_OPT_CORR_FULL_PERIODS,
)
_SQUARE = (
    Scheme.RWA,
    Scheme.RWA_FULL_PERIODS,
    Scheme.RWA_CORR,
    Scheme.RWA_CORR_FULL_PERIODS,
    Scheme.RWA_EFF_CORR_FULL_PERIODS,
)
_GAUSSIAN_HALF = (Scheme.RWA, Scheme.RWA_FULL_PERIODS, Scheme.RWA_EFF_OPT_CORR_FULL_PERIODS)

# Default rows of each table, per shape.
TABLE_LAYOUT = {
    "ypi": {Shape.SQUARE: _SQUARE, Shape.GAUSSIAN: _GAUSSIAN_PI, Shape.SHIFTED_GAUSSIAN: _GAUSSIAN_PI},
    "ypihalf": {Shape.SQUARE: _SQUARE, Shape.GAUSSIAN: _GAUSSIAN_HALF},
    "stateprep": {s: (gates.optimal_scheme(s),) for s in Shape},
}
TABLE_ANGLE = {"ypi": gates.Y_PI, "ypihalf": gates.Y_PI_HALF}
TABLE_METRIC = {"ypi": "c_xy", "ypihalf": "r_z"}
FIGURES = {"fig1": gates.Y_PI, "fig2": gates.Y_PI_HALF}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by every run; file values are overridden by flags."""

    omega_q: float = OMEGA_Q_RAW
    omega_d_max: float = OMEGA_D_MAX_RAW
    amp_fractions: tuple[float, ...] = AMP_FRACTIONS
    steps_per_period: int = STEPS_PER_PERIOD
    opt_width: float = 1e-4
    theta_points: int = 33
    workers: int = 1
    shapes: tuple[Shape, ...] | None = None
    schemes: tuple[Scheme, ...] | None = None
    brackets: dict = field(default_factory=lambda: dict(gates.DEFAULT_BRACKETS))
    prep_brackets: dict = field(default_factory=lambda: dict(gates.STATE_PREP_BRACKETS))

    def qubit(self, amp_fraction: float):
        return nondimensionalize(self.omega_q, self.omega_d_max, amp_fraction)

    def integrator(self, stride: int = 0) -> IntegratorConfig:
        return IntegratorConfig(h=2 * math.pi / self.steps_per_period, stride=stride)


# ------------------------------------------------------------------ config


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.replace(",", " ").split())


def _pair(text: str) -> tuple[float, float]:
    v = _floats(text)
    if len(v) != 2 or not v[0] < v[1]:
        raise ConfigError(f"bracket needs two increasing numbers, got {text!r}")
    return v


def parse_shapes(text: str) -> tuple[Shape, ...]:
    out = []
    for label in filter(None, (s.strip() for s in text.split(","))):
        try:
            out.append(Shape(label.lower()))
        except ValueError:
            valid = ", ".join(s.value for s in Shape)
            raise ConfigError(f"unknown shape {label!r}; valid labels: {valid}") from None
    return tuple(out)


def parse_schemes(text: str) -> tuple[Scheme, ...]:
    try:
        return tuple(Scheme.parse(s) for s in text.split(",") if s.strip())
    except ValueError as e:
        raise ConfigError(str(e)) from None


_ANGLES = {"pi": gates.Y_PI, "pi_half": gates.Y_PI_HALF}


def apply_setting(cfg: RunConfig, key: str, value: str) -> RunConfig:
    """Return ``cfg`` with one ``key = value`` setting applied."""
    key = key.strip().lower().replace("-", "_")
    value = value.strip()
    try:
        if key in ("omega_q", "omega_d_max", "opt_width"):
            return replace(cfg, **{key: float(value)})
        if key in ("steps_per_period", "theta_points", "workers"):
            return replace(cfg, **{key: int(value)})
        if key == "amp_fractions":
            return replace(cfg, amp_fractions=_floats(value))
        if key == "shapes":
            return replace(cfg, shapes=parse_shapes(value))
        if key == "schemes":
            return replace(cfg, schemes=parse_schemes(value))
        if key.startswith("bracket."):
            _, shape, angle = key.split(".")
            brackets = dict(cfg.brackets)
            brackets[(Shape(shape), _ANGLES[angle])] = _pair(value)
            return replace(cfg, brackets=brackets)
        if key.startswith("prep_bracket."):
            brackets = dict(cfg.prep_brackets)
            brackets[Shape(key.split(".", 1)[1])] = _pair(value)
            return replace(cfg, prep_brackets=brackets)
    except (ValueError, KeyError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"bad value for {key!r}: {value!r}") from None
    known = ", ".join(f.name for f in fields(RunConfig) if f.name not in ("brackets", "prep_brackets"))
    raise ConfigError(f"unknown setting {key!r}; known: {known}, bracket.<shape>.<pi|pi_half>, prep_bracket.<shape>")


def load_config(path, base: RunConfig | None = None) -> RunConfig:
    """Read a ``key = value`` text file; ``#`` starts a comment."""
    cfg = base or RunConfig()
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, value = line.split("=", 1)
        cfg = apply_setting(cfg, key, value)
    return cfg


# ------------------------------------------------------------------ tables


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return f"{v:.5e}"


def _row(table, shape, scheme, amp, metric, value, pulse: CalibratedPulse | None, c_eff=None) -> list[str]:
    if not math.isfinite(value):
        raise IntegrationError(f"non-finite {metric} for {table}/{shape.value}/{scheme.value}/{amp}")
    env = pulse.envelope if pulse else None
    return [
        table,
        shape.value,
        scheme.value,
        f"{amp:g}",
        metric,
        _fmt(value),
        _fmt(env.duration if env else None),
        _fmt(env.sigma if env and env.shape.is_gaussian else None),
        _fmt(c_eff if c_eff is not None else (pulse.c_eff if pulse else None)),
        _fmt(pulse.n_periods if pulse else None),
    ]


def _gate_cell(table: str, shape: Shape, scheme: Scheme, amp: float, cfg: RunConfig, check: bool):
    angle = TABLE_ANGLE[table]
    icfg = cfg.integrator()
    q = cfg.qubit(amp)
    if scheme.tunable:
        bracket = cfg.brackets[(shape, angle)]
        res = gates.optimize_y_gate(angle, shape, scheme, amp, bracket, icfg, cfg.opt_width, q)
    else:
        res = gates.run_y_gate(angle, shape, scheme, amp, None, icfg, q)
    rows = [_row(table, shape, scheme, amp, TABLE_METRIC[table], res.error, res.pulse)]
    dev = verify_step(PulseSchedule((gates.segment(res.pulse),)), GROUND, icfg) if check else None
    return rows, dev


def _prep_cell(shape: Shape, scheme: Scheme, amp: float, cfg: RunConfig, check: bool):
    thetas = gates.theta_grid(cfg.theta_points)
    q = cfg.qubit(amp)
    icfg = cfg.integrator()
    deltas = []
    for th in thetas[:-1]:
        res, _ = gates.optimize_state_prep(
            float(th), shape, amp, scheme, cfg.prep_brackets[shape], icfg, cfg.opt_width, q
        )
        deltas.append(res.delta)
    res_pi, opt_pi = gates.optimize_state_prep(
        math.pi, shape, amp, scheme, cfg.prep_brackets[shape], icfg, cfg.opt_width, q
    )
    pulse = gates.calibrate_y(gates.Y_PI_HALF, shape, scheme, amp, opt_pi.c_eff, q)
    rows = [
        _row("stateprep", shape, scheme, amp, "delta_min", min(deltas), pulse, None),
        _row("stateprep", shape, scheme, amp, "delta_max", max(deltas), pulse, None),
        _row("stateprep", shape, scheme, amp, "delta_pi", res_pi.delta, pulse, opt_pi.c_eff),
    ]
    dev = None
    if check:
        dev = verify_step(gates.state_prep_schedule(math.pi / 2, pulse), GROUND, icfg)
    return rows, dev


def _cell(args):
    table, shape, scheme, amp, cfg, check = args
    if table == "stateprep":
        rows, dev = _prep_cell(shape, scheme, amp, cfg, check)
    else:
        rows, dev = _gate_cell(table, shape, scheme, amp, cfg, check)
    return (shape.value, scheme.value, amp), rows, dev


def table_cells(table_id: str, cfg: RunConfig) -> list[tuple[Shape, Scheme, float]]:
    """(shape, scheme, amplitude) cells of a table after config filtering."""
    if table_id not in TABLE_LAYOUT:
        raise ConfigError(f"unknown table {table_id!r}; valid: {', '.join(TABLE_LAYOUT)}")
    layout = TABLE_LAYOUT[table_id]
    shapes = cfg.shapes if cfg.shapes is not None else tuple(layout)
    cells = []
    for shape in shapes:
        schemes = cfg.schemes if cfg.schemes is not None else layout.get(shape, ())
        for scheme in schemes:
            for amp in cfg.amp_fractions:
                cells.append((shape, scheme, amp))
    return cells


def _map(fn, jobs, workers: int):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def run_table(table_id: str, cfg: RunConfig, out_dir, verify: bool = False) -> Path:
    """Compute every cell of a table and write ``<table_id>.csv``."""
    cells = table_cells(table_id, cfg)
    jobs = [(table_id, shape, scheme, amp, cfg, verify) for shape, scheme, amp in cells]
    results = sorted(_map(_cell, jobs, cfg.workers), key=lambda r: r[0])

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{table_id}.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TABLE_HEADER)
        for _, rows, _ in results:
            w.writerows(rows)
    if verify:
        vpath = out_dir / f"{table_id}_step_check.csv"
        with open(vpath, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["shape", "scheme", "amp_fraction", "step_halving_deviation", "within_tolerance"])
            for (shape, scheme, amp), _, dev in results:
                w.writerow([shape, scheme, f"{amp:g}", _fmt(dev), int(dev <= STEP_TOLERANCE)])
    return path


# ------------------------------------------------------------------ figures


def run_figure(figure_id: str, cfg: RunConfig, out_dir, amp_fraction: float = 0.1) -> Path:
    """Trajectory of the plain square pulse behind ``fig1`` (pi) or ``fig2`` (pi/2)."""
    if figure_id not in FIGURES:
        raise ConfigError(f"unknown figure {figure_id!r}; valid: {', '.join(FIGURES)}")
    sched = gates.build_y_gate(FIGURES[figure_id], Shape.SQUARE, Scheme.RWA, amp_fraction, qubit=cfg.qubit(amp_fraction))
    traj = propagate(sched, GROUND, cfg.integrator(stride=TRAJECTORY_STRIDE))
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{figure_id}.csv"
    traj.to_csv(path, drive_scale=FIGURE_DRIVE_SCALE)
    return path


# ------------------------------------------------------------------ sweeps


def run_sweep(thetas, shapes, cfg: RunConfig, out_dir) -> tuple[Path, Path]:
    """State-preparation sweep over ``thetas`` with the shift factor optimised per angle."""
    thetas = [float(t) for t in thetas]
    if len(thetas) < 2:
        raise ConfigError("theta grid needs at least two points")
    if not shapes:
        raise ConfigError("no shapes selected")
    icfg = cfg.integrator()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sweep_path, profile_path = out_dir / "sweep.csv", out_dir / "c_eff_profile.csv"

    rows, profile, summary = [], [], []
    for shape in shapes:
        for amp in cfg.amp_fractions:
            prof = gates.c_eff_profile(
                thetas, shape, amp, icfg, cfg.opt_width, cfg.prep_brackets[shape], cfg.qubit(amp)
            )
            for th, c, res in prof:
                rows.append([shape.value, f"{amp:g}", _fmt(th), _fmt(res.c_xy), _fmt(res.r_z), _fmt(res.delta), _fmt(c)])
                profile.append([shape.value, f"{amp:g}", _fmt(th), _fmt(c)])
            d = [res.delta for _, _, res in prof]
            summary.append(f"{shape.value:17s} amp {amp:<5g} delta min {min(d):.3e} max {max(d):.3e}")

    with open(sweep_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["shape", "amp_fraction", "theta", "c_xy", "r_z", "delta", "c_eff"])
        w.writerows(rows)
    with open(profile_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["shape", "amp_fraction", "theta", "c_eff"])
        w.writerows(profile)
    for line in summary:
        print(line)
    return sweep_path, profile_path


# ------------------------------------------------------------------ entry


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pulsecal", description=__doc__.splitlines()[0])
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--table", choices=sorted(TABLE_LAYOUT), help="gate or state-preparation table")
    mode.add_argument("--figure", choices=sorted(FIGURES), help="trajectory dump")
    mode.add_argument("--sweep", type=int, nargs="?", const=-1, metavar="N", help="theta sweep with N grid points")
    p.add_argument("--shapes", help="comma-separated envelope shapes")
    p.add_argument("--schemes", help="comma-separated scheme labels (empty string for none)")
    p.add_argument("--amp-fractions", help="comma-separated drive fractions")
    p.add_argument("--out", default="results", help="output directory (default: ./results)")
    p.add_argument("--config", help="key = value settings file")
    p.add_argument("--verify-step", action="store_true", help="rerun each table cell at half the step")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.shapes is not None:
        cfg = replace(cfg, shapes=parse_shapes(args.shapes))
    if args.schemes is not None:
        cfg = replace(cfg, schemes=parse_schemes(args.schemes))
    if args.amp_fractions is not None:
        cfg = replace(cfg, amp_fractions=_floats(args.amp_fractions))
    for a in cfg.amp_fractions:
        if not 0 < a <= 1:
            raise ConfigError(f"amplitude fraction {a} outside (0, 1]")
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        if args.table:
            path = run_table(args.table, cfg, args.out, args.verify_step)
        elif args.figure:
            path = run_figure(args.figure, cfg, args.out)
        else:
            n = cfg.theta_points if args.sweep == -1 else args.sweep
            shapes = cfg.shapes if cfg.shapes is not None else (Shape.SQUARE, Shape.GAUSSIAN)
            path, _ = run_sweep(gates.theta_grid(n) if n >= 2 else [], shapes, cfg, args.out)
    except ConfigError as e:
        print(f"pulsecal: configuration error: {e}", file=sys.stderr)
        return 2
    except (CalibrationError, IntegrationError, ValueError) as e:
        print(f"pulsecal: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
