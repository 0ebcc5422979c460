"""Command-line front end: ``euler-lab simulate|verify-families|classify|convergence|bkm|extract``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error, 3 numerical failure.
Options may also come from a JSON file given with ``--config``; explicit flags win.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys
from pathlib import Path
from typing import Any

import numpy as np

from euler_lab import diagnostics, io
from euler_lab.convergence import CASES, DEFAULT_L, run_case
from euler_lab.elliptic import EllipticError, EllipticOptions
from euler_lab.fields import DomainError, GridSpec, SelfSimilarParams
from euler_lab.selfsim import (
    NOT_SOLUTION,
    SampleGeometryError,
    classify,
    default_lattice,
    extract_profiles,
    family_a,
    family_b,
    lattice_points,
    residual_group1,
    residual_group2,
    residual_timedependent,
)
from euler_lab.solver import PRESETS, IntegrationError, SolverConfig, run

log = logging.getLogger("euler_lab")

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
THREADS_ENV = "EULER_LAB_THREADS"


class UsageError(Exception):
    pass


DEFAULTS: dict[str, dict[str, Any]] = {
    "simulate": {
        "nr": 64,
        "nz": 64,
        "L": DEFAULT_L,
        "t_end": 0.01,
        "cfl": 0.5,
        "dt_max": 1e-3,
        "max_steps": None,
        "snapshot_every": 10,
        "preset": "wall-swirl",
        "ic_params": {},
        "seed": None,
        "omega_ceiling": 1e8,
        "tolerance": 1e-12,
        "out": ".",
    },
    "verify-families": {"gamma": 2.9133, "T": 1.0, "delta": 0.1, "tol": 1e-10, "trials": 20, "seed": 0, "out": None},
    "classify": {"gamma": 2.9133, "tol": 1e-8, "out": None},
    "convergence": {"out": None},
    "bkm": {"T": None, "delta": 0.1, "column": None, "out": None},
    "extract": {"gamma": 2.9133, "T": 1.0, "delta": 0.1, "lattice_nr": 32, "lattice_nz": 33, "out": "."},
}


def _param(text: str) -> tuple[str, Any]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    key, value = text.split("=", 1)
    try:
        return key, int(value)
    except ValueError:
        pass
    try:
        return key, float(value)
    except ValueError:
        return key, value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="euler-lab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        # None marks "not given", so config-file values can fill the gap
        p.add_argument("--config", type=Path, help="JSON file with option values")
        p.add_argument("--out", default=None, help="output directory")
        return p

    p = common(sub.add_parser("simulate", help="integrate the transformed axisymmetric system"))
    p.add_argument("--nr", type=int)
    p.add_argument("--nz", type=int)
    p.add_argument("--L", type=float, help="axial period (default 1/6)")
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--cfl", type=float)
    p.add_argument("--dt-max", dest="dt_max", type=float)
    p.add_argument("--max-steps", dest="max_steps", type=int)
    p.add_argument("--snapshot-every", dest="snapshot_every", type=int)
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--param", dest="ic_params", type=_param, action="append", help="initial-condition KEY=VALUE")
    p.add_argument("--seed", type=int)
    p.add_argument("--omega-ceiling", dest="omega_ceiling", type=float)
    p.add_argument("--tolerance", type=float, help="elliptic residual tolerance")

    p = common(sub.add_parser("verify-families", help="check the exact families against all residual systems"))
    p.add_argument("--gamma", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)

    p = common(sub.add_parser("classify", help="classify a profile file"))
    p.add_argument("profile", type=Path)
    p.add_argument("--gamma", type=float)
    p.add_argument("--tol", type=float)

    p = common(sub.add_parser("convergence", help="refinement study for a discrete operator"))
    p.add_argument("case", choices=(*CASES, "all"))

    p = common(sub.add_parser("bkm", help="BKM integral estimate from a (t, sup) CSV"))
    p.add_argument("csv", type=Path)
    p.add_argument("--T", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--column", help="value column (default: 'sup', else the second column)")

    p = common(sub.add_parser("extract", help="extract self-similar profiles from state snapshots"))
    p.add_argument("snapshots", help="glob pattern of snapshot files")
    p.add_argument("--gamma", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--lattice-nr", dest="lattice_nr", type=int)
    p.add_argument("--lattice-nz", dest="lattice_nz", type=int)
    return parser


def resolve_options(args: argparse.Namespace) -> dict[str, Any]:
    """Merge built-in defaults, the ``--config`` file and explicit flags, in increasing priority."""
    opts = dict(DEFAULTS[args.command])
    if args.config is not None:
        try:
            cfg = io.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(cfg) - set(opts)
        if unknown:
            raise UsageError(f"unknown config keys for {args.command}: {sorted(unknown)}")
        opts.update(cfg)
    for key, value in vars(args).items():
        if key in opts and value is not None:
            opts[key] = dict(value) if key == "ic_params" else value
    return opts


def _emit(obj: Any) -> None:
    print(io.dumps(obj, indent=2))


def _writable_dir(path) -> Path:
    try:
        return io.ensure_dir(path)
    except OSError as exc:
        raise UsageError(f"output directory {path} is not usable: {exc}") from exc


# -- commands ----------------------------------------------------------------


def cmd_simulate(opts: dict[str, Any]) -> int:
    try:
        grid = GridSpec(int(opts["nr"]), int(opts["nz"]), float(opts["L"]))
        ic_params = dict(opts["ic_params"] or {})
        if opts["seed"] is not None:
            ic_params["seed"] = int(opts["seed"])
        cfg = SolverConfig(
            grid=grid,
            t_end=float(opts["t_end"]),
            cfl=float(opts["cfl"]),
            snapshot_every=int(opts["snapshot_every"]),
            initial_condition=opts["preset"],
            ic_params=ic_params,
            dt_max=float(opts["dt_max"]),
            max_steps=None if opts["max_steps"] is None else int(opts["max_steps"]),
            omega_ceiling=float(opts["omega_ceiling"]),
            elliptic=EllipticOptions(tolerance=float(opts["tolerance"])),
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    out = _writable_dir(opts["out"])

    locations = []

    def track(step, state, row):
        locations.append(diagnostics.max_vorticity_location(state)[:2])

    traj = run(cfg, callback=track)
    columns = ["t", "dt", "max_abs_u1", "max_abs_omega1", "max_abs_circ", "energy", "r_star", "z_star"]
    rows = [dict(row, r_star=loc[0], z_star=loc[1]) for row, loc in zip(traj.rows, locations)]
    io.write_csv(out / "diagnostics.csv", columns, rows)
    for k, s in enumerate(traj.snapshots):
        io.write_state(out / f"snapshot_{k:05d}.snap", s, tags={"preset": cfg.initial_condition, **ic_params})

    e0, e1 = traj.initial["energy"], (traj.rows[-1]["energy"] if traj.rows else traj.initial["energy"])
    _emit(
        {
            "steps": traj.steps,
            "t_final": traj.snapshots[-1].t,
            "snapshots": len(traj.snapshots),
            "blew_up": traj.blew_up,
            "energy_initial": e0,
            "energy_final": e1,
            "energy_relative_drift": abs(e1 - e0) / e0 if e0 else 0.0,
        }
    )
    return EXIT_OK


def cmd_verify_families(opts: dict[str, Any]) -> int:
    try:
        gamma, tol, trials = float(opts["gamma"]), float(opts["tol"]), int(opts["trials"])
        p = SelfSimilarParams(gamma, float(opts["T"]), float(opts["delta"]))
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    if tol < 0 or trials < 1:
        raise UsageError("tol must be non-negative and trials positive")
    rng = np.random.default_rng(int(opts["seed"]))
    samples = lattice_points(*default_lattice())
    times = [p.T - p.delta * f for f in (0.75, 0.5, 0.25)]

    worst: dict[str, tuple[float, str, Any]] = {}
    failures = []
    for trial in range(trials):
        b, c, kappa, c2 = rng.uniform(-5.0, 5.0, size=4)
        for ps in (family_a(b, c), family_b(kappa, c2, gamma)):
            name = "A" if ps.tag["family"] == "A" else "B"
            reports = [residual_group1(ps, gamma, samples), residual_group2(ps, samples)]
            reports += [residual_timedependent(ps, p, t, samples) for t in times]
            for rep in reports:
                for rec in rep.records:
                    if name not in worst or rec.sup > worst[name][0]:
                        worst[name] = (rec.sup, rec.equation, rec.argmax)
                    if not rec.sup <= tol:
                        failures.append((name, trial, ps.tag, rep.description, rec))
    for name in ("A", "B"):
        sup, eq, where = worst[name]
        print(f"family {name}: worst sup residual {sup:.17g} in {eq} at {where}")
    summary = {
        "gamma": gamma,
        "tol": tol,
        "trials": trials,
        "worst": {k: {"sup": v[0], "equation": v[1], "argmax": v[2]} for k, v in worst.items()},
        "failures": len(failures),
    }
    _emit(summary)
    if failures:
        name, trial, tag, desc, rec = max(failures, key=lambda f: f[4].sup)
        print(
            f"FAIL: family {name} {tag} ({desc}): {rec.equation} sup {rec.sup:.17g} > tol {tol:.17g} at (R, Z) = {rec.argmax}",
            file=sys.stderr,
        )
        return EXIT_VERIFY
    return EXIT_OK


def cmd_classify(opts: dict[str, Any], path: Path) -> int:
    try:
        gamma, tol = float(opts["gamma"]), float(opts["tol"])
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    try:
        ps = io.read_profile(path)
    except io.SnapshotFormatError as exc:
        raise UsageError(str(exc)) from exc
    try:
        result = classify(ps, gamma, tol)
    except (SampleGeometryError, DomainError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    _emit(result.as_dict())
    return EXIT_VERIFY if result.verdict == NOT_SOLUTION else EXIT_OK


def cmd_convergence(case: str) -> int:
    cases = CASES if case == "all" else (case,)
    results = [run_case(c) for c in cases]
    _emit([r.as_dict() for r in results] if case == "all" else results[0].as_dict())
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def cmd_bkm(opts: dict[str, Any], path: Path) -> int:
    if opts["T"] is None:
        raise UsageError("--T is required")
    try:
        t, sup = io.read_series_csv(path, value_column=opts["column"])
        series = diagnostics.BkmSeries(t, sup, float(opts["T"]))
        result = diagnostics.bkm_integral(series, float(opts["delta"]))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(result.as_dict())
    return EXIT_OK


def cmd_extract(opts: dict[str, Any], pattern: str) -> int:
    try:
        p = SelfSimilarParams(float(opts["gamma"]), float(opts["T"]), float(opts["delta"]))
        lattice = default_lattice(int(opts["lattice_nr"]), int(opts["lattice_nz"]))
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    try:
        states = io.read_states(pattern)
    except io.SnapshotFormatError as exc:
        raise UsageError(str(exc)) from exc
    if len(states) < 2:
        raise UsageError(f"need at least 2 snapshots matching {pattern!r}, found {len(states)}")
    out = _writable_dir(opts["out"])
    try:
        ext = extract_profiles(states, p, lattice)
    except (DomainError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    target = out / "profile.snap"
    io.write_profile(target, ext.profiles, extra={"gamma": p.gamma, "T": p.T, "delta": p.delta, "collapse_metric": ext.collapse_metric})
    _emit(
        {
            "collapse_metric": ext.collapse_metric,
            "times": ext.times,
            "lattice_shape": list(ext.profiles.shape),
            "dropped_R": len(ext.dropped_R),
            "dropped_Z": len(ext.dropped_Z),
            "profile_file": str(target),
        }
    )
    return EXIT_OK


# -- entry point -------------------------------------------------------------


def _thread_limit():
    value = os.environ.get(THREADS_ENV)
    if not value:
        return contextlib.nullcontext()
    try:
        n = int(value)
    except ValueError:
        n = 0
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {value!r}")
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def dispatch(args: argparse.Namespace) -> int:
    opts = resolve_options(args)
    if args.command == "simulate":
        return cmd_simulate(opts)
    if args.command == "verify-families":
        return cmd_verify_families(opts)
    if args.command == "classify":
        return cmd_classify(opts, args.profile)
    if args.command == "convergence":
        return cmd_convergence(args.case)
    if args.command == "bkm":
        return cmd_bkm(opts, args.csv)
    if args.command == "extract":
        return cmd_extract(opts, args.snapshots)
    raise UsageError(f"unknown command {args.command}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        with _thread_limit():
            return dispatch(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IntegrationError, EllipticError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
