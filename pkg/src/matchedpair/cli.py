"""Command line: ``matchedpair check | simulate | verify``.

Errors go to standard error as ``ERROR:<code>: message``. Exit codes: 0 on
success, 1 when a suite fails, 2 on usage errors, 3 on I/O errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (QuadraticLagrangian, ReconstructionError, build_simulation,
                       matched_el2_residual, reconstruct, run_simulation, ttg_el_residuals)
from .instances import INSTANCE_NAMES, UnknownInstance, get_instance
from .kernel import DEFAULT_DT, IntegrationDiverged, grid_derivative
from .report import SuiteReport
from .verify import (SUITES, ConventionUnresolved, SuiteNotApplicable, applicable_suites,
                     run_suite, sign_resolution)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
TRAJECTORY_TOL = 1e-5

log = logging.getLogger("matchedpair.cli")


class CliError(Exception):
    def __init__(self, code: str, message: str, status: int):
        super().__init__(message)
        self.code, self.status = code, status


def _usage(message: str) -> CliError:
    return CliError("usage", message, EXIT_USAGE)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _usage(message)


def _positive(kind):
    def parse(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return v
    return parse


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--suite", help="suite name or 'all'")
    common.add_argument("--instance", help=f"one of {', '.join(INSTANCE_NAMES)}")
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--seed", type=_seed)
    common.add_argument("--samples", type=_positive(int))
    common.add_argument("--tol", type=_positive(float))
    common.add_argument("--dt", type=_positive(float), help="RK4 step")
    common.add_argument("--t-final", dest="t_final", type=_positive(float))
    common.add_argument("--sign-branch", dest="sign_branch", choices=("+", "-"))

    p = _Parser(prog="matchedpair", description="Matched-pair Lagrangian mechanics toolkit.")
    p.add_argument("--version", action="version", version=f"matchedpair {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("check", parents=[common], help="run verification suites")
    sub.add_parser("simulate", parents=[common], help="integrate a system from a config")
    sub.add_parser("verify", parents=[common], help="check a simulated trajectory")
    return p


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise CliError("io", f"cannot read config {path}: {e.strerror or e}", EXIT_IO) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise _usage(f"config {path} is not valid JSON: {e}") from None
    if not isinstance(data, dict):
        raise _usage(f"config {path} must hold a JSON object")
    return data


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise CliError("io", f"cannot write {path}: {e.strerror or e}", EXIT_IO) from None


def _instance(name: str):
    try:
        return get_instance(name)
    except UnknownInstance:
        raise CliError("unknown-instance", f"{name!r}; expected one of {INSTANCE_NAMES}",
                       EXIT_USAGE) from None


def _merge(config: dict, args, keys: dict) -> dict:
    """Flags override config values; ``keys`` maps flag names to config keys."""
    out = dict(config)
    for flag, key in keys.items():
        v = getattr(args, flag)
        if v is not None:
            out[key] = v
    return out


def _reports_csv(reports: list[SuiteReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["suite", "instance", "samples", "seed", "tolerance", "max_residual", "pass"])
    for r in reports:
        w.writerow([r.suite, r.instance, r.samples, r.seed, "%.17g" % r.tolerance,
                    "%.17g" % r.max_residual, r.passed])
    return buf.getvalue()


def _emit(reports: list[SuiteReport], fmt: str, out: str | None, extra: dict | None = None):
    if fmt == "csv":
        _write(out, _reports_csv(reports))
    else:
        doc = {"reports": [r.to_dict() for r in reports]}
        doc.update(extra or {})
        _write(out, json.dumps(doc, indent=2) + "\n")


def _log_tolerances(reports) -> None:
    for r in reports:
        log.info("tolerance %s: %g %s", r.suite, r.tolerance,
                 json.dumps(r.check_tolerances) if r.check_tolerances else "")


def cmd_check(args, config: dict) -> int:
    cfg = _merge(config, args, {"suite": "suite", "instance": "instance", "seed": "seed",
                                "samples": "samples", "tol": "tol"})
    cfg.setdefault("suite", "all")
    cfg.setdefault("instance", "su2k")
    cfg.setdefault("seed", 0)
    log.info("config %s", json.dumps(cfg, sort_keys=True))
    inst = _instance(cfg["instance"])
    suite = cfg["suite"]
    if suite == "all":
        names = applicable_suites(inst)
    elif suite in SUITES:
        names = [suite]
    else:
        raise _usage(f"unknown suite {suite!r}; expected 'all' or one of {sorted(SUITES)}")
    reports = []
    for name in names:
        try:
            rep = run_suite(name, inst, cfg.get("samples"), int(cfg["seed"]), cfg.get("tol"))
        except SuiteNotApplicable as e:
            raise _usage(str(e)) from None
        log.info("%s", rep.summary())
        for f in rep.findings:
            log.info("  finding: %s", f)
        reports.append(rep)
    _log_tolerances(reports)
    extra, ok = {}, all(r.passed for r in reports)
    if "field_equivalence" in names and suite == "all":
        try:
            res = sign_resolution(inst, seed=int(cfg["seed"]))
            extra["sign_resolution"] = {"sign_b_star": res["sign_b_star"], "status": res["status"]}
        except ConventionUnresolved as e:
            extra["sign_resolution"] = {"sign_b_star": None, "status": f"unresolved: {e}"}
            ok = False
        log.info("sign_b_star: %s", extra["sign_resolution"])
    _emit(reports, args.format or cfg.get("format", "json"), args.out, extra)
    return EXIT_OK if ok else EXIT_FAIL


def _sim_config(args, config: dict) -> dict:
    cfg = _merge(config, args, {"instance": "instance", "seed": "seed", "dt": "h",
                                "t_final": "t_final", "sign_branch": "sign_branch"})
    cfg.setdefault("seed", 0)
    cfg.setdefault("h", DEFAULT_DT)
    log.info("config %s", json.dumps(cfg, sort_keys=True))
    log.info("seed %s", cfg["seed"])
    return cfg


def _simulate(cfg: dict):
    _instance(cfg.get("instance", "su2k"))
    try:
        return run_simulation(cfg)
    except (ValueError, KeyError, TypeError) as e:
        raise _usage(f"invalid simulation config: {e}") from None
    except IntegrationDiverged as e:
        raise CliError("diverged", str(e), EXIT_FAIL) from None


def cmd_simulate(args, config: dict) -> int:
    if args.config is None:
        raise _usage("simulate needs --config")
    cfg = _sim_config(args, config)
    traj = _simulate(cfg)
    fmt = args.format or cfg.get("format", "csv")
    if fmt == "csv":
        _write(args.out, traj.to_csv())
    else:
        doc = {"columns": traj.header(), "rows": np.column_stack([traj.ts, traj.states]).tolist()}
        _write(args.out, json.dumps(doc) + "\n")
    log.info("wrote %d samples", len(traj.ts))
    return EXIT_OK


def trajectory_report(cfg: dict, traj, tol: float = TRAJECTORY_TOL) -> SuiteReport:
    """Residuals of a simulated trajectory.

    ``consistency``: fourth-order differences of the sampled state against the
    vector field. For second-order systems with a group, the variational
    residual rebuilt from the Lagrangian alone is added.
    """
    field, _, n, m, order, _ = build_simulation(cfg)
    inst = get_instance(cfg.get("instance", "su2k"))
    rep = SuiteReport("trajectory", inst.name, len(traj.ts), int(cfg.get("seed", 0)), tol)
    ts, ys = traj.ts, traj.states
    if len(ts) < 6:
        raise _usage("trajectory too short for residuals; lower output_stride or raise t_final")
    h = ts[1] - ts[0]
    dy = grid_derivative(ys, h)
    cons = np.array([np.max(np.abs(d - field(y))) for d, y in zip(dy, ys)])
    ok = np.isfinite(cons)
    rep.observe(np.max(cons[ok]), None, "consistency")
    N = n + m
    system = cfg.get("system", "ep")
    L = QuadraticLagrangian.from_dict(cfg.get("lagrangian", {}), N)
    if system == "soep" and inst.group is not None:
        try:
            gs = reconstruct(inst.group, ts, ys[:, :N])
        except ReconstructionError as e:
            raise CliError("diverged", str(e), EXIT_FAIL) from None
        r = ttg_el_residuals(inst.group, lambda g, x, xd: L.value(x, xd), ts, gs,
                             ys[:, :N], ys[:, N:2 * N])
        R = r["Rso"][np.all(np.isfinite(r["Rso"]), axis=1)]
        rep.observe(np.max(np.abs(R)), None, "second_order_euler_lagrange")
    elif system == "msoep" and inst.pair is not None and cfg.get("tensors") != "printed":
        pair = inst.pair
        ms = reconstruct(pair.ambient, ts, ys[:, :N])
        fac = [pair.factorize(mm) for mm in ms]
        r = matched_el2_residual(pair, lambda g, hh, v, vd: L.value(v, vd), ts,
                                 [f[0] for f in fac], [f[1] for f in fac], ys[:, :N],
                                 ys[:, N:2 * N])
        R = np.concatenate([r["line1"], r["line2"]], axis=1)
        R = R[np.all(np.isfinite(R), axis=1)]
        rep.observe(np.max(np.abs(R)), None, "matched_euler_lagrange")
    return rep


def cmd_verify(args, config: dict) -> int:
    if args.config is None:
        raise _usage("verify needs --config")
    cfg = _sim_config(args, config)
    tol = args.tol if args.tol is not None else float(cfg.get("tol", TRAJECTORY_TOL))
    traj = _simulate(cfg)
    reports = [trajectory_report(cfg, traj, tol)]
    inst = _instance(cfg.get("instance", "su2k"))
    suites = cfg.get("suites", [])
    if args.suite is not None:
        suites = applicable_suites(inst) if args.suite == "all" else [args.suite]
    for name in suites:
        if name not in SUITES:
            raise _usage(f"unknown suite {name!r}")
        try:
            reports.append(run_suite(name, inst, args.samples, int(cfg["seed"])))
        except SuiteNotApplicable as e:
            raise _usage(str(e)) from None
    for r in reports:
        log.info("%s", r.summary())
    _log_tolerances(reports)
    _emit(reports, args.format or "json", args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


COMMANDS = {"check": cmd_check, "simulate": cmd_simulate, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO)
    log.propagate = False
    try:
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as e:  # --help / --version
            return int(e.code or 0)
        log.info("matchedpair %s %s", __version__, args.command)
        return COMMANDS[args.command](args, _load_config(args.config))
    except CliError as e:
        print(f"ERROR:{e.code}: {e}", file=sys.stderr)
        return e.status
    finally:
        log.removeHandler(handler)


if __name__ == "__main__":
    sys.exit(main())
