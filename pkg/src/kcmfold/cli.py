"""Command-line driver.

Subcommands:
    fold <config>                       single folding run
    compare <config_a> <config_b>       A/B run with a shared chain/start
    check <config>                      invariant and gradient self-test
    diagnose <config> --theta-star F    sign-descent convergence report

Every run writes the normalized config next to its outputs so a result
directory is reproducible on its own. Exit codes: 0 converged (or exactly
stationary), 2 iteration cap reached, 3 configuration/usage error, 4 I/O
error, 5 numerical error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .chain import wrap_angles
from .config import dump_config_text, load_config
from .diagnostics import self_check
from .errors import ConfigError, KcmfoldError
from .experiment import run_compare, run_experiment, summarize, write_outputs
from .solvers import check_moulay_conditions
from .traces import write_energy_trace

EXIT_CONVERGED = 0
EXIT_MAX_ITERS = 2
EXIT_CONFIG = 3
EXIT_IO = 4
EXIT_NUMERIC = 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kcmfold",
                     description="kinetostatic folding of backbone chains")
    parser.add_argument("--version", action="version", version=f"kcmfold {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fold = sub.add_parser("fold", help="run one folding experiment")
    p_fold.add_argument("config")
    p_fold.add_argument("--outdir", help="override the config's output directory")

    p_cmp = sub.add_parser("compare", help="run two experiments from the same start")
    p_cmp.add_argument("config_a")
    p_cmp.add_argument("config_b")
    p_cmp.add_argument("--outdir", help="override config_a's output directory")

    p_chk = sub.add_parser("check", help="run invariant/gradient self-tests")
    p_chk.add_argument("config")
    p_chk.add_argument("--seed", type=int, default=1234)

    p_diag = sub.add_parser("diagnose", help="sign-descent convergence diagnostics")
    p_diag.add_argument("config")
    p_diag.add_argument("--theta-star", required=True,
                        help="JSON file with the candidate minimum (dihedrals)")
    p_diag.add_argument("--alpha", type=float, default=2.0)
    p_diag.add_argument("--c", type=float, default=None)
    p_diag.add_argument("--outdir", help="override the config's output directory")
    return parser


def _print_summary(tag: str, trajectory) -> None:
    s = summarize(trajectory)
    conv = s.iterations_to_convergence
    print(f"{tag}: {s.terminated_by} after {s.iterations_run} iterations, "
          f"total = {s.final_energy:.6f} kcal/mol (elec {s.final_elec:.6f}, "
          f"vdw {s.final_vdw:.6f}), oscillation score {s.oscillation_score}, "
          f"converged at k = {conv if conv is not None else 'never'}")


def _exit_for(trajectory) -> int:
    return EXIT_CONVERGED if trajectory.terminated_by in ("converged", "zero_torque") \
        else EXIT_MAX_ITERS


def cmd_fold(args) -> int:
    cfg = load_config(args.config)
    result = run_experiment(cfg)
    outdir = args.outdir or cfg.output.directory
    paths = write_outputs(result, outdir, tag="fold")
    _print_summary("fold", result.trajectory)
    for name, path in sorted(paths.items()):
        print(f"  wrote {name}: {path}")
    return _exit_for(result.trajectory)


def cmd_compare(args) -> int:
    cfg_a = load_config(args.config_a)
    cfg_b = load_config(args.config_b)
    report = run_compare(cfg_a, cfg_b)
    outdir = args.outdir or cfg_a.output.directory
    os.makedirs(outdir, exist_ok=True)
    write_energy_trace(report.result_a.trajectory, os.path.join(outdir, "a.trace.csv"))
    write_energy_trace(report.result_b.trajectory, os.path.join(outdir, "b.trace.csv"))
    for tag, cfg in (("a", cfg_a), ("b", cfg_b)):
        with open(os.path.join(outdir, f"{tag}.config.json"), "w") as fh:
            fh.write(dump_config_text(cfg))
    with open(os.path.join(outdir, "compare.json"), "w") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    _print_summary("a", report.result_a.trajectory)
    _print_summary("b", report.result_b.trajectory)
    print(f"  wrote comparison: {os.path.join(outdir, 'compare.json')}")
    return EXIT_CONVERGED


def cmd_check(args) -> int:
    cfg = load_config(args.config)
    from .config import build_topology
    topology = build_topology(cfg)
    results = self_check(topology, cfg.force_field, seed=args.seed)
    failed = 0
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
        failed += 0 if r.passed else 1
    return 0 if failed == 0 else 1


def _load_theta_star(path: str) -> np.ndarray:
    with open(path) as fh:
        doc = json.load(fh)
    if isinstance(doc, list):
        return wrap_angles(np.asarray(doc, dtype=float))
    if isinstance(doc, dict):
        if "dihedrals_rad" in doc:
            return wrap_angles(np.asarray(doc["dihedrals_rad"], dtype=float))
        if "dihedrals_deg" in doc:
            return wrap_angles(np.radians(np.asarray(doc["dihedrals_deg"], dtype=float)))
    raise ConfigError(f"{path}: expected a JSON list or an object with "
                      "'dihedrals_rad'/'dihedrals_deg'")


def cmd_diagnose(args) -> int:
    cfg = load_config(args.config)
    if cfg.solver.mode != "sgd" or not cfg.solver.store_tau_signs:
        cfg = replace(cfg, solver=replace(cfg.solver, mode="sgd", store_tau_signs=True))
    theta_star = _load_theta_star(args.theta_star)
    result = run_experiment(cfg)
    report = check_moulay_conditions(result.trajectory, theta_star,
                                     alpha=args.alpha, c=args.c)
    outdir = args.outdir or cfg.output.directory
    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, "diagnose.config.json"), "w") as fh:
        fh.write(dump_config_text(cfg))
    path = os.path.join(outdir, "moulay.csv")
    with open(path, "w") as fh:
        fh.write("k,kappa_k,inner,condition1,c_max,condition2\n")
        for e in report.entries:
            cond2 = "" if e.condition2 is None else str(e.condition2).lower()
            fh.write(f"{e.k},{e.kappa_k:.17g},{e.inner:.17g},"
                     f"{str(e.condition1).lower()},{e.c_max:.17g},{cond2}\n")
    n_ok = sum(1 for e in report.entries if e.condition1)
    print(f"diagnose: condition1 holds on {n_ok}/{len(report.entries)} recorded "
          f"iterations; condition3 (step sizes -> 0): {report.condition3}")
    print(f"  wrote report: {path}")
    return EXIT_CONVERGED


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {"fold": cmd_fold, "compare": cmd_compare,
                   "check": cmd_check, "diagnose": cmd_diagnose}[args.command]
        return handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KcmfoldError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
