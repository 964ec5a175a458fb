"""Experiment orchestration: single runs, output bundles, and A/B comparison."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .chain import ChainTopology
from .config import ExperimentConfig, build_topology, dump_config_text, resolve_initial_theta
from .errors import ConfigMismatchError
from .kinematics import pose
from .solvers import FoldingTrajectory, run_folding
from .traces import write_energy_trace, write_snapshot


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    topology: ChainTopology
    theta0: np.ndarray
    trajectory: FoldingTrajectory


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    topology = build_topology(cfg)
    theta0 = resolve_initial_theta(cfg, topology)
    trajectory = run_folding(topology, theta0, cfg.solver, cfg.force_field)
    return ExperimentResult(config=cfg, topology=topology, theta0=theta0,
                            trajectory=trajectory)


def write_outputs(result: ExperimentResult, outdir: str, tag: str = "run") -> dict[str, str]:
    """Write the trace, snapshots, and the normalized config used.

    Returns a name -> path map of everything written. Snapshot stride 0
    writes only the final conformation; a positive stride additionally
    writes every stride-th recorded iteration as MODEL blocks of one
    trajectory file.
    """
    os.makedirs(outdir, exist_ok=True)
    cfg = result.config
    paths: dict[str, str] = {}

    cfg_path = os.path.join(outdir, f"{tag}.config.json")
    with open(cfg_path, "w") as fh:
        fh.write(dump_config_text(cfg))
    paths["config"] = cfg_path

    if "trace" in cfg.output.formats:
        trace_path = os.path.join(outdir, f"{tag}.trace.csv")
        write_energy_trace(result.trajectory, trace_path)
        paths["trace"] = trace_path

    if "pdb" in cfg.output.formats:
        stride = cfg.output.snapshot_stride
        if stride > 0:
            traj_path = os.path.join(outdir, f"{tag}.trajectory.pdb")
            first = True
            for rec in result.trajectory.records:
                if rec.k % stride == 0:
                    write_snapshot(pose(result.topology, rec.theta), result.topology,
                                   traj_path, rec.k, append=not first)
                    first = False
            paths["trajectory"] = traj_path
        final_path = os.path.join(outdir, f"{tag}.final.pdb")
        final_k = result.trajectory.records[-1].k
        write_snapshot(pose(result.topology, result.trajectory.final_theta),
                       result.topology, final_path, final_k)
        paths["final"] = final_path
    return paths


def oscillation_score(totals) -> int:
    """Count sign reversals of the energy increments along a run.

    Zero increments are skipped; a reversal is a nonzero increment whose
    sign differs from the previous nonzero increment's.
    """
    totals = np.asarray(totals, dtype=float)
    diffs = np.diff(totals)
    signs = np.sign(diffs)
    signs = signs[signs != 0.0]
    if signs.size < 2:
        return 0
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def iterations_to_convergence(trajectory: FoldingTrajectory) -> int | None:
    """First recorded iteration with |tau|_2 below the solver tolerance."""
    for rec in trajectory.records:
        if rec.tau_norm_2 < trajectory.config.tau_tol:
            return rec.k
    return None


@dataclass(frozen=True)
class RunSummary:
    final_energy: float
    final_elec: float
    final_vdw: float
    iterations_run: int
    iterations_to_convergence: int | None
    oscillation_score: int
    terminated_by: str


def summarize(trajectory: FoldingTrajectory) -> RunSummary:
    last = trajectory.records[-1]
    totals = [rec.energy.total for rec in trajectory.records]
    return RunSummary(
        final_energy=last.energy.total,
        final_elec=last.energy.elec,
        final_vdw=last.energy.vdw,
        iterations_run=last.k,
        iterations_to_convergence=iterations_to_convergence(trajectory),
        oscillation_score=oscillation_score(totals),
        terminated_by=trajectory.terminated_by,
    )


@dataclass(frozen=True)
class ComparisonReport:
    result_a: ExperimentResult
    result_b: ExperimentResult
    summary_a: RunSummary
    summary_b: RunSummary

    def to_dict(self) -> dict:
        def row(s: RunSummary) -> dict:
            return {
                "final_energy": s.final_energy,
                "final_elec": s.final_elec,
                "final_vdw": s.final_vdw,
                "iterations_run": s.iterations_run,
                "iterations_to_convergence": s.iterations_to_convergence,
                "oscillation_score": s.oscillation_score,
                "terminated_by": s.terminated_by,
            }
        return {"a": row(self.summary_a), "b": row(self.summary_b)}


def run_compare(config_a: ExperimentConfig, config_b: ExperimentConfig) -> ComparisonReport:
    """Run two experiments that share a chain and initial conformation.

    Raises ConfigMismatchError when the shared sections differ; the point of
    the comparison is to isolate the solver settings.
    """
    if config_a.chain != config_b.chain:
        raise ConfigMismatchError("compared configs must describe the same chain")
    if config_a.initial != config_b.initial:
        raise ConfigMismatchError("compared configs must share the initial conformation")
    result_a = run_experiment(config_a)
    result_b = run_experiment(config_b)
    return ComparisonReport(
        result_a=result_a,
        result_b=result_b,
        summary_a=summarize(result_a.trajectory),
        summary_b=summarize(result_b.trajectory),
    )
