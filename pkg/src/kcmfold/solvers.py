"""Folding iterations: normalized-torque compliance and sign descent.

Two update rules drive the conformation toward a free-energy minimum:

    conventional:  theta <- theta + kappa0 * tau / |tau|_inf   (fixed step)
    sgd:           theta <- theta + kappa_k * sgn(tau)         (decaying step)

where sgn is componentwise with sgn(0) = 0, and in sgd mode the step size
follows the geometric schedule kappa_{k+1} = gamma0 * kappa_k. Neither rule
uses the torque magnitude, so both are invariant to a positive rescaling of
the force field. Energy increases along the way are logged, not fatal:
neither rule guarantees monotone descent.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .chain import ChainTopology, wrap_angles
from .energy import EnergyBreakdown, ForceFieldConfig, energy_and_torque
from .errors import (
    CoincidentAtomsError,
    DimensionError,
    KcmfoldError,
    ScheduleError,
    ZeroTorqueSignal,
)

logger = logging.getLogger(__name__)

MODES = ("conventional", "sgd")


@dataclass(frozen=True)
class SolverConfig:
    mode: str = "sgd"
    kappa0: float = 0.01
    gamma0: float = 0.99
    tau_tol: float = 1e-6
    max_iters: int = 600
    record_every: int = 1
    store_tau_signs: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.kappa0 > 0:
            raise ValueError("kappa0 must be > 0")
        if not 0.0 < self.gamma0 < 1.0:
            raise ValueError(
                f"gamma0 must lie in (0, 1) so each step is strictly smaller "
                f"than the last, got {self.gamma0}")
        if not self.tau_tol > 0:
            raise ValueError("tau_tol must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@dataclass(frozen=True)
class IterationRecord:
    k: int
    theta: np.ndarray
    energy: EnergyBreakdown
    tau_norm_2: float
    tau_norm_inf: float
    kappa_k: float
    tau_sign: np.ndarray | None = None


@dataclass(frozen=True)
class FoldingTrajectory:
    records: tuple[IterationRecord, ...]
    terminated_by: str  # "converged" | "max_iters" | "zero_torque"
    final_theta: np.ndarray
    config: SolverConfig


def conventional_step(theta, tau, kappa0: float) -> np.ndarray:
    """One normalized-torque update; the step's max-norm is exactly kappa0.

    Raises ZeroTorqueSignal when |tau|_inf = 0 (stationary point); the
    folding loop treats that as convergence rather than an error.
    """
    tau = np.asarray(tau, dtype=float)
    tinf = np.max(np.abs(tau))
    if tinf == 0.0:
        raise ZeroTorqueSignal("all torque components are zero")
    return np.asarray(theta, dtype=float) + kappa0 * (tau / tinf)


def sgd_step(theta, tau, kappa_k: float) -> np.ndarray:
    """One sign-descent update: theta + kappa_k * sgn(tau), sgn(0) = 0."""
    if not kappa_k > 0:
        raise ScheduleError(f"step size must be > 0, got {kappa_k}")
    return np.asarray(theta, dtype=float) + kappa_k * np.sign(tau)


def schedule_geometric(kappa_k: float, gamma0: float) -> float:
    """Next step size gamma0 * kappa_k; contraction requires gamma0 in (0, 1)."""
    if not 0.0 < gamma0 < 1.0:
        raise ScheduleError(
            f"gamma0 must lie in (0, 1) for the step sizes to contract to zero, "
            f"got {gamma0}")
    if not kappa_k > 0:
        raise ScheduleError(f"step size must be > 0, got {kappa_k}")
    return gamma0 * kappa_k


def run_folding(topology: ChainTopology, theta0, cfg: SolverConfig,
                ff: ForceFieldConfig) -> FoldingTrajectory:
    """Iterate the selected mode from theta0 until |tau|_2 < tau_tol, the
    iteration cap, or (conventional mode) an exactly stationary point.

    Angles are re-wrapped into (-pi, pi] after every step; wrapping does not
    change the pose, so it is safe inside the loop. Records are kept every
    ``record_every`` iterations plus the first and last.
    """
    theta = wrap_angles(theta0)
    if theta.shape[0] != topology.num_dihedrals:
        raise DimensionError(
            f"theta0 has {theta.shape[0]} angles, chain has {topology.num_dihedrals}")
    records: list[IterationRecord] = []
    kappa = cfg.kappa0
    last_total = None
    increases = 0
    k = 0
    while True:
        try:
            energy, tau = energy_and_torque(topology, theta, ff)
        except CoincidentAtomsError as exc:
            raise CoincidentAtomsError(exc.i, exc.j, iteration=k) from exc
        tau_norm_2 = float(np.linalg.norm(tau))
        tau_norm_inf = float(np.max(np.abs(tau)))
        if last_total is not None and energy.total > last_total:
            increases += 1
        last_total = energy.total

        terminated = None
        if cfg.mode == "conventional" and tau_norm_inf == 0.0:
            terminated = "zero_torque"
        elif tau_norm_2 < cfg.tau_tol:
            terminated = "converged"
        elif k >= cfg.max_iters:
            terminated = "max_iters"

        if terminated or k % cfg.record_every == 0:
            records.append(IterationRecord(
                k=k,
                theta=theta.copy(),
                energy=energy,
                tau_norm_2=tau_norm_2,
                tau_norm_inf=tau_norm_inf,
                kappa_k=kappa,
                tau_sign=np.sign(tau) if cfg.store_tau_signs else None,
            ))
        if terminated:
            break

        if cfg.mode == "conventional":
            theta = wrap_angles(conventional_step(theta, tau, cfg.kappa0))
        else:
            theta = wrap_angles(sgd_step(theta, tau, kappa))
            kappa = schedule_geometric(kappa, cfg.gamma0)
        k += 1

    if increases:
        logger.debug("energy increased on %d of %d iterations", increases, k)
    return FoldingTrajectory(
        records=tuple(records),
        terminated_by=terminated,
        final_theta=theta.copy(),
        config=cfg,
    )


@dataclass(frozen=True)
class MoulayEntry:
    """Per-iteration convergence diagnostics for a sign-descent run.

    inner       (theta_star - theta_k) . sgn(tau_k)
    condition1  0 < kappa_k < 2 * inner
    c_max       largest c with kappa_k * inner >= c * ||theta_star - theta_k||^alpha
    condition2  kappa_k * inner >= c * ||...||^alpha for the user-supplied c
                (None when no c was given)
    """

    k: int
    kappa_k: float
    inner: float
    condition1: bool
    c_max: float
    condition2: bool | None


@dataclass(frozen=True)
class MoulayReport:
    entries: tuple[MoulayEntry, ...]
    condition3: bool  # step sizes converge to zero under the schedule
    alpha: float
    c: float | None


def check_moulay_conditions(trajectory: FoldingTrajectory, theta_star,
                            alpha: float = 2.0, c: float | None = None) -> MoulayReport:
    """Evaluate the sign-descent convergence conditions along a trajectory.

    Purely diagnostic; requires the trajectory to carry stored torque signs
    (run with store_tau_signs=True). theta_star is the candidate minimum the
    iterates are measured against.
    """
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    if c is not None and c <= 0:
        raise ValueError("c must be > 0 when given")
    star = np.asarray(theta_star, dtype=float).ravel()
    entries = []
    for rec in trajectory.records:
        if rec.tau_sign is None:
            raise KcmfoldError(
                "trajectory lacks stored torque signs; rerun with store_tau_signs=True")
        if star.shape != rec.theta.shape:
            raise DimensionError(
                f"theta_star has {star.shape[0]} angles, trajectory has {rec.theta.shape[0]}")
        diff = star - rec.theta
        inner = float(diff @ rec.tau_sign)
        dist = float(np.linalg.norm(diff))
        cond1 = 0.0 < rec.kappa_k < 2.0 * inner
        if dist > 0.0:
            c_max = rec.kappa_k * inner / dist ** alpha
        else:
            c_max = float("inf")
        cond2 = None if c is None else rec.kappa_k * inner >= c * dist ** alpha
        entries.append(MoulayEntry(rec.k, rec.kappa_k, inner, cond1, c_max, cond2))
    cond3 = trajectory.config.mode == "sgd" and 0.0 < trajectory.config.gamma0 < 1.0
    return MoulayReport(entries=tuple(entries), condition3=cond3, alpha=alpha, c=c)
