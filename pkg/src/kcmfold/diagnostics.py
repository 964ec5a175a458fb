"""Self-check routines behind the ``check`` CLI command.

The finite-difference reference here evaluates the free energy in extended
precision (long double) through its own small forward-kinematics and pair
summation path, so the comparison against the analytic torque is limited by
truncation error rather than float64 round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ChainTopology
from .energy import ForceFieldConfig, _pair_table, atomic_forces, torque
from .kinematics import pose, rotation_matrix


def _rotation_ld(angle, axis):
    c = np.cos(angle)
    s = np.sin(angle)
    x, y, z = axis
    k = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]], dtype=np.longdouble)
    return np.eye(3, dtype=np.longdouble) + s * k + (1.0 - c) * (k @ k)


def pose_positions_ld(topology: ChainTopology, theta) -> np.ndarray:
    """Atom positions at theta, computed in long double precision."""
    th = np.asarray(theta, dtype=np.longdouble)
    nj = topology.num_dihedrals
    u0 = topology.zero_unit_vectors.astype(np.longdouble)
    b0 = topology.zero_body_vectors.astype(np.longdouble)
    xi = np.empty((nj + 1, 3, 3), dtype=np.longdouble)
    xi[0] = np.eye(3, dtype=np.longdouble)
    for j in range(nj):
        xi[j + 1] = xi[j] @ _rotation_ld(th[j], u0[j])
    b = np.einsum("jab,jb->ja", xi[1:], b0)
    nodes = np.vstack([np.zeros(3, dtype=np.longdouble), np.cumsum(b, axis=0)])
    offs = np.einsum("nab,nb->na", xi[topology.frame_idx],
                     topology.offsets.astype(np.longdouble))
    return nodes[topology.anchor_idx] + offs


def total_energy_ld(topology: ChainTopology, theta, ff: ForceFieldConfig) -> np.longdouble:
    pos = pose_positions_ld(topology, theta)
    pi, pj, qq, eps, r0 = _pair_table(topology, ff.apply_exclusions)
    dvec = pos[pi] - pos[pj]
    d = np.sqrt(np.einsum("ij,ij->i", dvec, dvec))
    if ff.cutoff is not None:
        live = d <= ff.cutoff
        d = d[live]
        qq, eps, r0 = qq[live], eps[live], r0[live]
    scale = np.longdouble(ff.coulomb_constant) / np.longdouble(ff.dielectric)
    c6 = (r0.astype(np.longdouble) / d) ** 6
    return (scale * qq / d).sum() + (eps * (c6 * c6 - 2.0 * c6)).sum()


def fd_torque(topology: ChainTopology, theta, ff: ForceFieldConfig,
              h: float = 1e-6) -> np.ndarray:
    """Central finite differences of -dG/dtheta in long double."""
    th = np.asarray(theta, dtype=float)
    out = np.empty(th.shape[0])
    for j in range(th.shape[0]):
        tp = th.copy()
        tm = th.copy()
        tp[j] += h
        tm[j] -= h
        gp = total_energy_ld(topology, tp, ff)
        gm = total_energy_ld(topology, tm, ff)
        out[j] = float(-(gp - gm) / np.longdouble(2.0 * h))
    return out


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _moderate_conformations(topology: ChainTopology, rng, count: int) -> list[np.ndarray]:
    """Random dihedral vectors rejected until no non-excluded pair is closer
    than 1.5 A; finite differences are meaningless inside a hard clash."""
    pi, pj, *_ = _pair_table(topology, True)
    out = []
    while len(out) < count:
        theta = rng.uniform(-0.4 * math.pi, 0.4 * math.pi, topology.num_dihedrals)
        pos = pose(topology, theta).atom_positions
        dmin = np.min(np.linalg.norm(pos[pi] - pos[pj], axis=1))
        if dmin > 1.5:
            out.append(theta)
    return out


def self_check(topology: ChainTopology, ff: ForceFieldConfig,
               seed: int = 1234) -> list[CheckResult]:
    """Run the geometric and gradient invariant checks on a chain."""
    rng = np.random.default_rng(seed)
    results = []

    # rotation orthonormality
    worst_ortho = 0.0
    worst_det = 0.0
    for _ in range(200):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        r = rotation_matrix(rng.uniform(-math.pi, math.pi), axis)
        worst_ortho = max(worst_ortho, np.max(np.abs(r @ r.T - np.eye(3))))
        worst_det = max(worst_det, abs(np.linalg.det(r) - 1.0))
    ok = worst_ortho < 1e-12 and worst_det < 1e-12
    results.append(CheckResult("rotation_orthonormality", ok,
                               f"max |R R^T - I| = {worst_ortho:.2e}, max |det R - 1| = {worst_det:.2e}"))

    # rigidity of planes and body vectors
    ref = pose(topology, np.zeros(topology.num_dihedrals))
    b_ref = np.linalg.norm(ref.body_vectors, axis=1)
    worst = 0.0
    for _ in range(25):
        p = pose(topology, rng.uniform(-math.pi, math.pi, topology.num_dihedrals))
        worst = max(worst, np.max(np.abs(np.linalg.norm(p.body_vectors, axis=1) - b_ref)))
        for members in topology.plane_atoms:
            sub = p.atom_positions[list(members)]
            sub0 = ref.atom_positions[list(members)]
            dists = np.linalg.norm(sub[:, None] - sub[None, :], axis=2)
            dists0 = np.linalg.norm(sub0[:, None] - sub0[None, :], axis=2)
            worst = max(worst, np.max(np.abs(dists - dists0)))
    results.append(CheckResult("kinematic_rigidity", worst < 1e-9,
                               f"max deviation = {worst:.2e} A"))

    # force balance and gradient consistency on moderate conformations;
    # tolerance is relative at 1e-6 with a tiny absolute floor covering the
    # structurally zero terminal joints
    worst_bal = 0.0
    worst_ratio = 0.0
    for theta in _moderate_conformations(topology, rng, 3):
        forces = atomic_forces(pose(topology, theta), topology, ff)
        worst_bal = max(worst_bal, np.max(np.abs(forces.sum(axis=0))))
        tau = torque(topology, theta, ff)
        ref_tau = fd_torque(topology, theta, ff)
        floor = 1e-9 * max(1.0, float(np.max(np.abs(tau))))
        tol = np.maximum(1e-6 * np.maximum(np.abs(tau), np.abs(ref_tau)), floor)
        worst_ratio = max(worst_ratio, float(np.max(np.abs(tau - ref_tau) / tol)))
    results.append(CheckResult("force_balance", worst_bal < 1e-8,
                               f"max |sum F| = {worst_bal:.2e}"))
    results.append(CheckResult("gradient_consistency", worst_ratio < 1.0,
                               f"worst torque error vs finite differences = "
                               f"{worst_ratio:.3f}x of tolerance"))
    return results
