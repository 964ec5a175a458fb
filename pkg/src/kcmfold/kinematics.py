"""Conformation-to-geometry map and the Jacobian-transpose torque mapping.

The chain is a serial linkage: joint j rotates everything downstream about
the axis u_j anchored at spine node j-1. Unit and body vectors at a
conformation are the zero-position vectors carried through the running
product of per-joint rotations; atom positions are partial sums of body
vectors plus rigid in-link offsets. Generalized torques are accumulated per
joint as axis-projected moments of the atomic forces, which is the
Jacobian-transpose map written without materializing the Jacobian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .chain import ChainTopology
from .errors import AxisError, DimensionError, NonFiniteAngleError, NonFiniteForceError


@dataclass(frozen=True)
class ChainPose:
    """Realized geometry of a chain at one conformation.

    unit_vectors    (2N, 3) rotation axes u_j(theta), unit length
    body_vectors    (2N, 3) link vectors b_j(theta)
    atom_positions  (n_atoms, 3) Cartesian coordinates, A
    joint_origins   (2N, 3) a point on each rotation axis (node j-1)
    """

    unit_vectors: np.ndarray
    body_vectors: np.ndarray
    atom_positions: np.ndarray
    joint_origins: np.ndarray


def rotation_matrix(angle: float, axis) -> np.ndarray:
    """Rotation by ``angle`` (rad) about the unit vector ``axis``.

    Rodrigues form: R = I + sin(a) K + (1 - cos(a)) K^2 with K the
    cross-product matrix of the axis. Raises AxisError unless |axis| = 1
    within 1e-9.
    """
    ax = np.asarray(axis, dtype=float).reshape(3)
    if abs(np.linalg.norm(ax) - 1.0) > 1e-9:
        raise AxisError(f"rotation axis must be unit length, |axis| = {np.linalg.norm(ax)!r}")
    return _rotation_unchecked(float(angle), ax)


def _rotation_unchecked(angle: float, ax: np.ndarray) -> np.ndarray:
    c = math.cos(angle)
    s = math.sin(angle)
    x, y, z = ax
    k = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
    return np.eye(3) + s * k + (1.0 - c) * (k @ k)


def _batch_rotations(angles: np.ndarray, axes: np.ndarray) -> np.ndarray:
    """(m, 3, 3) stack of axis-angle rotations, vectorized."""
    c = np.cos(angles)
    s = np.sin(angles)
    x, y, z = axes[:, 0], axes[:, 1], axes[:, 2]
    zero = np.zeros_like(x)
    k = np.array([[zero, -z, y], [z, zero, -x], [-y, x, zero]]).transpose(2, 0, 1)
    eye = np.broadcast_to(np.eye(3), k.shape)
    return eye + s[:, None, None] * k + (1.0 - c)[:, None, None] * (k @ k)


def pose(topology: ChainTopology, theta) -> ChainPose:
    """Realize the chain geometry at dihedral vector ``theta``."""
    th = np.asarray(theta, dtype=float).ravel()
    nj = topology.num_dihedrals
    if th.shape[0] != nj:
        raise DimensionError(f"conformation has {th.shape[0]} angles, chain has {nj} dihedrals")
    if not np.all(np.isfinite(th)):
        raise NonFiniteAngleError("conformation contains NaN or infinity")

    rots = _batch_rotations(th, topology.zero_unit_vectors)
    xi = np.empty((nj + 1, 3, 3))
    xi[0] = np.eye(3)
    for j in range(nj):
        xi[j + 1] = xi[j] @ rots[j]

    u = np.einsum("jab,jb->ja", xi[1:], topology.zero_unit_vectors)
    b = np.einsum("jab,jb->ja", xi[1:], topology.zero_body_vectors)
    nodes = np.empty((nj + 1, 3))
    nodes[0] = 0.0
    np.cumsum(b, axis=0, out=nodes[1:])
    offsets = np.einsum("nab,nb->na", xi[topology.frame_idx], topology.offsets)
    positions = nodes[topology.anchor_idx] + offsets
    return ChainPose(
        unit_vectors=u,
        body_vectors=b,
        atom_positions=positions,
        joint_origins=nodes[:nj].copy(),
    )


def jacobian_torque(chain_pose: ChainPose, topology: ChainTopology, atomic_forces) -> np.ndarray:
    """Map per-atom Cartesian forces to generalized dihedral torques.

    tau_j = u_j . sum_{i downstream of j} (r_i - p_j) x F_i, where the
    downstream set contains exactly the atoms whose position depends on
    theta_j. Applied to F = -grad_r of the energy this equals the negative
    energy gradient in dihedral space.
    """
    forces = np.ascontiguousarray(atomic_forces, dtype=float)
    if forces.shape != (topology.num_atoms, 3):
        raise DimensionError(
            f"expected forces of shape {(topology.num_atoms, 3)}, got {forces.shape}")
    if not np.all(np.isfinite(forces)):
        raise NonFiniteForceError("atomic forces contain NaN or infinity")
    return kernels.torque_project(
        np.ascontiguousarray(chain_pose.unit_vectors),
        np.ascontiguousarray(chain_pose.joint_origins),
        np.ascontiguousarray(chain_pose.atom_positions),
        forces,
        topology.dep,
    )
