"""Aggregated free energy (Coulomb + 12-6 van der Waals) and atomic forces.

Pair terms:
    elec(i, j) = w * K * q_i * q_j / (eps_r * d_ij)
    vdw(i, j)  = w * eps_ij * ((r0_ij / d_ij)^12 - 2 (r0_ij / d_ij)^6)

with combination rules r0_ij = radius_i + radius_j and
eps_ij = sqrt(depth_i * depth_j), and per-pair weights formed as the product
of the per-atom weights. Sums run over unordered atom pairs outside the
exclusion set (1-2 and 1-3 neighbors), in lexicographic pair order. Forces
are the closed-form derivatives of the same pair terms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .chain import ChainTopology
from .errors import CoincidentAtomsError
from .kinematics import ChainPose, jacobian_torque, pose

COULOMB_CONSTANT = 332.0636  # kcal*A/(mol*e^2)


@dataclass(frozen=True)
class ForceFieldConfig:
    """Nonbonded evaluation settings.

    cutoff, when set, skips pair terms beyond that distance (plain
    truncation; the energy is then discontinuous at the cutoff).
    """

    coulomb_constant: float = COULOMB_CONSTANT
    dielectric: float = 1.0
    apply_exclusions: bool = True
    cutoff: float | None = None

    def __post_init__(self):
        if not self.coulomb_constant > 0:
            raise ValueError("coulomb_constant must be > 0")
        if not self.dielectric > 0:
            raise ValueError("dielectric must be > 0")
        if self.cutoff is not None and not self.cutoff > 0:
            raise ValueError("cutoff must be > 0 when set")


@dataclass(frozen=True)
class EnergyBreakdown:
    """Electrostatic and van der Waals energy at one pose, kcal/mol."""

    elec: float
    vdw: float

    @property
    def total(self) -> float:
        return self.elec + self.vdw


def pair_elec_energy(q_i: float, q_j: float, d: float, cfg: ForceFieldConfig,
                     w: float = 1.0) -> float:
    """Coulomb energy of one pair at distance d (A)."""
    if d <= 0:
        raise CoincidentAtomsError(-1, -1)
    return w * cfg.coulomb_constant * q_i * q_j / (cfg.dielectric * d)


def pair_vdw_energy(eps_ij: float, r0_ij: float, d: float, w: float = 1.0) -> float:
    """12-6 van der Waals energy of one pair; minimum -eps_ij at d = r0_ij."""
    if d <= 0:
        raise CoincidentAtomsError(-1, -1)
    c6 = (r0_ij / d) ** 6
    return w * eps_ij * (c6 * c6 - 2.0 * c6)


def _pair_table(topology: ChainTopology, apply_exclusions: bool):
    """Precomputed per-pair arrays (indices, weighted charge products,
    well depths, pair minima), cached on the topology."""
    key = bool(apply_exclusions)
    cached = topology._pair_cache.get(key)
    if cached is not None:
        return cached
    n = topology.num_atoms
    iu, ju = np.triu_indices(n, k=1)
    if apply_exclusions and topology.exclusion_set:
        ex = np.zeros((n, n), dtype=bool)
        idx = np.array(sorted(topology.exclusion_set), dtype=np.int64)
        ex[idx[:, 0], idx[:, 1]] = True
        keep = ~ex[iu, ju]
        iu, ju = iu[keep], ju[keep]
    q = topology.charges
    we = topology.w_elec
    wv = topology.w_vdw
    qq = (q[iu] * q[ju]) * (we[iu] * we[ju])
    eps = np.sqrt(topology.well_depths[iu] * topology.well_depths[ju]) * (wv[iu] * wv[ju])
    r0 = topology.vdw_radii[iu] + topology.vdw_radii[ju]
    table = (iu.astype(np.int32), ju.astype(np.int32), qq, eps, r0)
    topology._pair_cache[key] = table
    return table


def _evaluate(positions: np.ndarray, topology: ChainTopology, cfg: ForceFieldConfig,
              with_forces: bool):
    pi, pj, qq, eps, r0 = _pair_table(topology, cfg.apply_exclusions)
    scale = cfg.coulomb_constant / cfg.dielectric
    cutoff = cfg.cutoff if cfg.cutoff is not None else 0.0
    pos = np.ascontiguousarray(positions, dtype=float)
    if with_forces:
        forces = np.zeros_like(pos)
        elec, vdw, bad_i, bad_j = kernels.nonbonded_energy_forces(
            pos, pi, pj, qq, eps, r0, scale, cutoff, forces)
    else:
        forces = None
        elec, vdw, bad_i, bad_j = kernels.nonbonded_energy(
            pos, pi, pj, qq, eps, r0, scale, cutoff)
    if bad_i >= 0:
        raise CoincidentAtomsError(bad_i, bad_j)
    return elec, vdw, forces


def free_energy(chain_pose: ChainPose, topology: ChainTopology,
                cfg: ForceFieldConfig) -> EnergyBreakdown:
    """Aggregated free energy of the pose."""
    elec, vdw, _ = _evaluate(chain_pose.atom_positions, topology, cfg, with_forces=False)
    return EnergyBreakdown(elec=elec, vdw=vdw)


def atomic_forces(chain_pose: ChainPose, topology: ChainTopology,
                  cfg: ForceFieldConfig) -> np.ndarray:
    """(n_atoms, 3) forces F_i = -grad_{r_i} of the aggregated free energy."""
    _, _, forces = _evaluate(chain_pose.atom_positions, topology, cfg, with_forces=True)
    return forces


def torque(topology: ChainTopology, theta, cfg: ForceFieldConfig) -> np.ndarray:
    """Generalized torque vector at conformation theta; vanishes exactly at
    local minima of the free energy."""
    _, tau = energy_and_torque(topology, theta, cfg)
    return tau


def energy_and_torque(topology: ChainTopology, theta,
                      cfg: ForceFieldConfig) -> tuple[EnergyBreakdown, np.ndarray]:
    """One pose evaluation returning both the energy breakdown and the
    torque vector (what the folding loop consumes)."""
    p = pose(topology, theta)
    elec, vdw, forces = _evaluate(p.atom_positions, topology, cfg, with_forces=True)
    tau = jacobian_torque(p, topology, forces)
    return EnergyBreakdown(elec=elec, vdw=vdw), tau
