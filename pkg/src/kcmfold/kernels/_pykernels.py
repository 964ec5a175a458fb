"""Pure numpy fallback kernels. Same signatures as the compiled module."""

import numpy as np


def nonbonded_energy(pos, pi, pj, qq, eps, r0, coulomb_scale, cutoff):
    """Sum pair Coulomb and 12-6 terms over the pair list.

    Returns (elec, vdw, bad_i, bad_j); bad indices are -1 unless a pair has
    zero distance, in which case that pair's atom indices are reported and
    the energies are meaningless.
    """
    dvec = pos[pi] - pos[pj]
    d2 = np.einsum("ij,ij->i", dvec, dvec)
    zero = np.flatnonzero(d2 == 0.0)
    if zero.size:
        t = int(zero[0])
        return 0.0, 0.0, int(pi[t]), int(pj[t])
    d = np.sqrt(d2)
    if cutoff > 0.0:
        live = d <= cutoff
        d = d[live]
        elec_t = coulomb_scale * qq[live] / d
        c6 = (r0[live] / d) ** 6
        vdw_t = eps[live] * (c6 * c6 - 2.0 * c6)
    else:
        elec_t = coulomb_scale * qq / d
        c6 = (r0 / d) ** 6
        vdw_t = eps * (c6 * c6 - 2.0 * c6)
    return float(elec_t.sum()), float(vdw_t.sum()), -1, -1


def nonbonded_energy_forces(pos, pi, pj, qq, eps, r0, coulomb_scale, cutoff, forces_out):
    """Like nonbonded_energy but also accumulates forces into forces_out."""
    dvec = pos[pi] - pos[pj]
    d2 = np.einsum("ij,ij->i", dvec, dvec)
    zero = np.flatnonzero(d2 == 0.0)
    if zero.size:
        t = int(zero[0])
        return 0.0, 0.0, int(pi[t]), int(pj[t])
    d = np.sqrt(d2)
    if cutoff > 0.0:
        live = d <= cutoff
        dvec, d2, d = dvec[live], d2[live], d[live]
        pi, pj, qq, eps, r0 = pi[live], pj[live], qq[live], eps[live], r0[live]
    elec_t = coulomb_scale * qq / d
    c6 = (r0 / d) ** 6
    c12 = c6 * c6
    vdw_t = eps * (c12 - 2.0 * c6)
    # F_i = (elec/d + 12 eps (c12 - c6)/d) * dvec/d = coef * dvec
    coef = (elec_t + 12.0 * eps * (c12 - c6)) / d2
    contrib = coef[:, None] * dvec
    np.add.at(forces_out, pi, contrib)
    np.add.at(forces_out, pj, -contrib)
    return float(elec_t.sum()), float(vdw_t.sum()), -1, -1


def torque_project(u, porig, pos, forces, dep):
    """Project atomic forces onto the joint axes.

    Accumulates r x F and F per dependency level, suffix-sums from the
    distal joint inward, then projects: tau_m = u_m . (S_rF - p_m x S_F)
    over atoms with dep >= m. Joints whose downstream set is empty get an
    exact zero.
    """
    nj = u.shape[0]
    buckets = np.zeros((nj + 1, 6))
    rf = np.cross(pos, forces)
    np.add.at(buckets, dep, np.concatenate([rf, forces], axis=1))
    suffix = buckets[::-1].cumsum(axis=0)[::-1]  # suffix[m] = sum over dep >= m
    s_rf = suffix[1:, :3]
    s_f = suffix[1:, 3:]
    moment = s_rf - np.cross(porig, s_f)
    return np.einsum("ij,ij->i", u, moment)
