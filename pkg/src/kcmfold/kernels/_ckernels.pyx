# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: pairwise nonbonded terms and torque projection.

Pair terms are summed sequentially in pair-list order (lexicographic (i, j)),
which pins the floating-point result for reproducibility.
"""

import numpy as np

from libc.math cimport sqrt


def nonbonded_energy(const double[:, ::1] pos, const int[::1] pi, const int[::1] pj,
                     const double[::1] qq, const double[::1] eps, const double[::1] r0,
                     double coulomb_scale, double cutoff):
    cdef Py_ssize_t m = pi.shape[0]
    cdef Py_ssize_t t
    cdef int i, j
    cdef double dx, dy, dz, d2, d, c2, c6
    cdef double elec = 0.0, vdw = 0.0
    for t in range(m):
        i = pi[t]
        j = pj[t]
        dx = pos[i, 0] - pos[j, 0]
        dy = pos[i, 1] - pos[j, 1]
        dz = pos[i, 2] - pos[j, 2]
        d2 = dx * dx + dy * dy + dz * dz
        if d2 == 0.0:
            return 0.0, 0.0, i, j
        d = sqrt(d2)
        if cutoff > 0.0 and d > cutoff:
            continue
        elec += coulomb_scale * qq[t] / d
        c2 = r0[t] / d
        c2 = c2 * c2
        c6 = c2 * c2 * c2
        vdw += eps[t] * (c6 * c6 - 2.0 * c6)
    return elec, vdw, -1, -1


def nonbonded_energy_forces(const double[:, ::1] pos, const int[::1] pi, const int[::1] pj,
                            const double[::1] qq, const double[::1] eps, const double[::1] r0,
                            double coulomb_scale, double cutoff,
                            double[:, ::1] forces_out):
    cdef Py_ssize_t m = pi.shape[0]
    cdef Py_ssize_t t
    cdef int i, j
    cdef double dx, dy, dz, d2, d, c2, c6, c12, et, coef
    cdef double elec = 0.0, vdw = 0.0
    for t in range(m):
        i = pi[t]
        j = pj[t]
        dx = pos[i, 0] - pos[j, 0]
        dy = pos[i, 1] - pos[j, 1]
        dz = pos[i, 2] - pos[j, 2]
        d2 = dx * dx + dy * dy + dz * dz
        if d2 == 0.0:
            return 0.0, 0.0, i, j
        d = sqrt(d2)
        if cutoff > 0.0 and d > cutoff:
            continue
        et = coulomb_scale * qq[t] / d
        elec += et
        c2 = r0[t] / d
        c2 = c2 * c2
        c6 = c2 * c2 * c2
        c12 = c6 * c6
        vdw += eps[t] * (c12 - 2.0 * c6)
        coef = (et + 12.0 * eps[t] * (c12 - c6)) / d2
        forces_out[i, 0] += coef * dx
        forces_out[i, 1] += coef * dy
        forces_out[i, 2] += coef * dz
        forces_out[j, 0] -= coef * dx
        forces_out[j, 1] -= coef * dy
        forces_out[j, 2] -= coef * dz
    return elec, vdw, -1, -1


def torque_project(const double[:, ::1] u, const double[:, ::1] porig, const double[:, ::1] pos,
                   const double[:, ::1] forces, const int[::1] dep):
    cdef Py_ssize_t n = pos.shape[0]
    cdef Py_ssize_t nj = u.shape[0]
    cdef Py_ssize_t i, m
    cdef int d
    cdef double rx, ry, rz, fx, fy, fz, px, py, pz, cx, cy, cz
    cdef double srx = 0.0, sry = 0.0, srz = 0.0
    cdef double sfx = 0.0, sfy = 0.0, sfz = 0.0
    buckets_arr = np.zeros((nj + 1, 6))
    tau_arr = np.zeros(nj)
    cdef double[:, ::1] buckets = buckets_arr
    cdef double[::1] tau = tau_arr
    for i in range(n):
        d = dep[i]
        rx = pos[i, 0]
        ry = pos[i, 1]
        rz = pos[i, 2]
        fx = forces[i, 0]
        fy = forces[i, 1]
        fz = forces[i, 2]
        buckets[d, 0] += ry * fz - rz * fy
        buckets[d, 1] += rz * fx - rx * fz
        buckets[d, 2] += rx * fy - ry * fx
        buckets[d, 3] += fx
        buckets[d, 4] += fy
        buckets[d, 5] += fz
    for m in range(nj, 0, -1):
        srx += buckets[m, 0]
        sry += buckets[m, 1]
        srz += buckets[m, 2]
        sfx += buckets[m, 3]
        sfy += buckets[m, 4]
        sfz += buckets[m, 5]
        px = porig[m - 1, 0]
        py = porig[m - 1, 1]
        pz = porig[m - 1, 2]
        cx = py * sfz - pz * sfy
        cy = pz * sfx - px * sfz
        cz = px * sfy - py * sfx
        tau[m - 1] = (u[m - 1, 0] * (srx - cx)
                      + u[m - 1, 1] * (sry - cy)
                      + u[m - 1, 2] * (srz - cz))
    return tau_arr
