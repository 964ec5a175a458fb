#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the per-iteration hot path (pair energy+forces, torque projection) and
a full folding run on the 15-plane chain. Run from the repo root after
installing the package:

    python benchmarks/bench_kernels.py [--planes 15] [--iters 300]
"""

import argparse
import time

import numpy as np

import kcmfold as kf
from kcmfold.config import preset_pre_coiled_alpha
from kcmfold.energy import _pair_table
from kcmfold.kernels import _pykernels

try:
    from kcmfold.kernels import _ckernels
except ImportError:
    _ckernels = None


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernel_level(topo, ff, impl, n_eval=200):
    pi, pj, qq, eps, r0 = _pair_table(topo, True)
    theta = preset_pre_coiled_alpha(topo.num_dihedrals, 101, 20.0)
    p = kf.pose(topo, theta)
    pos = np.ascontiguousarray(p.atom_positions)
    scale = ff.coulomb_constant / ff.dielectric

    def forces_once():
        out = np.zeros_like(pos)
        impl.nonbonded_energy_forces(pos, pi, pj, qq, eps, r0, scale, 0.0, out)
        return out

    forces = forces_once()

    def torque_once():
        impl.torque_project(p.unit_vectors, p.joint_origins, pos, forces, topo.dep)

    t_f = time_call(lambda: [forces_once() for _ in range(n_eval)], 3) / n_eval
    t_t = time_call(lambda: [torque_once() for _ in range(n_eval)], 3) / n_eval
    return t_f, t_t


def bench_full_run(topo, ff, iters):
    theta0 = preset_pre_coiled_alpha(topo.num_dihedrals, 101, 20.0)
    cfg = kf.SolverConfig(mode="sgd", kappa0=0.01, gamma0=0.99, max_iters=iters)
    t0 = time.perf_counter()
    traj = kf.run_folding(topo, theta0, cfg, ff)
    return time.perf_counter() - t0, traj.records[-1].energy.total


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--planes", type=int, default=15)
    ap.add_argument("--iters", type=int, default=300)
    args = ap.parse_args()

    topo = kf.build_backbone(args.planes)
    ff = kf.ForceFieldConfig()
    n_pairs = _pair_table(topo, True)[0].shape[0]
    print(f"chain: {args.planes} planes, {topo.num_atoms} atoms, "
          f"{topo.num_dihedrals} dihedrals, {n_pairs} nonbonded pairs")

    rows = []
    for name, impl in (("python", _pykernels), ("cython", _ckernels)):
        if impl is None:
            print(f"{name:>8}: not built")
            continue
        t_f, t_t = bench_kernel_level(topo, ff, impl)
        rows.append((name, t_f, t_t))
        print(f"{name:>8}: energy+forces {t_f * 1e6:8.1f} us/eval   "
              f"torque {t_t * 1e6:8.1f} us/eval")
    if len(rows) == 2:
        print(f"speedup: energy+forces {rows[0][1] / rows[1][1]:.1f}x, "
              f"torque {rows[0][2] / rows[1][2]:.1f}x")

    import kcmfold.kernels as kr
    t_run, e_final = bench_full_run(topo, ff, args.iters)
    print(f"full sgd run ({args.iters} iters, active backend = {kr.backend_name()}): "
          f"{t_run:.2f} s, final energy {e_final:.3f} kcal/mol")


if __name__ == "__main__":
    main()
