import math

import numpy as np
import pytest

import kcmfold as kf
from kcmfold.chain import AtomKind, AtomParameters
from kcmfold.energy import _pair_table
from kcmfold.errors import CoincidentAtomsError

from oracles import brute_force_energy, fd_forces_ld, moderate_conformations


def zero_interaction_params():
    return {kind: AtomParameters(0.0, p.vdw_radius, 0.0, w_elec=0.0, w_vdw=0.0)
            for kind, p in kf.std_parameters().items()}


class TestPairTerms:
    def test_zero_charge_gives_zero(self, ff):
        for d in (0.5, 1.0, 10.0):
            assert kf.pair_elec_energy(0.0, 1.0, d, ff) == 0.0

    def test_unit_plugin_value(self):
        cfg = kf.ForceFieldConfig(coulomb_constant=332.06, dielectric=1.0)
        assert kf.pair_elec_energy(1.0, 1.0, 1.0, cfg) == pytest.approx(332.06)

    def test_inverse_distance(self, ff):
        e1 = kf.pair_elec_energy(0.4, -0.3, 2.0, ff)
        e2 = kf.pair_elec_energy(0.4, -0.3, 4.0, ff)
        assert e2 == pytest.approx(e1 / 2.0)

    def test_coincident_atoms_rejected(self, ff):
        with pytest.raises(CoincidentAtomsError):
            kf.pair_elec_energy(1.0, 1.0, 0.0, ff)
        with pytest.raises(CoincidentAtomsError):
            kf.pair_vdw_energy(0.1, 3.0, 0.0)

    def test_vdw_minimum(self):
        assert kf.pair_vdw_energy(0.21, 3.2, 3.2) == pytest.approx(-0.21)

    def test_vdw_decay(self):
        assert abs(kf.pair_vdw_energy(0.21, 3.0, 300.0)) < 1e-10 * 0.21

    def test_vdw_derivative_zero_at_minimum(self):
        eps, r0, h = 0.15, 3.1, 1e-7
        slope = (kf.pair_vdw_energy(eps, r0, r0 + h) -
                 kf.pair_vdw_energy(eps, r0, r0 - h)) / (2 * h)
        assert abs(slope) < 1e-6 * eps


class TestFreeEnergy:
    def test_zero_interactions_zero_total(self, ff):
        topo = kf.build_backbone(1, params=zero_interaction_params())
        e = kf.free_energy(kf.pose(topo, np.zeros(topo.num_dihedrals)), topo, ff)
        assert e.elec == 0.0 and e.vdw == 0.0 and e.total == 0.0

    def test_single_pair_at_minimum(self, ff):
        # isolate one vdW pair: only the two alpha-carbon hydrogens of a
        # 1-plane chain interact, with radii chosen so they sit at the pair
        # minimum in the zero position
        topo_probe = kf.build_backbone(1)
        ha = [i for i, a in enumerate(topo_probe.atoms) if a.kind == AtomKind.H_ALPHA]
        p0 = kf.pose(topo_probe, np.zeros(topo_probe.num_dihedrals))
        d = float(np.linalg.norm(p0.atom_positions[ha[0]] - p0.atom_positions[ha[1]]))
        params = zero_interaction_params()
        params[AtomKind.H_ALPHA] = AtomParameters(0.0, d / 2.0, 0.04, w_elec=0.0, w_vdw=1.0)
        topo = kf.build_backbone(1, params=params)
        e = kf.free_energy(kf.pose(topo, np.zeros(topo.num_dihedrals)), topo, kf.ForceFieldConfig())
        assert e.elec == 0.0
        assert e.vdw == pytest.approx(-0.04, rel=1e-12)
        assert e.total == e.elec + e.vdw

    @pytest.mark.parametrize("planes", [1, 2, 3, 4])
    def test_matches_brute_force_double_loop(self, planes, ff):
        topo = kf.build_backbone(planes)
        rng = np.random.default_rng(100 + planes)
        for theta in [np.zeros(topo.num_dihedrals)] + moderate_conformations(topo, rng, 3):
            pose = kf.pose(topo, theta)
            mine = kf.free_energy(pose, topo, ff)
            elec, vdw = brute_force_energy(pose.atom_positions, topo)
            assert abs(mine.elec - elec) < 1e-10
            assert abs(mine.vdw - vdw) < 1e-10

    def test_exclusions_flag_matches_oracle(self, topo1):
        cfg = kf.ForceFieldConfig(apply_exclusions=False)
        pose = kf.pose(topo1, np.zeros(topo1.num_dihedrals))
        mine = kf.free_energy(pose, topo1, cfg)
        elec, vdw = brute_force_energy(pose.atom_positions, topo1, apply_exclusions=False)
        assert mine.elec == pytest.approx(elec, abs=1e-10)
        assert mine.vdw == pytest.approx(vdw, abs=1e-10)

    def test_cutoff_matches_oracle(self, topo2, ff):
        cfg = kf.ForceFieldConfig(cutoff=4.0)
        pose = kf.pose(topo2, np.zeros(topo2.num_dihedrals))
        mine = kf.free_energy(pose, topo2, cfg)
        elec, vdw = brute_force_energy(pose.atom_positions, topo2, cutoff=4.0)
        assert mine.elec == pytest.approx(elec, abs=1e-10)
        assert mine.vdw == pytest.approx(vdw, abs=1e-10)

    def test_rigid_motion_invariance(self, topo2, ff):
        rng = np.random.default_rng(8)
        theta = moderate_conformations(topo2, rng, 1)[0]
        pose = kf.pose(topo2, theta)
        base = kf.free_energy(pose, topo2, ff)
        r = kf.rotation_matrix(0.9, np.array([1.0, 2.0, 2.0]) / 3.0)
        moved = pose.atom_positions @ r.T + np.array([5.0, -3.0, 1.0])
        elec, vdw = brute_force_energy(moved, topo2)
        assert base.elec == pytest.approx(elec, abs=1e-9)
        assert base.vdw == pytest.approx(vdw, abs=1e-9)


class TestAtomicForces:
    def test_zero_interactions_zero_forces(self, ff):
        topo = kf.build_backbone(1, params=zero_interaction_params())
        f = kf.atomic_forces(kf.pose(topo, np.zeros(topo.num_dihedrals)), topo, ff)
        assert np.array_equal(f, np.zeros_like(f))

    def test_equal_charges_repel_along_axis(self, ff):
        # two like charges on one isolated pair: forces equal/opposite and
        # pointing apart
        params = zero_interaction_params()
        params[AtomKind.H_ALPHA] = AtomParameters(0.5, 1.0, 0.0, w_elec=1.0, w_vdw=0.0)
        topo = kf.build_backbone(1, params=params)
        ha = [i for i, a in enumerate(topo.atoms) if a.kind == AtomKind.H_ALPHA]
        pose = kf.pose(topo, np.zeros(topo.num_dihedrals))
        f = kf.atomic_forces(pose, topo, ff)
        sep = pose.atom_positions[ha[0]] - pose.atom_positions[ha[1]]
        assert np.allclose(f[ha[0]], -f[ha[1]], atol=1e-14)
        assert f[ha[0]] @ sep > 0.0  # repulsive
        cross = np.cross(f[ha[0]], sep)
        assert np.max(np.abs(cross)) < 1e-12 * np.linalg.norm(f[ha[0]]) * np.linalg.norm(sep)

    def test_total_force_balance(self, topo4, ff):
        rng = np.random.default_rng(9)
        for theta in moderate_conformations(topo4, rng, 5):
            f = kf.atomic_forces(kf.pose(topo4, theta), topo4, ff)
            assert np.max(np.abs(f.sum(axis=0))) < 1e-8

    def test_matches_position_finite_differences(self, topo2, ff):
        rng = np.random.default_rng(10)
        theta = moderate_conformations(topo2, rng, 1)[0]
        pose = kf.pose(topo2, theta)
        mine = kf.atomic_forces(pose, topo2, ff)
        ref = fd_forces_ld(topo2, pose.atom_positions)
        scale = max(1.0, np.max(np.abs(mine)))
        err = np.abs(mine - ref)
        tol = np.maximum(1e-6 * np.maximum(np.abs(mine), np.abs(ref)), 1e-9 * scale)
        assert np.all(err <= tol)


class TestTorque:
    def test_zero_interactions_zero_torque(self, ff):
        topo = kf.build_backbone(2, params=zero_interaction_params())
        tau = kf.torque(topo, np.zeros(topo.num_dihedrals), ff)
        assert np.array_equal(tau, np.zeros(topo.num_dihedrals))

    def test_wrap_invariance(self, topo2, ff):
        rng = np.random.default_rng(12)
        th = rng.uniform(-9.0, 9.0, topo2.num_dihedrals)
        a = kf.torque(topo2, th, ff)
        b = kf.torque(topo2, kf.wrap_angles(th), ff)
        assert np.max(np.abs(a - b)) < 1e-9 * max(1.0, np.max(np.abs(a)))

    def test_coincident_atoms_identified(self, topo1, ff):
        pose = kf.pose(topo1, np.zeros(topo1.num_dihedrals))
        doctored = pose.atom_positions.copy()
        doctored[5] = doctored[0]
        from kcmfold.energy import _evaluate
        with pytest.raises(CoincidentAtomsError) as err:
            _evaluate(doctored, topo1, ff, with_forces=False)
        assert {err.value.i, err.value.j} == {0, 5}


def test_pair_table_is_lexicographic_and_cached(topo2):
    a = _pair_table(topo2, True)
    b = _pair_table(topo2, True)
    assert a is b
    pi, pj, *_ = a
    order = np.lexsort((pj, pi))
    assert np.array_equal(order, np.arange(len(pi)))
