import math

import numpy as np
import pytest

import kcmfold as kf
from kcmfold.errors import AxisError, DimensionError, NonFiniteForceError

from oracles import fd_torque_ld, moderate_conformations, positions_ld, quat_rotation_matrix


class TestRotationMatrix:
    def test_zero_angle_is_identity(self):
        for axis in (np.array([1.0, 0, 0]), np.array([0, 0, 1.0]),
                     np.array([1.0, 1.0, 1.0]) / math.sqrt(3)):
            assert np.allclose(kf.rotation_matrix(0.0, axis), np.eye(3), atol=1e-15)

    def test_half_turn_about_z(self):
        r = kf.rotation_matrix(math.pi, [0.0, 0.0, 1.0])
        assert np.allclose(r @ [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], atol=1e-15)

    def test_matches_quaternion_oracle(self):
        axis = np.array([1.0, 1.0, 1.0]) / math.sqrt(3)
        r = kf.rotation_matrix(math.pi / 3, axis)
        assert np.allclose(r, quat_rotation_matrix(math.pi / 3, axis), atol=1e-14)
        rng = np.random.default_rng(5)
        for _ in range(100):
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            ang = rng.uniform(-2 * math.pi, 2 * math.pi)
            assert np.allclose(kf.rotation_matrix(ang, axis),
                               quat_rotation_matrix(ang, axis), atol=1e-13)

    def test_axis_is_fixed(self):
        axis = np.array([2.0, -1.0, 0.5])
        axis /= np.linalg.norm(axis)
        r = kf.rotation_matrix(1.234, axis)
        assert np.allclose(r @ axis, axis, atol=1e-15)

    def test_orthonormality_1000_random(self):
        rng = np.random.default_rng(11)
        worst_o = worst_d = 0.0
        for _ in range(1000):
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            r = kf.rotation_matrix(rng.uniform(-math.pi, math.pi), axis)
            worst_o = max(worst_o, np.max(np.abs(r @ r.T - np.eye(3))))
            worst_d = max(worst_d, abs(np.linalg.det(r) - 1.0))
        assert worst_o < 1e-12
        assert worst_d < 1e-12

    def test_non_unit_axis_rejected(self):
        with pytest.raises(AxisError):
            kf.rotation_matrix(0.5, [1.0, 1.0, 0.0])


class TestPose:
    def test_zero_conformation_reproduces_zero_vectors(self, topo2):
        p = kf.pose(topo2, np.zeros(topo2.num_dihedrals))
        assert np.array_equal(p.unit_vectors, topo2.zero_unit_vectors)
        assert np.array_equal(p.body_vectors, topo2.zero_body_vectors)

    def test_partial_sums_at_zero(self, topo2):
        p = kf.pose(topo2, np.zeros(topo2.num_dihedrals))
        b = topo2.zero_body_vectors
        # spine nodes are partial sums of body vectors; node 1 and node 2
        # are the first alpha carbon and the second nitrogen
        ca1 = next(i for i, a in enumerate(topo2.atoms) if a.kind.value == "C_alpha")
        n2 = next(i for i, a in enumerate(topo2.atoms) if a.kind.value == "N")
        assert np.allclose(p.atom_positions[ca1], b[0], atol=1e-15)
        assert np.allclose(p.atom_positions[n2], b[0] + b[1], atol=1e-15)

    def test_intra_plane_distance_independent_of_theta(self, topo2):
        rng = np.random.default_rng(2)
        ref = kf.pose(topo2, np.zeros(topo2.num_dihedrals))
        for _ in range(20):
            p = kf.pose(topo2, rng.uniform(-math.pi, math.pi, topo2.num_dihedrals))
            for members in topo2.plane_atoms:
                ca_a, *_, ca_b = members
                d = np.linalg.norm(p.atom_positions[ca_a] - p.atom_positions[ca_b])
                d0 = np.linalg.norm(ref.atom_positions[ca_a] - ref.atom_positions[ca_b])
                assert d == pytest.approx(d0, abs=1e-9)

    def test_wrap_invariance(self, topo2):
        rng = np.random.default_rng(3)
        th = rng.uniform(-12.0, 12.0, topo2.num_dihedrals)
        a = kf.pose(topo2, th).atom_positions
        b = kf.pose(topo2, kf.wrap_angles(th)).atom_positions
        assert np.max(np.abs(a - b)) < 1e-9

    def test_matches_independent_kinematics(self, topo2):
        rng = np.random.default_rng(4)
        th = rng.uniform(-math.pi, math.pi, topo2.num_dihedrals)
        mine = kf.pose(topo2, th).atom_positions
        ref = positions_ld(topo2, th).astype(float)
        assert np.max(np.abs(mine - ref)) < 1e-12

    def test_dimension_mismatch(self, topo2):
        with pytest.raises(DimensionError):
            kf.pose(topo2, np.zeros(topo2.num_dihedrals + 1))

    def test_joint_origins_on_spine(self, topo2):
        # p_j is the proximal spine node of body vector j
        p = kf.pose(topo2, np.zeros(topo2.num_dihedrals))
        nodes = np.vstack([np.zeros(3), np.cumsum(p.body_vectors, axis=0)])
        assert np.allclose(p.joint_origins, nodes[:-1], atol=1e-15)


class TestJacobianTorque:
    def test_zero_forces_zero_torque(self, topo2):
        p = kf.pose(topo2, np.zeros(topo2.num_dihedrals))
        tau = kf.jacobian_torque(p, topo2, np.zeros((topo2.num_atoms, 3)))
        assert np.array_equal(tau, np.zeros(topo2.num_dihedrals))

    def test_force_parallel_to_arm_contributes_nothing(self, topo2):
        # push the carboxyl carbon along its moment arm about the last
        # movable joint: the projected torque there must vanish
        th = np.random.default_rng(6).uniform(-1, 1, topo2.num_dihedrals)
        p = kf.pose(topo2, th)
        cterm = topo2.num_atoms - 1
        j = topo2.dep[cterm]  # last joint that moves the carboxyl carbon
        arm = p.atom_positions[cterm] - p.joint_origins[j - 1]
        forces = np.zeros((topo2.num_atoms, 3))
        forces[cterm] = 2.5 * arm
        tau = kf.jacobian_torque(p, topo2, forces)
        assert abs(tau[j - 1]) < 1e-12

    def test_matches_negative_theta_gradient(self, topo2, ff):
        rng = np.random.default_rng(7)
        for theta in moderate_conformations(topo2, rng, 5):
            p = kf.pose(topo2, theta)
            forces = kf.atomic_forces(p, topo2, ff)
            tau = kf.jacobian_torque(p, topo2, forces)
            ref = fd_torque_ld(topo2, theta)
            scale = max(1.0, np.max(np.abs(tau)))
            for a, b in zip(tau, ref):
                err = abs(a - b)
                assert err <= max(1e-6 * max(abs(a), abs(b)), 1e-9 * scale)

    def test_bad_force_shapes_rejected(self, topo2):
        p = kf.pose(topo2, np.zeros(topo2.num_dihedrals))
        with pytest.raises(DimensionError):
            kf.jacobian_torque(p, topo2, np.zeros((3, topo2.num_atoms)))
        bad = np.zeros((topo2.num_atoms, 3))
        bad[0, 0] = math.inf
        with pytest.raises(NonFiniteForceError):
            kf.jacobian_torque(p, topo2, bad)
