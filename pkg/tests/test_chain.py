import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import kcmfold as kf
from kcmfold.chain import AtomKind, AtomParameters
from kcmfold.errors import MissingParameterError, NonFiniteAngleError, TopologyError

from oracles import bfs_pairs_within


def test_build_counts_15_planes():
    topo = kf.build_backbone(15)
    assert topo.num_dihedrals == 32
    assert topo.num_planes == 15


def test_build_counts_smallest_chain():
    topo = kf.build_backbone(1)
    assert topo.num_dihedrals == 4
    assert topo.num_planes == 1


@pytest.mark.parametrize("planes", [1, 2, 3, 7])
def test_vector_counts_scale_with_planes(planes):
    topo = kf.build_backbone(planes)
    assert topo.zero_unit_vectors.shape == (2 * (planes + 1), 3)
    assert topo.zero_body_vectors.shape == (2 * (planes + 1), 3)


def test_zero_body_vector_lengths_match_geometry():
    # each |b_j| checked against an independently computed expectation:
    # odd j are N->CA bonds, the last is CA->C', and even interior j are the
    # virtual CA->N bond given by the law of cosines across the plane
    geom = kf.std_geometry()
    topo = kf.build_backbone(2, geometry=geom)
    virtual = math.sqrt(geom.bond_ca_c ** 2 + geom.bond_c_n ** 2
                        - 2 * geom.bond_ca_c * geom.bond_c_n * math.cos(geom.angle_ca_c_n))
    lengths = np.linalg.norm(topo.zero_body_vectors, axis=1)
    nj = topo.num_dihedrals
    for j in range(1, nj + 1):
        if j == nj:
            expected = geom.bond_ca_c
        elif j % 2 == 1:
            expected = geom.bond_n_ca
        else:
            expected = virtual
        assert lengths[j - 1] == pytest.approx(expected, abs=1e-12)


def test_unit_vectors_are_unit():
    topo = kf.build_backbone(3)
    norms = np.linalg.norm(topo.zero_unit_vectors, axis=1)
    assert np.max(np.abs(norms - 1.0)) < 1e-12


def test_zero_planes_rejected():
    with pytest.raises(TopologyError):
        kf.build_backbone(0)


def test_missing_parameter_names_the_kind():
    params = kf.std_parameters()
    del params[AtomKind.O]
    with pytest.raises(MissingParameterError, match="O"):
        kf.build_backbone(1, params=params)


def test_parameter_invariants_enforced():
    with pytest.raises(ValueError):
        AtomParameters(charge=0.0, vdw_radius=-1.0, well_depth=0.1)
    with pytest.raises(ValueError):
        AtomParameters(charge=0.0, vdw_radius=1.0, well_depth=-0.1)


def test_terminus_bonding():
    topo = kf.build_backbone(2)
    kinds = [a.kind for a in topo.atoms]
    nterm = kinds.index(AtomKind.N_TERMINUS)
    cterm = kinds.index(AtomKind.C_TERMINUS)
    ca_indices = [i for i, k in enumerate(kinds) if k == AtomKind.C_ALPHA]
    assert (min(nterm, ca_indices[0]), max(nterm, ca_indices[0])) in topo.bonds
    assert (min(cterm, ca_indices[-1]), max(cterm, ca_indices[-1])) in topo.bonds


@pytest.mark.parametrize("planes", [1, 2, 4])
def test_exclusions_are_exactly_graph_distance_two(planes):
    topo = kf.build_backbone(planes)
    expected = bfs_pairs_within(topo.bonds, topo.num_atoms, 2)
    assert set(topo.exclusion_set) == expected


def test_plane_membership_has_six_atoms_per_plane():
    topo = kf.build_backbone(4)
    assert len(topo.plane_atoms) == 4
    assert all(len(m) == 6 for m in topo.plane_atoms)


def test_plane_coefficients_identical_across_planes():
    geom = kf.std_geometry()
    topo = kf.build_backbone(4, geometry=geom)
    pos = kf.pose(topo, np.zeros(topo.num_dihedrals)).atom_positions
    for k, members in enumerate(topo.plane_atoms, start=1):
        ca, c, o, n, h, _ = members
        basis = np.column_stack([topo.zero_body_vectors[2 * k - 1],
                                 topo.zero_body_vectors[2 * k]])
        for row, idx in enumerate((c, o, n, h)):
            sol, *_ = np.linalg.lstsq(basis, pos[idx] - pos[ca], rcond=None)
            assert np.allclose(sol, geom.plane_coefficients[row], atol=1e-10)


class TestWrapAngles:
    def test_identity(self):
        out = kf.wrap_angles([0.0, 0.0, 0.0, 0.0])
        assert np.array_equal(out, np.zeros(4))

    def test_modular_cases(self):
        out = kf.wrap_angles([3 * math.pi, -math.pi, math.pi, 2 * math.pi])
        assert out == pytest.approx([math.pi, math.pi, math.pi, 0.0])

    def test_seven_radians(self):
        out = kf.wrap_angles([7.0, 0.0, 0.0, 0.0])
        assert out[0] == pytest.approx(7.0 - 2 * math.pi, abs=1e-15)

    def test_nonfinite_rejected(self):
        with pytest.raises(NonFiniteAngleError):
            kf.wrap_angles([0.0, math.nan])
        with pytest.raises(NonFiniteAngleError):
            kf.wrap_angles([math.inf, 0.0])

    @given(st.lists(st.floats(min_value=-100.0, max_value=100.0), min_size=1, max_size=16))
    def test_range_and_multiple_of_two_pi(self, values):
        out = kf.wrap_angles(values)
        assert np.all(out > -math.pi) and np.all(out <= math.pi)
        k = (out - np.asarray(values)) / (2 * math.pi)
        assert np.allclose(k, np.round(k), atol=1e-9)

    @given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=1, max_size=8))
    def test_idempotent_bitwise(self, values):
        once = kf.wrap_angles(values)
        twice = kf.wrap_angles(once)
        assert np.array_equal(once, twice)
