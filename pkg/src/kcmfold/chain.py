"""Rigid peptide-plane chain model: atom kinds, force-field parameters,
geometry constants, and the backbone topology builder.

Unit conventions used throughout the package:
    - lengths: angstroms
    - angles: radians (degrees are accepted only at the CLI/config boundary)
    - charges: elementary charge units
    - energies: kcal/mol

A chain with P peptide planes has 2N = 2(P + 1) dihedral degrees of freedom.
Joint j (1-based) rotates everything downstream of a backbone "spine" node
about a bond axis anchored at that node:

    node_0 = amino-group nitrogen fixed at the origin
    node_{2k-1} = alpha carbon of residue k
    node_{2k}   = backbone nitrogen of residue k+1
    node_{2N}   = lumped carboxyl carbon at the chain end

Odd joints rotate about N->C_alpha bonds, even joints about C_alpha->C'
bonds. Body vector j connects node_{j-1} to node_j; even-indexed body
vectors are virtual bonds that cross one rigid peptide plane. Every atom is
anchored at a spine node, with an optional fixed offset that rotates with
the cumulative transform of a chosen joint frame. The four in-plane atoms of
each plane (C', O, N, H) are placed by a per-plane linear combination of the
two spanning body vectors; the coefficients are the same for every plane of
a chain built from one geometry table.

The default geometry and parameter tables below are documented stand-ins
(ideal bond lengths/angles and representative amide partial charges / 12-6
well parameters). They are deliberately kept in two small tables so surveys
with other parameter sets only have to swap these out.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from .errors import MissingParameterError, NonFiniteAngleError, TopologyError

TWO_PI = 2.0 * math.pi

# Tolerance used to decide whether an offset is parallel to a joint axis when
# computing which joints actually move an atom.
_PARALLEL_TOL = 1e-9


class AtomKind(Enum):
    """Backbone atom roles. Each atom in a chain carries exactly one."""

    N = "N"
    H_N = "H_N"
    C_ALPHA = "C_alpha"
    H_ALPHA = "H_alpha"
    C = "C"
    O = "O"
    N_TERMINUS = "N_terminus"
    C_TERMINUS = "C_terminus"
    SIDE_PLACEHOLDER = "side_placeholder"


@dataclass(frozen=True)
class AtomParameters:
    """Nonbonded parameters for one atom kind.

    charge      partial charge, elementary-charge units
    vdw_radius  per-atom van der Waals radius (pair minimum is the sum), A
    well_depth  12-6 well depth, kcal/mol
    w_elec      dimensionless electrostatic weight (pair weight is the product)
    w_vdw       dimensionless van der Waals weight
    """

    charge: float
    vdw_radius: float
    well_depth: float
    w_elec: float = 1.0
    w_vdw: float = 1.0

    def __post_init__(self):
        if not self.vdw_radius > 0:
            raise ValueError(f"vdw_radius must be > 0, got {self.vdw_radius}")
        if self.well_depth < 0:
            raise ValueError(f"well_depth must be >= 0, got {self.well_depth}")
        if self.w_elec < 0 or self.w_vdw < 0:
            raise ValueError("interaction weights must be >= 0")


@dataclass(frozen=True)
class PeptideGeometry:
    """Bond lengths (A) and zero-position bond angles (rad) of the backbone.

    The defaults are the standard idealized values; they define the planar,
    fully extended zero-position conformation from which all body vectors
    and the per-plane placement coefficients are derived.
    """

    bond_n_ca: float = 1.47
    bond_ca_c: float = 1.53
    bond_c_n: float = 1.32
    bond_c_o: float = 1.24
    bond_n_h: float = 1.00
    bond_ca_h: float = 1.09
    bond_ca_side: float = 1.53
    angle_n_ca_c: float = math.radians(110.5)
    angle_ca_c_n: float = math.radians(116.5)
    angle_c_n_ca: float = math.radians(121.5)
    angle_ca_c_o: float = math.radians(121.0)
    angle_c_n_h: float = math.radians(119.0)

    def __post_init__(self):
        for name in ("bond_n_ca", "bond_ca_c", "bond_c_n", "bond_c_o",
                     "bond_n_h", "bond_ca_h", "bond_ca_side"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        for name in ("angle_n_ca_c", "angle_ca_c_n", "angle_c_n_ca",
                     "angle_ca_c_o", "angle_c_n_h"):
            ang = getattr(self, name)
            if not 0.0 < ang < math.pi:
                raise ValueError(f"{name} must lie in (0, pi)")

    @cached_property
    def plane_coefficients(self) -> np.ndarray:
        """(4, 2) coefficients placing the in-plane atoms C', O, N, H of a
        peptide plane as k1*b_even + k2*b_odd relative to the plane's first
        alpha carbon. Identical for every plane of a chain."""
        walk = _walk_zero_positions(self, 1)
        ca = walk["ca"][1]
        b_even = walk["n"][2] - ca
        b_odd = walk["ca"][2] - walk["n"][2]
        basis = np.column_stack([b_even[:2], b_odd[:2]])
        targets = [walk["c"][1], walk["o"][1], walk["n"][2], walk["h"][2]]
        coeffs = [np.linalg.solve(basis, (t - ca)[:2]) for t in targets]
        return np.array(coeffs)


def std_geometry() -> PeptideGeometry:
    """The built-in idealized backbone geometry."""
    return PeptideGeometry()


def std_parameters() -> dict[AtomKind, AtomParameters]:
    """Built-in nonbonded parameter table.

    Representative amide-backbone values (charges in e, radii in A, well
    depths in kcal/mol); not tied to any published force field release. The
    side-chain placeholder ships with zero interaction weights, i.e. a pure
    backbone model, but keeps nominal size parameters so it can be switched
    on from a config file.
    """
    return {
        AtomKind.N: AtomParameters(-0.4157, 1.824, 0.1700),
        AtomKind.H_N: AtomParameters(0.2719, 0.600, 0.0157),
        AtomKind.C_ALPHA: AtomParameters(0.0337, 1.908, 0.1094),
        AtomKind.H_ALPHA: AtomParameters(0.0823, 1.387, 0.0157),
        AtomKind.C: AtomParameters(0.5973, 1.908, 0.0860),
        AtomKind.O: AtomParameters(-0.5679, 1.6612, 0.2100),
        AtomKind.N_TERMINUS: AtomParameters(-0.2000, 1.824, 0.1700),
        AtomKind.C_TERMINUS: AtomParameters(0.2000, 1.908, 0.0860),
        AtomKind.SIDE_PLACEHOLDER: AtomParameters(0.0, 2.000, 0.0600, w_elec=0.0, w_vdw=0.0),
    }


@dataclass(frozen=True)
class Atom:
    """One atom of the chain.

    anchor  spine node index whose position the atom rides on (0..2N)
    frame   joint index whose cumulative rotation carries the offset (0..2N)
    offset  zero-position displacement from the anchor node
    dep     highest joint index whose angle actually moves this atom (0 = none)
    """

    kind: AtomKind
    params: AtomParameters
    plane: int
    anchor: int
    frame: int
    offset: tuple[float, float, float]
    dep: int


@dataclass(frozen=True, eq=False)
class ChainTopology:
    """Immutable description of a backbone chain in its zero position."""

    num_dihedrals: int
    num_planes: int
    zero_unit_vectors: np.ndarray
    zero_body_vectors: np.ndarray
    atoms: tuple[Atom, ...]
    bonds: tuple[tuple[int, int], ...]
    exclusion_set: frozenset[tuple[int, int]]
    plane_atoms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        nj = self.num_dihedrals
        if nj != 2 * (self.num_planes + 1) or nj < 4 or nj % 2:
            raise TopologyError(
                f"{nj} dihedrals is inconsistent with {self.num_planes} peptide planes")
        norms = np.linalg.norm(self.zero_unit_vectors, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise TopologyError("zero-position unit vectors must have unit length")
        set_ = object.__setattr__
        set_(self, "anchor_idx", np.array([a.anchor for a in self.atoms], dtype=np.int32))
        set_(self, "frame_idx", np.array([a.frame for a in self.atoms], dtype=np.int32))
        set_(self, "offsets", np.array([a.offset for a in self.atoms], dtype=float))
        set_(self, "dep", np.array([a.dep for a in self.atoms], dtype=np.int32))
        set_(self, "charges", np.array([a.params.charge for a in self.atoms]))
        set_(self, "vdw_radii", np.array([a.params.vdw_radius for a in self.atoms]))
        set_(self, "well_depths", np.array([a.params.well_depth for a in self.atoms]))
        set_(self, "w_elec", np.array([a.params.w_elec for a in self.atoms]))
        set_(self, "w_vdw", np.array([a.params.w_vdw for a in self.atoms]))
        set_(self, "_pair_cache", {})
        for arr_name in ("zero_unit_vectors", "zero_body_vectors", "anchor_idx",
                         "frame_idx", "offsets", "dep", "charges", "vdw_radii",
                         "well_depths", "w_elec", "w_vdw"):
            getattr(self, arr_name).setflags(write=False)

    @property
    def num_atoms(self) -> int:
        return len(self.atoms)


def wrap_angles(theta) -> np.ndarray:
    """Map every dihedral into (-pi, pi] by adding multiples of 2*pi.

    Components already inside the interval are returned untouched, which
    makes the operation idempotent bit-for-bit.
    """
    arr = np.array(theta, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteAngleError("dihedral vector contains NaN or infinity")
    mask = (arr > math.pi) | (arr <= -math.pi)
    if np.any(mask):
        arr[mask] = math.pi - np.mod(math.pi - arr[mask], TWO_PI)
    return arr


def _rot_xy(v: np.ndarray, ang: float) -> np.ndarray:
    c, s = math.cos(ang), math.sin(ang)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1], 0.0])


def _walk_zero_positions(geom: PeptideGeometry, num_planes: int) -> dict:
    """Trace the zero-position chain as a planar trans zig-zag in the xy
    plane and hang the H-alpha / side-chain placeholders out of plane in
    tetrahedral directions. Returns per-residue position lists (1-based)."""
    n_res = num_planes + 1
    n_pos: list = [None] * (n_res + 2)
    ca_pos: list = [None] * (n_res + 1)
    c_pos: list = [None] * (num_planes + 1)
    o_pos: list = [None] * (num_planes + 1)
    h_pos: list = [None] * (n_res + 1)
    ha_pos: list = [None] * (n_res + 1)
    side_pos: list = [None] * (n_res + 1)

    d = np.array([1.0, 0.0, 0.0])
    sign = 1.0  # strict left/right alternation, one turn per backbone vertex
    n_pos[1] = np.zeros(3)
    ca_pos[1] = n_pos[1] + geom.bond_n_ca * d
    for k in range(1, num_planes + 1):
        d = _rot_xy(d, sign * (math.pi - geom.angle_n_ca_c))
        sign = -sign
        c_pos[k] = ca_pos[k] + geom.bond_ca_c * d
        d_in = d
        d = _rot_xy(d, sign * (math.pi - geom.angle_ca_c_n))
        o_pos[k] = c_pos[k] + geom.bond_c_o * _rot_xy(d_in, -sign * (math.pi - geom.angle_ca_c_o))
        sign = -sign
        n_pos[k + 1] = c_pos[k] + geom.bond_c_n * d
        d_in = d
        d = _rot_xy(d, sign * (math.pi - geom.angle_c_n_ca))
        h_pos[k + 1] = n_pos[k + 1] + geom.bond_n_h * _rot_xy(d_in, -sign * (math.pi - geom.angle_c_n_h))
        sign = -sign
        ca_pos[k + 1] = n_pos[k + 1] + geom.bond_n_ca * d
    d = _rot_xy(d, sign * (math.pi - geom.angle_n_ca_c))
    cterm = ca_pos[n_res] + geom.bond_ca_c * d

    z = np.array([0.0, 0.0, 1.0])
    sqrt2 = math.sqrt(2.0)
    for r in range(1, n_res + 1):
        a = n_pos[r] - ca_pos[r]
        b = (c_pos[r] if r <= num_planes else cterm) - ca_pos[r]
        a = a / np.linalg.norm(a)
        b = b / np.linalg.norm(b)
        e1 = -(a + b)
        e1 = e1 / np.linalg.norm(e1)
        up = (e1 + sqrt2 * z) / math.sqrt(3.0)
        down = (e1 - sqrt2 * z) / math.sqrt(3.0)
        ha_pos[r] = ca_pos[r] + geom.bond_ca_h * up
        side_pos[r] = ca_pos[r] + geom.bond_ca_side * down

    return {"n": n_pos, "ca": ca_pos, "c": c_pos, "o": o_pos, "h": h_pos,
            "ha": ha_pos, "side": side_pos, "cterm": cterm}


def _reduce_frame(frame: int, offset: np.ndarray, u0: np.ndarray) -> int:
    """Lower a frame index past every joint whose axis is parallel to the
    offset: rotating a vector about itself does not move it."""
    v = np.asarray(offset, dtype=float)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return 0
    f = frame
    while f >= 1 and np.linalg.norm(np.cross(v, u0[f - 1])) <= _PARALLEL_TOL * nv:
        f -= 1
    return f


def build_backbone(num_planes: int,
                   geometry: PeptideGeometry | None = None,
                   params: dict[AtomKind, AtomParameters] | None = None) -> ChainTopology:
    """Construct a backbone chain of ``num_planes`` rigid peptide planes in
    its zero-position configuration.

    The resulting topology has 2*(num_planes + 1) dihedrals. The amino group
    is lumped into a single N-terminus atom fixed at the origin and bonded to
    the first alpha carbon; the carboxyl group is a single C-terminus atom
    bonded to the last alpha carbon. Every alpha carbon additionally carries
    one hydrogen and one side-chain placeholder.
    """
    try:
        num_planes = operator.index(num_planes)
    except TypeError:
        raise TopologyError(f"num_planes must be an integer, got {num_planes!r}") from None
    if num_planes < 1:
        raise TopologyError(f"a chain needs at least one peptide plane, got {num_planes}")
    geom = geometry if geometry is not None else std_geometry()
    table = params if params is not None else std_parameters()

    n_res = num_planes + 1
    nj = 2 * n_res
    walk = _walk_zero_positions(geom, num_planes)
    n_pos, ca_pos, c_pos = walk["n"], walk["ca"], walk["c"]
    o_pos, h_pos, ha_pos, side_pos = walk["o"], walk["h"], walk["ha"], walk["side"]
    cterm = walk["cterm"]

    # Spine nodes: origin nitrogen, then alternating CA / N, closing on the
    # carboxyl carbon.
    nodes = np.empty((nj + 1, 3))
    nodes[0] = n_pos[1]
    for r in range(1, n_res + 1):
        nodes[2 * r - 1] = ca_pos[r]
        if r <= num_planes:
            nodes[2 * r] = n_pos[r + 1]
    nodes[nj] = cterm

    b0 = np.diff(nodes, axis=0)
    u0 = np.empty((nj, 3))
    u0[0] = b0[0]
    for k in range(1, num_planes + 1):
        u0[2 * k - 1] = c_pos[k] - ca_pos[k]
        u0[2 * k] = b0[2 * k]
    u0[nj - 1] = b0[nj - 1]
    u0 /= np.linalg.norm(u0, axis=1)[:, None]

    def lookup(kind: AtomKind) -> AtomParameters:
        try:
            return table[kind]
        except KeyError:
            raise MissingParameterError(kind.value) from None

    node_dep = np.zeros(nj + 1, dtype=int)
    for j in range(1, nj + 1):
        node_dep[j] = max(node_dep[j - 1], _reduce_frame(j, b0[j - 1], u0))

    atoms: list[Atom] = []
    index: dict[tuple[str, int], int] = {}

    def add(kind: AtomKind, plane: int, anchor: int, frame: int,
            position: np.ndarray, key: tuple[str, int]):
        offset = position - nodes[anchor]
        if np.linalg.norm(offset) < 1e-12:
            offset = np.zeros(3)
            dep = int(node_dep[anchor])
        else:
            dep = max(int(node_dep[anchor]), _reduce_frame(frame, offset, u0))
        index[key] = len(atoms)
        atoms.append(Atom(kind, lookup(kind), plane, anchor, frame,
                          tuple(float(x) for x in offset), dep))

    for r in range(1, n_res + 1):
        plane = min(r, num_planes)
        if r == 1:
            add(AtomKind.N_TERMINUS, 1, 0, 0, n_pos[1], ("N", 1))
        else:
            add(AtomKind.N, r - 1, 2 * (r - 1), 2 * (r - 1), n_pos[r], ("N", r))
            add(AtomKind.H_N, r - 1, 2 * (r - 1), 2 * (r - 1), h_pos[r], ("H", r))
        add(AtomKind.C_ALPHA, plane, 2 * r - 1, 2 * r - 1, ca_pos[r], ("CA", r))
        add(AtomKind.H_ALPHA, plane, 2 * r - 1, 2 * r - 1, ha_pos[r], ("HA", r))
        add(AtomKind.SIDE_PLACEHOLDER, plane, 2 * r - 1, 2 * r - 1, side_pos[r], ("SR", r))
        if r <= num_planes:
            add(AtomKind.C, r, 2 * r - 1, 2 * r, c_pos[r], ("C", r))
            add(AtomKind.O, r, 2 * r - 1, 2 * r, o_pos[r], ("O", r))
    add(AtomKind.C_TERMINUS, num_planes, nj, nj, cterm, ("C", n_res))

    bonds: list[tuple[int, int]] = []

    def bond(a: tuple[str, int], b: tuple[str, int]):
        i, j = index[a], index[b]
        bonds.append((min(i, j), max(i, j)))

    bond(("N", 1), ("CA", 1))
    for r in range(1, n_res + 1):
        bond(("CA", r), ("HA", r))
        bond(("CA", r), ("SR", r))
        bond(("CA", r), ("C", r))
        if r <= num_planes:
            bond(("C", r), ("O", r))
            bond(("C", r), ("N", r + 1))
            bond(("N", r + 1), ("H", r + 1))
            bond(("N", r + 1), ("CA", r + 1))

    adjacency: dict[int, set[int]] = {i: set() for i in range(len(atoms))}
    for i, j in bonds:
        adjacency[i].add(j)
        adjacency[j].add(i)
    excluded: set[tuple[int, int]] = set()
    for i in range(len(atoms)):
        for j in adjacency[i]:
            if i < j:
                excluded.add((i, j))
            for k in adjacency[j]:
                if k != i:
                    excluded.add((min(i, k), max(i, k)))

    plane_members = tuple(
        (index[("CA", k)], index[("C", k)], index[("O", k)],
         index[("N", k + 1)], index[("H", k + 1)], index[("CA", k + 1)])
        for k in range(1, num_planes + 1))

    return ChainTopology(
        num_dihedrals=nj,
        num_planes=num_planes,
        zero_unit_vectors=u0,
        zero_body_vectors=b0,
        atoms=tuple(atoms),
        bonds=tuple(sorted(bonds)),
        exclusion_set=frozenset(excluded),
        plane_atoms=plane_members,
    )
