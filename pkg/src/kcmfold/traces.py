"""Output writers and readers: energy traces (CSV) and PDB snapshots.

Trace files have the fixed header ``k,elec,vdw,total,tau_norm_2,
tau_norm_inf,kappa_k`` and one row per recorded iteration; floats are
printed with 17 significant digits so a parse round-trips to the exact
binary value. Snapshots are PDB-compatible fixed-column ATOM records, one
MODEL block per snapshot index, residue number = owning plane index.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chain import AtomKind, ChainTopology
from .errors import KcmfoldError
from .kinematics import ChainPose
from .solvers import FoldingTrajectory

TRACE_HEADER = "k,elec,vdw,total,tau_norm_2,tau_norm_inf,kappa_k"

_PDB_NAMES = {
    AtomKind.N: ("N", "N"),
    AtomKind.H_N: ("H", "H"),
    AtomKind.C_ALPHA: ("CA", "C"),
    AtomKind.H_ALPHA: ("HA", "H"),
    AtomKind.C: ("C", "C"),
    AtomKind.O: ("O", "O"),
    AtomKind.N_TERMINUS: ("N", "N"),
    AtomKind.C_TERMINUS: ("C", "C"),
    AtomKind.SIDE_PLACEHOLDER: ("CB", "C"),
}


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def write_energy_trace(trajectory: FoldingTrajectory, path: str) -> None:
    """Write one CSV row per recorded iteration."""
    if not trajectory.records:
        raise KcmfoldError("trajectory has no records to write")
    lines = [TRACE_HEADER]
    for rec in trajectory.records:
        lines.append(",".join([
            str(rec.k),
            _g17(rec.energy.elec),
            _g17(rec.energy.vdw),
            _g17(rec.energy.total),
            _g17(rec.tau_norm_2),
            _g17(rec.tau_norm_inf),
            _g17(rec.kappa_k),
        ]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class TraceRow:
    k: int
    elec: float
    vdw: float
    total: float
    tau_norm_2: float
    tau_norm_inf: float
    kappa_k: float


def read_energy_trace(path: str) -> list[TraceRow]:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != TRACE_HEADER:
            raise KcmfoldError(f"{path}: unexpected trace header {header!r}")
        rows = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 7:
                raise KcmfoldError(f"{path}: expected 7 columns, got {len(parts)}")
            rows.append(TraceRow(int(parts[0]), *(float(p) for p in parts[1:])))
    return rows


def write_snapshot(chain_pose: ChainPose, topology: ChainTopology, path: str,
                   index: int, append: bool = False) -> None:
    """Write (or append) one MODEL block of fixed-column ATOM records."""
    lines = [f"MODEL     {index:>4d}"]
    for serial, (atom, xyz) in enumerate(zip(topology.atoms, chain_pose.atom_positions), 1):
        name, element = _PDB_NAMES[atom.kind]
        name_field = name if len(name) >= 4 else f" {name}".ljust(4)
        lines.append(
            f"ATOM  {serial:>5d} {name_field}"
            f" ALA A{atom.plane:>4d}    "
            f"{xyz[0]:8.3f}{xyz[1]:8.3f}{xyz[2]:8.3f}{1.0:6.2f}{0.0:6.2f}"
            f"          {element:>2s}"
        )
    lines.append("ENDMDL")
    with open(path, "a" if append else "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_snapshot_coordinates(path: str) -> list[tuple[float, float, float]]:
    """Coordinates of the first MODEL block, for round-trip checks."""
    coords = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("ENDMDL"):
                break
            if line.startswith("ATOM"):
                coords.append((float(line[30:38]), float(line[38:46]), float(line[46:54])))
    return coords
