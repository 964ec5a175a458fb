"""kcmfold: kinetostatic compliance folding of protein backbone chains.

Backbone chains are modeled as serial linkages of rigid peptide planes whose
dihedral angles relax under interatomic torques. The package computes the
aggregated free energy (Coulomb + van der Waals) and its dihedral-space
torque image, and minimizes it with either a normalized-torque iteration or
sign descent with a geometrically decaying step size.
"""

from .chain import (
    Atom,
    AtomKind,
    AtomParameters,
    ChainTopology,
    PeptideGeometry,
    build_backbone,
    std_geometry,
    std_parameters,
    wrap_angles,
)
from .config import (
    ExperimentConfig,
    build_topology,
    dump_config,
    load_config,
    preset_pre_coiled_alpha,
    resolve_initial_theta,
)
from .energy import (
    COULOMB_CONSTANT,
    EnergyBreakdown,
    ForceFieldConfig,
    atomic_forces,
    energy_and_torque,
    free_energy,
    pair_elec_energy,
    pair_vdw_energy,
    torque,
)
from .experiment import (
    ComparisonReport,
    ExperimentResult,
    oscillation_score,
    run_compare,
    run_experiment,
    summarize,
    write_outputs,
)
from .kinematics import ChainPose, jacobian_torque, pose, rotation_matrix
from .solvers import (
    FoldingTrajectory,
    IterationRecord,
    MoulayReport,
    SolverConfig,
    check_moulay_conditions,
    conventional_step,
    run_folding,
    schedule_geometric,
    sgd_step,
)
from .traces import read_energy_trace, write_energy_trace, write_snapshot

__version__ = "0.1.0"
