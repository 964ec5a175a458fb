"""Experiment configuration: JSON schema, validation, presets.

A config file is a single JSON document with nested sections::

    {
      "schema_version": 1,
      "chain": {"num_planes": 15, "geometry": {}, "parameters": "default"},
      "initial_conformation": {"preset": "pre_coiled_alpha", "seed": 101,
                               "noise_deg": 20.0},
      "solver": {"mode": "sgd", "kappa0": 0.01, "gamma0": 0.99,
                 "tau_tol": 1e-6, "max_iters": 600, "record_every": 1,
                 "store_tau_signs": false},
      "force_field": {"coulomb_constant": 332.0636, "dielectric": 1.0,
                      "apply_exclusions": true, "cutoff": null},
      "output": {"directory": "out", "snapshot_stride": 0,
                 "formats": ["trace", "pdb"]}
    }

Every section and key is optional except chain.num_planes; defaults are
filled on load and echoed back by dump_config so a normalized copy of the
effective configuration can be archived with the outputs. Exactly one
initial-conformation source must be given: an explicit dihedral list
("dihedrals_deg" or "dihedrals_rad"), the "pre_coiled_alpha" preset, or
"random". Angles in config files are degrees unless the key says otherwise;
they are converted to radians on load.

geometry overrides use the keys of PeptideGeometry with "angle_*" entries
given in degrees; "parameters" is either the built-in table name "default"
or a path (relative to the config file) to a JSON object mapping atom kind
names to {charge, vdw_radius, well_depth, w_elec, w_vdw}.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .chain import (
    AtomKind,
    AtomParameters,
    ChainTopology,
    PeptideGeometry,
    build_backbone,
    wrap_angles,
)
from .energy import COULOMB_CONSTANT, ForceFieldConfig
from .errors import ConfigError
from .solvers import SolverConfig

SCHEMA_VERSION = 1

# Near-helical base angles for the pre-coiled preset: the zero position is a
# fully extended trans chain, so a helix-like state sits at +123 deg on the
# odd (N->CA) joints and +133 deg on the even (CA->C') joints.
PRESET_PHI_OFFSET = math.radians(123.0)
PRESET_PSI_OFFSET = math.radians(133.0)

_GEOMETRY_KEYS = (
    "bond_n_ca", "bond_ca_c", "bond_c_n", "bond_c_o", "bond_n_h",
    "bond_ca_h", "bond_ca_side",
    "angle_n_ca_c", "angle_ca_c_n", "angle_c_n_ca", "angle_ca_c_o", "angle_c_n_h",
)
_INITIAL_SOURCES = ("dihedrals_deg", "dihedrals_rad", "preset", "random")


@dataclass(frozen=True)
class ChainSection:
    num_planes: int
    geometry: tuple[tuple[str, float], ...] = ()  # overrides, angles in degrees
    parameters: str = "default"


@dataclass(frozen=True)
class InitialSection:
    source: str  # one of _INITIAL_SOURCES
    dihedrals: tuple[float, ...] | None = None  # radians, for explicit sources
    preset: str | None = None
    seed: int = 101
    noise_deg: float = 20.0
    scale_deg: float = 60.0


@dataclass(frozen=True)
class OutputSection:
    directory: str = "out"
    snapshot_stride: int = 0  # 0 = final snapshot only
    formats: tuple[str, ...] = ("trace", "pdb")


@dataclass(frozen=True)
class ExperimentConfig:
    chain: ChainSection
    initial: InitialSection
    solver: SolverConfig = field(default_factory=SolverConfig)
    force_field: ForceFieldConfig = field(default_factory=ForceFieldConfig)
    output: OutputSection = field(default_factory=OutputSection)
    schema_version: int = SCHEMA_VERSION


def _require_keys(section: dict, allowed: set[str], where: str):
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where!r} section")


def _parse_chain(raw: dict, base_dir: str) -> ChainSection:
    _require_keys(raw, {"num_planes", "geometry", "parameters"}, "chain")
    if "num_planes" not in raw:
        raise ConfigError("chain.num_planes is required")
    num_planes = raw["num_planes"]
    if not isinstance(num_planes, int) or num_planes < 1:
        raise ConfigError(f"chain.num_planes must be an integer >= 1, got {num_planes!r}")
    geometry = raw.get("geometry", {})
    if not isinstance(geometry, dict):
        raise ConfigError("chain.geometry must be an object of numeric overrides")
    _require_keys(geometry, set(_GEOMETRY_KEYS), "chain.geometry")
    geom_items = tuple(sorted((k, float(v)) for k, v in geometry.items()))
    parameters = raw.get("parameters", "default")
    if parameters != "default":
        path = parameters if os.path.isabs(parameters) else os.path.join(base_dir, parameters)
        if not os.path.exists(path):
            raise ConfigError(f"parameter table {parameters!r} not found at {path!r}")
        parameters = path
    return ChainSection(num_planes=num_planes, geometry=geom_items, parameters=parameters)


def _parse_initial(raw: dict) -> InitialSection:
    _require_keys(raw, {"dihedrals_deg", "dihedrals_rad", "preset", "random",
                        "seed", "noise_deg", "scale_deg"}, "initial_conformation")
    sources = [k for k in _INITIAL_SOURCES if k in raw]
    if len(sources) != 1:
        raise ConfigError(
            "initial_conformation must specify exactly one of "
            f"{_INITIAL_SOURCES}, got {sources or 'none'}")
    source = sources[0]
    dihedrals = None
    preset = None
    seed = int(raw.get("seed", 101))
    noise_deg = float(raw.get("noise_deg", 20.0))
    scale_deg = float(raw.get("scale_deg", 60.0))
    if source == "dihedrals_deg":
        # normalized to radians so dumps are canonical
        dihedrals = tuple(math.radians(float(x)) for x in raw[source])
        source = "dihedrals_rad"
    elif source == "dihedrals_rad":
        dihedrals = tuple(float(x) for x in raw[source])
    elif source == "preset":
        preset = raw["preset"]
        if preset != "pre_coiled_alpha":
            raise ConfigError(f"unknown preset {preset!r}; available: 'pre_coiled_alpha'")
    else:  # random
        sub = raw["random"]
        if not isinstance(sub, dict):
            raise ConfigError("initial_conformation.random must be an object")
        _require_keys(sub, {"seed", "scale_deg"}, "initial_conformation.random")
        seed = int(sub.get("seed", seed))
        scale_deg = float(sub.get("scale_deg", scale_deg))
    return InitialSection(source=source, dihedrals=dihedrals, preset=preset,
                          seed=seed, noise_deg=noise_deg, scale_deg=scale_deg)


def _parse_solver(raw: dict) -> SolverConfig:
    _require_keys(raw, {"mode", "kappa0", "gamma0", "tau_tol", "max_iters",
                        "record_every", "store_tau_signs"}, "solver")
    try:
        return SolverConfig(
            mode=raw.get("mode", "sgd"),
            kappa0=float(raw.get("kappa0", 0.01)),
            gamma0=float(raw.get("gamma0", 0.99)),
            tau_tol=float(raw.get("tau_tol", 1e-6)),
            max_iters=int(raw.get("max_iters", 600)),
            record_every=int(raw.get("record_every", 1)),
            store_tau_signs=bool(raw.get("store_tau_signs", False)),
        )
    except ValueError as exc:
        raise ConfigError(f"solver: {exc}") from exc


def _parse_force_field(raw: dict) -> ForceFieldConfig:
    _require_keys(raw, {"coulomb_constant", "dielectric", "apply_exclusions",
                        "cutoff"}, "force_field")
    cutoff = raw.get("cutoff")
    try:
        return ForceFieldConfig(
            coulomb_constant=float(raw.get("coulomb_constant", COULOMB_CONSTANT)),
            dielectric=float(raw.get("dielectric", 1.0)),
            apply_exclusions=bool(raw.get("apply_exclusions", True)),
            cutoff=None if cutoff is None else float(cutoff),
        )
    except ValueError as exc:
        raise ConfigError(f"force_field: {exc}") from exc


def _parse_output(raw: dict) -> OutputSection:
    _require_keys(raw, {"directory", "snapshot_stride", "formats"}, "output")
    stride = int(raw.get("snapshot_stride", 0))
    if stride < 0:
        raise ConfigError("output.snapshot_stride must be >= 0")
    formats = tuple(raw.get("formats", ("trace", "pdb")))
    unknown = set(formats) - {"trace", "pdb"}
    if unknown:
        raise ConfigError(f"unknown output format(s) {sorted(unknown)}")
    return OutputSection(directory=str(raw.get("directory", "out")),
                         snapshot_stride=stride, formats=formats)


def parse_config(doc: dict, base_dir: str = ".") -> ExperimentConfig:
    """Validate a raw JSON document and fill defaults."""
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    _require_keys(doc, {"schema_version", "chain", "initial_conformation",
                        "solver", "force_field", "output"}, "top-level")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    if "chain" not in doc:
        raise ConfigError("config requires a 'chain' section")
    if "initial_conformation" not in doc:
        raise ConfigError("config requires an 'initial_conformation' section")
    return ExperimentConfig(
        chain=_parse_chain(doc["chain"], base_dir),
        initial=_parse_initial(doc["initial_conformation"]),
        solver=_parse_solver(doc.get("solver", {})),
        force_field=_parse_force_field(doc.get("force_field", {})),
        output=_parse_output(doc.get("output", {})),
        schema_version=version,
    )


def load_config(path: str) -> ExperimentConfig:
    """Load, validate, and normalize an experiment config file."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: parse error at line {exc.lineno}, column {exc.colno}: "
                          f"{exc.msg}") from exc
    return parse_config(doc, base_dir=os.path.dirname(os.path.abspath(path)))


def dump_config(cfg: ExperimentConfig) -> dict:
    """Normalized document with every default made explicit; loading the
    dump reproduces the config exactly."""
    initial: dict = {"seed": cfg.initial.seed, "noise_deg": cfg.initial.noise_deg,
                     "scale_deg": cfg.initial.scale_deg}
    if cfg.initial.source == "preset":
        initial["preset"] = cfg.initial.preset
    elif cfg.initial.source == "random":
        initial = {"random": {"seed": cfg.initial.seed, "scale_deg": cfg.initial.scale_deg},
                   "noise_deg": cfg.initial.noise_deg}
    else:
        initial["dihedrals_rad"] = list(cfg.initial.dihedrals)
    return {
        "schema_version": cfg.schema_version,
        "chain": {
            "num_planes": cfg.chain.num_planes,
            "geometry": {k: v for k, v in cfg.chain.geometry},
            "parameters": cfg.chain.parameters,
        },
        "initial_conformation": initial,
        "solver": {
            "mode": cfg.solver.mode,
            "kappa0": cfg.solver.kappa0,
            "gamma0": cfg.solver.gamma0,
            "tau_tol": cfg.solver.tau_tol,
            "max_iters": cfg.solver.max_iters,
            "record_every": cfg.solver.record_every,
            "store_tau_signs": cfg.solver.store_tau_signs,
        },
        "force_field": {
            "coulomb_constant": cfg.force_field.coulomb_constant,
            "dielectric": cfg.force_field.dielectric,
            "apply_exclusions": cfg.force_field.apply_exclusions,
            "cutoff": cfg.force_field.cutoff,
        },
        "output": {
            "directory": cfg.output.directory,
            "snapshot_stride": cfg.output.snapshot_stride,
            "formats": list(cfg.output.formats),
        },
    }


def dump_config_text(cfg: ExperimentConfig) -> str:
    return json.dumps(dump_config(cfg), indent=2, sort_keys=True) + "\n"


def _load_parameter_table(path: str) -> dict[AtomKind, AtomParameters]:
    with open(path) as fh:
        doc = json.load(fh)
    by_value = {kind.value: kind for kind in AtomKind}
    table = {}
    for name, entry in doc.items():
        if name not in by_value:
            raise ConfigError(f"parameter table {path!r}: unknown atom kind {name!r}")
        try:
            table[by_value[name]] = AtomParameters(
                charge=float(entry["charge"]),
                vdw_radius=float(entry["vdw_radius"]),
                well_depth=float(entry["well_depth"]),
                w_elec=float(entry.get("w_elec", 1.0)),
                w_vdw=float(entry.get("w_vdw", 1.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"parameter table {path!r}, kind {name!r}: {exc}") from exc
    return table


def build_topology(cfg: ExperimentConfig) -> ChainTopology:
    """Construct the chain described by the config's chain section."""
    overrides = {}
    for key, value in cfg.chain.geometry:
        overrides[key] = math.radians(value) if key.startswith("angle_") else value
    geometry = PeptideGeometry(**overrides) if overrides else None
    params = None
    if cfg.chain.parameters != "default":
        params = _load_parameter_table(cfg.chain.parameters)
    return build_backbone(cfg.chain.num_planes, geometry=geometry, params=params)


def preset_pre_coiled_alpha(num_dihedrals: int, seed: int, noise_deg: float) -> np.ndarray:
    """Near-helical initial conformation: alternating helix offsets plus a
    seeded uniform perturbation of +-noise_deg."""
    base = np.empty(num_dihedrals)
    base[0::2] = PRESET_PHI_OFFSET
    base[1::2] = PRESET_PSI_OFFSET
    rng = np.random.default_rng(seed)
    noise = rng.uniform(-math.radians(noise_deg), math.radians(noise_deg), num_dihedrals)
    return wrap_angles(base + noise)


def resolve_initial_theta(cfg: ExperimentConfig, topology: ChainTopology) -> np.ndarray:
    """Initial dihedral vector for the experiment, in radians."""
    nj = topology.num_dihedrals
    init = cfg.initial
    if init.source in ("dihedrals_deg", "dihedrals_rad"):
        theta = np.asarray(init.dihedrals, dtype=float)
        if theta.shape[0] != nj:
            raise ConfigError(
                f"initial conformation has {theta.shape[0]} angles, chain needs {nj}")
        return wrap_angles(theta)
    if init.source == "preset":
        return preset_pre_coiled_alpha(nj, init.seed, init.noise_deg)
    rng = np.random.default_rng(init.seed)
    scale = math.radians(init.scale_deg)
    return wrap_angles(rng.uniform(-scale, scale, nj))
