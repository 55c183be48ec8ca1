"""Run configuration: TOML parsing, strict validation, and semantic hashing.

The config is a single TOML file with a versioned schema.  Unknown keys are
hard errors so a typo in a physics parameter cannot silently fall back to a
default.  The semantic hash covers every field that affects computed values
(everything except the output directory and format list), so it changes iff
a semantic field changes.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import tomli

from .errors import ConfigError
from .model import MU_B_MEV_PER_T, LatticeSpec, ModelParams

SCHEMA_VERSION = 1

_KNOWN = {
    "": {"version", "probe_mode", "model", "cavity", "transmon", "sweep",
         "entanglement", "invert", "output"},
    "model": {"lattice", "J", "Kz", "S", "field_meV", "field_T"},
    "cavity": {"A0", "omega_c", "d", "phase_kr"},
    "transmon": {"E_C", "E_J", "omega_q"},
    "sweep": {"waypoints", "points", "include_zero_field"},
    "entanglement": {"pairs", "r_max", "r_points", "delta_min", "delta_max",
                     "delta_points"},
    "invert": {"f_measured", "lam", "omega_q", "omega_c", "phi"},
    "output": {"directory", "formats", "log_base"},
}


def _reject_unknown(table: dict, section: str):
    allowed = _KNOWN[section]
    for key in table:
        if key not in allowed:
            where = f"[{section}]" if section else "top level"
            raise ConfigError(f"unknown key {key!r} at {where}; "
                              f"allowed: {sorted(allowed)}")


def _require(table: dict, section: str, key: str):
    if key not in table:
        raise ConfigError(f"missing required key {key!r} in [{section}]")
    return table[key]


@dataclass(frozen=True)
class SweepSpec:
    waypoints: tuple
    points: tuple
    include_zero_field: bool = False

    def segments(self):
        return [(self.waypoints[i], self.waypoints[i + 1], self.points[i])
                for i in range(len(self.waypoints) - 1)]


@dataclass(frozen=True)
class CavitySpec:
    A0: float
    omega_c: float
    d: float
    phase_kr: float = 0.0


@dataclass(frozen=True)
class TransmonSpec:
    E_C: float | None = None
    E_J: float | None = None
    omega_q: float | None = None


@dataclass(frozen=True)
class EntanglementSpec:
    pairs: tuple
    r_max: float | None = None
    r_points: int | None = None
    delta_min: float | None = None
    delta_max: float | None = None
    delta_points: int | None = None

    @property
    def by_delta(self) -> bool:
        return self.delta_points is not None


@dataclass(frozen=True)
class InvertSpec:
    lam: float
    omega_q: float
    omega_c: float
    phi: float
    f_measured: float | None = None


@dataclass(frozen=True)
class OutputSpec:
    directory: str = "out"
    formats: tuple = ("csv", "json")
    log_base: str = "e"

    @property
    def entropy_base(self) -> float | None:
        return None if self.log_base == "e" else 2.0


@dataclass(frozen=True)
class RunConfig:
    probe_mode: str = "alpha"
    model: ModelParams | None = None
    cavity: CavitySpec | None = None
    transmon: TransmonSpec | None = None
    sweep: SweepSpec | None = None
    entanglement: EntanglementSpec | None = None
    invert: InvertSpec | None = None
    output: OutputSpec = field(default_factory=OutputSpec)
    semantic: dict = field(default_factory=dict, repr=False)

    def require(self, *sections: str) -> "RunConfig":
        for name in sections:
            if getattr(self, name) is None:
                raise ConfigError(f"config section [{name}] is required "
                                  "for this command")
        return self


def _parse_model(table: dict) -> ModelParams:
    _reject_unknown(table, "model")
    lattice = LatticeSpec(_require(table, "model", "lattice"))
    if "field_meV" in table and "field_T" in table:
        raise ConfigError("give the field as field_meV or field_T, not both")
    muB_B = float(table.get("field_meV", 0.0))
    if "field_T" in table:
        muB_B = MU_B_MEV_PER_T * float(table["field_T"])
    try:
        return ModelParams(lattice=lattice, J=float(_require(table, "model", "J")),
                           Kz=float(table.get("Kz", 0.0)), muB_B=muB_B,
                           S=float(table.get("S", 0.5)))
    except ValueError as exc:
        raise ConfigError(f"[model]: {exc}") from exc


def _parse_sweep(table: dict, dim: int | None) -> SweepSpec:
    _reject_unknown(table, "sweep")
    waypoints = _require(table, "sweep", "waypoints")
    if not isinstance(waypoints, list) or len(waypoints) < 2:
        raise ConfigError("[sweep] waypoints needs at least two wavevectors")
    for w in waypoints:
        if not isinstance(w, list) or (dim is not None and len(w) != dim):
            raise ConfigError(
                f"[sweep] each waypoint must have {dim} components")
    points = table.get("points", 101)
    n_seg = len(waypoints) - 1
    if isinstance(points, int):
        points = [points] * n_seg
    if len(points) != n_seg or any(not isinstance(p, int) or p < 2 for p in points):
        raise ConfigError("[sweep] points must be an int >= 2 or one such "
                          "int per segment")
    return SweepSpec(waypoints=tuple(tuple(float(x) for x in w) for w in waypoints),
                     points=tuple(points),
                     include_zero_field=bool(table.get("include_zero_field", False)))


def _parse_cavity(table: dict) -> CavitySpec:
    _reject_unknown(table, "cavity")
    spec = CavitySpec(A0=float(_require(table, "cavity", "A0")),
                      omega_c=float(_require(table, "cavity", "omega_c")),
                      d=float(table.get("d", 0.0)),
                      phase_kr=float(table.get("phase_kr", 0.0)))
    if spec.A0 < 0 or spec.omega_c <= 0 or spec.d < 0:
        raise ConfigError("[cavity] A0, d must be >= 0 and omega_c > 0")
    return spec


def _parse_transmon(table: dict) -> TransmonSpec:
    _reject_unknown(table, "transmon")
    has_ecej = "E_C" in table or "E_J" in table
    has_wq = "omega_q" in table
    if has_ecej == has_wq:
        raise ConfigError("[transmon] give exactly one of {E_C, E_J} or omega_q")
    if has_ecej and not ("E_C" in table and "E_J" in table):
        raise ConfigError("[transmon] E_C and E_J must be given together")
    return TransmonSpec(E_C=table.get("E_C"), E_J=table.get("E_J"),
                        omega_q=table.get("omega_q"))


def _parse_entanglement(table: dict) -> EntanglementSpec:
    _reject_unknown(table, "entanglement")
    pairs = table.get("pairs", [[0, 0], [1, 0], [1, 1], [2, 2]])
    for p in pairs:
        if len(p) != 2 or any(not isinstance(v, int) or v < 0 for v in p):
            raise ConfigError("[entanglement] pairs must be nonneg int pairs")
    by_delta = "delta_points" in table
    by_r = "r_points" in table or not by_delta
    if by_delta and "r_points" in table:
        raise ConfigError("[entanglement] give an r grid or a delta grid, not both")
    spec = EntanglementSpec(
        pairs=tuple(tuple(p) for p in pairs),
        r_max=float(table.get("r_max", 2.0)) if by_r else None,
        r_points=int(table.get("r_points", 81)) if by_r else None,
        delta_min=float(table.get("delta_min", 0.1)) if by_delta else None,
        delta_max=float(table.get("delta_max", 3.0)) if by_delta else None,
        delta_points=int(table.get("delta_points")) if by_delta else None)
    if by_r and (spec.r_max <= 0 or spec.r_points < 2):
        raise ConfigError("[entanglement] r_max > 0 and r_points >= 2 required")
    if by_delta and not (0 < spec.delta_min <= spec.delta_max):
        raise ConfigError("[entanglement] need 0 < delta_min <= delta_max")
    return spec


def _parse_invert(table: dict) -> InvertSpec:
    _reject_unknown(table, "invert")
    phi_raw = str(_require(table, "invert", "phi"))
    if phi_raw not in {"0", "pi"}:
        raise ConfigError('[invert] phi must be "0" or "pi"')
    return InvertSpec(lam=float(_require(table, "invert", "lam")),
                      omega_q=float(_require(table, "invert", "omega_q")),
                      omega_c=float(_require(table, "invert", "omega_c")),
                      phi=0.0 if phi_raw == "0" else math.pi,
                      f_measured=table.get("f_measured"))


def _parse_output(table: dict) -> OutputSpec:
    _reject_unknown(table, "output")
    formats = tuple(table.get("formats", ["csv", "json"]))
    for fmt in formats:
        if fmt not in {"csv", "json"}:
            raise ConfigError(f"[output] unknown format {fmt!r}")
    log_base = str(table.get("log_base", "e"))
    if log_base not in {"e", "2"}:
        raise ConfigError('[output] log_base must be "e" or "2"')
    return OutputSpec(directory=str(table.get("directory", "out")),
                      formats=formats, log_base=log_base)


def load_config(path) -> RunConfig:
    """Parse and validate a TOML run configuration."""
    try:
        with open(path, "rb") as fh:
            raw = tomli.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"TOML syntax error in {path}: {exc}") from exc
    return parse_config(raw)


def parse_config(raw: dict) -> RunConfig:
    _reject_unknown(raw, "")
    version = raw.get("version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported config version {version}; "
                          f"this tool reads version {SCHEMA_VERSION}")
    probe_mode = raw.get("probe_mode", "alpha")
    if probe_mode not in {"alpha", "beta"}:
        raise ConfigError('probe_mode must be "alpha" or "beta"')
    model = _parse_model(raw["model"]) if "model" in raw else None
    dim = model.lattice.dim if model is not None else None
    cfg = RunConfig(
        probe_mode=probe_mode,
        model=model,
        cavity=_parse_cavity(raw["cavity"]) if "cavity" in raw else None,
        transmon=_parse_transmon(raw["transmon"]) if "transmon" in raw else None,
        sweep=_parse_sweep(raw["sweep"], dim) if "sweep" in raw else None,
        entanglement=(_parse_entanglement(raw["entanglement"])
                      if "entanglement" in raw else None),
        invert=_parse_invert(raw["invert"]) if "invert" in raw else None,
        output=_parse_output(raw.get("output", {})),
        semantic=_semantic_dict(raw))
    return cfg


def _semantic_dict(raw: dict) -> dict:
    semantic = {k: v for k, v in raw.items() if k != "output"}
    out = dict(raw.get("output", {}))
    out.pop("directory", None)
    out.pop("formats", None)
    if out:
        semantic["output"] = out
    semantic.setdefault("version", SCHEMA_VERSION)
    return semantic


def config_hash(cfg: RunConfig) -> str:
    """12-hex-digit digest of the semantic configuration content."""
    canon = json.dumps(cfg.semantic, sort_keys=True, separators=(",", ":"),
                       default=repr)
    return hashlib.sha256(canon.encode()).hexdigest()[:12]
