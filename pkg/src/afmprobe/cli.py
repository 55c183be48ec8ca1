"""Command-line interface: figure datasets, inversion, and verification.

    probe dispersion|entanglement|rabi|invert|verify --config <file>
          [--out <dir>] [--format csv,json] [--workers N] [--quick]
          [--seed S] [--f-measured F]

Sweep rows are pure functions of (config, k) and are evaluated in parallel
with ordered collection; exit codes are 0 success, 1 config error, 2 physics
domain error on every row, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from functools import partial

import numpy as np

from . import __version__, bogoliubov, entanglement, hybrid, model
from .config import RunConfig, config_hash, load_config
from .datasets import Dataset, write_dataset
from .errors import (
    BranchError,
    ConfigError,
    InstabilityError,
    ProbeError,
    ResonanceError,
)
from .verify import run_suite

#: sweeps below this many rows run serially; process startup would dominate
PARALLEL_THRESHOLD = 256


def _sweep_points(cfg: RunConfig) -> np.ndarray:
    return model.kpath(cfg.model.lattice, cfg.sweep.segments())


def _map_rows(fn, points, workers: int):
    items = [tuple(p) for p in points]
    if workers > 1 and len(items) >= PARALLEL_THRESHOLD:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items, chunksize=32))
    return [fn(p) for p in items]


# ---------------------------------------------------------------------------
# dispersion


def _dispersion_row(m: model.ModelParams, k):
    km = model.kittel_parameters(k, m, check=False)
    gamma = model.structure_factor(k, m.lattice)
    try:
        disp = model.diagonal_frequencies(model.kittel_parameters(k, m))
        oa, ob, stable = disp.omega_alpha, disp.omega_beta, True
    except InstabilityError:
        oa = ob = math.nan
        stable = False
    return (*k, km.omega_a, km.omega_b, gamma, km.Gamma.real, oa, ob, stable)


def _dispersion_dataset(cfg: RunConfig, m: model.ModelParams, workers: int,
                        tag: str) -> Dataset:
    points = _sweep_points(cfg)
    dim = cfg.model.lattice.dim
    k_cols = ("kx", "ky", "kz")[:dim]
    ds = Dataset(
        schema="dispersion/1",
        columns=(*k_cols, "k_coord", "omega_a", "omega_b", "gamma", "Gamma",
                 "omega_alpha", "omega_beta", "stable"),
        units=(*("1/a",) * dim, "1/a", "meV", "meV", "1", "1", "meV",
               "meV", "bool"),
        provenance={"config_hash": config_hash(cfg), "command": "dispersion",
                    "run": tag, "field_meV": repr(m.muB_B)})
    coords = model.path_coordinate(points)
    rows = _map_rows(partial(_dispersion_row, m), points, workers)
    for coord, row in zip(coords, rows):
        ds.append((*row[:dim], float(coord), *row[dim:]))
    if not any(row[-1] for row in ds.rows):
        raise InstabilityError("every sweep row is unstable (spin-flop regime)")
    return ds


def cmd_dispersion(cfg: RunConfig, workers: int) -> list:
    cfg.require("model", "sweep")
    datasets = [("dispersion", _dispersion_dataset(cfg, cfg.model, workers, "field"))]
    if cfg.sweep.include_zero_field and cfg.model.muB_B != 0.0:
        zero = replace(cfg.model, muB_B=0.0)
        datasets.append(("dispersion-B0",
                         _dispersion_dataset(cfg, zero, workers, "zero-field")))
    return datasets


# ---------------------------------------------------------------------------
# entanglement


def _pair_entropies(pairs, sp, base):
    out = []
    for x, y in pairs:
        spec = entanglement.schmidt_coefficients(x, y, sp)
        out.append(entanglement.entanglement_entropy(spec, base=base))
    return out


def cmd_entanglement(cfg: RunConfig, workers: int) -> list:
    cfg.require("entanglement")
    ent = cfg.entanglement
    base = cfg.output.entropy_base
    pair_cols = tuple(f"E_{x}_{y}" for x, y in ent.pairs)
    unit = "bits" if base == 2.0 else "nats"
    if ent.by_delta:
        ds = Dataset(
            schema="entanglement-by-epr/1",
            columns=("delta_epr", "phi", "r", "nonlocal", *pair_cols),
            units=("1", "rad", "1", "bool", *(unit,) * len(pair_cols)),
            provenance={"config_hash": config_hash(cfg),
                        "command": "entanglement"})
        for delta in np.linspace(ent.delta_min, ent.delta_max, ent.delta_points):
            phi = math.pi if delta < 1.0 else 0.0
            r = 0.5 * abs(math.log(delta))
            sp = bogoliubov.SqueezeParams.from_r_phi(r, phi)
            ds.append((float(delta), phi, r, delta < 1.0,
                       *_pair_entropies(ent.pairs, sp, base)))
        return [("entanglement", ds)]

    ds = Dataset(
        schema="entanglement/1",
        columns=("r", "delta_phi0", "delta_phipi", *pair_cols),
        units=("1", "1", "1", *(unit,) * len(pair_cols)),
        provenance={"config_hash": config_hash(cfg), "command": "entanglement"})
    for r in np.linspace(0.0, ent.r_max, ent.r_points):
        sp_pi = bogoliubov.SqueezeParams.from_r_phi(r, math.pi)
        ds.append((float(r),
                   entanglement.epr_function(
                       bogoliubov.SqueezeParams.from_r_phi(r, 0.0)),
                   entanglement.epr_function(sp_pi),
                   *_pair_entropies(ent.pairs, sp_pi, base)))
    return [("entanglement", ds)]


# ---------------------------------------------------------------------------
# rabi


def _rabi_row(m: model.ModelParams, cavity, base, k):
    km = model.kittel_parameters(k, m, check=False)
    lam = cavity.A0 * float(np.linalg.norm(k)) * math.sqrt(m.S)
    try:
        disp = model.diagonal_frequencies(model.kittel_parameters(k, m))
    except InstabilityError:
        return (*k, math.nan, math.nan, math.nan, math.nan, math.nan,
                math.nan, False, False)
    sp = bogoliubov.squeeze_params(km.Gamma)
    delta_epr = entanglement.epr_function(sp)
    entropy = entanglement.ground_state_entropy_closed_form(sp.r, base=base)
    try:
        f_alpha = hybrid.rabi_frequency_zero_detuning(
            lam, disp.omega_alpha, cavity.omega_c, sp)
        f_beta = hybrid.rabi_frequency_zero_detuning(
            lam, disp.omega_beta, cavity.omega_c, sp)
    except ResonanceError:
        return (*k, disp.omega_alpha, disp.omega_beta, math.nan, math.nan,
                delta_epr, entropy, True, True)
    return (*k, disp.omega_alpha, disp.omega_beta, f_alpha, f_beta,
            delta_epr, entropy, True, False)


def cmd_rabi(cfg: RunConfig, workers: int) -> list:
    cfg.require("model", "cavity", "sweep")
    points = _sweep_points(cfg)
    dim = cfg.model.lattice.dim
    k_cols = ("kx", "ky", "kz")[:dim]
    unit = "bits" if cfg.output.entropy_base == 2.0 else "nats"
    provenance = {"config_hash": config_hash(cfg), "command": "rabi",
                  "probe_mode": cfg.probe_mode}
    if cfg.transmon is not None:
        # the probe is retuned to zero detuning at every k; the transmon
        # section documents the baseline qubit and surfaces regime warnings
        if cfg.transmon.omega_q is not None:
            provenance["transmon_omega_q_meV"] = repr(float(cfg.transmon.omega_q))
        else:
            tp = hybrid.transmon_spectrum(cfg.transmon.E_C, cfg.transmon.E_J)
            provenance["transmon_omega_q_meV"] = repr(tp.omega_q)
            provenance["transmon_anharmonicity_meV"] = repr(tp.xi)
    ds = Dataset(
        schema="rabi/1",
        columns=(*k_cols, "k_coord", "omega_alpha", "omega_beta",
                 "f_alpha", "f_beta", "delta_epr", "entropy_ground",
                 "stable", "resonant"),
        units=(*("1/a",) * dim, "1/a", "meV", "meV", "meV", "meV", "1",
               unit, "bool", "bool"),
        provenance=provenance,
        flag_values=(("stable", True), ("resonant", False)))
    coords = model.path_coordinate(points)
    fn = partial(_rabi_row, cfg.model, cfg.cavity, cfg.output.entropy_base)
    rows = _map_rows(fn, points, workers)
    n_bad = 0
    for coord, row in zip(coords, rows):
        stable, resonant = row[-2], row[-1]
        if not stable or resonant:
            n_bad += 1
        ds.append((*row[:dim], float(coord), *row[dim:]))
    if n_bad == len(ds.rows):
        raise InstabilityError("every sweep row is unstable or resonant")
    return [("rabi", ds)]


# ---------------------------------------------------------------------------
# invert and verify


def cmd_invert(cfg: RunConfig, f_measured: float | None) -> dict:
    cfg.require("invert")
    inv = cfg.invert
    f = f_measured if f_measured is not None else inv.f_measured
    if f is None:
        raise ConfigError("provide --f-measured or [invert] f_measured")
    base = cfg.output.entropy_base
    res = hybrid.invert_rabi(float(f), inv.lam, inv.omega_q, inv.omega_c,
                             inv.phi)
    entropy = entanglement.ground_state_entropy_closed_form(res.r, base=base)
    if res.nonlocal_:
        verdict = "nonlocal (EPR bound violated)"
    elif res.delta_epr == 1.0:
        verdict = "local boundary (Delta = 1)"
    else:
        verdict = "local"
    return {
        "f_measured_meV": float(f),
        "lam_meV": inv.lam,
        "omega_q_meV": inv.omega_q,
        "omega_c_meV": inv.omega_c,
        "phi": inv.phi,
        "delta_epr": res.delta_epr,
        "r": res.r,
        "r_linearized": res.r_linearized,
        "ground_entropy": entropy,
        "entropy_units": "bits" if base == 2.0 else "nats",
        "nonlocal": res.nonlocal_,
        "verdict": verdict,
    }


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="probe",
        description="Transmon-probe observables for magnons in bipartite "
                    "antiferromagnets")
    parser.add_argument("--version", action="version",
                        version=f"afmprobe {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config in (("dispersion", True), ("entanglement", True),
                               ("rabi", True), ("invert", True),
                               ("verify", False)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=needs_config,
                       help="TOML run configuration")
        p.add_argument("--out", default=None,
                       help="output directory (overrides [output] directory)")
        p.add_argument("--format", default=None,
                       help="comma-separated subset of csv,json")
        p.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                       help="parallel row workers (small sweeps run serially)")
        p.add_argument("--seed", type=int, default=0,
                       help="RNG seed for randomized verification checks")
        if name == "verify":
            p.add_argument("--quick", action="store_true",
                           help="fast subset of the verification suite")
        if name == "invert":
            p.add_argument("--f-measured", type=float, default=None,
                           help="measured Rabi angular frequency in meV")
    return parser


def _resolve_output(cfg: RunConfig, args):
    directory = args.out if args.out is not None else cfg.output.directory
    formats = cfg.output.formats
    if args.format is not None:
        formats = tuple(f.strip() for f in args.format.split(",") if f.strip())
        for fmt in formats:
            if fmt not in {"csv", "json"}:
                raise ConfigError(f"unknown format {fmt!r}")
    return directory, formats


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (InstabilityError, ResonanceError, BranchError) as exc:
        print(f"physics domain error: {exc}", file=sys.stderr)
        return 2
    except ProbeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "verify":
        cfg = load_config(args.config) if args.config else RunConfig()
        directory, _ = _resolve_output(cfg, args)
        report = run_suite(seed=args.seed, quick=args.quick,
                           workers=max(1, args.workers))
        os.makedirs(directory, exist_ok=True)
        path = os.path.join(directory, "verify-report.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
        for c in report.checks:
            status = "PASS" if c.passed else "FAIL"
            print(f"{status}  {c.check_id:32s} measured {c.measured:.6g} "
                  f"{c.comparator} {c.tolerance:.6g}")
        print(f"report written to {path}")
        if not report.all_passed:
            print("verification FAILED", file=sys.stderr)
            return 3
        print("verification passed")
        return 0

    cfg = load_config(args.config)
    directory, formats = _resolve_output(cfg, args)
    if args.command == "invert":
        result = cmd_invert(cfg, args.f_measured)
        os.makedirs(directory, exist_ok=True)
        path = os.path.join(directory, f"invert-{config_hash(cfg)}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(result, fh, indent=1)
            fh.write("\n")
        print(f"Delta_EPR      = {result['delta_epr']:.12g}")
        print(f"r              = {result['r']:.12g}")
        print(f"ground entropy = {result['ground_entropy']:.12g} "
              f"{result['entropy_units']}")
        print(f"verdict        = {result['verdict']}")
        print(f"report written to {path}")
        return 0

    workers = max(1, args.workers)
    command = {"dispersion": cmd_dispersion, "entanglement": cmd_entanglement,
               "rabi": cmd_rabi}[args.command]
    produced = command(cfg, workers)
    stamp = config_hash(cfg)
    for tag, ds in produced:
        for path in write_dataset(ds, directory, f"{tag}-{stamp}", formats):
            print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
