"""Command-line front end: presets, experiment orchestration, file export.

Every command takes a JSON config (or a packaged preset), computes, and
writes plot-ready CSV/JSON plus a resolved-config echo into its own run
directory.  All grids and scan orders are fixed by the config, so a repeated
run produces byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from . import netlist as netlist_mod
from . import spectral, topology, transient
from .circuit import RealSpaceMatrix
from .errors import (
    ConfigError,
    GapUnknown,
    InvalidParams,
    NumericError,
    OriginCrossing,
    OutputError,
    TopochainError,
    UnknownKey,
)
from .params import CircuitParams, circuit_from_mapping, load_config

OUT_ROOT_ENV = "TOPOCHAIN_OUT"
COMMANDS = ("bands", "winding", "skin", "eigvecs", "transient", "netlist", "sweep")

SECTION_DEFAULTS = {
    "bands": {"n_k": 256},
    "winding": {"n_k": 1024},
    "skin": {"n_k": 512, "scan": 50, "branches": None},
    "eigvecs": {"n_k": 1024, "branch": "omega6", "perturbation": None},
    "transient": {
        "branch": "omega6", "k_at": 3.141592653589793, "n_k": 256,
        "amplitude": 1.0, "source_nodes": None, "periods_drive": 10.0,
        "periods_free": 25.0, "fit_t0_periods": 3.0, "max_samples": 8000,
        "dt": None,
    },
    "netlist": None,   # shares the transient section
    "sweep": {"points": None, "n_k": 256, "check_skin": True},
}


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def _write_json(path: Path, obj) -> None:
    _write_text(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = [",".join(header)]
    for i in range(len(columns[0])):
        rows.append(",".join(_fmt(col[i]) for col in columns))
    _write_text(path, "\n".join(rows) + "\n")


def _pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _section(config: dict, name: str) -> dict:
    defaults = SECTION_DEFAULTS[name]
    if defaults is None:
        return _section(config, "transient")
    given = config.get(name, {})
    if not isinstance(given, dict):
        raise InvalidParams(f"section '{name}' must be an object")
    for key in given:
        if key not in defaults:
            raise UnknownKey(f"{name}.{key}")
    merged = dict(defaults)
    merged.update(given)
    return merged


def _resolved_echo(command: str, params: CircuitParams, section: dict) -> dict:
    key = "transient" if command == "netlist" else command
    return {"circuit": params.to_dict(), key: section}


def _branch_labels(section: dict) -> tuple[str, ...]:
    chosen = section.get("branches")
    if chosen is None:
        return spectral.BRANCH_LABELS
    bad = [b for b in chosen if b not in spectral.BRANCH_LABELS]
    if bad:
        raise InvalidParams(f"unknown branch labels {bad}")
    return tuple(chosen)


def cmd_bands(params: CircuitParams, config: dict, outdir: Path, fmt: str) -> None:
    section = _section(config, "bands")
    band = spectral.band_trace(params, int(section["n_k"]))
    lam = spectral.lambda_spectrum(params, band)
    labels = spectral.BRANCH_LABELS
    header = ["k"]
    cols = [band.k_grid]
    for lab in labels:
        header += [f"{lab}_re", f"{lab}_im"]
        cols += [band.branches[lab].real, band.branches[lab].imag]
    lam_header = ["k"]
    lam_cols = [band.k_grid]
    for lab in labels:
        lam_header += [f"{lab}_re", f"{lab}_im"]
        lam_cols += [lam[lab].real, lam[lab].imag]
    if fmt == "json":
        _write_json(outdir / "bands.json", {
            "k": band.k_grid.tolist(),
            "branches": {lab: [_pair(z) for z in band.branches[lab]] for lab in labels},
            "lambda": {lab: [_pair(z) for z in lam[lab]] for lab in labels},
        })
    else:
        _write_csv(outdir / "bands.csv", header, cols)
        _write_csv(outdir / "lambda.csv", lam_header, lam_cols)
    _write_json(outdir / "bands_meta.json", {
        "closure_permutation": list(band.closure_permutation),
        "continuity_residual": {k: float(v) for k, v in band.continuity_residual.items()},
        "gap_per_branch": {
            lab: spectral.bulk_gap(params, band.branches[lab]) for lab in labels
        },
    })


def cmd_winding(params: CircuitParams, config: dict, outdir: Path, fmt: str) -> None:
    section = _section(config, "winding")
    band = spectral.band_trace(params, int(section["n_k"]))
    results = topology.winding_per_branch(params, band)
    branches = {}
    for lab in sorted(band.branches):
        r = results.get(lab)
        if r is None:
            branches[lab] = {"winding": None,
                             "note": "curve crosses the origin; undefined"}
        else:
            branches[lab] = {
                "winding": r.winding,
                "quadrature": r.quadrature,
                "curve_min_radius": r.curve_min_radius,
                "quadrature_residual": abs(r.quadrature - r.winding),
            }
    report = {
        "n_k": int(section["n_k"]),
        "branches": branches,
        "multiset": sorted(r.winding for r in results.values()),
        "undefined": sorted(set(band.branches) - set(results)),
    }
    _write_json(outdir / "winding.json", report)


def cmd_skin(params: CircuitParams, config: dict, outdir: Path, fmt: str) -> None:
    section = _section(config, "skin")
    band = spectral.band_trace(params, int(section["n_k"]))
    report = {}
    for lab in _branch_labels(section):
        selector = band.branches[lab][0]
        present, witness = topology.skin_effect_present(
            params, selector, scan=int(section["scan"]), band=band)
        report[lab] = {
            "present": present,
            "witness": None if witness is None else _pair(witness),
        }
        e0 = witness if witness is not None else 0.0
        traj = e0 * e0 - topology._offdiag_product(params, band, lab)
        _write_csv(outdir / f"skin_traj_{lab}.csv",
                   ["k", "det_re", "det_im"],
                   [band.k_grid, traj.real, traj.imag])
    _write_json(outdir / "skin.json", report)


def _center_cells(n_cells: int) -> list[int]:
    mid = n_cells // 2
    return [mid - 1, mid, mid + 1]


def cmd_eigvecs(params: CircuitParams, config: dict, outdir: Path, fmt: str) -> None:
    section = _section(config, "eigvecs")
    label = section["branch"]
    if label not in spectral.BRANCH_LABELS:
        raise InvalidParams(f"unknown branch label '{label}'")
    band = spectral.band_trace(params, int(section["n_k"]))
    entries = spectral.branch_effective_matrix(params, band, label)
    rep_omega = band.branches[label][len(band.k_grid) // 2]
    matrix = RealSpaceMatrix(entries=entries, params=params, omega=rep_omega)
    spectrum = spectral.eigendecompose(matrix)
    gap = spectral.bulk_gap(params, band.branches[label])
    notes = []
    try:
        spectrum = topology.classify_states(spectrum, gap)
    except GapUnknown as exc:
        notes.append(str(exc))
    try:
        mu = topology.winding_number(params, band.branches[label], band.k_grid)
    except OriginCrossing as exc:
        mu = None
        notes.append(str(exc))
    report = {
        "branch": label,
        "gap": gap,
        "winding": mu,
        "com_shift_sites": topology.center_of_mass_shift(spectrum),
        "eigenvalues": [_pair(z) for z in spectrum.eigenvalues],
        "labels": list(spectrum.labels) if spectrum.labels else None,
        "ipr": spectrum.ipr.tolist(),
        "left_weight": spectrum.left_weight.tolist(),
        "right_weight": spectrum.right_weight.tolist(),
        "notes": notes,
    }
    pert_cfg = section.get("perturbation")
    if pert_cfg is not None and spectrum.labels is not None:
        cells = pert_cfg.get("cells") or _center_cells(params.n_cells)
        fraction = float(pert_cfg.get("fraction", 0.05))
        perturbed = topology.perturb_chain(matrix, tuple(cells), fraction)
        pert_spec = spectral.eigendecompose(perturbed)
        cmp = topology.compare_perturbed(spectrum, pert_spec, gap)
        report["perturbation"] = {
            "cells": list(cells),
            "fraction": fraction,
            "edge_state_drift": cmp.edge_state_drift,
            "skin_state_drift": cmp.skin_state_drift,
            "bulk_state_drift": cmp.bulk_state_drift,
            "max_eigenvalue_shift": cmp.max_eigenvalue_shift,
        }
    _write_json(outdir / "spectrum.json", report)
    mags = np.abs(spectrum.eigenvectors) ** 2
    header = ["site"] + [f"state{i}" for i in range(mags.shape[1])]
    cols = [np.arange(mags.shape[0])] + [mags[:, i] for i in range(mags.shape[1])]
    _write_csv(outdir / "eigvecs.csv", header, cols)


def _setup_from_section(params: CircuitParams, section: dict) -> tuple[transient.TransientSetup, dict]:
    band = spectral.band_trace(params, int(section["n_k"]))
    label = section["branch"]
    if label not in spectral.BRANCH_LABELS:
        raise InvalidParams(f"unknown branch label '{label}'")
    idx = int(np.argmin(np.abs(band.k_grid - float(section["k_at"]))))
    mode = band.branches[label][idx]
    omega_r = abs(float(np.real(mode)))
    omega_i = float(np.imag(mode))
    if omega_r <= 0.0:
        raise InvalidParams(
            f"branch {label} has no oscillatory part at k={band.k_grid[idx]:.4f}"
        )
    period = 2.0 * np.pi / omega_r
    setup = transient.TransientSetup(
        params=params,
        drive_frequency=omega_r,
        decay=omega_i,
        source_nodes=(tuple(section["source_nodes"])
                      if section["source_nodes"] is not None else None),
        source_amplitude=float(section["amplitude"]),
        switch_open_time=float(section["periods_drive"]) * period,
        t_end=(float(section["periods_drive"]) + float(section["periods_free"])) * period,
        dt=section["dt"],
    )
    drive_info = {
        "branch": label,
        "k": float(band.k_grid[idx]),
        "mode": _pair(mode),
        "omega_r": omega_r,
        "omega_i": omega_i,
    }
    return setup, drive_info


def cmd_transient(params: CircuitParams, config: dict, outdir: Path, fmt: str) -> None:
    section = _section(config, "transient")
    setup, drive_info = _setup_from_section(params, section)
    trace = transient.simulate(setup, max_samples=int(section["max_samples"]))
    window = (trace.switch_time + 3.0 * setup.drive_period, float(trace.times[-1]))
    profile = transient.ground_current_profile(trace, window)
    fit_t0 = trace.switch_time + max(3.0, float(section["fit_t0_periods"])) \
        * setup.drive_period
    n_nodes = 2 * params.n_cells
    watch = sorted({0, n_nodes - 1, n_nodes // 2, *setup.source_nodes})
    fits = {}
    for node in watch:
        try:
            fit = transient.fit_damped_oscillation(
                trace.times, trace.ground_currents[:, node], fit_t0)
            fits[str(node)] = {
                "amplitude": fit.amplitude,
                "omega_r": fit.omega_r,
                "omega_i": fit.omega_i,
                "phase": fit.phase,
                "rms_residual": fit.rms_residual,
            }
        except (TopochainError, ValueError) as exc:
            fits[str(node)] = {"error": f"{type(exc).__name__}: {exc}"}
    _write_json(outdir / "transient.json", {
        "drive": drive_info,
        "switch_time": trace.switch_time,
        "window": list(window),
        "fit_t0": fit_t0,
        "profile": profile.tolist(),
        "fits": fits,
        "final_energy": float(trace.energy[-1]),
    })
    cols = [trace.times]
    header = ["time"]
    for node in watch:
        header += [f"v{node}", f"i{node}"]
        cols += [trace.node_voltages[:, node], trace.ground_currents[:, node]]
    _write_csv(outdir / "trace.csv", header, cols)
    _write_csv(outdir / "energy.csv", ["time", "energy"],
               [trace.times, trace.energy])


def cmd_netlist(params: CircuitParams, config: dict, outdir: Path, fmt: str) -> None:
    section = _section(config, "transient")
    setup, _ = _setup_from_section(params, section)
    _write_text(outdir / "chain.cir", netlist_mod.netlist_text(setup))


def _sweep_point(entry: dict, n_k: int, check_skin: bool) -> dict:
    params = circuit_from_mapping(entry, prefix="sweep.point")
    band = spectral.band_trace(params, n_k)
    results = topology.winding_per_branch(params, band)
    multiset = sorted(r.winding for r in results.values())
    gaps = [spectral.bulk_gap(params, band.branches[lab])
            for lab in spectral.BRANCH_LABELS]
    skin = False
    if check_skin:
        for lab in spectral.BRANCH_LABELS:
            present, _ = topology.skin_effect_present(
                params, band.branches[lab][0], band=band)
            if present:
                skin = True
                break
    return {
        "params": params,
        "multiset": multiset,
        "min_gap": min(gaps),
        "skin": skin,
    }


def cmd_sweep(params: CircuitParams, config: dict, outdir: Path, fmt: str,
              threads: int = 1) -> None:
    section = _section(config, "sweep")
    points = section["points"]
    if not points:
        points = [dict(
            r1=params.r1, r2=params.r2, c1=params.c1, c2=params.c2,
            l=params.l, n_cells=params.n_cells,
        )]
    n_k = int(section["n_k"])
    check_skin = bool(section["check_skin"])
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(
                lambda e: _sweep_point(e, n_k, check_skin), points))
    else:
        rows = [_sweep_point(e, n_k, check_skin) for e in points]
    lines = ["r1,r2,c1,c2,l,mu_multiset,min_gap,skin"]
    for row in rows:
        p = row["params"]
        mu = "|".join(str(m) for m in row["multiset"])
        lines.append(
            f"{_fmt(p.r1)},{_fmt(p.r2)},{_fmt(p.c1)},{_fmt(p.c2)},"
            f"{_fmt(p.l)},{mu},{_fmt(row['min_gap'])},{int(row['skin'])}"
        )
    _write_text(outdir / "sweep.csv", "\n".join(lines) + "\n")


def preset_names() -> list[str]:
    root = resources.files("topochain") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> dict:
    root = resources.files("topochain") / "presets"
    ref = root / f"{name}.json"
    if not ref.is_file():
        raise InvalidParams(
            f"unknown preset '{name}'; available: {', '.join(preset_names())}"
        )
    return json.loads(ref.read_text())


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topochain",
        description="Dissipative SSH-circuit band, topology, and transient toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", type=str, help="JSON config path")
        src.add_argument("--preset", type=str, help="packaged preset name")
        p.add_argument("--out", type=str, default=None,
                       help=f"output root (default ${OUT_ROOT_ENV} or ./topochain_out)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--threads", type=int, default=1)
    return parser


def run_command(command: str, config: dict, outdir: Path, fmt: str,
                threads: int = 1) -> None:
    if "circuit" not in config:
        raise InvalidParams("config lacks a 'circuit' section")
    known = {"circuit"} | set(COMMANDS)
    for key in config:
        if key not in known:
            raise UnknownKey(key)
    params = circuit_from_mapping(config["circuit"])
    section_key = "transient" if command == "netlist" else command
    echo = _resolved_echo(command, params, _section(config, section_key))
    _write_json(outdir / "resolved_config.json", echo)
    if command == "bands":
        cmd_bands(params, config, outdir, fmt)
    elif command == "winding":
        cmd_winding(params, config, outdir, fmt)
    elif command == "skin":
        cmd_skin(params, config, outdir, fmt)
    elif command == "eigvecs":
        cmd_eigvecs(params, config, outdir, fmt)
    elif command == "transient":
        cmd_transient(params, config, outdir, fmt)
    elif command == "netlist":
        cmd_netlist(params, config, outdir, fmt)
    elif command == "sweep":
        cmd_sweep(params, config, outdir, fmt, threads=threads)
    else:
        raise InvalidParams(f"unknown command '{command}'")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.config:
            config = load_config(args.config)
            run_name = Path(args.config).stem
        else:
            config = load_preset(args.preset)
            run_name = args.preset
        out_root = Path(args.out or os.environ.get(OUT_ROOT_ENV, "topochain_out"))
        outdir = out_root / f"{args.command}-{run_name}"
        run_command(args.command, config, outdir, args.format,
                    threads=max(1, args.threads))
    except ConfigError as exc:
        print(f"{args.command}: config error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"{args.command}: numeric error: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 3
    except (OutputError, OSError) as exc:
        print(f"{args.command}: output error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
