"""Scenario orchestration: single runs, hierarchy scans, Stark-shift sweeps, CSV output.

Every run propagates the four Bloch-tomography probe states (adiabatic
frame), reconstructs the dynamical map, and additionally propagates the
configured physical initial state for the purity / coherence columns. All
files carry a manifest hash in a '#'-prefixed header block so a run can be
reproduced bit-for-bit from its manifest.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .bath import correlation_quadrature, expand_correlation, renormalization_energy
from .config import ExperimentConfig
from .dynmap import (DynamicalMap, NonMarkovReport, analyze, default_probe_states,
                     purity, reconstruct_map, _central_diff)
from .hierarchy import (SystemSpec, build_hierarchy, from_adiabatic, hierarchy_size,
                        propagate, to_adiabatic)
from .kernels import backend_name
from .units import au_to_fs, fs_to_au

VOLUME_DECAY_CUTOFF = 0.01


def initial_state_matrix(name: str, sys: SystemSpec) -> np.ndarray:
    """Physical initial state in the diabatic (propagation) frame."""
    if name == "ground_diabatic":
        return np.diag([1.0, 0.0]).astype(complex)
    if name == "excited_diabatic":
        return np.diag([0.0, 1.0]).astype(complex)
    if name == "plus_adiabatic":
        plus = np.full((2, 2), 0.5, dtype=complex)
        return from_adiabatic(plus, sys)
    raise ValueError(f"unknown initial state {name!r}")


@dataclass
class RunResult:
    times_fs: np.ndarray
    report: NonMarkovReport
    dmap: "DynamicalMap"            # reconstructed map, adiabatic Pauli basis
    rho_adiabatic: np.ndarray       # physical-state trajectory, adiabatic frame
    purity: np.ndarray
    manifest: dict

    @property
    def volume(self) -> np.ndarray:
        return self.report.volume

    def decoherence_time_fs(self, cutoff: float = VOLUME_DECAY_CUTOFF) -> float | None:
        below = np.nonzero(self.report.volume < cutoff)[0]
        return float(self.times_fs[below[0]]) if len(below) else None

    def positive_volume_gain(self) -> float:
        dvdt = _central_diff(self.report.volume, self.times_fs)
        return float(np.trapezoid(np.maximum(dvdt, 0.0), self.times_fs))


def _manifest_hash(payload: dict) -> str:
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _build_manifest(config: ExperimentConfig, level: int, n_modes: int,
                    n_ado: int, extra: dict | None = None) -> dict:
    resolved = json.loads(json.dumps(config.resolved))
    resolved.setdefault("heom", {})["level"] = level
    payload = {
        "config": resolved,
        "derived": {
            "omega0_au": config.system.omega0,
            "beta_au": config.bath.beta,
            "n_modes": n_modes,
            "n_ado": n_ado,
            **(extra or {}),
        },
    }
    payload["manifest_hash"] = _manifest_hash(payload)
    return payload


def run_simulation(config: ExperimentConfig, level: int | None = None) -> RunResult:
    """Four probe propagations + the physical state; map, volume, rates, witness."""
    level = config.level if level is None else level
    wall0 = time.monotonic()
    exp = expand_correlation(config.bath)
    hier = build_hierarchy(exp.n_modes, level, ado_budget=config.ado_budget)

    def _propagate(rho0_diabatic):
        return propagate(
            rho0_diabatic, config.system, exp, level,
            dt_au=config.dt_au, t_final_fs=config.t_final_fs,
            sample_every_fs=config.sample_every_fs, hier=hier,
        )

    trajs_ad = []
    times_fs = None
    for probe in default_probe_states():
        traj = _propagate(from_adiabatic(probe, config.system))
        times_fs = traj.times_fs
        trajs_ad.append(to_adiabatic(traj.rho, config.system))

    physical = _propagate(initial_state_matrix(config.initial_state, config.system))
    rho_ad = to_adiabatic(physical.rho, config.system)

    dmap = reconstruct_map(times_fs, trajs_ad)
    report = analyze(times_fs, dmap)

    manifest = _build_manifest(
        config, level, exp.n_modes, hier.n_ado,
        extra={"renormalization_energy_au":
               renormalization_energy(config.bath.spectral_density)},
    )
    manifest["derived"]["backend"] = backend_name()
    manifest["derived"]["wall_time_s"] = round(time.monotonic() - wall0, 3)
    manifest["derived"]["version"] = __version__
    return RunResult(times_fs=times_fs, report=report, dmap=dmap,
                     rho_adiabatic=rho_ad, purity=purity(rho_ad),
                     manifest=manifest)


# ---------------------------------------------------------------------------
# CSV emission


def _fmt(x) -> str:
    if isinstance(x, float) and np.isnan(x):
        return "nan"
    return f"{x:.12g}"


def _write_csv(path: Path, header_lines: list[str], columns: dict[str, np.ndarray]) -> None:
    names = list(columns)
    rows = len(next(iter(columns.values())))
    with open(path, "w") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(names) + "\n")
        for i in range(rows):
            fh.write(",".join(_fmt(float(columns[n][i])) for n in names) + "\n")


def _header(manifest: dict, what: str) -> list[str]:
    return [
        f"spinbloch {what}",
        f"manifest_hash: {manifest['manifest_hash']}",
    ]


def write_results_csv(path: Path, result: RunResult) -> None:
    rep = result.report
    dvdt = _central_diff(rep.volume, result.times_fs)
    witness_flag = np.zeros(len(result.times_fs))
    for start, end in rep.witness_intervals:
        witness_flag[(result.times_fs >= start) & (result.times_fs <= end)] = 1.0
    _write_csv(path, _header(result.manifest, "results"), {
        "t_fs": result.times_fs,
        "V": rep.volume,
        "gamma_total": rep.gamma_total,
        "gamma1": rep.canonical_rates[:, 0],
        "gamma2": rep.canonical_rates[:, 1],
        "gamma3": rep.canonical_rates[:, 2],
        "purity": result.purity,
        "re_rho12": result.rho_adiabatic[:, 0, 1].real,
        "im_rho12": result.rho_adiabatic[:, 0, 1].imag,
        "dVdt": dvdt,
        "witness_flag": witness_flag,
    })


def write_trajectory_csv(path: Path, result: RunResult) -> None:
    rho = result.rho_adiabatic
    _write_csv(path, _header(result.manifest, "trajectory"), {
        "t_fs": result.times_fs,
        "re_rho11": rho[:, 0, 0].real,
        "re_rho22": rho[:, 1, 1].real,
        "re_rho12": rho[:, 0, 1].real,
        "im_rho12": rho[:, 0, 1].imag,
        "purity": result.purity,
    })


def write_manifest(path: Path, manifest: dict) -> None:
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def emit_run(config: ExperimentConfig, out_dir: Path, tag: str = "run") -> RunResult:
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run_simulation(config)
    write_results_csv(out_dir / f"{tag}_results.csv", result)
    write_trajectory_csv(out_dir / f"{tag}_trajectory.csv", result)
    write_manifest(out_dir / f"{tag}_manifest.json", result.manifest)
    return result


# ---------------------------------------------------------------------------
# scans


def scan_hierarchy(config: ExperimentConfig, out_dir: Path | None = None
                   ) -> dict[int, RunResult]:
    """Off-resonant convergence scan: one full run per truncation level."""
    levels = config.level_list
    if not levels:
        raise ValueError("config has no sweep.levels list")
    results: dict[int, RunResult] = {}
    for level in levels:
        result = run_simulation(config, level=level)
        results[level] = result
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
            write_results_csv(out_dir / f"scan_l{level}_results.csv", result)
            write_manifest(out_dir / f"scan_l{level}_manifest.json", result.manifest)
    if out_dir is not None:
        ordered = sorted(results)
        prev = None
        cols = {"level": [], "n_ado": [], "sup_dist_to_prev": []}
        for level in ordered:
            cols["level"].append(float(level))
            cols["n_ado"].append(float(results[level].manifest["derived"]["n_ado"]))
            if prev is None:
                cols["sup_dist_to_prev"].append(float("nan"))
            else:
                cols["sup_dist_to_prev"].append(volume_distance(results[prev], results[level]))
            prev = level
        cols = {k: np.array(v) for k, v in cols.items()}
        _write_csv(out_dir / "scan_l_summary.csv",
                   _header(results[ordered[-1]].manifest, "hierarchy scan summary"), cols)
    return results


def volume_distance(a: RunResult, b: RunResult) -> float:
    return float(np.max(np.abs(a.report.volume - b.report.volume)))


def scan_stark(config: ExperimentConfig, out_dir: Path | None = None
               ) -> dict[float, RunResult]:
    """Sweep of the (Stark-shifted) transition frequency; control-map summary."""
    grid = config.omega0_grid
    if not grid:
        raise ValueError("config has no sweep.omega0 grid")
    results: dict[float, RunResult] = {}
    for omega0 in grid:
        resolved = json.loads(json.dumps(config.resolved))
        resolved["system"] = {"omega0": omega0}
        cfg = replace(config, system=SystemSpec.from_omega0(omega0), resolved=resolved)
        result = run_simulation(cfg)
        results[omega0] = result
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
            write_results_csv(out_dir / f"stark_w{omega0:.6g}_results.csv", result)
    if out_dir is not None:
        cols = {
            "omega0_au": np.array(sorted(results)),
            "decoherence_time_fs": np.array(
                [results[w].decoherence_time_fs() or float("nan") for w in sorted(results)]),
            "positive_volume_gain": np.array(
                [results[w].positive_volume_gain() for w in sorted(results)]),
            "witness_count": np.array(
                [float(len(results[w].report.witness_intervals)) for w in sorted(results)]),
        }
        any_result = results[sorted(results)[0]]
        _write_csv(out_dir / "stark_summary.csv",
                   _header(any_result.manifest, "stark sweep summary"), cols)
    return results


def emit_correlation(config: ExperimentConfig, out_dir: Path) -> Path:
    """Bath diagnostics: expansion and quadrature C(t) side by side."""
    out_dir.mkdir(parents=True, exist_ok=True)
    exp = expand_correlation(config.bath)
    n = int(round(config.t_final_fs / config.correlation_sample_fs))
    t_fs = np.linspace(0.0, config.t_final_fs, n + 1)
    t_au = fs_to_au(t_fs)
    c_modes = exp.evaluate(t_au)
    c_quad = correlation_quadrature(config.bath, t_au)
    manifest = _build_manifest(config, config.level, exp.n_modes,
                               hierarchy_size(exp.n_modes, config.level))
    path = out_dir / "correlation.csv"
    _write_csv(path, _header(manifest, "correlation function"), {
        "t_fs": t_fs,
        "re_C": c_modes.real,
        "im_C": c_modes.imag,
        "re_C_quad": c_quad.real,
        "im_C_quad": c_quad.imag,
    })
    write_manifest(out_dir / "correlation_manifest.json", manifest)
    return path
