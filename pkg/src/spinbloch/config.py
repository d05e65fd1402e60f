"""Experiment configuration: strict YAML parsing, validation, bundled presets."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .bath import BathSpec, LorentzianComponent, SpectralDensity
from .errors import ConfigError
from .hierarchy import SystemSpec

TABLE1_LORENTZIANS = [
    {"delta": 1.0e-11, "omega_c": 8.0e-4, "gamma_w": 1.4e-3},
    {"delta": 3.0e-12, "omega_c": 6.0e-3, "gamma_w": 4.0e-4},
]

_DEFAULTS = {
    "bath": {"temperature": 300.0, "n_matsubara": 3, "lorentzians": TABLE1_LORENTZIANS},
    "heom": {"level": 4, "dt_au": 0.25, "t_final_fs": 200.0, "sample_every_fs": 0.05},
    "run": {"out_dir": "results", "initial_state": "ground_diabatic",
            "ado_budget": 2_000_000},
    "correlation": {"sample_every_fs": 0.5},
}

PRESETS: dict[str, dict] = {
    "paper_onresonant": {"system": {"omega0": 1.0e-3}},
    "paper_offresonant": {"system": {"omega0": 4.0e-3}},
    "paper_convergence": {
        "system": {"omega0": 4.0e-3},
        "sweep": {"levels": [1, 2, 3, 4, 5]},
    },
    "paper_stark": {
        "system": {"omega0": 4.0e-3},
        "sweep": {"omega0": [1.0e-3, 4.0e-3]},
    },
}

_INITIAL_STATES = ("ground_diabatic", "excited_diabatic", "plus_adiabatic")

_SCHEMA = {
    "system": {"omega0", "omega0_d", "w_coupling"},
    "bath": {"temperature", "n_matsubara", "lorentzians"},
    "heom": {"level", "dt_au", "t_final_fs", "sample_every_fs"},
    "run": {"out_dir", "initial_state", "ado_budget"},
    "sweep": {"omega0", "levels"},
    "correlation": {"sample_every_fs"},
}


@dataclass(frozen=True)
class ExperimentConfig:
    system: SystemSpec
    bath: BathSpec
    level: int
    dt_au: float
    t_final_fs: float
    sample_every_fs: float
    out_dir: str
    initial_state: str
    ado_budget: int
    omega0_grid: tuple[float, ...] | None
    level_list: tuple[int, ...] | None
    correlation_sample_fs: float
    resolved: dict = field(compare=False, repr=False, default_factory=dict)


def _check_unknown_keys(raw: dict, errors: list[str]) -> None:
    for section, value in raw.items():
        if section not in _SCHEMA:
            errors.append(f"unknown section {section!r}")
            continue
        if not isinstance(value, dict):
            errors.append(f"section {section!r} must be a mapping")
            continue
        for key in value:
            if key not in _SCHEMA[section]:
                errors.append(f"unknown key {section}.{key}")
        if section == "bath" and isinstance(value.get("lorentzians"), list):
            for i, comp in enumerate(value["lorentzians"]):
                if not isinstance(comp, dict):
                    errors.append(f"bath.lorentzians[{i}] must be a mapping")
                    continue
                for key in comp:
                    if key not in ("delta", "omega_c", "gamma_w"):
                        errors.append(f"unknown key bath.lorentzians[{i}].{key}")


def resolve_config(raw: dict) -> ExperimentConfig:
    """Merge defaults into a raw mapping, validate every invariant, build the config."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration root must be a mapping")
    errors: list[str] = []
    _check_unknown_keys(raw, errors)
    if errors:
        raise ConfigError("; ".join(errors))

    merged = copy.deepcopy(_DEFAULTS)
    for section, value in raw.items():
        merged.setdefault(section, {})
        merged[section].update(copy.deepcopy(value))

    sys_raw = merged.get("system", {})
    has_omega0 = "omega0" in sys_raw
    has_pair = "omega0_d" in sys_raw or "w_coupling" in sys_raw
    if has_omega0 and has_pair:
        errors.append("system: give either omega0 or (omega0_d, w_coupling), not both")
    elif has_omega0:
        if sys_raw["omega0"] <= 0:
            errors.append("system.omega0 must be > 0")
    elif "omega0_d" in sys_raw and "w_coupling" in sys_raw:
        pass
    else:
        errors.append("system: need omega0 or both of (omega0_d, w_coupling)")

    bath_raw = merged["bath"]
    if bath_raw["temperature"] <= 0:
        errors.append("bath.temperature must be > 0 (Matsubara expansion needs T > 0)")
    n_mats = bath_raw.get("n_matsubara")
    if n_mats is not None and (not isinstance(n_mats, int) or n_mats < 0):
        errors.append("bath.n_matsubara must be a non-negative integer (or omitted for auto)")
    if not bath_raw.get("lorentzians"):
        errors.append("bath.lorentzians must be a non-empty list")

    heom_raw = merged["heom"]
    if heom_raw["level"] < 0:
        errors.append("heom.level must be >= 0")
    if heom_raw["dt_au"] <= 0:
        errors.append("heom.dt_au must be > 0")
    if heom_raw["t_final_fs"] <= 0:
        errors.append("heom.t_final_fs must be > 0")
    from .units import au_to_fs

    if heom_raw["sample_every_fs"] < au_to_fs(heom_raw["dt_au"]):
        errors.append("heom.sample_every_fs must be >= dt")

    run_raw = merged["run"]
    if run_raw["initial_state"] not in _INITIAL_STATES:
        errors.append(
            f"run.initial_state must be one of {_INITIAL_STATES}, got {run_raw['initial_state']!r}"
        )

    sweep_raw = merged.get("sweep", {})
    grid = sweep_raw.get("omega0")
    if grid is not None and (not grid or any(w <= 0 for w in grid)):
        errors.append("sweep.omega0 must be a non-empty list of positive frequencies")
    levels = sweep_raw.get("levels")
    if levels is not None and (not levels or any(
            (not isinstance(ell, int)) or ell < 0 for ell in levels)):
        errors.append("sweep.levels must be a non-empty list of non-negative integers")

    if errors:
        raise ConfigError("; ".join(errors))

    try:
        components = tuple(
            LorentzianComponent(float(c["delta"]), float(c["omega_c"]), float(c["gamma_w"]))
            for c in bath_raw["lorentzians"]
        )
        bath = BathSpec(SpectralDensity(components), bath_raw["temperature"], n_mats)
    except Exception as exc:
        raise ConfigError(f"bath: {exc}") from exc

    if has_omega0:
        system = SystemSpec.from_omega0(float(sys_raw["omega0"]))
    else:
        system = SystemSpec(float(sys_raw["omega0_d"]), float(sys_raw["w_coupling"]))

    return ExperimentConfig(
        system=system,
        bath=bath,
        level=int(heom_raw["level"]),
        dt_au=float(heom_raw["dt_au"]),
        t_final_fs=float(heom_raw["t_final_fs"]),
        sample_every_fs=float(heom_raw["sample_every_fs"]),
        out_dir=str(run_raw["out_dir"]),
        initial_state=run_raw["initial_state"],
        ado_budget=int(run_raw["ado_budget"]),
        omega0_grid=tuple(float(w) for w in grid) if grid else None,
        level_list=tuple(int(ell) for ell in levels) if levels else None,
        correlation_sample_fs=float(merged["correlation"]["sample_every_fs"]),
        resolved=merged,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        if path.suffix == ".json":
            import json

            raw = json.loads(path.read_text())
        else:
            raw = yaml.safe_load(path.read_text())
    except (yaml.YAMLError, ValueError) as exc:
        raise ConfigError(f"could not parse {path}: {exc}") from exc
    if isinstance(raw, dict) and "config" in raw:
        # a run manifest: reuse its resolved configuration verbatim
        raw = raw["config"]
    return resolve_config(raw)


def preset_config(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    return resolve_config(copy.deepcopy(PRESETS[name]))
