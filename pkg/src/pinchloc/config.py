"""Scenario configuration: defaults, YAML parsing, validation.

A config document is a mapping with optional sections room, waveguide,
pas, users, tx, noise, and run. Every key is optional; an empty
document yields the default indoor scenario (6 x 10 x 3 m room, 2.8 GHz
carrier, 0.1 W transmit power, PTFE-like guide with eps_r = 2.08 and
tan_delta = 0.0004, noise power -40 dBm, one user at room center).
Unknown or ill-typed keys raise ConfigError naming the offending key.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace

import yaml

from .channel import CHI_STD_SCALE, CarrierConfig, NoiseModel, TxConfig, WaveguideMaterial
from .errors import ConfigError
from .geometry import PaLayout, Room, UserPosition, even_pa_placement
from .ranging import DEFAULT_POWER_FLOOR
from .simulate import Scenario

__all__ = [
    "OUTPUT_DIR_ENV",
    "DEFAULT_SEED",
    "DEFAULT_NOISE_LEVELS_DBM",
    "DEFAULT_PA_COUNTS",
    "RunConfig",
    "default_scenario",
    "default_run_config",
    "parse_config",
    "load_config",
]

# Environment variable overriding the built-in default output directory.
OUTPUT_DIR_ENV = "PINCHLOC_OUTPUT_DIR"

DEFAULT_SEED = 1111
DEFAULT_OUTPUT_DIR = "results"
DEFAULT_NOISE_LEVELS_DBM = (-50.0, -45.0, -40.0, -35.0, -30.0)
DEFAULT_PA_COUNTS = (2, 3, 5, 7, 10)

_DEF_ROOM = {"d1": 6.0, "d2": 10.0, "h": 3.0}
_DEF_WAVEGUIDE = {"eps_r": 2.08, "tan_delta": 0.0004, "k_c": 0.0}
_DEF_TX = {"f_c": 2.8e9, "power": 0.1}
_DEF_SIGMA2_DBM = -40.0
_DEF_PA_COUNT = 3
_DEF_USER = (3.0, 5.0)


@dataclass(frozen=True)
class RunConfig:
    """Experiment-run parameters shared by the CLI subcommands.

    trials is None until a value is chosen; each subcommand applies its
    own default (1000 for montecarlo, 200 per sweep point) when neither
    the file nor a flag picked one.
    """

    seed: int = DEFAULT_SEED
    output_dir: str = DEFAULT_OUTPUT_DIR
    format: str = "csv"
    trials: int | None = None
    noise_levels_dbm: tuple[float, ...] = DEFAULT_NOISE_LEVELS_DBM
    pa_counts: tuple[int, ...] = DEFAULT_PA_COUNTS
    grid_nx: int = 60
    grid_ny: int = 100
    trials_per_cell: int = 50
    workers: int = 1
    user_index: int = 0
    placement: str = "midpoint"

    def __post_init__(self) -> None:
        if self.format not in ("csv", "json"):
            raise ConfigError(f"run.format must be 'csv' or 'json', got {self.format!r}")
        if self.trials is not None and self.trials < 1:
            raise ConfigError(f"run.trials must be >= 1, got {self.trials}")
        if not self.noise_levels_dbm:
            raise ConfigError("run.noise_levels_dbm must be non-empty")
        if not self.pa_counts:
            raise ConfigError("run.pa_counts must be non-empty")
        if any(c < 2 for c in self.pa_counts):
            raise ConfigError(f"run.pa_counts entries must be >= 2, got {min(self.pa_counts)}")
        if self.grid_nx < 2 or self.grid_ny < 2:
            raise ConfigError(f"run.grid must be at least 2x2, got {self.grid_nx}x{self.grid_ny}")
        if self.trials_per_cell < 1:
            raise ConfigError(f"run.trials_per_cell must be >= 1, got {self.trials_per_cell}")
        if self.workers < 1:
            raise ConfigError(f"run.workers must be >= 1, got {self.workers}")
        if self.user_index < 0:
            raise ConfigError(f"run.user_index must be >= 0, got {self.user_index}")
        if self.placement not in ("midpoint", "endpoint"):
            raise ConfigError(
                f"pas.placement must be 'midpoint' or 'endpoint', got {self.placement!r}"
            )


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR)


def default_scenario() -> Scenario:
    """The default parameter set used when config sections are omitted."""
    room = Room(**_DEF_ROOM)
    return Scenario(
        room=room,
        pa_layout=even_pa_placement(room, _DEF_PA_COUNT),
        users=(UserPosition(*_DEF_USER),),
        carrier=CarrierConfig(f_c=_DEF_TX["f_c"]),
        material=WaveguideMaterial(**_DEF_WAVEGUIDE),
        tx=TxConfig(power=_DEF_TX["power"]),
        noise=NoiseModel(sigma2_dbm=_DEF_SIGMA2_DBM),
        master_seed=DEFAULT_SEED,
    )


def default_run_config() -> RunConfig:
    return RunConfig(output_dir=default_output_dir())


def _section(doc: dict, name: str) -> dict:
    value = doc.pop(name, None)
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"section {name} must be a mapping, got {type(value).__name__}")
    return dict(value)


def _pop_number(sec: dict, section: str, key: str, default: float | None) -> float | None:
    value = sec.pop(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    return float(value)


def _pop_int(sec: dict, section: str, key: str, default: int | None) -> int | None:
    value = sec.pop(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
    return value


def _pop_str(sec: dict, section: str, key: str, default: str | None) -> str | None:
    value = sec.pop(key, default)
    if value is None:
        return None
    if not isinstance(value, str):
        raise ConfigError(f"{section}.{key} must be a string, got {value!r}")
    return value


def _pop_number_list(sec: dict, section: str, key: str, default) -> tuple[float, ...]:
    value = sec.pop(key, None)
    if value is None:
        return tuple(default)
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"{section}.{key} must be a non-empty list of numbers, got {value!r}")
    out = []
    for item in value:
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigError(f"{section}.{key} entries must be numbers, got {item!r}")
        out.append(float(item))
    return tuple(out)


def _reject_unknown(sec: dict, section: str) -> None:
    if sec:
        raise ConfigError(f"unknown key {section}.{next(iter(sec))}")


def _parse_pas(sec: dict, room: Room) -> tuple[PaLayout, str]:
    """Parse the pas section into (layout, placement rule)."""
    positions = sec.pop("positions", None)
    count = _pop_int(sec, "pas", "count", None)
    placement = _pop_str(sec, "pas", "placement", None)
    _reject_unknown(sec, "pas")
    rule = placement if placement is not None else "midpoint"
    if positions is not None:
        if count is not None or placement is not None:
            raise ConfigError("pas.positions conflicts with pas.count/pas.placement")
        if not isinstance(positions, (list, tuple)) or len(positions) < 2:
            raise ConfigError(f"pas.positions must list at least 2 coordinates, got {positions!r}")
        for item in positions:
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise ConfigError(f"pas.positions entries must be numbers, got {item!r}")
        layout = PaLayout(tuple(float(p) for p in positions))
        layout.validate_in_room(room)
        return layout, rule
    if count is None:
        count = _DEF_PA_COUNT
    return even_pa_placement(room, count, rule), rule


def _parse_users(doc: dict) -> tuple[UserPosition, ...]:
    value = doc.pop("users", None)
    if value is None:
        return (UserPosition(*_DEF_USER),)
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"users must be a non-empty list of positions, got {value!r}")
    out = []
    for i, item in enumerate(value):
        if isinstance(item, dict):
            entry = dict(item)
            x = _pop_number(entry, f"users[{i}]", "x", None)
            y = _pop_number(entry, f"users[{i}]", "y", None)
            _reject_unknown(entry, f"users[{i}]")
            if x is None or y is None:
                raise ConfigError(f"users[{i}] must provide both x and y")
        elif (
            isinstance(item, (list, tuple))
            and len(item) == 2
            and all(not isinstance(v, bool) and isinstance(v, (int, float)) for v in item)
        ):
            x, y = (float(v) for v in item)
        else:
            raise ConfigError(f"users[{i}] must be [x, y] or a mapping with x and y, got {item!r}")
        out.append(UserPosition(x, y))
    return tuple(out)


def parse_config(text: str) -> tuple[Scenario, RunConfig]:
    """Parse a YAML scenario document into (Scenario, RunConfig).

    Raises ConfigError on malformed documents, unknown keys, wrong
    types, or invariant violations, always naming the offending key.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config document: {exc}") from exc
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError(f"config root must be a mapping, got {type(doc).__name__}")
    doc = dict(doc)

    sec = _section(doc, "room")
    room = Room(
        d1=_pop_number(sec, "room", "d1", _DEF_ROOM["d1"]),
        d2=_pop_number(sec, "room", "d2", _DEF_ROOM["d2"]),
        h=_pop_number(sec, "room", "h", _DEF_ROOM["h"]),
    )
    _reject_unknown(sec, "room")

    sec = _section(doc, "waveguide")
    material = WaveguideMaterial(
        eps_r=_pop_number(sec, "waveguide", "eps_r", _DEF_WAVEGUIDE["eps_r"]),
        tan_delta=_pop_number(sec, "waveguide", "tan_delta", _DEF_WAVEGUIDE["tan_delta"]),
        k_c=_pop_number(sec, "waveguide", "k_c", _DEF_WAVEGUIDE["k_c"]),
    )
    _reject_unknown(sec, "waveguide")

    layout, placement_rule = _parse_pas(_section(doc, "pas"), room)
    users = _parse_users(doc)

    sec = _section(doc, "tx")
    carrier = CarrierConfig(f_c=_pop_number(sec, "tx", "f_c", _DEF_TX["f_c"]))
    tx = TxConfig(power=_pop_number(sec, "tx", "power", _DEF_TX["power"]))
    _reject_unknown(sec, "tx")

    sec = _section(doc, "noise")
    sigma2_dbm = _pop_number(sec, "noise", "sigma2_dbm", _DEF_SIGMA2_DBM)
    chi_std_scale = _pop_number(sec, "noise", "chi_std_scale", CHI_STD_SCALE)
    chi_std_watts = _pop_number(sec, "noise", "chi_std_watts", None)
    per_pa = sec.pop("per_pa_noise", None)
    _reject_unknown(sec, "noise")
    if per_pa is not None:
        if not isinstance(per_pa, (list, tuple)):
            raise ConfigError(f"noise.per_pa_noise must be a list of numbers, got {per_pa!r}")
        if len(per_pa) != layout.count:
            raise ConfigError(
                f"noise.per_pa_noise must have one entry per antenna "
                f"({layout.count}), got {len(per_pa)}"
            )
        for item in per_pa:
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise ConfigError(f"noise.per_pa_noise entries must be numbers, got {item!r}")
        per_pa = tuple(float(n) for n in per_pa)
    noise = NoiseModel(
        sigma2_dbm=sigma2_dbm,
        per_pa_noise=per_pa,
        chi_std_scale=chi_std_scale,
        chi_std_watts=chi_std_watts,
    )

    sec = _section(doc, "run")
    seed = _pop_int(sec, "run", "seed", DEFAULT_SEED)
    grid = sec.pop("grid", None)
    if grid is None:
        grid_nx, grid_ny = 60, 100
    else:
        if (
            not isinstance(grid, (list, tuple))
            or len(grid) != 2
            or any(isinstance(v, bool) or not isinstance(v, int) for v in grid)
        ):
            raise ConfigError(f"run.grid must be [nx, ny] integers, got {grid!r}")
        grid_nx, grid_ny = grid
    range_cap = _pop_number(sec, "run", "range_cap", None)
    if range_cap is not None and math.isinf(range_cap) and range_cap < 0:
        raise ConfigError(f"run.range_cap must be positive, got {range_cap}")
    run = RunConfig(
        seed=seed,
        output_dir=_pop_str(sec, "run", "output_dir", default_output_dir()),
        format=_pop_str(sec, "run", "format", "csv"),
        trials=_pop_int(sec, "run", "trials", None),
        noise_levels_dbm=_pop_number_list(sec, "run", "noise_levels_dbm", DEFAULT_NOISE_LEVELS_DBM),
        pa_counts=tuple(
            int(c) for c in _pop_number_list(sec, "run", "pa_counts", DEFAULT_PA_COUNTS)
        ),
        grid_nx=grid_nx,
        grid_ny=grid_ny,
        trials_per_cell=_pop_int(sec, "run", "trials_per_cell", 50),
        workers=_pop_int(sec, "run", "workers", 1),
        user_index=_pop_int(sec, "run", "user_index", 0),
        placement=placement_rule,
    )
    scenario = Scenario(
        room=room,
        pa_layout=layout,
        users=users,
        carrier=carrier,
        material=material,
        tx=tx,
        noise=noise,
        master_seed=seed,
        constants_mode=_pop_str(sec, "run", "constants", "approx"),
        weight_mode=_pop_str(sec, "run", "weights", "snr"),
        clamp_policy=_pop_str(sec, "run", "clamp_policy", "floor"),
        range_cap=range_cap,
        power_floor=_pop_number(sec, "run", "power_floor", DEFAULT_POWER_FLOOR),
    )
    _reject_unknown(sec, "run")
    _reject_unknown(doc, "config")
    if run.user_index >= len(scenario.users):
        raise ConfigError(
            f"run.user_index {run.user_index} out of range for {len(scenario.users)} users"
        )
    return scenario, run


def load_config(path: str | os.PathLike | None) -> tuple[Scenario, RunConfig]:
    """Load a config file, or the full default set when path is None."""
    if path is None:
        return default_scenario(), default_run_config()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    scenario, run = parse_config(text)
    return scenario, run


def apply_overrides(scenario: Scenario, run: RunConfig, **overrides) -> tuple[Scenario, RunConfig]:
    """Apply flag-level overrides on top of file values.

    Recognized keys: seed, output_dir, format, trials, noise_levels_dbm,
    pa_counts, grid_nx, grid_ny, trials_per_cell, workers, user_index,
    weights, clamp_policy, constants, range_cap, power_floor, pa_count,
    placement. None values leave the current setting untouched.
    """
    scenario_keys = {
        "weights": "weight_mode",
        "clamp_policy": "clamp_policy",
        "constants": "constants_mode",
        "range_cap": "range_cap",
        "power_floor": "power_floor",
    }
    run_updates = {}
    scen_updates = {}
    pa_count = overrides.pop("pa_count", None)
    placement = overrides.pop("placement", None)
    for key, value in overrides.items():
        if value is None:
            continue
        if key == "seed":
            run_updates["seed"] = value
            scen_updates["master_seed"] = value
        elif key in scenario_keys:
            scen_updates[scenario_keys[key]] = value
        elif key in RunConfig.__dataclass_fields__:
            run_updates[key] = value
        else:
            raise ConfigError(f"unknown override {key}")
    if placement is not None:
        run_updates["placement"] = placement
    if pa_count is not None or placement is not None:
        count = pa_count if pa_count is not None else scenario.pa_layout.count
        rule = placement if placement is not None else run.placement
        scen_updates["pa_layout"] = even_pa_placement(scenario.room, count, rule)
    if scen_updates:
        scenario = replace(scenario, **scen_updates)
    if run_updates:
        run = replace(run, **run_updates)
    if run.user_index >= len(scenario.users):
        raise ConfigError(
            f"run.user_index {run.user_index} out of range for {len(scenario.users)} users"
        )
    return scenario, run
