"""Plain-text scenario files with explicit unit suffixes.

A file has up to six sections, all optional::

    [params]            # any SystemParams field
    sigma2 = 7.9e-9 mW
    W_U = 12 MHz
    [scenario]
    uav_positions = 125,125,100; 125,375,100 m
    masses_per_uav = 5
    placement = disc    # or explicit, with mass_positions = x,y,z; ... m
    [task]
    S = 10 Mbit
    [channel]
    mode = deterministic
    seed = 0
    [solver]
    T = 20
    [sweep]
    variable = S
    values = 2, 4, 6 Mbit   # or start / stop / step

Dimensional quantities must carry a unit; bare numbers are only accepted for
dimensionless keys. Everything is converted to SI here and nowhere else.
"""
from __future__ import annotations

import configparser
import dataclasses
import math
import os
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from samin import model
from samin.errors import ConfigError, ParameterError
from samin.optimizer import SolverConfig
from samin.params import SystemParams
from samin.scenario import DEFAULT_UAV_POSITIONS, Scenario, build_scenario, place_masses

# unit -> factor to SI, per dimension; callables handle logarithmic units
UNITS = {
    "length": {"m": 1.0, "km": 1e3},
    "time": {"s": 1.0, "ms": 1e-3},
    "frequency": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9, "cycles/s": 1.0},
    "power": {"W": 1.0, "mW": 1e-3, "kW": 1e3,
              "dBm": lambda v: 10.0 ** (v / 10.0) * 1e-3, "dBW": lambda v: 10.0 ** (v / 10.0)},
    "psd": {"W/Hz": 1.0, "mW/Hz": 1e-3, "dBm/Hz": lambda v: 10.0 ** (v / 10.0) * 1e-3},
    "energy": {"J": 1.0, "mJ": 1e-3, "kJ": 1e3},
    "bits": {"bit": 1.0, "kbit": 1e3, "Mbit": 1e6, "Gbit": 1e9},
    "angle": {"rad": 1.0, "deg": math.pi / 180.0},
    "speed": {"m/s": 1.0, "km/s": 1e3},
    "grav": {"m3/s2": 1.0, "km3/s2": 1e9},
    # linear power ratio; a dB suffix converts
    "gain": {"": 1.0, "dB": lambda v: 10.0 ** (v / 10.0), "dBi": lambda v: 10.0 ** (v / 10.0)},
    # stored in decibels as-is
    "db": {"": 1.0, "dB": 1.0},
    "none": {"": 1.0},
    "cycles_per_bit": {"": 1.0, "cycles/bit": 1.0},
}
SI_UNIT = {"length": "m", "time": "s", "frequency": "Hz", "power": "W", "psd": "W/Hz",
           "energy": "J", "bits": "bit", "angle": "rad", "speed": "m/s", "grav": "m3/s2",
           "gain": "", "db": "dB", "none": "", "cycles_per_bit": "cycles/bit"}
UNITLESS_OK = {"gain", "db", "none", "cycles_per_bit"}

PARAM_DIMENSIONS = {
    "L0_dB": "db", "d0": "length", "zeta": "none", "sigma_X_dB": "db", "F_dB": "db",
    "xi": "none", "K0_rician": "gain", "G_U": "gain", "G_M": "gain", "sigma2": "power",
    "W_U": "frequency", "W_L": "frequency", "N0": "psd", "gamma": "none",
    "leo_link_gain": "gain", "h_orbit": "length", "R_e": "length", "mu_grav": "grav",
    "theta_elev": "angle", "c_light": "speed", "d_max": "length",
    "c_bit_local": "cycles_per_bit", "c_bit_uav": "cycles_per_bit", "c_bit_leo": "cycles_per_bit",
    "P_l": "power", "P_U": "power", "P_L": "power", "P_max_U": "power", "P_max_L": "power",
    "E_max_U": "energy", "E_max_L": "energy", "rho_max_U": "frequency",
    "rho_max_L": "frequency", "T_deadline": "time", "T_coverage_override": "time",
    "chi": "none", "exponent_cap": "none",
}
TASK_DIMENSIONS = {"S": "bits", "rho_local": "frequency", "T_deadline": "time",
                   "t_U": "time", "t_L": "time"}
SWEEP_DIMENSIONS = {"S": "bits", "t_U": "time", "t_L": "time", "N": "none",
                    "rho_local": "frequency", "T_deadline": "time", "a": "none"}
# default sweep axes, in SI
SWEEP_DEFAULTS = {
    "a": (0.3, 0.5, 0.7),
    "t_U": (0.2, 0.3, 0.4, 0.5, 0.6),
    "t_L": (0.5, 0.6, 0.7, 0.8, 0.9),
    "S": (2e6, 4e6, 6e6, 8e6, 1e7),
    "N": (2.0, 4.0, 6.0, 8.0, 10.0),
    "rho_local": tuple(float(v) for v in np.arange(1, 11) * 1e9),
    "T_deadline": (0.8, 0.9, 1.0, 1.1, 1.2),
}
SCHEMES = ("stp", "pomt", "eos", "eacr")
PLACEMENTS = ("disc", "explicit")
OUT_OF_RANGE = ("reject", "regenerate", "keep")
SECTION_KEYS = {
    "params": set(PARAM_DIMENSIONS),
    "scenario": {"uav_positions", "masses_per_uav", "placement", "placement_radius",
                 "mass_positions", "out_of_range"},
    "task": set(TASK_DIMENSIONS),
    "channel": {"mode", "seed"},
    "solver": {"T", "delta", "rel_tol", "warm_start"},
    "sweep": {"variable", "values", "start", "stop", "step", "schemes"},
}
SEED_ENV = "SAMIN_SEED"

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf)\s*(\S*)\s*$")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple
    schemes: tuple = SCHEMES


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved scenario description, every quantity in SI."""

    params: SystemParams = field(default_factory=SystemParams)
    uav_positions: tuple = DEFAULT_UAV_POSITIONS
    masses_per_uav: int = 5
    placement: str = "disc"
    placement_radius: Optional[float] = None
    mass_positions: Optional[tuple] = None
    out_of_range: str = "reject"
    S: float = 1e7
    rho_local: float = 7e9
    T_deadline: Optional[float] = None
    t_U: float = 0.4
    t_L: float = 0.7
    channel_mode: str = model.DETERMINISTIC
    seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    warm_start: bool = True
    sweep: Optional[SweepSpec] = None

    @property
    def deadline(self) -> float:
        return self.params.T_deadline if self.T_deadline is None else self.T_deadline

    @property
    def radius(self) -> float:
        return 0.9 * self.params.d_max if self.placement_radius is None else self.placement_radius


# --- value parsing ------------------------------------------------------------

def _to_si(number: float, unit: str, dimension: str, key: str, line) -> float:
    table = UNITS[dimension]
    if unit == "" and dimension not in UNITLESS_OK:
        raise ConfigError(f"missing unit (expected one of {sorted(u for u in table if u)})",
                          key=key, line=line)
    if unit not in table:
        raise ConfigError(f"unit {unit!r} does not fit a {dimension} quantity", key=key, line=line)
    conv = table[unit]
    return float(conv(number)) if callable(conv) else float(number * conv)


def parse_quantity(text: str, dimension: str, key: str = None, line=None) -> float:
    """``"12 MHz"`` -> ``12e6``; raises :class:`ConfigError` naming ``key``."""
    m = _NUMBER.match(text)
    if not m:
        raise ConfigError(f"cannot read a number from {text!r}", key=key, line=line)
    return _to_si(float(m.group(1)), m.group(2), dimension, key, line)


def _split_trailing_unit(text: str) -> tuple[str, str]:
    parts = text.rsplit(None, 1)
    if len(parts) == 2 and not re.match(r"^[-+0-9.]", parts[1]):
        return parts[0], parts[1]
    return text, ""


def parse_list(text: str, dimension: str, key: str = None, line=None) -> tuple:
    """``"2, 4, 6 Mbit"`` -> ``(2e6, 4e6, 6e6)``; one unit covers the whole list."""
    body, unit = _split_trailing_unit(text.strip())
    items = [t for t in re.split(r"[,\s]+", body.strip()) if t]
    if not items:
        raise ConfigError("empty list", key=key, line=line)
    out = []
    for item in items:
        try:
            number = float(item)
        except ValueError:
            raise ConfigError(f"cannot read a number from {item!r}", key=key, line=line) from None
        out.append(_to_si(number, unit, dimension, key, line))
    return tuple(out)


def parse_points(text: str, key: str = None, line=None) -> tuple:
    """``"1,2,3; 4,5,6 m"`` -> ``((1., 2., 3.), (4., 5., 6.))``."""
    body, unit = _split_trailing_unit(text.strip())
    points = []
    for chunk in body.split(";"):
        if not chunk.strip():
            continue
        coords = [c for c in re.split(r"[,\s]+", chunk.strip()) if c]
        if len(coords) != 3:
            raise ConfigError(f"expected x,y,z triples, got {chunk.strip()!r}", key=key, line=line)
        try:
            values = [float(c) for c in coords]
        except ValueError:
            raise ConfigError(f"cannot read coordinates {chunk.strip()!r}", key=key, line=line) from None
        points.append(tuple(_to_si(v, unit, "length", key, line) for v in values))
    if not points:
        raise ConfigError("no positions given", key=key, line=line)
    return tuple(points)


# --- file parsing -------------------------------------------------------------

class _LineIndex:
    """Maps (section, key) to the 1-based line where the key appears."""

    def __init__(self, text: str):
        self._lines = {}
        section = None
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                self._lines.setdefault((section, None), number)
                continue
            m = re.match(r"^([^=:#;\s][^=:]*?)\s*[=:]", line)
            if m and section is not None:
                self._lines.setdefault((section, m.group(1)), number)

    def __call__(self, section, key=None):
        return self._lines.get((section, key))


def _strip_comment(value: str) -> str:
    return re.split(r"\s#", value, maxsplit=1)[0].strip()


def _as_int(text, key, line) -> int:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}", key=key, line=line) from None
    if value != int(value):
        raise ConfigError(f"expected an integer, got {text!r}", key=key, line=line)
    return int(value)


def _as_bool(text, key, line) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected true/false, got {text!r}", key=key, line=line)


def _choice(text, options, key, line) -> str:
    if text not in options:
        raise ConfigError(f"expected one of {list(options)}, got {text!r}", key=key, line=line)
    return text


def parse_scenario_text(text: str, environ=None) -> ScenarioConfig:
    """Parse scenario text; ``environ`` (default ``os.environ``) may override the seed."""
    environ = os.environ if environ is None else environ
    cp = configparser.ConfigParser(strict=True, interpolation=None,
                                   comment_prefixes=("#", ";"), inline_comment_prefixes=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key in [{exc.section}]", key=exc.option, line=exc.lineno) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError("duplicate section", key=exc.section, line=exc.lineno) from None
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("key outside any [section]", line=exc.lineno) from None
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    where = _LineIndex(text)

    raw = {}
    for section in cp.sections():
        if section not in SECTION_KEYS:
            raise ConfigError(f"unknown section [{section}]", key=section, line=where(section))
        for key, value in cp.items(section):
            if key not in SECTION_KEYS[section]:
                raise ConfigError(f"unknown key in [{section}]", key=key, line=where(section, key))
            raw[(section, key)] = (_strip_comment(value), where(section, key))

    def get(section, key):
        return raw.get((section, key), (None, None))

    # params
    overrides = {}
    for key, dim in PARAM_DIMENSIONS.items():
        value, line = get("params", key)
        if value is None:
            continue
        number = parse_quantity(value, dim, key, line)
        if key == "xi":
            number = _as_int(value, key, line)
        overrides[key] = number
    try:
        params = SystemParams(**overrides)
    except ParameterError as exc:
        bad = next((k for k in overrides if str(exc).startswith(k)), None)
        raise ConfigError(str(exc), key=bad, line=get("params", bad)[1] if bad else None) from None

    kw = {"params": params}
    value, line = get("scenario", "uav_positions")
    if value is not None:
        kw["uav_positions"] = parse_points(value, "uav_positions", line)
    value, line = get("scenario", "masses_per_uav")
    if value is not None:
        kw["masses_per_uav"] = _as_int(value, "masses_per_uav", line)
        if kw["masses_per_uav"] < 1:
            raise ConfigError("need at least one MASS per UAV", key="masses_per_uav", line=line)
    value, line = get("scenario", "placement")
    if value is not None:
        kw["placement"] = _choice(value, PLACEMENTS, "placement", line)
    value, line = get("scenario", "placement_radius")
    if value is not None:
        kw["placement_radius"] = parse_quantity(value, "length", "placement_radius", line)
    value, line = get("scenario", "mass_positions")
    if value is not None:
        kw["mass_positions"] = parse_points(value, "mass_positions", line)
    value, line = get("scenario", "out_of_range")
    if value is not None:
        kw["out_of_range"] = _choice(value, OUT_OF_RANGE, "out_of_range", line)

    for key, dim in TASK_DIMENSIONS.items():
        value, line = get("task", key)
        if value is not None:
            kw[key] = parse_quantity(value, dim, key, line)

    value, line = get("channel", "mode")
    if value is not None:
        kw["channel_mode"] = _choice(value, (model.DETERMINISTIC, model.STOCHASTIC), "mode", line)
    value, line = get("channel", "seed")
    if value is not None:
        kw["seed"] = _as_int(value, "seed", line)
    if environ.get(SEED_ENV):
        kw["seed"] = _as_int(environ[SEED_ENV], SEED_ENV, None)

    solver = {}
    for key, conv in (("T", _as_int), ("delta", None), ("rel_tol", None)):
        value, line = get("solver", key)
        if value is not None:
            solver[key] = conv(value, key, line) if conv else parse_quantity(value, "none", key, line)
    if solver:
        kw["solver"] = SolverConfig(**solver)
    value, line = get("solver", "warm_start")
    if value is not None:
        kw["warm_start"] = _as_bool(value, "warm_start", line)

    if cp.has_section("sweep"):
        kw["sweep"] = _parse_sweep(get)

    config = ScenarioConfig(**kw)
    _check_config(config, lambda section, key: get(section, key)[1])
    return config


def _parse_sweep(get) -> SweepSpec:
    variable, line = get("sweep", "variable")
    if variable is None:
        raise ConfigError("a [sweep] section needs a variable", key="variable")
    _choice(variable, tuple(SWEEP_DIMENSIONS), "variable", line)
    dim = SWEEP_DIMENSIONS[variable]
    values, vline = get("sweep", "values")
    start, sline = get("sweep", "start")
    if values is not None and start is not None:
        raise ConfigError("give either values or start/stop/step, not both", key="values", line=vline)
    if values is not None:
        points = parse_list(values, dim, "values", vline)
    elif start is not None:
        stop, tline = get("sweep", "stop")
        step, pline = get("sweep", "step")
        if stop is None or step is None:
            raise ConfigError("start needs stop and step", key="start", line=sline)
        lo = parse_quantity(start, dim, "start", sline)
        hi = parse_quantity(stop, dim, "stop", tline)
        dx = parse_quantity(step, dim, "step", pline)
        if not dx > 0 or hi < lo:
            raise ConfigError("need step > 0 and stop >= start", key="step", line=pline)
        count = int(math.floor((hi - lo) / dx * (1 + 1e-12))) + 1
        points = tuple(float(lo + i * dx) for i in range(count))
    else:
        points = SWEEP_DEFAULTS[variable]
    if variable == "N":
        points = tuple(float(_as_int(repr(p), "values", vline)) for p in points)
    schemes, cline = get("sweep", "schemes")
    chosen = SCHEMES
    if schemes is not None:
        chosen = tuple(t for t in re.split(r"[,\s]+", schemes) if t)
        for name in chosen:
            _choice(name, SCHEMES, "schemes", cline)
        if len(set(chosen)) != len(chosen) or not chosen:
            raise ConfigError("schemes must be a non-empty list without repeats", key="schemes", line=cline)
    return SweepSpec(variable, tuple(float(p) for p in points), chosen)


def _check_config(cfg: ScenarioConfig, line_of) -> None:
    p = cfg.params
    for key in ("S", "rho_local", "t_U", "t_L"):
        if not getattr(cfg, key) > 0:
            raise ConfigError("must be positive", key=key, line=line_of("task", key))
    if cfg.T_deadline is not None and not cfg.T_deadline > 0:
        raise ConfigError("must be positive", key="T_deadline", line=line_of("task", "T_deadline"))
    propagation = 2.0 * model.leo_geometry(p).d_L / p.c_light
    if not cfg.t_L > propagation:
        raise ConfigError(f"t_L must exceed the round-trip propagation time {propagation:.4g} s",
                          key="t_L", line=line_of("task", "t_L"))
    for pos in cfg.uav_positions:
        if pos[2] < 0:
            raise ConfigError("UAV altitude must be non-negative", key="uav_positions",
                              line=line_of("scenario", "uav_positions"))
    if cfg.placement == "explicit":
        if cfg.mass_positions is None:
            raise ConfigError("explicit placement needs mass_positions", key="placement",
                              line=line_of("scenario", "placement"))
        expected = len(cfg.uav_positions) * cfg.masses_per_uav
        if len(cfg.mass_positions) != expected:
            raise ConfigError(f"expected {expected} positions (UAV-major order)", key="mass_positions",
                              line=line_of("scenario", "mass_positions"))
        if any(q[2] < 0 for q in cfg.mass_positions):
            raise ConfigError("MASS positions must lie at or above sea level", key="mass_positions",
                              line=line_of("scenario", "mass_positions"))
        if cfg.out_of_range == "regenerate":
            raise ConfigError("explicit positions cannot be regenerated", key="out_of_range",
                              line=line_of("scenario", "out_of_range"))
        if cfg.out_of_range == "reject":
            _reject_far(cfg, np.asarray(cfg.mass_positions, float).reshape(
                len(cfg.uav_positions), cfg.masses_per_uav, 3), line_of("scenario", "mass_positions"))
    elif cfg.mass_positions is not None:
        raise ConfigError("mass_positions needs placement = explicit", key="mass_positions",
                          line=line_of("scenario", "mass_positions"))
    if cfg.sweep is not None and cfg.sweep.variable == "N" and cfg.placement == "explicit":
        raise ConfigError("an N sweep needs disc placement", key="variable", line=line_of("sweep", "variable"))


def _far_mask(cfg: ScenarioConfig, mass: np.ndarray) -> np.ndarray:
    uav = np.asarray(cfg.uav_positions, float)
    return np.linalg.norm(mass - uav[:, None, :], axis=-1) > cfg.params.d_max


def _reject_far(cfg, mass, line):
    far = _far_mask(cfg, mass)
    if far.any():
        m, n = (int(i) for i in np.argwhere(far)[0])
        raise ConfigError(f"MASS ({m}, {n}) is farther than d_max from its UAV",
                          key="mass_positions", line=line)


def parse_scenario(path, environ=None) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_scenario_text(text, environ)
    except ConfigError as exc:
        exc.args = (f"{path}: {exc.args[0]}",) + exc.args[1:]
        raise


# --- scenario construction ----------------------------------------------------

MAX_REDRAWS = 1000


def mass_layout(cfg: ScenarioConfig, n_per_uav: Optional[int] = None) -> np.ndarray:
    """MASS coordinates of shape (M, N, 3) honouring the out-of-range policy."""
    if cfg.placement == "explicit":
        return np.asarray(cfg.mass_positions, float).reshape(len(cfg.uav_positions),
                                                            cfg.masses_per_uav, 3)
    n = cfg.masses_per_uav if n_per_uav is None else n_per_uav
    mass = place_masses(cfg.uav_positions, n, cfg.radius, cfg.seed)
    if cfg.out_of_range == "keep":
        return mass
    for attempt in range(1, MAX_REDRAWS + 1):
        far = _far_mask(cfg, mass)
        if not far.any():
            return mass
        if cfg.out_of_range == "reject":
            _reject_far(cfg, mass, None)
        fresh = place_masses(cfg.uav_positions, n, cfg.radius, [cfg.seed, attempt])
        mass[far] = fresh[far]
    raise ConfigError("could not place every MASS within d_max", key="placement_radius")


def build_from_config(cfg: ScenarioConfig, n_per_uav: Optional[int] = None) -> Scenario:
    return build_scenario(
        cfg.params, cfg.uav_positions, mass_layout(cfg, n_per_uav),
        S=cfg.S, rho_local=cfg.rho_local, T_deadline=cfg.deadline, t_U=cfg.t_U, t_L=cfg.t_L,
        channel_mode=cfg.channel_mode, seed=cfg.seed,
    )


# --- serialisation ------------------------------------------------------------

def _fmt(value: float, dimension: str) -> str:
    unit = SI_UNIT[dimension]
    text = repr(float(value))
    return f"{text} {unit}" if unit else text


def _fmt_points(points) -> str:
    return "; ".join(",".join(repr(float(c)) for c in p) for p in points) + " m"


def serialize(cfg: ScenarioConfig) -> str:
    """Scenario text that parses back to an equal config; every value in SI."""
    out = ["[params]"]
    for key, dim in PARAM_DIMENSIONS.items():
        value = getattr(cfg.params, key)
        if value is None:
            continue
        out.append(f"{key} = {value}" if key == "xi" else f"{key} = {_fmt(value, dim)}")
    out += ["", "[scenario]", f"uav_positions = {_fmt_points(cfg.uav_positions)}",
            f"masses_per_uav = {cfg.masses_per_uav}", f"placement = {cfg.placement}"]
    if cfg.placement_radius is not None:
        out.append(f"placement_radius = {_fmt(cfg.placement_radius, 'length')}")
    if cfg.mass_positions is not None:
        out.append(f"mass_positions = {_fmt_points(cfg.mass_positions)}")
    out.append(f"out_of_range = {cfg.out_of_range}")
    out += ["", "[task]"]
    for key, dim in TASK_DIMENSIONS.items():
        value = getattr(cfg, key)
        if value is not None:
            out.append(f"{key} = {_fmt(value, dim)}")
    out += ["", "[channel]", f"mode = {cfg.channel_mode}", f"seed = {cfg.seed}",
            "", "[solver]", f"T = {cfg.solver.T}", f"delta = {cfg.solver.delta!r}",
            f"rel_tol = {cfg.solver.rel_tol!r}", f"warm_start = {str(cfg.warm_start).lower()}"]
    if cfg.sweep is not None:
        dim = SWEEP_DIMENSIONS[cfg.sweep.variable]
        unit = SI_UNIT[dim]
        values = ", ".join(repr(float(v)) for v in cfg.sweep.values) + (f" {unit}" if unit else "")
        out += ["", "[sweep]", f"variable = {cfg.sweep.variable}", f"values = {values}",
                f"schemes = {', '.join(cfg.sweep.schemes)}"]
    return "\n".join(out) + "\n"


def effective_parameters(cfg: ScenarioConfig) -> dict:
    """Flat SI view of everything that determines a run, for output metadata."""
    flat = {f"params.{k}": v for k, v in cfg.params.as_dict().items()}
    for f in dataclasses.fields(cfg):
        if f.name in ("params", "solver", "sweep"):
            continue
        value = getattr(cfg, f.name)
        flat[f.name] = [list(p) for p in value] if f.name.endswith("positions") and value else value
    flat.update({f"solver.{k}": v for k, v in dataclasses.asdict(cfg.solver).items()})
    if cfg.sweep is not None:
        flat.update({"sweep.variable": cfg.sweep.variable, "sweep.values": list(cfg.sweep.values),
                     "sweep.schemes": list(cfg.sweep.schemes)})
    return flat
