"""Run configuration: named figure presets, YAML config files and flag overrides."""

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import yaml

COMMANDS = ("coeffs", "dynamics", "estimate", "sweep", "check")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Range:
    """Either ``count`` evenly spaced points in [lo, hi] or explicit ``values``."""

    lo: float = 0.0
    hi: float = 0.0
    count: int = 1
    values: tuple = ()

    def __post_init__(self):
        if self.values:
            if not all(math.isfinite(v) for v in self.values):
                raise ConfigError(f"non-finite value in {self.values!r}")
            return
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ConfigError(f"range bounds must be finite, got {self.lo!r}:{self.hi!r}")
        if int(self.count) != self.count or self.count < 1:
            raise ConfigError(f"range count must be >= 1, got {self.count!r}")
        if self.count == 1 and self.lo != self.hi:
            raise ConfigError(f"a single-point range needs min == max, got {self.lo!r}:{self.hi!r}")

    def points(self):
        if self.values:
            return np.array(self.values, dtype=float)
        return np.linspace(self.lo, self.hi, int(self.count))

    @classmethod
    def parse(cls, text):
        """``MIN:MAX:N``, a single value, or a comma-separated list."""
        text = str(text).strip()
        try:
            if ":" in text:
                lo, hi, n = text.split(":")
                return cls(float(lo), float(hi), int(n))
            vals = tuple(float(v) for v in text.split(","))
        except ValueError as exc:
            raise ConfigError(f"cannot parse range {text!r}") from exc
        if len(vals) == 1:
            return cls(vals[0], vals[0], 1)
        return cls(values=vals)

    @classmethod
    def from_obj(cls, obj):
        if isinstance(obj, Range):
            return obj
        if isinstance(obj, dict):
            if "values" in obj:
                return cls(values=tuple(float(v) for v in obj["values"]))
            try:
                return cls(float(obj["min"]), float(obj["max"]), int(obj.get("count", 1)))
            except KeyError as exc:
                raise ConfigError(f"range needs min and max: {obj!r}") from exc
        if isinstance(obj, (list, tuple)):
            return cls(values=tuple(float(v) for v in obj))
        if isinstance(obj, (int, float)):
            return cls(float(obj), float(obj), 1)
        return cls.parse(obj)

    def to_obj(self):
        if self.values:
            return {"values": [float(v) for v in self.values]}
        return {"min": float(self.lo), "max": float(self.hi), "count": int(self.count)}


@dataclass(frozen=True)
class RunConfig:
    command: str
    preset: str = ""
    delta: Range = field(default_factory=lambda: Range(1.0, 1.0, 1))
    k0: Range = field(default_factory=lambda: Range(math.pi / 2, math.pi / 2, 1))
    sigma: Range = field(default_factory=lambda: Range(15.0, 15.0, 1))
    mu: float = None
    n_sites: int = None
    t_max: float = None
    n_times: int = 401
    output_path: str = ""
    quad_tol: float = 1e-10
    threads: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {COMMANDS}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if int(self.n_times) != self.n_times or self.n_times < 1:
            raise ConfigError("n_times must be a positive integer")
        if not (self.quad_tol > 0 and math.isfinite(self.quad_tol)):
            raise ConfigError("quad_tol must be positive")
        for name in ("mu", "t_max"):
            v = getattr(self, name)
            if v is not None and not math.isfinite(v):
                raise ConfigError(f"{name} must be finite")
        if self.t_max is not None and self.t_max < 0:
            raise ConfigError("t_max must be non-negative")

    def to_obj(self):
        """Result-determining settings; output location and thread count are left out."""
        obj = asdict(self)
        del obj["output_path"], obj["threads"]
        for name in ("delta", "k0", "sigma"):
            obj[name] = getattr(self, name).to_obj()
        return obj


_TWO_PI = 2 * math.pi

PRESETS = {
    "fig1": dict(
        command="coeffs",
        delta=Range(-4.0, 4.0, 101),
        # 100 points on (-pi, pi]
        k0=Range(-math.pi + _TWO_PI / 100, math.pi, 100),
    ),
    "fig2-left": dict(command="dynamics", sigma=Range(15.0, 15.0, 1), delta=Range(1.0, 1.0, 1), k0=Range(values=(1.6, 0.78, 0.44))),
    "fig2-right": dict(command="dynamics", sigma=Range(15.0, 15.0, 1), delta=Range(values=(1.0, 2.0, 3.0)), k0=Range(1.6, 1.6, 1)),
    # even counts keep delta = 0, where the QFI integrand is singular at k = 0, off the grid
    "fig3": dict(command="estimate", sigma=Range(5.0, 5.0, 1), delta=Range(-4.0, 4.0, 80), k0=Range(0.3, math.pi - 0.3, 41)),
    "fig4": dict(
        command="estimate",
        sigma=Range(values=(5.0, 20.0)),
        delta=Range(-4.0, 4.0, 80),
        k0=Range(values=(math.pi / 4, math.pi / 3, math.pi / 2)),
    ),
}

_FIELDS = {"preset", "delta", "k0", "sigma", "mu", "n_sites", "t_max", "n_times", "output_path", "quad_tol", "threads", "command"}


def _flatten(obj):
    """Accept either flat keys or ``ranges:``/``geometry:``/``tolerances:`` sections."""
    flat = {}
    for key, value in (obj or {}).items():
        if key in ("ranges", "geometry", "tolerances") and isinstance(value, dict):
            for sub, v in value.items():
                flat["quad_tol" if sub in ("quad", "quadrature") else sub] = v
        elif key in ("output", "out"):
            flat["output_path"] = value
        else:
            flat[key] = value
    unknown = set(flat) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return flat


def load_config_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            obj = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if obj is not None and not isinstance(obj, dict):
        raise ConfigError(f"config {path} must be a mapping")
    return _flatten(obj)


def resolve(command, preset=None, file_values=None, overrides=None) -> RunConfig:
    """Merge preset defaults, config-file values and command-line overrides, in that order."""
    values = {"command": command}
    file_values = dict(file_values or {})
    file_preset = file_values.pop("preset", None)
    preset = preset or file_preset
    if preset:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; available: {sorted(PRESETS)}")
        values.update(PRESETS[preset])
        values["preset"] = preset
        if command not in (values["command"], "sweep", "check"):
            raise ConfigError(f"preset {preset!r} is for '{values['command']}', not '{command}'")
        values["command"] = command
    file_values.pop("command", None)
    values.update(file_values)
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    for name in ("delta", "k0", "sigma"):
        if name in values:
            values[name] = Range.from_obj(values[name])
    for name in ("mu", "t_max", "quad_tol"):
        if values.get(name) is not None:
            values[name] = float(values[name])
    for name in ("n_sites", "n_times", "threads"):
        if values.get(name) is not None:
            values[name] = int(values[name])
    return RunConfig(**values)


def with_preset(config: RunConfig, preset: str) -> RunConfig:
    spec = dict(PRESETS[preset])
    return replace(config, preset=preset, **spec)
