"""Run configuration: parsing, validation, defaults, and deterministic hashing.

Config files are plain text with one ``section.key = value`` assignment per
line and ``#`` comments.  Unknown keys, malformed values, and precondition
violations are rejected at parse time with the offending line number.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace

__all__ = ["RunConfig", "parse_config", "parse_config_file", "config_hash", "DEFAULTS"]


def _parse_bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


def _parse_float_list(s: str):
    return tuple(float(tok) for tok in s.replace(",", " ").split())


# key -> (converter, default)
DEFAULTS = {
    "grid.d": (int, 3),
    "grid.n": (int, 16),
    "model.m": (float, 0.0),
    "model.c": (float, 1.0),
    "model.epsilon": (float, 1e-3),
    "model.p": (int, 24),
    "model.formulation": (str, "paracontrolled"),
    "model.sign": (int, -1),
    "model.c2": (str, "auto"),
    "model.com1_massless": (_parse_bool, False),
    "time.dt": (float, 1e-4),
    "time.horizon": (float, 1.0),
    "time.burn_in": (float, 0.5),
    "time.snapshot_every": (float, 0.0),
    "ensemble.size": (int, 8),
    "ensemble.root_seed": (int, 12345),
    "experiment.tag": (str, "coming_down"),
    "experiment.lambdas": (_parse_float_list, (1.0, 10.0, 100.0)),
    "experiment.dts": (_parse_float_list, (2e-4, 1e-4, 5e-5)),
    "experiment.c_values": (_parse_float_list, (1.0, 50.0)),
    "experiment.times": (_parse_float_list, (0.25, 0.5, 1.0)),
    "experiment.t_total": (float, 200.0),
    "experiment.report_epsilon": (float, 0.05),
    "experiment.ratio_tolerance": (float, 1.5),
    "experiment.order_threshold": (float, 0.8),
    "experiment.deterministic": (_parse_bool, False),
    "output.dir": (str, "runs"),
}

_FORMULATIONS = ("direct", "dpd2", "paracontrolled")


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration with all defaults filled."""

    values: dict

    def __getitem__(self, key: str):
        return self.values[key]

    @property
    def d(self) -> int:
        return self.values["grid.d"]

    @property
    def n(self) -> int:
        return self.values["grid.n"]

    def canonical_text(self) -> str:
        """Canonical serialized form: sorted assignments, repr-stable values."""
        lines = []
        for key in sorted(self.values):
            val = self.values[key]
            if isinstance(val, tuple):
                txt = ",".join(repr(v) for v in val)
            else:
                txt = repr(val) if isinstance(val, float) else str(val)
            lines.append(f"{key} = {txt}")
        return "\n".join(lines) + "\n"

    def hash(self) -> str:
        return config_hash(self)

    def with_overrides(self, **kv) -> "RunConfig":
        vals = dict(self.values)
        for key, value in kv.items():
            if key not in vals:
                raise KeyError(f"unknown config key {key!r}")
            vals[key] = value
        cfg = RunConfig(values=vals)
        _validate(cfg)
        return cfg


class ConfigError(ValueError):
    pass


def _validate(cfg: RunConfig):
    v = cfg.values
    d, n = v["grid.d"], v["grid.n"]
    if d not in (1, 2, 3):
        raise ConfigError(f"grid.d must be 1, 2 or 3, got {d}")
    if n < 8 or (n & (n - 1)) != 0:
        raise ConfigError(f"grid.n must be a power of two >= 8, got {n}")
    if not (0 < v["model.epsilon"] <= 1e-3):
        raise ConfigError(f"model.epsilon must be in (0, 1e-3], got {v['model.epsilon']}")
    if v["model.p"] < 24 or v["model.p"] % 2 != 0:
        raise ConfigError(f"model.p must be an even integer >= 24, got {v['model.p']}")
    if v["model.c"] < 0:
        raise ConfigError(f"model.c must be >= 0, got {v['model.c']}")
    if v["model.formulation"] not in _FORMULATIONS:
        raise ConfigError(f"model.formulation must be one of {_FORMULATIONS}")
    if v["model.sign"] not in (-1, 1):
        raise ConfigError(f"model.sign must be -1 or +1, got {v['model.sign']}")
    if v["model.c2"] != "auto":
        float(v["model.c2"])  # must parse
    if v["time.dt"] <= 0:
        raise ConfigError(f"time.dt must be > 0, got {v['time.dt']}")
    if v["time.horizon"] <= 0:
        raise ConfigError(f"time.horizon must be > 0, got {v['time.horizon']}")
    if v["ensemble.size"] < 1:
        raise ConfigError(f"ensemble.size must be >= 1, got {v['ensemble.size']}")


def parse_config(text: str) -> RunConfig:
    """Parse config text into a validated RunConfig with defaults filled."""
    values = {key: default for key, (_, default) in DEFAULTS.items()}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        conv, _ = DEFAULTS[key]
        try:
            values[key] = conv(val)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
    cfg = RunConfig(values=values)
    try:
        _validate(cfg)
    except ConfigError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def parse_config_file(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def config_hash(cfg: RunConfig) -> str:
    """64-bit FNV-1a hash of the canonical serialized form, as 16 hex digits."""
    h = _FNV_OFFSET
    for byte in cfg.canonical_text().encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"
