"""Line-oriented ``key = value`` run configuration.

Keys are ``section.name``; a ``[section]`` header prefixes the keys that
follow it, and fully dotted keys are accepted anywhere. ``#`` starts a
comment. Every error names the offending key and line.

Example::

    [grid]
    dx = 0.02
    cfl = 0.5
    [domain]
    halfwidth = auto
    [slices]
    s_list = 2, 2.4, 2.8, 3.2, 3.6, 4
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

from .solver import PROFILES, ModelParams, RunConfig

__all__ = ["ConfigError", "Settings", "KEYS", "DEFAULTS", "parse_config", "load_config", "settings_from_dict"]


class ConfigError(ValueError):
    """Malformed configuration; ``key`` and ``line`` locate the problem when known."""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.key = key
        self.line = line


def _float(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise ValueError("must be finite")
    return v


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected true/false")


def _floats(text: str) -> Tuple[float, ...]:
    parts = [p for p in text.split(",") if p.strip()]
    return tuple(_float(p.strip()) for p in parts)


def _matrix(text: str) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    vals = _floats(text)
    if len(vals) != 4:
        raise ValueError("expected four numbers N00, N01, N10, N11")
    return (vals[0], vals[1]), (vals[2], vals[3])


def _halfwidth(text: str):
    return None if text.lower() == "auto" else _float(text)


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {list(options)}")
        return text

    return parse


def _int(text: str) -> int:
    return int(text)


def _str(text: str) -> str:
    if not text:
        raise ValueError("empty value")
    return text


_DEF = ModelParams()

# key -> (parser, default)
KEYS: Dict[str, Tuple[Callable[[str], Any], Any]] = {
    "model.c": (_float, _DEF.c),
    "model.N": (_matrix, _DEF.N),
    "model.epsilon": (_float, _DEF.epsilon),
    "model.p": (_float, _DEF.p),
    "model.cubic": (_bool, _DEF.cubic),
    "model.allow_non_null": (_bool, _DEF.allow_non_null),
    "weights.gamma": (_float, _DEF.gamma),
    "bootstrap.delta": (_float, _DEF.delta),
    "bootstrap.c1_factor": (_float, 10.0),
    "grid.dx": (_float, 0.02),
    "grid.cfl": (_float, 0.5),
    "grid.boundary": (_choice("dirichlet", "periodic"), "dirichlet"),
    "domain.halfwidth": (_halfwidth, None),
    "domain.margin": (_float, 0.25),
    "ic.profile": (_choice(*[p for p in PROFILES if p != "Custom"]), "GaussianLike"),
    "slices.s_list": (_floats, (2.0, 2.4, 2.8, 3.2, 3.6, 4.0)),
    "snapshot.times": (_floats, ()),
    "energy.order": (_int, 1),
    "output.dir": (_str, "out"),
    "verify.checks": (_str, "all"),
    "runtime.threads": (_int, 1),
}
DEFAULTS = {k: v[1] for k, v in KEYS.items()}


@dataclass
class Settings:
    """Parsed configuration: all keys with defaults filled in, plus where each came from."""

    values: Dict[str, Any]
    lines: Dict[str, int] = field(default_factory=dict)
    base_dir: Path = Path(".")

    def __getitem__(self, key: str):
        return self.values[key]

    @property
    def output_dir(self) -> Path:
        p = Path(self.values["output.dir"])
        return p if p.is_absolute() else self.base_dir / p

    def params(self) -> ModelParams:
        v = self.values
        return ModelParams(c=v["model.c"], N=v["model.N"], epsilon=v["model.epsilon"],
                           gamma=v["weights.gamma"], delta=v["bootstrap.delta"], p=v["model.p"],
                           cubic=v["model.cubic"], allow_non_null=v["model.allow_non_null"])

    def run_config(self) -> RunConfig:
        v = self.values
        return RunConfig(params=self.params(), dx=v["grid.dx"], cfl=v["grid.cfl"],
                         halfwidth=v["domain.halfwidth"], profile=v["ic.profile"],
                         s_list=tuple(sorted(v["slices.s_list"])), snapshot_times=v["snapshot.times"],
                         boundary=v["grid.boundary"], margin=v["domain.margin"])

    def as_dict(self) -> Dict[str, Any]:
        """JSON-ready values in key order."""
        out = {}
        for k in KEYS:
            val = self.values[k]
            if isinstance(val, tuple):
                val = [list(r) if isinstance(r, tuple) else r for r in val]
            out[k] = val
        return out


def _check(values: Dict[str, Any], lines: Dict[str, int]) -> None:
    def fail(key, msg):
        raise ConfigError(msg, key, lines.get(key))

    if values["grid.dx"] <= 0.0:
        fail("grid.dx", "must be positive")
    if not 0.0 < values["grid.cfl"] <= 0.9:
        fail("grid.cfl", "must lie in (0, 0.9]")
    s_list = values["slices.s_list"]
    if len(s_list) < 1 or min(s_list) < 2.0:
        fail("slices.s_list", "needs at least one value, all >= 2")
    if values["energy.order"] not in (0, 1, 2):
        fail("energy.order", "desk-scale orders are 0, 1 or 2")
    if values["runtime.threads"] < 1:
        fail("runtime.threads", "must be at least 1")
    hw = values["domain.halfwidth"]
    if hw is not None and hw <= 0.0:
        fail("domain.halfwidth", "must be positive or 'auto'")
    if values["model.epsilon"] < 0.0:
        fail("model.epsilon", "must be non-negative")


def parse_config(text: str, base_dir: Path = Path(".")) -> Settings:
    values = dict(DEFAULTS)
    lines: Dict[str, int] = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if not section or not any(k.startswith(section + ".") for k in KEYS):
                raise ConfigError(f"unknown section [{section}]", None, lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", None, lineno)
        key, val = (p.strip() for p in line.split("=", 1))
        full = key if "." in key else (f"{section}.{key}" if section else key)
        if full not in KEYS:
            raise ConfigError("unknown key", full, lineno)
        if full in lines:
            raise ConfigError(f"duplicate key (first set on line {lines[full]})", full, lineno)
        try:
            values[full] = KEYS[full][0](val)
        except ValueError as exc:
            raise ConfigError(f"bad value {val!r} ({exc})", full, lineno) from None
        lines[full] = lineno
    _check(values, lines)
    return Settings(values, lines, base_dir)


def load_config(path) -> Settings:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    return parse_config(text, path.parent)


def settings_from_dict(data: Dict[str, Any], base_dir: Path = Path(".")) -> Settings:
    """Rebuild settings from :meth:`Settings.as_dict` output (as stored in ``run_meta.json``)."""
    values = dict(DEFAULTS)
    for k, v in data.items():
        if k not in KEYS:
            raise ConfigError("unknown key in stored configuration", k)
        if isinstance(v, list):
            v = tuple(tuple(r) if isinstance(r, list) else r for r in v)
        values[k] = v
    _check(values, {})
    return Settings(values, {}, base_dir)
