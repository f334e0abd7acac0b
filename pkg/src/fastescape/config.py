"""Line-based run configuration (``key: value``, ``#`` comments)."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

from .engine import ClassifierConfig, Semigroup
from .expr import ParseError, parse_function
from .grid import Window
from .maxmod import CircleSampling


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.message = message
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class RunConfig:
    generators: tuple[str, ...]
    window: tuple[float, float, float, float] = (-2.0, 2.0, -2.0, 2.0)
    grid: tuple[int, int] = (256, 256)
    depth: int = 3
    iters: int = 64
    escape: float = 1e50
    levels: int = 8
    radius: float | None = None  # None means auto
    samples: int = 4096
    seed: int = 42
    margin: float = 2.0

    def semigroup(self) -> Semigroup:
        return Semigroup(tuple(parse_function(g) for g in self.generators))

    def classifier_config(self) -> ClassifierConfig:
        return ClassifierConfig(
            depth=self.depth,
            iters=self.iters,
            escape_log=math.log(self.escape),
            max_level=self.levels,
            margin_log=math.log(self.margin),
            sampling=CircleSampling(sample_count=self.samples),
            radius=self.radius,
        )

    def window_obj(self) -> Window:
        return Window(*self.window)


def _floats(value: str, n: int, key: str, line: int) -> tuple[float, ...]:
    parts = value.split()
    if len(parts) != n:
        raise ConfigError(f"{key} expects {n} numbers", line)
    try:
        out = tuple(float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"{key}: not a number in {value!r}", line) from None
    if not all(math.isfinite(v) for v in out):
        raise ConfigError(f"{key}: values must be finite", line)
    return out


def _int(value: str, key: str, line: int, low: int) -> int:
    if not re.fullmatch(r"[+-]?\d+", value):
        raise ConfigError(f"{key} expects an integer", line)
    v = int(value)
    if v < low:
        raise ConfigError(f"{key} must be at least {low}", line)
    return v


def _real(value: str, key: str, line: int) -> float:
    try:
        v = float(value)
    except ValueError:
        raise ConfigError(f"{key} expects a number", line) from None
    if not math.isfinite(v):
        raise ConfigError(f"{key} must be finite", line)
    return v


def parse_config(text: str) -> RunConfig:
    gens: list[str] = []
    kw: dict = {}
    seen: set[str] = set()
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        key, value = key.strip(), value.strip()
        if not sep or not value:
            raise ConfigError("expected 'key: value'", ln)
        if key != "generator":
            if key in seen:
                raise ConfigError(f"duplicate key {key!r}", ln)
            seen.add(key)
        if key == "generator":
            try:
                parse_function(value)
            except ParseError as exc:
                raise ConfigError(f"generator {value!r}: {exc}", ln) from None
            gens.append(value)
        elif key == "window":
            w = _floats(value, 4, key, ln)
            if not (w[0] < w[1] and w[2] < w[3]):
                raise ConfigError("window needs re_min < re_max and im_min < im_max", ln)
            kw["window"] = w
        elif key == "grid":
            parts = value.split()
            if len(parts) != 2:
                raise ConfigError("grid expects nx ny", ln)
            kw["grid"] = (_int(parts[0], key, ln, 1), _int(parts[1], key, ln, 1))
        elif key in ("depth", "iters", "samples"):
            kw[key] = _int(value, key, ln, 64 if key == "samples" else 1)
        elif key == "levels":
            kw[key] = _int(value, key, ln, 0)
        elif key == "seed":
            kw[key] = _int(value, key, ln, 0)
        elif key == "escape":
            v = _real(value, key, ln)
            if not v > 1:
                raise ConfigError("escape must exceed 1", ln)
            kw[key] = v
        elif key == "margin":
            v = _real(value, key, ln)
            if not v >= 1:
                raise ConfigError("margin is a factor and must be at least 1", ln)
            kw[key] = v
        elif key == "radius":
            if value == "auto":
                kw[key] = None
            else:
                v = _real(value, key, ln)
                if not v > 0:
                    raise ConfigError("radius must be positive or 'auto'", ln)
                kw[key] = v
        else:
            raise ConfigError(f"unknown key {key!r}", ln)
    if not gens:
        raise ConfigError("at least one 'generator' line is required")
    cfg = RunConfig(generators=tuple(gens), **kw)
    if not any(g.is_transcendental for g in map(parse_function, gens)):
        raise ConfigError("at least one generator must be transcendental")
    return cfg


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)
