"""Experiment configuration: a flat ``key = value`` format with ``[section]`` headers."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

KINDS = ("attack-rate", "builder-rate", "hitting-stats", "conjecture", "certify")
SECTIONS = ("experiment", "model", "method", "attack")


class ConfigError(ValueError):
    def __init__(self, msg: str, lineno: int | None = None, path=None, fields=()):
        loc = f"{path or '<config>'}:{lineno}: " if lineno is not None else ""
        super().__init__(loc + msg)
        self.lineno = lineno
        self.fields = tuple(fields)


def resolve_r(rule: str, n: int, d: int) -> float:
    """``const:x`` -> x, ``scaled:C`` -> C (log n/n)^(1/d), ``zeta:A`` -> A (log n/n)^(1/2)."""
    kind, sep, val = str(rule).partition(":")
    if not sep:
        raise ValueError(f"r-rule {rule!r} must look like kind:value")
    x = float(val)
    if kind == "const":
        return x
    if n < 2:
        raise ValueError("scaled r-rules need n >= 2")
    base = math.log(n) / n
    if kind == "scaled":
        return x * base ** (1.0 / d)
    if kind == "zeta":
        return x * math.sqrt(base)
    raise ValueError(f"unknown r-rule kind {kind!r}")


def _value(text: str):
    t = text.strip()
    low = t.lower()
    if low in ("true", "yes"):
        return True
    if low in ("false", "no"):
        return False
    for cast in (int, float):
        try:
            return cast(t)
        except ValueError:
            pass
    return t


@dataclass
class ExperimentConfig:
    kind: str
    n: int = 0
    d: int = 2
    r_rule: str = "scaled:1"
    metric: str = "cube"
    trials: int = 1
    seed: int = 0
    output: str = "runs"
    workers: int = 1
    save_masks: bool = False
    method: str = ""
    params: dict = field(default_factory=dict)
    attack: str = ""
    attack_params: dict = field(default_factory=dict)

    @property
    def r(self) -> float:
        return resolve_r(self.r_rule, self.n, self.d)

    def validate(self) -> "ExperimentConfig":
        bad = []
        if self.kind not in KINDS:
            bad.append(("kind", f"must be one of {', '.join(KINDS)}"))
        if not isinstance(self.trials, int) or self.trials < 1:
            bad.append(("trials", "must be an integer >= 1"))
        if not isinstance(self.workers, int) or self.workers < 1:
            bad.append(("workers", "must be an integer >= 1"))
        if self.metric not in ("cube", "torus"):
            bad.append(("metric", "must be cube or torus"))
        if self.kind != "conjecture":
            model_ok = True
            if not isinstance(self.n, int) or self.n < 1:
                bad.append(("n", "must be a positive integer"))
                model_ok = False
            if not isinstance(self.d, int) or self.d < 1:
                bad.append(("d", "must be a positive integer"))
                model_ok = False
            if model_ok:
                try:
                    r = self.r
                    if not 0 < r <= math.sqrt(self.d):
                        bad.append(("r", f"resolves to {r}, outside (0, sqrt(d)]"))
                except ValueError as exc:
                    bad.append(("r", str(exc)))
        if self.kind in ("attack-rate", "builder-rate") and not self.method:
            bad.append(("method.name", "required for this experiment kind"))
        if bad:
            raise ConfigError("invalid config: " + "; ".join(f"{k}: {m}" for k, m in bad),
                              fields=[k for k, _ in bad])
        return self

    def canonical(self) -> str:
        """Stable text form; also the on-disk ``config`` file."""
        out = ["[experiment]", f"kind = {self.kind}", f"trials = {self.trials}", f"seed = {self.seed}",
               f"output = {self.output}", f"workers = {self.workers}",
               f"save_masks = {str(self.save_masks).lower()}",
               "[model]", f"n = {self.n}", f"d = {self.d}", f"r = {self.r_rule}", f"metric = {self.metric}"]
        if self.method or self.params:
            out.append("[method]")
            out.append(f"name = {self.method}")
            out += [f"{k} = {v}" for k, v in sorted(self.params.items())]
        if self.attack or self.attack_params:
            out.append("[attack]")
            out.append(f"name = {self.attack}")
            out += [f"{k} = {v}" for k, v in sorted(self.attack_params.items())]
        return "\n".join(out) + "\n"

    def hash(self) -> str:
        # output and workers do not change results
        text = self.canonical().replace(f"output = {self.output}\n", "").replace(f"workers = {self.workers}\n", "")
        return hashlib.sha256(text.encode()).hexdigest()[:16]


_TOP = {"experiment": ("kind", "trials", "seed", "output", "workers", "save_masks"),
        "model": ("n", "d", "r", "metric")}


def parse_config(text: str, path=None) -> ExperimentConfig:
    section = None
    raw = {s: {} for s in SECTIONS}
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        if s.startswith("["):
            if not s.endswith("]"):
                raise ConfigError("unterminated section header", lineno, path)
            section = s[1:-1].strip()
            if section not in SECTIONS:
                raise ConfigError(f"unknown section [{section}]", lineno, path)
            continue
        if section is None:
            raise ConfigError("key outside any section", lineno, path)
        key, sep, val = s.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError("expected 'key = value'", lineno, path)
        if section in _TOP and key not in _TOP[section]:
            raise ConfigError(f"unknown key {key!r} in [{section}]", lineno, path)
        if key in raw[section]:
            raise ConfigError(f"duplicate key {key!r}", lineno, path)
        raw[section][key] = (_value(val), lineno)

    def take(sec, key, default):
        return raw[sec].pop(key, (default, None))[0]

    if "kind" not in raw["experiment"]:
        raise ConfigError("invalid config: kind: missing", fields=["kind"])
    cfg = ExperimentConfig(
        kind=str(take("experiment", "kind", "")),
        trials=take("experiment", "trials", 1),
        seed=take("experiment", "seed", 0),
        output=str(take("experiment", "output", "runs")),
        workers=take("experiment", "workers", 1),
        save_masks=bool(take("experiment", "save_masks", False)),
        n=take("model", "n", 0),
        d=take("model", "d", 2),
        r_rule=str(take("model", "r", "scaled:1")),
        metric=str(take("model", "metric", "cube")),
        method=str(take("method", "name", "")),
        attack=str(take("attack", "name", "")),
    )
    cfg.params = {k: v for k, (v, _) in raw["method"].items()}
    cfg.attack_params = {k: v for k, (v, _) in raw["attack"].items()}
    return cfg.validate()


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(), path)
