"""Run configuration for ``guessbench benchmark``.

Config files are YAML (JSON is accepted too, being a YAML subset)::

    seed: 42
    output_dir: out
    format: both                 # csv | json | both
    preprocess: {max_length: 12, min_length: 0, split_ratio: 0.8}
    checkpoints: [1000, 10000, 100000, 1000000]
    datasets:
      - {name: rockyou, path: data/rockyou.txt}
      - {name: linkedin, path: data/linkedin.txt}
    models:
      - {name: omen, kind: markov, order: 4, level_count: 11, level_base: 2.5}
      - {name: pcfg, kind: pcfg}
      - {name: passgpt, kind: external, guesses: {rockyou: g/rockyou.txt, linkedin: g/linkedin.txt}}
      - {name: random, kind: random, min_len: 6, max_len: 12}
    scenarios: [curve, marginal, lengths, patterns, frequency, crossdataset, sizesweep, compare, humanness]
    sizesweep: {fractions: [0.25, 0.5, 1.0]}
    humanness: {sample: 100000}

Relative paths resolve against the config file's directory.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from guessbench.corpus import PreprocessConfig
from guessbench.errors import BenchError, ConfigError
from guessbench.evaluation import DESK_CHECKPOINTS, validate_checkpoints
from guessbench.models import MODEL_KINDS

SCENARIOS = ("curve", "marginal", "lengths", "patterns", "frequency",
             "crossdataset", "sizesweep", "compare", "humanness")
FORMATS = ("csv", "json", "both")
OUTPUT_ENV = "GUESSBENCH_OUTPUT_DIR"
DEFAULT_OUTPUT = "guessbench-out"

_MODEL_KEYS = {
    "markov": {"order", "level_count", "level_base"},
    "pcfg": set(),
    "external": {"guesses", "dedupe"},
    "random": {"min_len", "max_len"},
}


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_ENV, DEFAULT_OUTPUT)


@dataclass(frozen=True)
class ModelSpec:
    name: str
    kind: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RunConfig:
    datasets: tuple
    models: tuple
    preprocess: PreprocessConfig = PreprocessConfig()
    checkpoints: tuple = DESK_CHECKPOINTS
    scenarios: tuple = SCENARIOS
    output_dir: str = DEFAULT_OUTPUT
    format: str = "both"
    seed: int = 0
    jobs: int = 1
    size_fractions: tuple = (0.25, 0.5, 1.0)
    humanness_sample: int = 100_000

    def validate(self) -> "RunConfig":
        names = [d[0] for d in self.datasets]
        if not names:
            raise ConfigError("config lists no datasets")
        if len(set(names)) != len(names):
            raise ConfigError("dataset names must be unique")
        mnames = [m.name for m in self.models]
        if not mnames:
            raise ConfigError("config lists no models")
        if len(set(mnames)) != len(mnames):
            raise ConfigError("model names must be unique")
        for m in self.models:
            if m.kind not in MODEL_KINDS:
                raise ConfigError(f"model {m.name!r}: unknown kind {m.kind!r}")
            extra = set(m.params) - _MODEL_KEYS[m.kind]
            if extra:
                raise ConfigError(f"model {m.name!r}: unknown parameters {sorted(extra)}")
            if m.kind == "external":
                missing = set(names) - set(m.params.get("guesses", {}))
                if missing:
                    raise ConfigError(f"model {m.name!r}: no guess file for datasets {sorted(missing)}")
        bad = set(self.scenarios) - set(SCENARIOS)
        if bad:
            raise ConfigError(f"unknown scenarios {sorted(bad)}")
        if "compare" in self.scenarios and len(self.models) < 2:
            raise ConfigError("scenario 'compare' requires at least two models")
        if "crossdataset" in self.scenarios and len(self.datasets) < 2:
            raise ConfigError("scenario 'crossdataset' requires at least two datasets")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        if any(not 0 < f <= 1 for f in self.size_fractions):
            raise ConfigError("sizesweep fractions must lie in (0, 1]")
        try:
            validate_checkpoints(self.checkpoints)
        except BenchError as exc:
            raise ConfigError(str(exc)) from exc
        return self


def _resolve(base: Path, p: str) -> str:
    path = Path(p)
    return str(path if path.is_absolute() else base / path)


def load_run_config(path, **overrides) -> RunConfig:
    """Parse a config file; non-None ``overrides`` (from CLI flags) win."""
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"malformed config {path}: expected a mapping at top level")
    base = path.parent
    try:
        datasets = tuple((d["name"], _resolve(base, d["path"])) for d in doc.get("datasets", []))
        models = []
        for m in doc.get("models", []):
            m = dict(m)
            name, kind = m.pop("name"), m.pop("kind")
            if kind == "external":
                m["guesses"] = {k: _resolve(base, v) for k, v in m.get("guesses", {}).items()}
            models.append(ModelSpec(name, kind, m))
        pre = dict(doc.get("preprocess", {}))
        seed = int(doc.get("seed", 0))
        cfg = RunConfig(
            datasets=datasets,
            models=tuple(models),
            preprocess=PreprocessConfig(**pre, seed=seed) if "seed" not in pre else PreprocessConfig(**pre),
            checkpoints=tuple(doc.get("checkpoints", DESK_CHECKPOINTS)),
            scenarios=tuple(doc.get("scenarios", SCENARIOS)),
            output_dir=_resolve(base, doc["output_dir"]) if "output_dir" in doc else default_output_dir(),
            format=doc.get("format", "both"),
            seed=seed,
            jobs=int(doc.get("jobs", 1)),
            size_fractions=tuple(doc.get("sizesweep", {}).get("fractions", (0.25, 0.5, 1.0))),
            humanness_sample=int(doc.get("humanness", {}).get("sample", 100_000)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config {path}: {exc!r}") from exc
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if "seed" in overrides:
        overrides["preprocess"] = replace(cfg.preprocess, seed=overrides["seed"])
    if "max_length" in overrides:
        overrides["preprocess"] = replace(overrides.get("preprocess", cfg.preprocess),
                                          max_length=overrides.pop("max_length"))
    if "checkpoints" in overrides:
        overrides["checkpoints"] = tuple(overrides["checkpoints"])
    return replace(cfg, **overrides).validate()
