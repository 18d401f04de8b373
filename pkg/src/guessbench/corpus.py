"""Dataset ingestion, filtering and the leak-free train/test split."""
from __future__ import annotations

import json
import math
import os
import string
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from guessbench import kernels
from guessbench.errors import BenchError, ConfigError, EmptyCorpusError
from guessbench.reports import SCHEMA_VERSION, atomic_write_text

# Backtick is the delimiter of the published list, so it is not a member.
DEFAULT_SYMBOLS = "~!@#$%^&*()_-+=[]{}|\\;:'\",.<>/?"

LOWER, UPPER, DIGIT, SPECIAL = "lower", "upper", "digit", "special"


@dataclass(frozen=True)
class Vocabulary:
    """Ordered set of permitted characters, partitioned into four classes."""

    allowed: str

    def __post_init__(self):
        if len(set(self.allowed)) != len(self.allowed):
            raise ValueError("vocabulary contains duplicate characters")
        if not self.allowed.isascii():
            raise ValueError("vocabulary must be ASCII")
        if any(ch.isspace() or not ch.isprintable() for ch in self.allowed):
            raise ValueError("vocabulary must not contain whitespace or control characters")

    @classmethod
    def default(cls) -> "Vocabulary":
        return cls(string.ascii_lowercase + string.ascii_uppercase + string.digits + DEFAULT_SYMBOLS)

    @staticmethod
    def class_of(ch: str) -> str:
        if "a" <= ch <= "z":
            return LOWER
        if "A" <= ch <= "Z":
            return UPPER
        if "0" <= ch <= "9":
            return DIGIT
        return SPECIAL

    @property
    def classes(self) -> dict[str, str]:
        return {ch: self.class_of(ch) for ch in self.allowed}

    @property
    def charset(self) -> frozenset:
        return frozenset(self.allowed)

    def __contains__(self, ch) -> bool:
        return ch in self.charset

    def __len__(self) -> int:
        return len(self.allowed)


@dataclass(frozen=True)
class PreprocessConfig:
    max_length: int = 12
    min_length: int = 0
    split_ratio: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if self.max_length < 0 or self.min_length < 0:
            raise ConfigError("lengths must be non-negative")
        if self.min_length > self.max_length:
            raise ConfigError(f"min_length {self.min_length} exceeds max_length {self.max_length}")
        if not 0.0 < self.split_ratio < 1.0:
            raise ConfigError(f"split_ratio must lie in (0, 1), got {self.split_ratio}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return {
            "max_length": self.max_length,
            "min_length": self.min_length,
            "split_ratio": self.split_ratio,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class RawCorpus:
    lines: tuple[str, ...]
    source_name: str = ""
    # lines dropped for invalid UTF-8
    undecodable: int = 0


@dataclass(frozen=True)
class SplitCorpus:
    train: tuple[str, ...]
    test_unique: frozenset
    test_freq: dict
    config: PreprocessConfig
    vocab: Vocabulary
    name: str = ""
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def test_order(self) -> list[str]:
        """Test passwords in first-appearance order (the persisted order)."""
        return list(self.test_freq)

    def compatible_with(self, other: "SplitCorpus") -> bool:
        a, b = self.config, other.config
        return (
            a.max_length == b.max_length
            and a.min_length == b.min_length
            and self.vocab == other.vocab
        )


def _split_lines(data: bytes) -> Iterable[bytes]:
    for raw in data.split(b"\n"):
        if raw.endswith(b"\r"):
            raw = raw[:-1]
        yield raw


def load_corpus(path) -> RawCorpus:
    """Read one candidate password per line.

    Lines that are not valid UTF-8 are dropped whole; empty lines are
    skipped; LF and CRLF endings are both accepted.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise BenchError(f"cannot read corpus {path}: {exc.strerror or exc}") from exc
    lines = []
    bad = 0
    for raw in _split_lines(data):
        if not raw:
            continue
        try:
            lines.append(raw.decode("utf-8"))
        except UnicodeDecodeError:
            bad += 1
    return RawCorpus(tuple(lines), path.stem, bad)


def filter_passwords(raw: RawCorpus | Sequence[str], cfg: PreprocessConfig,
                     vocab: Vocabulary | None = None) -> list[str]:
    vocab = vocab or Vocabulary.default()
    allowed = vocab.charset
    lines = raw.lines if isinstance(raw, RawCorpus) else raw
    lo, hi = cfg.min_length, cfg.max_length
    return [
        p for p in lines
        if lo <= len(p) <= hi and p.isascii() and allowed.issuperset(p)
    ]


def split_corpus(filtered: Sequence[str], cfg: PreprocessConfig,
                 vocab: Vocabulary | None = None, name: str = "") -> SplitCorpus:
    """Seeded shuffle, 80/20 cut, test dedup, then train/test overlap removal."""
    n = len(filtered)
    if n == 0:
        raise EmptyCorpusError("empty corpus after filtering")
    perm = kernels.permutation(n, cfg.seed)
    cut = math.floor(round(cfg.split_ratio * n, 9))
    test_freq = Counter(filtered[i] for i in perm[cut:])
    train_raw = [filtered[i] for i in perm[:cut]]
    train = tuple(p for p in train_raw if p not in test_freq)
    stats = {
        "filtered": n,
        "train_raw": len(train_raw),
        "train": len(train),
        "overlap_removed": len(train_raw) - len(train),
        "test_raw": n - cut,
        "test_unique": len(test_freq),
    }
    return SplitCorpus(
        train=train,
        test_unique=frozenset(test_freq),
        test_freq=dict(test_freq),
        config=cfg,
        vocab=vocab or Vocabulary.default(),
        name=name,
        stats=stats,
    )


def preprocess(path, cfg: PreprocessConfig, vocab: Vocabulary | None = None,
               name: str | None = None) -> SplitCorpus:
    """Full pipeline from a raw file to a SplitCorpus, with removal counts in ``stats``."""
    vocab = vocab or Vocabulary.default()
    raw = load_corpus(path)
    filtered = filter_passwords(raw, cfg, vocab)
    split = split_corpus(filtered, cfg, vocab, name=name or raw.source_name)
    total = len(raw.lines) + raw.undecodable
    removed = total - len(filtered)
    split.stats.update(
        raw_lines=total,
        undecodable=raw.undecodable,
        removed=removed,
        removed_pct=100.0 * removed / total if total else 0.0,
    )
    return split


def split_paths(outdir, name: str) -> tuple[Path, Path, Path]:
    outdir = Path(outdir)
    return (outdir / f"{name}.train.txt", outdir / f"{name}.test.txt", outdir / f"{name}.meta.json")


def _lines_text(items: Iterable[str]) -> str:
    return "".join(p + "\n" for p in items)


def save_split(split: SplitCorpus, outdir, name: str | None = None) -> tuple[Path, Path, Path]:
    name = name or split.name or "corpus"
    os.makedirs(outdir, exist_ok=True)
    train_p, test_p, meta_p = split_paths(outdir, name)
    atomic_write_text(train_p, _lines_text(split.train))
    atomic_write_text(test_p, _lines_text(split.test_order))
    meta = {
        "schema_version": SCHEMA_VERSION,
        "name": name,
        "config": split.config.to_dict(),
        "vocabulary": split.vocab.allowed,
        "counts": split.stats,
        "test_freq": split.test_freq,
    }
    atomic_write_text(meta_p, json.dumps(meta, indent=2, ensure_ascii=False) + "\n")
    return train_p, test_p, meta_p


def read_lines(path) -> list[str]:
    """Read a persisted password list (strict UTF-8, one entry per line)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise BenchError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return [line.rstrip("\r") for line in text.split("\n") if line.rstrip("\r")]


def meta_path_for(path) -> Path:
    """Locate ``<name>.meta.json`` given any of the three split files."""
    path = Path(path)
    for suffix in (".train.txt", ".test.txt", ".meta.json"):
        if path.name.endswith(suffix):
            return path.with_name(path.name[: -len(suffix)] + ".meta.json")
    return path.with_name(path.stem + ".meta.json")


def load_split(path) -> SplitCorpus:
    """Load a persisted split from any of its files (meta sidecar required)."""
    meta_p = meta_path_for(path)
    if not meta_p.exists():
        raise ConfigError(f"split metadata not found: {meta_p}")
    meta = json.loads(meta_p.read_text(encoding="utf-8"))
    name = meta["name"]
    train_p, test_p, _ = split_paths(meta_p.parent, name)
    cfg = PreprocessConfig(**meta["config"])
    test_freq = {p: int(c) for p, c in meta["test_freq"].items()}
    return SplitCorpus(
        train=tuple(read_lines(train_p)),
        test_unique=frozenset(test_freq),
        test_freq=test_freq,
        config=cfg,
        vocab=Vocabulary(meta["vocabulary"]),
        name=name,
        stats=dict(meta.get("counts", {})),
    )


def test_only_split(test_path, vocab: Vocabulary | None = None) -> SplitCorpus:
    """A SplitCorpus built from a bare test file when no sidecar exists.

    Every test password gets frequency 1.
    """
    items = read_lines(test_path)
    freq = dict.fromkeys(items, 1)
    return SplitCorpus(
        train=(),
        test_unique=frozenset(freq),
        test_freq=freq,
        config=PreprocessConfig(),
        vocab=vocab or Vocabulary.default(),
        name=Path(test_path).stem,
    )
