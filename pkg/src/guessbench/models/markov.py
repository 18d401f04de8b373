"""Ordered Markov enumeration (OMEN-style).

Probabilities are discretized into integer levels and passwords are
enumerated by ascending total level: for each level sum ``s``, for each
trained length in ascending order, every string whose start-prefix level,
transition levels and length level add up to exactly ``s`` is produced in
alphabet order. Unseen n-grams carry no level and are never guessed.
"""
from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

from guessbench import kernels
from guessbench.corpus import Vocabulary
from guessbench.errors import BenchError
from guessbench.models.base import GuessSource

INF = 1 << 20


@dataclass(frozen=True)
class MarkovConfig:
    order: int = 4
    level_count: int = 11
    level_base: float = 2.5

    def __post_init__(self):
        if self.order < 2:
            raise BenchError("Markov order must be at least 2")
        if self.level_count < 1:
            raise BenchError("level_count must be positive")
        if self.level_base <= 1.0:
            raise BenchError("level_base must exceed 1")


def to_level(prob: float, cfg: MarkovConfig) -> int:
    # the epsilon keeps exact powers of the base (p = base**-k) on level k
    raw = math.floor(-math.log(prob) / math.log(cfg.level_base) + 1e-9)
    return min(max(raw, 0), cfg.level_count - 1)


@dataclass
class MarkovTables:
    """Flat integer tables consumed by the enumeration kernels.

    Contexts are the (order-1)-grams seen in training, numbered in alphabet
    order. Edges out of context ``c`` are ``edge_ptr[c]:edge_ptr[c+1]``,
    sorted by character. ``min_sum[c, m]``/``max_sum[c, m]`` bound the level
    sum of any ``m``-step continuation from ``c`` (``INF``/``-INF`` when no
    continuation exists). Start prefixes are sorted by (length, alphabet
    order); those of length ``k`` live in ``start_off[k]:start_off[k+1]``.
    """

    order: int
    alphabet: bytes
    max_steps: int
    edge_ptr: np.ndarray
    edge_char: np.ndarray
    edge_level: np.ndarray
    edge_next: np.ndarray
    min_sum: np.ndarray
    max_sum: np.ndarray
    start_off: np.ndarray
    start_codes: np.ndarray
    start_level: np.ndarray
    start_ctx: np.ndarray

    @cached_property
    def as_lists(self) -> dict:
        """Plain-list copies for the pure-Python kernel."""
        return {
            "edge_ptr": self.edge_ptr.tolist(),
            "edge_char": [chr(self.alphabet[c]) for c in self.edge_char.tolist()],
            "edge_level": self.edge_level.tolist(),
            "edge_next": self.edge_next.tolist(),
            "min_sum": self.min_sum.tolist(),
            "max_sum": self.max_sum.tolist(),
            "start_off": self.start_off.tolist(),
            "start_str": [
                "".join(chr(self.alphabet[c]) for c in row if c >= 0)
                for row in self.start_codes.tolist()
            ],
            "start_level": self.start_level.tolist(),
            "start_ctx": self.start_ctx.tolist(),
        }


class MarkovModel:
    """Trained n-gram counts plus their discretized levels."""

    def __init__(self, config: MarkovConfig, alphabet: str, start_counts: dict,
                 transition_counts: dict, length_counts: dict):
        self.config = config
        self.alphabet = alphabet
        self.start_counts = dict(start_counts)
        self.transition_counts = {c: dict(nxt) for c, nxt in transition_counts.items()}
        self.length_counts = {int(k): v for k, v in length_counts.items()}
        self._code = {ch: i for i, ch in enumerate(alphabet)}

        total = sum(self.start_counts.values())
        self.start_levels = {k: to_level(c / total, config) for k, c in self.start_counts.items()}
        total = sum(self.length_counts.values())
        self.length_levels = {k: to_level(c / total, config) for k, c in sorted(self.length_counts.items())}
        self.transition_levels = {}
        for ctx, nxt in self.transition_counts.items():
            denom = sum(nxt.values())
            self.transition_levels[ctx] = {ch: to_level(c / denom, config) for ch, c in nxt.items()}

    @property
    def order(self) -> int:
        return self.config.order

    def sort_key(self, s: str) -> tuple:
        return tuple(self._code[ch] for ch in s)

    def level_sum(self, password: str) -> int | None:
        """Total level of ``password``, or None if the model cannot produce it."""
        n1 = self.order - 1
        if len(password) not in self.length_levels:
            return None
        key = password[:n1]
        if key not in self.start_levels:
            return None
        total = self.start_levels[key] + self.length_levels[len(password)]
        for i in range(n1, len(password)):
            lv = self.transition_levels.get(password[i - n1:i], {}).get(password[i])
            if lv is None:
                return None
            total += lv
        return total

    # -- kernel tables -------------------------------------------------

    @cached_property
    def tables(self) -> MarkovTables:
        n1 = self.order - 1
        code = self._code
        ctx_set = set(self.transition_counts)
        for ctx, nxt in self.transition_counts.items():
            for ch in nxt:
                ctx_set.add(ctx[1:] + ch)
        ctx_set.update(k for k in self.start_counts if len(k) == n1)
        contexts = sorted(ctx_set, key=self.sort_key)
        ctx_id = {c: i for i, c in enumerate(contexts)}

        edge_ptr = [0]
        edge_char, edge_level, edge_next = [], [], []
        for ctx in contexts:
            levels = self.transition_levels.get(ctx, {})
            for ch in sorted(levels, key=code.__getitem__):
                edge_char.append(code[ch])
                edge_level.append(levels[ch])
                edge_next.append(ctx_id[ctx[1:] + ch])
            edge_ptr.append(len(edge_char))

        n_ctx = len(contexts)
        max_len = max(self.length_counts)
        steps = max(0, max_len - n1)
        src = np.repeat(np.arange(n_ctx, dtype=np.int64), np.diff(edge_ptr))
        lvl = np.asarray(edge_level, dtype=np.int32)
        nxt = np.asarray(edge_next, dtype=np.int64)
        min_sum = np.full((n_ctx, steps + 1), INF, dtype=np.int32)
        max_sum = np.full((n_ctx, steps + 1), -INF, dtype=np.int32)
        min_sum[:, 0] = 0
        max_sum[:, 0] = 0
        for m in range(1, steps + 1):
            if len(src) == 0:
                break
            cand_min = lvl + min_sum[nxt, m - 1]
            cand_max = lvl + max_sum[nxt, m - 1]
            ok = min_sum[nxt, m - 1] < INF
            np.minimum.at(min_sum[:, m], src[ok], cand_min[ok])
            np.maximum.at(max_sum[:, m], src[ok], cand_max[ok])

        keys = sorted(self.start_counts, key=lambda k: (len(k), self.sort_key(k)))
        start_off = np.zeros(n1 + 2, dtype=np.int64)
        for k in keys:
            start_off[len(k) + 1] += 1
        start_off = np.cumsum(start_off)
        start_codes = np.full((len(keys), n1), -1, dtype=np.int32)
        for i, k in enumerate(keys):
            start_codes[i, : len(k)] = [code[ch] for ch in k]
        start_level = np.array([self.start_levels[k] for k in keys], dtype=np.int32)
        start_ctx = np.array([ctx_id.get(k, -1) if len(k) == n1 else -1 for k in keys], dtype=np.int64)

        return MarkovTables(
            order=self.order,
            alphabet=self.alphabet.encode("ascii"),
            max_steps=steps,
            edge_ptr=np.asarray(edge_ptr, dtype=np.int64),
            edge_char=np.asarray(edge_char, dtype=np.int32),
            edge_level=lvl,
            edge_next=nxt,
            min_sum=min_sum,
            max_sum=max_sum,
            start_off=start_off,
            start_codes=start_codes,
            start_level=start_level,
            start_ctx=start_ctx,
        )

    def cell_bounds(self, length: int) -> tuple[int, int]:
        """Smallest and largest level sum (length level excluded) at ``length``."""
        t = self.tables
        n1 = self.order - 1
        k = min(length, n1)
        lo, hi = int(t.start_off[k]), int(t.start_off[k + 1])
        if lo == hi:
            return INF, -INF
        levels = t.start_level[lo:hi].astype(np.int64)
        if length < n1:
            return int(levels.min()), int(levels.max())
        ctx = t.start_ctx[lo:hi]
        mins = t.min_sum[ctx, length - n1]
        maxs = t.max_sum[ctx, length - n1]
        ok = mins < INF
        if not ok.any():
            return INF, -INF
        return int((levels[ok] + mins[ok]).min()), int((levels[ok] + maxs[ok]).max())

    # -- persistence ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "kind": "markov",
            "config": {
                "order": self.config.order,
                "level_count": self.config.level_count,
                "level_base": self.config.level_base,
            },
            "alphabet": self.alphabet,
            "start_counts": self.start_counts,
            "transition_counts": self.transition_counts,
            "length_counts": {str(k): v for k, v in sorted(self.length_counts.items())},
            "levels": {
                "start": self.start_levels,
                "transition": self.transition_levels,
                "length": {str(k): v for k, v in self.length_levels.items()},
            },
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MarkovModel":
        if doc.get("kind") != "markov":
            raise BenchError("not a Markov model document")
        return cls(
            MarkovConfig(**doc["config"]),
            doc["alphabet"],
            doc["start_counts"],
            doc["transition_counts"],
            doc["length_counts"],
        )


def train_markov(train: Iterable[str], config: MarkovConfig | None = None,
                 vocab: Vocabulary | None = None) -> MarkovModel:
    """Count start prefixes, n-gram transitions and lengths over a multiset.

    The start prefix of a password is its first ``order-1`` characters (the
    whole password when shorter); transitions cover every later position.
    """
    config = config or MarkovConfig()
    vocab = vocab or Vocabulary.default()
    n1 = config.order - 1
    counts = Counter(train)
    if not counts:
        raise BenchError("cannot train on an empty corpus")
    allowed = vocab.charset
    start = Counter()
    lengths = Counter()
    trans = defaultdict(Counter)
    for p, c in counts.items():
        if not p:
            continue
        if not allowed.issuperset(p):
            raise BenchError(f"password {p!r} has characters outside the alphabet")
        start[p[:n1]] += c
        lengths[len(p)] += c
        for i in range(n1, len(p)):
            trans[p[i - n1:i]][p[i]] += c
    if not start:
        raise BenchError("cannot train on an empty corpus")
    return MarkovModel(config, vocab.allowed, start, trans, lengths)


def _markov_stream(model: MarkovModel) -> Iterator[str]:
    tables = model.tables
    lengths = sorted(model.length_levels)
    bounds = {ell: model.cell_bounds(ell) for ell in lengths}
    s_max = max(model.length_levels[ell] + bounds[ell][1] for ell in lengths)
    for s in range(0, s_max + 1):
        for ell in lengths:
            budget = s - model.length_levels[ell]
            lo, hi = bounds[ell]
            if budget < lo or budget > hi:
                continue
            walker = kernels.MarkovCellWalker(tables, ell, budget)
            while True:
                batch = walker.take(8192)
                if not batch:
                    break
                yield from batch


def enumerate_markov(model: MarkovModel, limit: int | None = None, name: str = "markov") -> GuessSource:
    return GuessSource(name, _markov_stream(model), limit)
