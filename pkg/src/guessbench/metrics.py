"""Model-comparison and generated-password quality metrics."""
from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.special import rel_entr

from guessbench.analysis import PATTERN_IDS, classify_patterns
from guessbench.errors import BenchError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GuessSetSummary:
    """Distinct generated passwords, those among them in the test set, and the raw count."""

    generated: frozenset
    matched: frozenset
    total_emitted: int

    @classmethod
    def from_stream(cls, guesses: Iterable[str], test: Iterable[str]) -> "GuessSetSummary":
        n = 0
        seen = set()
        for g in guesses:
            seen.add(g)
            n += 1
        return cls(frozenset(seen), frozenset(seen.intersection(test)), n)


# summaries[model][dataset] -> GuessSetSummary
Summaries = Mapping[str, Mapping[str, GuessSetSummary]]


def _datasets(summaries: Summaries, m1: str, m2: str) -> list[str]:
    d1, d2 = set(summaries[m1]), set(summaries[m2])
    if d1 != d2:
        raise BenchError(f"models {m1!r} and {m2!r} were not run on the same datasets")
    if not d1:
        raise BenchError("no datasets to compare")
    return sorted(d1)


def jaccard_index(summaries: Summaries, m1: str, m2: str) -> float:
    """Mean over datasets of |P1 & P2| / |P1 | P2| for the generated sets."""
    values = []
    for d in _datasets(summaries, m1, m2):
        p1, p2 = summaries[m1][d].generated, summaries[m2][d].generated
        union = len(p1 | p2)
        if union == 0:
            raise BenchError(f"both models generated nothing on dataset {d!r}")
        values.append(len(p1 & p2) / union)
    return sum(values) / len(values)


def mergeability_index(summaries: Summaries, m1: str, m2: str) -> float | None:
    """Mean over datasets of (|G1 | G2| - Gmax) / Gmax for the matched sets.

    Datasets on which neither model matched anything are excluded (with a
    warning); if every dataset is excluded the result is None.
    """
    values = []
    for d in _datasets(summaries, m1, m2):
        g1, g2 = summaries[m1][d].matched, summaries[m2][d].matched
        gmax = max(len(g1), len(g2))
        if gmax == 0:
            log.warning("mergeability undefined for %s/%s on %s: no matches", m1, m2, d)
            continue
        values.append((len(g1 | g2) - gmax) / gmax)
    return sum(values) / len(values) if values else None


def pairwise_matrix(summaries: Summaries, metric: Callable[[Summaries, str, str], float | None]) -> dict:
    names = sorted(summaries)
    return {(a, b): metric(summaries, a, b) for a in names for b in names}


@dataclass(frozen=True)
class SelectionStep:
    models: tuple
    cumulative_pct: float
    gain: float

    def to_dict(self) -> dict:
        return {"models": list(self.models), "cumulative_pct": self.cumulative_pct, "gain": self.gain}


def multi_model_select(matched: Mapping[str, Iterable[str]], test_size: int) -> list[SelectionStep]:
    """Order models for a combined attack by iterative elimination.

    Starting from all models, repeatedly drop the one whose removal loses
    the fewest matched passwords (ties drop the lexicographically last
    name). Reversing the removal order gives nested sets n1 < n2 < ... with
    each step's gain in points of the test set.
    """
    if not matched:
        raise BenchError("multi-model selection needs at least one model")
    if test_size <= 0:
        raise BenchError("test_size must be positive")
    sets = {m: frozenset(v) for m, v in matched.items()}
    remaining = sorted(sets)
    removed = []
    while len(remaining) > 1:
        # matches covered by exactly one remaining model are what its removal loses
        cover = Counter()
        for m in remaining:
            cover.update(sets[m])
        losses = {m: sum(1 for p in sets[m] if cover[p] == 1) for m in remaining}
        victim = max(remaining, key=lambda m: (-losses[m], m))
        remaining.remove(victim)
        removed.append(victim)
    order = remaining + removed[::-1]
    steps = []
    union: set = set()
    prev = 0.0
    chosen = []
    for m in order:
        chosen.append(m)
        union |= sets[m]
        pct = 100.0 * len(union) / test_size
        steps.append(SelectionStep(tuple(chosen), pct, pct - prev))
        prev = pct
    return steps


# -- humanness -----------------------------------------------------------


@dataclass(frozen=True)
class BaselineBounds:
    lower: float
    upper: float
    distance: str


def humanness_normalize(d_raw: float, bounds: BaselineBounds) -> float:
    """Map a raw distance onto 0 (train-like) .. 100 (random-like); not clamped."""
    if bounds.upper == bounds.lower:
        raise BenchError("degenerate baselines")
    return 100.0 * (d_raw - bounds.lower) / (bounds.upper - bounds.lower)


def js_divergence(p: Mapping, q: Mapping) -> float:
    """Jensen-Shannon divergence (natural log) of two count/probability mappings."""
    keys = sorted(set(p) | set(q), key=repr)
    a = np.array([p.get(k, 0.0) for k in keys], dtype=float)
    b = np.array([q.get(k, 0.0) for k in keys], dtype=float)
    if a.sum() <= 0 or b.sum() <= 0:
        raise BenchError("JSD needs two non-empty distributions")
    a /= a.sum()
    b /= b.sum()
    m = 0.5 * (a + b)
    jsd = 0.5 * rel_entr(a, m).sum() + 0.5 * rel_entr(b, m).sum()
    return float(min(max(jsd, 0.0), math.log(2)))


def _counts(passwords) -> Counter:
    return passwords if isinstance(passwords, Counter) else Counter(passwords)


def length_histogram(passwords) -> Counter:
    out = Counter()
    for p, c in _counts(passwords).items():
        out[len(p)] += c
    return out


def bigram_histogram(passwords) -> Counter:
    # boundary markers make every password (even length 1) contribute
    out = Counter()
    for p, c in _counts(passwords).items():
        s = "\x02" + p + "\x03"
        for i in range(len(s) - 1):
            out[s[i:i + 2]] += c
    return out


def pattern_histogram(passwords) -> Counter:
    out = Counter()
    for p, c in _counts(passwords).items():
        for pid in classify_patterns(p):
            out[pid] += c
    return Counter({pid: out[pid] for pid in PATTERN_IDS if out[pid]})


def length_jsd(a, b) -> float:
    return js_divergence(length_histogram(a), length_histogram(b))


def ngram_jsd(a, b) -> float:
    return js_divergence(bigram_histogram(a), bigram_histogram(b))


def pattern_jsd(a, b) -> float:
    return js_divergence(pattern_histogram(a), pattern_histogram(b))


DISTANCES: dict[str, Callable] = {
    "length_jsd": length_jsd,
    "ngram_jsd": ngram_jsd,
    "pattern_jsd": pattern_jsd,
}

# Slots for distances computed by external tools; raw values are ingested
# and normalized with humanness_normalize, never computed here.
EXTERNAL_DISTANCES = ("cnn_divergence", "imd", "alpha_precision_beta_recall", "mtopdiv")


def humanness_bounds(test, train, random_set, dist: str) -> BaselineBounds:
    fn = DISTANCES[dist]
    return BaselineBounds(fn(test, train), fn(test, random_set), dist)


def humanness_report(test, train, random_set, generated: Mapping[str, object],
                     distances: Sequence[str] = tuple(DISTANCES)) -> dict:
    """Raw and normalized distances per model; ``mean`` averages the normalized ones.

    These built-in distances stand in for the neural/topological metrics and
    are not comparable in absolute value to numbers obtained with those.
    """
    out = {"distances": list(distances), "bounds": {}, "models": {}}
    for dist in distances:
        b = humanness_bounds(test, train, random_set, dist)
        out["bounds"][dist] = {"lower": b.lower, "upper": b.upper}
        for name, guesses in generated.items():
            raw = DISTANCES[dist](test, guesses)
            entry = out["models"].setdefault(name, {"raw": {}, "normalized": {}})
            entry["raw"][dist] = raw
            try:
                entry["normalized"][dist] = humanness_normalize(raw, b)
            except BenchError:
                entry["normalized"][dist] = None
    for entry in out["models"].values():
        vals = [v for v in entry["normalized"].values() if v is not None]
        entry["mean"] = sum(vals) / len(vals) if vals else None
    return out


# -- summary statistics --------------------------------------------------


def uniqueness(summary: GuessSetSummary) -> float:
    if summary.total_emitted <= 0:
        raise BenchError("uniqueness of an empty stream")
    return 100.0 * len(summary.generated) / summary.total_emitted


def coefficient_of_variation(values: Sequence[float]) -> float:
    """Population standard deviation as a percentage of the mean."""
    if len(values) < 2:
        raise BenchError("coefficient of variation needs at least two values")
    arr = np.asarray(values, dtype=float)
    mean = arr.mean()
    if mean == 0:
        raise BenchError("coefficient of variation undefined for zero mean")
    return float(100.0 * arr.std(ddof=0) / mean)


def generalization_loss(in_dist_pct: float, cross_pcts: Sequence[float],
                        weights: Sequence[float] | None = None) -> float:
    """Weighted-average loss relative to the in-distribution score, in percent."""
    if in_dist_pct == 0:
        raise BenchError("generalization loss undefined for a zero in-distribution score")
    if not cross_pcts:
        raise BenchError("no cross-dataset scores")
    if weights is None:
        weights = [1.0] * len(cross_pcts)
    if len(weights) != len(cross_pcts):
        raise BenchError("weights and scores differ in length")
    total = float(sum(weights))
    if total <= 0:
        raise BenchError("weights must sum to a positive value")
    mean = sum(w * x for w, x in zip(weights, cross_pcts)) / total
    return 100.0 * (in_dist_pct - mean) / in_dist_pct
