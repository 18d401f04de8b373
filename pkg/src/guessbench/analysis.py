"""Corpus statistics: lengths, structural patterns, top-k and Zipf analysis."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy import stats

from guessbench.corpus import SplitCorpus, Vocabulary
from guessbench.errors import BenchError

PATTERN_IDS = tuple(f"r{i}" for i in range(1, 20))

PATTERN_DESCRIPTIONS = {
    "r1": "Letters only",
    "r2": "Lowercase letters only",
    "r3": "Uppercase letters only",
    "r4": "Digits only",
    "r5": "Special only",
    "r6": "Letters and digits",
    "r7": "Letters and special",
    "r8": "Digits and special",
    "r9": "Letters, digits, and special",
    "r10": "Starts letter ends digit",
    "r11": "Starts letter ends special",
    "r12": "Starts digit then only letters",
    "r13": "Starts digit ends special",
    "r14": "Starts and ends with digit",
    "r15": "Starts special, then only letters",
    "r16": "Starts and ends with special",
    "r17": "Starts special, ends digit",
    "r18": "Ends with '!'",
    "r19": "Ends with '1'",
}

# Number of character classes each composition pattern uses.
PATTERN_COMPLEXITY = {"simple": ("r1", "r4", "r5"), "moderate": ("r6", "r7", "r8"), "complex": ("r9",)}


@dataclass(frozen=True)
class LengthDistribution:
    pct_by_length: dict
    cdf: dict


@dataclass(frozen=True)
class FrequencySpectrum:
    ranked: tuple
    min_count: int


@dataclass(frozen=True)
class ZipfFit:
    slope: float
    intercept: float
    r_squared: float


def _as_counter(passwords) -> Counter:
    if isinstance(passwords, Counter):
        return passwords
    if isinstance(passwords, Mapping):
        return Counter(passwords)
    return Counter(passwords)


def cumulative(pct: Mapping) -> dict:
    """Running sum of an ordered density (keys are taken in insertion order)."""
    out = {}
    running = 0.0
    for key, value in pct.items():
        running += value
        out[key] = running
    return out


def length_distribution(passwords) -> LengthDistribution:
    """Occurrence-weighted length percentages and their CDF.

    ``passwords`` is any iterable of strings or a password -> count mapping.
    """
    counts = _as_counter(passwords)
    by_len = Counter()
    for p, c in counts.items():
        by_len[len(p)] += c
    total = sum(by_len.values())
    if total == 0:
        raise BenchError("length distribution of an empty corpus")
    pct = {ell: 100.0 * by_len[ell] / total for ell in sorted(by_len)}
    return LengthDistribution(pct, cumulative(pct))


def _char_classes(p: str, vocab: Vocabulary | None):
    has_lower = has_upper = has_digit = has_special = False
    charset = vocab.charset if vocab is not None else None
    for ch in p:
        if charset is not None and ch not in charset:
            raise BenchError(f"character {ch!r} is outside the vocabulary")
        if "a" <= ch <= "z":
            has_lower = True
        elif "A" <= ch <= "Z":
            has_upper = True
        elif "0" <= ch <= "9":
            has_digit = True
        else:
            has_special = True
    return has_lower, has_upper, has_digit, has_special


def _is_letter(ch: str) -> bool:
    return ("a" <= ch <= "z") or ("A" <= ch <= "Z")


def _is_digit(ch: str) -> bool:
    return "0" <= ch <= "9"


def classify_patterns(p: str, vocab: Vocabulary | None = None) -> frozenset:
    """Return the ids of every pattern among r1-r19 that ``p`` matches.

    Composition patterns (r1-r9) look at the whole string; r6-r8 require at
    least one character of each named class and none of any other class.
    r10-r17 constrain the endpoints only, except r12 and r15 whose tail must
    be non-empty and consist of letters only.
    """
    if not p:
        raise BenchError("cannot classify an empty password")
    if vocab is None:
        vocab = Vocabulary.default()
    lower, upper, digit, special = _char_classes(p, vocab)
    letter = lower or upper
    out = set()
    if letter and not digit and not special:
        out.add("r1")
        if not upper:
            out.add("r2")
        if not lower:
            out.add("r3")
    if digit and not letter and not special:
        out.add("r4")
    if special and not letter and not digit:
        out.add("r5")
    if letter and digit and not special:
        out.add("r6")
    if letter and special and not digit:
        out.add("r7")
    if digit and special and not letter:
        out.add("r8")
    if letter and digit and special:
        out.add("r9")

    first, last = p[0], p[-1]
    f_let, f_dig = _is_letter(first), _is_digit(first)
    f_spe = not (f_let or f_dig)
    l_let, l_dig = _is_letter(last), _is_digit(last)
    l_spe = not (l_let or l_dig)
    tail_letters = len(p) > 1 and all(_is_letter(ch) for ch in p[1:])
    if f_let and l_dig:
        out.add("r10")
    if f_let and l_spe:
        out.add("r11")
    if f_dig and tail_letters:
        out.add("r12")
    if f_dig and l_spe:
        out.add("r13")
    if f_dig and l_dig:
        out.add("r14")
    if f_spe and tail_letters:
        out.add("r15")
    if f_spe and l_spe:
        out.add("r16")
    if f_spe and l_dig:
        out.add("r17")
    if last == "!":
        out.add("r18")
    if last == "1":
        out.add("r19")
    return frozenset(out)


def pattern_distribution(passwords, vocab: Vocabulary | None = None) -> dict:
    """Occurrence-weighted percentage of passwords matching each pattern."""
    counts = _as_counter(passwords)
    total = sum(counts.values())
    if total == 0:
        raise BenchError("pattern distribution of an empty corpus")
    hits = dict.fromkeys(PATTERN_IDS, 0)
    for p, c in counts.items():
        for pid in classify_patterns(p, vocab):
            hits[pid] += c
    return {pid: 100.0 * hits[pid] / total for pid in PATTERN_IDS}


def _ranked(counts: Counter) -> list[tuple[str, int]]:
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def top_k(passwords, k: int) -> list[tuple[str, int]]:
    if k <= 0:
        raise BenchError("k must be positive")
    return _ranked(_as_counter(passwords))[:k]


def frequency_spectrum(passwords, min_count: int = 3) -> FrequencySpectrum:
    ranked = [(p, c) for p, c in _ranked(_as_counter(passwords)) if c >= min_count]
    return FrequencySpectrum(tuple(ranked), min_count)


def zipf_fit(spectrum: FrequencySpectrum) -> ZipfFit:
    """Least-squares line through (ln rank, ln count), ranks starting at 1."""
    if len(spectrum.ranked) < 2:
        raise BenchError("insufficient spectrum")
    counts = np.array([c for _, c in spectrum.ranked], dtype=float)
    log_rank = np.log(np.arange(1, len(counts) + 1, dtype=float))
    log_count = np.log(counts)
    if np.ptp(log_count) == 0.0:
        # linregress reports nan r for a flat response
        return ZipfFit(0.0, float(log_count[0]), 1.0)
    res = stats.linregress(log_rank, log_count)
    return ZipfFit(float(res.slope), float(res.intercept), float(res.rvalue**2))


@dataclass(frozen=True)
class FrequencyBuckets:
    top5: frozenset
    top10: frozenset
    bottom90: frozenset

    def items(self):
        return (("top5", self.top5), ("top10", self.top10), ("bottom90", self.bottom90))


def frequency_buckets(split: SplitCorpus) -> FrequencyBuckets:
    """Top 5% / top 10% / bottom 90% of unique test passwords by raw frequency."""
    if not split.test_freq:
        raise BenchError("empty test set")
    ranked = [p for p, _ in _ranked(Counter(split.test_freq))]
    u = len(ranked)
    n5 = math.ceil(round(0.05 * u, 9))
    n10 = math.ceil(round(0.10 * u, 9))
    return FrequencyBuckets(
        frozenset(ranked[:n5]), frozenset(ranked[:n10]), frozenset(ranked[n10:])
    )


def analyze(passwords, k: int = 10, min_count: int = 3, vocab: Vocabulary | None = None) -> dict:
    """All corpus statistics in one plain-data document."""
    counts = _as_counter(passwords)
    lengths = length_distribution(counts)
    spectrum = frequency_spectrum(counts, min_count)
    doc = {
        "total": sum(counts.values()),
        "unique": len(counts),
        "lengths": {"pct": lengths.pct_by_length, "cdf": lengths.cdf},
        "patterns": pattern_distribution(counts, vocab),
        "top_k": [[p, c] for p, c in top_k(counts, k)] if counts else [],
        "spectrum": {"min_count": min_count, "ranked": [[p, c] for p, c in spectrum.ranked]},
    }
    try:
        fit = zipf_fit(spectrum)
        doc["zipf"] = {"slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared}
    except BenchError:
        doc["zipf"] = None
    return doc


def analysis_tables(doc: dict) -> dict:
    """CSV tables (header, rows) keyed by file stem."""
    return {
        "lengths": (["length", "pct", "cdf"],
                    [[ell, doc["lengths"]["pct"][ell], doc["lengths"]["cdf"][ell]]
                     for ell in doc["lengths"]["pct"]]),
        "patterns": (["pattern", "description", "pct"],
                     [[pid, PATTERN_DESCRIPTIONS[pid], doc["patterns"][pid]] for pid in PATTERN_IDS]),
        "topk": (["rank", "password", "count"],
                 [[i + 1, p, c] for i, (p, c) in enumerate(doc["top_k"])]),
        "spectrum": (["rank", "password", "count"],
                     [[i + 1, p, c] for i, (p, c) in enumerate(doc["spectrum"]["ranked"])]),
    }


def count_classes(p: str) -> int:
    lower, upper, digit, special = _char_classes(p, None)
    return int(lower or upper) + int(digit) + int(special)

