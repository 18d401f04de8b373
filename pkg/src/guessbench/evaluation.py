"""Match engine and scenario runners."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from guessbench import kernels
from guessbench.analysis import PATTERN_IDS, classify_patterns, frequency_buckets
from guessbench.corpus import SplitCorpus
from guessbench.errors import BenchError, IncompatiblePreprocessing
from guessbench.models.base import GuessSource
from guessbench.rng import derive_seed

log = logging.getLogger(__name__)

DESK_CHECKPOINTS = (10**3, 10**4, 10**5, 10**6)
PAPER_CHECKPOINTS = (
    10**6, 25 * 10**5, 5 * 10**6, 75 * 10**5, 10**7, 25 * 10**6,
    5 * 10**7, 75 * 10**6, 10**8, 25 * 10**7, 5 * 10**8,
)
BATCH = 1 << 15


def validate_checkpoints(counts: Iterable[int]) -> tuple[int, ...]:
    counts = tuple(int(c) for c in counts)
    if not counts:
        raise BenchError("at least one checkpoint is required")
    if any(c <= 0 for c in counts):
        raise BenchError("checkpoints must be positive")
    if any(b <= a for a, b in zip(counts, counts[1:])):
        raise BenchError("checkpoints must be strictly increasing")
    return counts


@dataclass
class MatchLedger:
    first_match_rank: dict
    guesses_consumed: int
    unique_guesses: int | None = None
    exhausted: bool = False

    def matched_by(self, at: int) -> set:
        return {p for p, r in self.first_match_rank.items() if r <= at}

    def lines(self) -> list[str]:
        """Canonical text form: ``rank<TAB>password`` sorted by rank."""
        return [f"{r}\t{p}" for p, r in sorted(self.first_match_rank.items(), key=lambda kv: (kv[1], kv[0]))]


@dataclass(frozen=True)
class CurvePoint:
    guess_count: int
    matched_unique: int
    pct_unique: float
    pct_weighted: float
    exhausted: bool = False

    def to_dict(self) -> dict:
        return {
            "guess_count": self.guess_count,
            "matched_unique": self.matched_unique,
            "pct_unique": self.pct_unique,
            "pct_weighted": self.pct_weighted,
            "exhausted": self.exhausted,
        }


@dataclass
class MatchResult:
    ledger: MatchLedger
    curve: list
    generated: set | None = field(default=None, repr=False)

    @property
    def final(self) -> CurvePoint:
        return self.curve[-1]


def curve_point(ledger: MatchLedger, split: SplitCorpus, at: int, exhausted: bool = False) -> CurvePoint:
    matched = [p for p, r in ledger.first_match_rank.items() if r <= at]
    total_w = sum(split.test_freq.values())
    weight = sum(split.test_freq[p] for p in matched)
    return CurvePoint(
        guess_count=at,
        matched_unique=len(matched),
        pct_unique=100.0 * len(matched) / len(split.test_unique),
        pct_weighted=100.0 * weight / total_w,
        exhausted=exhausted,
    )


def run_match(source: GuessSource | Iterable[str], split: SplitCorpus, checkpoints: Sequence[int],
              keep_generated: bool = False, track_unique: bool = True) -> MatchResult:
    """Stream guesses against the test set up to the last checkpoint.

    A test password's rank is the 1-based index of its first occurrence in
    the stream; repeated guesses consume budget but never re-match.
    """
    checkpoints = validate_checkpoints(checkpoints)
    if not split.test_unique:
        raise BenchError("empty test set")
    if not isinstance(source, GuessSource):
        source = GuessSource("stream", source)
    budget = checkpoints[-1]
    test = split.test_unique
    ranks: dict = {}
    seen = set() if (track_unique or keep_generated) else None
    consumed = 0
    exhausted = False
    while consumed < budget:
        batch = source.take(min(BATCH, budget - consumed))
        if not batch:
            exhausted = True
            break
        kernels.match_batch(batch, test, ranks, consumed, seen)
        consumed += len(batch)
        if source.exhausted:
            exhausted = consumed < budget
            break
    ledger = MatchLedger(ranks, consumed, len(seen) if seen is not None else None, exhausted)
    curve = [curve_point(ledger, split, c) for c in checkpoints if c <= consumed]
    if consumed < budget:
        curve.append(curve_point(ledger, split, consumed, exhausted=True))
    return MatchResult(ledger, curve, seen if keep_generated else None)


# -- marginal gain ------------------------------------------------------


@dataclass(frozen=True)
class MarginalGain:
    start: int
    end: int
    total: float
    relative: float | None


def consecutive_pairs(checkpoints: Sequence[int]) -> list[tuple[int, int]]:
    return list(zip(checkpoints, checkpoints[1:]))


def marginal_gain(curve: Sequence[CurvePoint], pairs: Sequence[tuple[int, int]]) -> list[MarginalGain]:
    """Total gain in points of the whole test set; relative gain over matches at X."""
    by_count = {pt.guess_count: pt for pt in curve}
    out = []
    for x, y in pairs:
        if x >= y:
            raise BenchError(f"marginal gain needs X < Y, got {x} >= {y}")
        if x not in by_count or y not in by_count:
            raise BenchError(f"checkpoint pair ({x}, {y}) not present in curve")
        px, py = by_count[x], by_count[y]
        rel = None
        if px.matched_unique > 0:
            rel = 100.0 * (py.matched_unique - px.matched_unique) / px.matched_unique
        out.append(MarginalGain(x, y, py.pct_unique - px.pct_unique, rel))
    return out


# -- breakdowns ---------------------------------------------------------


def _check_at(ledger: MatchLedger, at: int):
    if at > ledger.guesses_consumed and not ledger.exhausted:
        raise BenchError(f"breakdown at {at} exceeds the {ledger.guesses_consumed} guesses consumed")


def _grouped_pct(ledger: MatchLedger, at: int, groups: Mapping[object, Iterable[str]]) -> dict:
    ranks = ledger.first_match_rank
    out = {}
    for key, members in groups.items():
        members = list(members)
        if not members:
            continue
        hit = sum(1 for p in members if ranks.get(p, at + 1) <= at)
        out[key] = 100.0 * hit / len(members)
    return out


def breakdown_by_length(ledger: MatchLedger, split: SplitCorpus, at: int) -> dict:
    _check_at(ledger, at)
    groups: dict = {}
    for p in split.test_freq:
        groups.setdefault(len(p), []).append(p)
    return _grouped_pct(ledger, at, dict(sorted(groups.items())))


def breakdown_by_pattern(ledger: MatchLedger, split: SplitCorpus, at: int) -> dict:
    _check_at(ledger, at)
    groups = {pid: [] for pid in PATTERN_IDS}
    for p in split.test_freq:
        for pid in classify_patterns(p, split.vocab):
            groups[pid].append(p)
    return _grouped_pct(ledger, at, groups)


def breakdown_by_frequency(ledger: MatchLedger, split: SplitCorpus, at: int) -> dict:
    _check_at(ledger, at)
    return _grouped_pct(ledger, at, dict(frequency_buckets(split).items()))


def breakdown_by_bands(ledger: MatchLedger, split: SplitCorpus, at: int,
                       bands: Mapping[str, Callable[[str], bool]]) -> dict:
    """Match percentage within arbitrary predicate-defined groups."""
    _check_at(ledger, at)
    groups = {name: [p for p in split.test_freq if pred(p)] for name, pred in bands.items()}
    return _grouped_pct(ledger, at, groups)


# -- cross-dataset and size sweeps ---------------------------------------


def check_compatible(a: SplitCorpus, b: SplitCorpus):
    if not a.compatible_with(b):
        raise IncompatiblePreprocessing("incompatible preprocessing")


def cross_dataset_run(source_factory: Callable[[], GuessSource], train_split: SplitCorpus,
                      test_split: SplitCorpus, checkpoints: Sequence[int]) -> list[CurvePoint]:
    """Evaluate a model trained on ``train_split`` against another test set."""
    check_compatible(train_split, test_split)
    return run_match(source_factory(), test_split, checkpoints, track_unique=False).curve


def cross_dataset_matrix(sources: Mapping[str, Callable[[], GuessSource]],
                         splits: Mapping[str, SplitCorpus], checkpoints: Sequence[int]) -> dict:
    """``{(train, test): final pct_unique}`` for every ordered dataset pair.

    ``sources[name]`` builds a fresh stream from the model trained on ``name``.
    """
    out = {}
    for a in splits:
        for b in splits:
            curve = cross_dataset_run(sources[a], splits[a], splits[b], checkpoints)
            out[(a, b)] = curve[-1].pct_unique
    return out


def weighted_cross_average(matrix: Mapping[tuple, float], splits: Mapping[str, SplitCorpus],
                           train: str) -> float | None:
    """Off-diagonal average for one training set, weighted by test-set size."""
    num = den = 0.0
    for (a, b), pct in matrix.items():
        if a == train and b != train:
            w = len(splits[b].test_unique)
            num += w * pct
            den += w
    return num / den if den else None


def nested_subsets(train: Sequence[str], sizes: Sequence[int], seed: int) -> dict:
    """Prefixes of one seeded shuffle, so each smaller subset nests in the next."""
    if any(s > len(train) or s <= 0 for s in sizes):
        raise BenchError(f"subset sizes must lie in [1, {len(train)}]")
    perm = kernels.permutation(len(train), derive_seed(seed, "sizesweep"))
    shuffled = [train[i] for i in perm]
    return {s: shuffled[:s] for s in sizes}


def size_sensitivity_run(split: SplitCorpus, sizes: Sequence[int],
                         build_source: Callable[[Sequence[str]], GuessSource],
                         checkpoints: Sequence[int], seed: int) -> dict:
    """Final pct_unique per training-subset size, on the fixed test split."""
    out = {}
    for size, subset in nested_subsets(split.train, sorted(sizes), seed).items():
        result = run_match(build_source(subset), split, checkpoints, track_unique=False)
        out[size] = result.final.pct_unique
    return out
