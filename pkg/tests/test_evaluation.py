import random

import pytest
from hypothesis import given, settings, strategies as st

from guessbench.analysis import PATTERN_IDS, classify_patterns, frequency_buckets
from guessbench.corpus import PreprocessConfig, SplitCorpus, Vocabulary, split_corpus
from guessbench.errors import BenchError, IncompatiblePreprocessing
from guessbench.evaluation import (
    CurvePoint,
    breakdown_by_frequency,
    breakdown_by_length,
    breakdown_by_pattern,
    consecutive_pairs,
    cross_dataset_matrix,
    cross_dataset_run,
    marginal_gain,
    nested_subsets,
    run_match,
    size_sensitivity_run,
    validate_checkpoints,
    weighted_cross_average,
)
from guessbench.models import GuessSource, enumerate_pcfg, train_pcfg


def make_split(freq: dict, train=(), max_length=12) -> SplitCorpus:
    return SplitCorpus(tuple(train), frozenset(freq), dict(freq),
                       PreprocessConfig(max_length=max_length), Vocabulary.default())


def test_checkpoint_validation():
    assert validate_checkpoints([1, 5, 10]) == (1, 5, 10)
    for bad in ([], [0, 1], [5, 5], [10, 2]):
        with pytest.raises(BenchError):
            validate_checkpoints(bad)


def test_run_match_example():
    split = make_split({"a": 1, "b": 1})
    res = run_match(["a", "c", "a", "b"], split, [2, 4])
    assert [(p.guess_count, p.matched_unique, p.pct_unique) for p in res.curve] == [(2, 1, 50.0), (4, 2, 100.0)]
    assert res.ledger.first_match_rank == {"a": 1, "b": 4}
    assert res.ledger.unique_guesses == 3
    assert res.ledger.lines() == ["1\ta", "4\tb"]


def test_run_match_disjoint_and_weighted():
    split = make_split({"a": 9, "b": 1})
    res = run_match(["x", "y"], split, [1, 2])
    assert all(p.pct_unique == 0 for p in res.curve)
    res = run_match(["a", "x"], split, [2])
    assert res.final.pct_weighted == pytest.approx(90.0)
    assert res.final.pct_unique == 50.0


def test_run_match_exhaustion_point():
    split = make_split({"a": 1, "b": 1})
    res = run_match(GuessSource("s", ["b", "z", "a"]), split, [2, 10, 100])
    assert [p.guess_count for p in res.curve] == [2, 3]
    assert res.curve[-1].exhausted and not res.curve[0].exhausted
    assert res.ledger.exhausted


def test_run_match_exact_budget_not_exhausted():
    res = run_match(["a", "b"], make_split({"a": 1}), [2])
    assert not res.ledger.exhausted
    assert len(res.curve) == 1


def test_run_match_empty_test():
    with pytest.raises(BenchError):
        run_match(["a"], make_split({}), [1])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from("abcdefgh"), max_size=60),
       st.dictionaries(st.sampled_from("abcdefxyz"), st.integers(1, 5), min_size=1))
def test_rank_replay_and_monotonicity(stream, freq):
    split = make_split(freq)
    res = run_match(stream, split, [5, 20, 60])
    expected = {}
    for i, g in enumerate(stream, 1):
        if g in freq and g not in expected:
            expected[g] = i
    assert res.ledger.first_match_rank == expected
    pts = res.curve
    assert all(a.pct_unique <= b.pct_unique and a.pct_weighted <= b.pct_weighted
               for a, b in zip(pts, pts[1:]))
    if all(v == 1 for v in freq.values()):
        assert all(p.pct_unique == pytest.approx(p.pct_weighted) for p in pts)


def _pt(count, matched, test=1000):
    return CurvePoint(count, matched, 100.0 * matched / test, 0.0)


def test_marginal_gain_examples():
    curve = [_pt(10, 100), _pt(20, 150), _pt(30, 150)]
    g = marginal_gain(curve, consecutive_pairs([10, 20, 30]))
    assert g[0].total == pytest.approx(5.0) and g[0].relative == pytest.approx(50.0)
    assert g[1].total == 0 and g[1].relative == 0
    g = marginal_gain([_pt(1, 0), _pt(2, 5)], [(1, 2)])
    assert g[0].total == pytest.approx(0.5) and g[0].relative is None
    with pytest.raises(BenchError):
        marginal_gain(curve, [(20, 10)])
    with pytest.raises(BenchError):
        marginal_gain(curve, [(10, 99)])


def test_breakdown_by_length_examples():
    split = make_split({"ab": 1, "abc": 1})
    both = run_match(["ab", "abc"], split, [2])
    assert breakdown_by_length(both.ledger, split, 2) == {2: 100.0, 3: 100.0}
    one = run_match(["ab", "zz"], split, [2])
    assert breakdown_by_length(one.ledger, split, 2) == {2: 100.0, 3: 0.0}
    with pytest.raises(BenchError):
        breakdown_by_length(one.ledger, split, 50)


def test_breakdown_by_pattern_examples():
    split = make_split({"123456": 1})
    res = run_match(["123456"], split, [1])
    assert breakdown_by_pattern(res.ledger, split, 1) == {"r4": 100.0, "r14": 100.0}
    split = make_split({"abc": 1, "a1": 1})
    res = run_match(["zzz"], split, [1])
    assert set(breakdown_by_pattern(res.ledger, split, 1).values()) == {0.0}


def _random_case(seed):
    rng = random.Random(seed)
    pool = ["".join(rng.choice("ab1!") for _ in range(rng.randint(1, 6))) for _ in range(200)]
    freq = {}
    for p in rng.sample(pool, 60):
        freq[p] = rng.randint(1, 8)
    split = make_split(freq)
    stream = [rng.choice(pool) for _ in range(150)]
    at = rng.randint(1, 150)
    return split, run_match(stream, split, [150]), at


@pytest.mark.parametrize("seed", range(5))
def test_breakdowns_match_recount(seed):
    split, res, at = _random_case(seed)
    hit = {p for p, r in res.ledger.first_match_rank.items() if r <= at}
    by_len = breakdown_by_length(res.ledger, split, at)
    for ell, pct in by_len.items():
        members = [p for p in split.test_unique if len(p) == ell]
        assert pct == pytest.approx(100.0 * len(hit.intersection(members)) / len(members))
    total = sum(pct / 100 * sum(1 for p in split.test_unique if len(p) == ell) for ell, pct in by_len.items())
    assert round(total) == len(hit)
    by_pat = breakdown_by_pattern(res.ledger, split, at)
    for pid in PATTERN_IDS:
        members = [p for p in split.test_unique if pid in classify_patterns(p)]
        if members:
            assert by_pat[pid] == pytest.approx(100.0 * len(hit.intersection(members)) / len(members))
        else:
            assert pid not in by_pat
    by_freq = breakdown_by_frequency(res.ledger, split, at)
    buckets = frequency_buckets(split)
    for key, members in buckets.items():
        assert by_freq[key] == pytest.approx(100.0 * len(hit & members) / len(members))
    top10 = by_freq["top10"] / 100 * len(buckets.top10)
    bottom = by_freq["bottom90"] / 100 * len(buckets.bottom90)
    assert round(top10 + bottom) == len(hit)


def test_breakdown_by_frequency_full_and_none():
    split = make_split({f"p{i}": 20 - i for i in range(20)})
    full = run_match(sorted(split.test_unique), split, [20])
    assert set(breakdown_by_frequency(full.ledger, split, 20).values()) == {100.0}
    none = run_match(["zz"], split, [1])
    assert set(breakdown_by_frequency(none.ledger, split, 1).values()) == {0.0}


def _pcfg_factory(train):
    model = train_pcfg(train)
    return lambda: enumerate_pcfg(model, 1000)


def test_cross_dataset_identity_and_disjoint():
    a = split_corpus(["abc1", "abc2", "abc1", "xyz", "abc3"] * 4, PreprocessConfig(seed=1), name="a")
    curve_ab = cross_dataset_run(_pcfg_factory(a.train or ["abc"]), a, a, [10, 1000])
    direct = run_match(_pcfg_factory(a.train or ["abc"])(), a, [10, 1000]).curve
    assert curve_ab == direct
    b = make_split({"QQQQ": 1, "9999": 1})
    zero = cross_dataset_run(lambda: enumerate_pcfg(train_pcfg(["aaa"]), 1000), a, b, [10])
    assert zero[-1].pct_unique == 0


def test_cross_dataset_incompatible():
    a = make_split({"a": 1}, max_length=8)
    b = make_split({"b": 1}, max_length=12)
    with pytest.raises(IncompatiblePreprocessing, match="incompatible preprocessing"):
        cross_dataset_run(lambda: GuessSource("s", ["a"]), a, b, [1])


def test_cross_dataset_matrix_shape_and_diagonal():
    splits = {}
    for i, name in enumerate("xyz"):
        lines = [f"{name}{j % 7}" for j in range(60)] + [f"{j % 5}{name}" for j in range(30)]
        splits[name] = split_corpus(lines, PreprocessConfig(seed=i), name=name)
    factories = {n: _pcfg_factory(s.train) for n, s in splits.items()}
    matrix = cross_dataset_matrix(factories, splits, [50, 1000])
    assert len(matrix) == 9
    for n, s in splits.items():
        assert matrix[(n, n)] == run_match(factories[n](), s, [50, 1000]).final.pct_unique
    avg = weighted_cross_average(matrix, splits, "x")
    w = {n: len(splits[n].test_unique) for n in "yz"}
    assert avg == pytest.approx((matrix[("x", "y")] * w["y"] + matrix[("x", "z")] * w["z"]) / (w["y"] + w["z"]))


def test_nested_subsets():
    train = [f"p{i}" for i in range(50)]
    subs = nested_subsets(train, [5, 20, 50], seed=3)
    assert set(subs[5]) <= set(subs[20]) <= set(subs[50]) == set(train)
    assert subs == nested_subsets(train, [5, 20, 50], seed=3)
    with pytest.raises(BenchError):
        nested_subsets(train, [51], seed=3)


def test_size_sensitivity_full_size_is_standard_run():
    split = split_corpus([f"w{i % 40}x{i % 3}" for i in range(400)], PreprocessConfig(seed=2))
    n = len(split.train)
    out = size_sensitivity_run(split, [n], lambda sub: enumerate_pcfg(train_pcfg(sub), 500), [500], seed=1)
    direct = run_match(enumerate_pcfg(train_pcfg(split.train), 500), split, [500]).final.pct_unique
    assert out == {n: direct}
    out = size_sensitivity_run(split, [n // 4, n // 2, n], lambda sub: enumerate_pcfg(train_pcfg(sub), 500),
                               [500], seed=1)
    assert list(out) == [n // 4, n // 2, n]
