import itertools
import logging
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from guessbench.errors import BenchError
from guessbench.metrics import (
    EXTERNAL_DISTANCES,
    BaselineBounds,
    GuessSetSummary,
    coefficient_of_variation,
    generalization_loss,
    humanness_normalize,
    humanness_report,
    jaccard_index,
    js_divergence,
    length_jsd,
    mergeability_index,
    multi_model_select,
    ngram_jsd,
    pairwise_matrix,
    pattern_jsd,
    uniqueness,
)

from oracles import jaccard_oracle, mergeability_oracle

SETS = st.frozensets(st.integers(0, 30), max_size=20)
WORDS = st.lists(st.text(alphabet="ab1!", min_size=1, max_size=5), min_size=1, max_size=30)


def summ(generated, matched=None):
    generated = frozenset(generated)
    return GuessSetSummary(generated, frozenset(matched if matched is not None else generated), len(generated) or 1)


def one(m1, m2):
    return {"m1": {"d": summ(m1)}, "m2": {"d": summ(m2)}}


def test_jaccard_examples():
    assert jaccard_index(one("abc", "abc"), "m1", "m2") == 1.0
    assert jaccard_index(one("ab", "cd"), "m1", "m2") == 0.0
    assert jaccard_index(one("abc", "bcd"), "m1", "m2") == 0.5
    with pytest.raises(BenchError):
        jaccard_index(one("", ""), "m1", "m2")


def test_mergeability_examples(caplog):
    assert mergeability_index(one("ab", "bc"), "m1", "m2") == 0.5
    assert mergeability_index(one("abc", "b"), "m1", "m2") == 0.0
    two = {
        "m1": {"d1": summ("ab"), "d2": summ("ab")},
        "m2": {"d1": summ("bc"), "d2": summ("b")},
    }
    assert mergeability_index(two, "m1", "m2") == 0.25
    with caplog.at_level(logging.WARNING):
        three = {"m1": {**two["m1"], "d3": summ("")}, "m2": {**two["m2"], "d3": summ("")}}
        assert mergeability_index(three, "m1", "m2") == 0.25
    assert "no matches" in caplog.text
    assert mergeability_index(one("", ""), "m1", "m2") is None


def test_mismatched_datasets():
    s = {"m1": {"a": summ("x")}, "m2": {"b": summ("x")}}
    with pytest.raises(BenchError):
        jaccard_index(s, "m1", "m2")


@settings(max_examples=300)
@given(SETS, SETS)
def test_set_metrics_against_oracle(a, b):
    s = one(a, b)
    if a or b:
        assert jaccard_index(s, "m1", "m2") == float(jaccard_oracle(a, b))
        assert jaccard_index(s, "m1", "m2") == jaccard_index(s, "m2", "m1")
    mi = mergeability_index(s, "m1", "m2")
    expected = mergeability_oracle(a, b)
    assert mi == (None if expected is None else float(expected))
    if mi is not None:
        assert mi >= 0 and mi == mergeability_index(s, "m2", "m1")


@given(SETS.filter(bool))
def test_self_comparison(a):
    s = one(a, a)
    assert jaccard_index(s, "m1", "m1") == 1.0
    assert mergeability_index(s, "m1", "m1") == 0.0


def test_pairwise_matrix_keys():
    s = {"b": {"d": summ("xy")}, "a": {"d": summ("y")}}
    m = pairwise_matrix(s, jaccard_index)
    assert set(m) == {("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")}


def test_summary_from_stream():
    s = GuessSetSummary.from_stream(["a", "b", "a", "z"], {"a", "q"})
    assert s.generated == {"a", "b", "z"} and s.matched == {"a"} and s.total_emitted == 4
    assert uniqueness(s) == pytest.approx(75.0)


def test_multi_model_example():
    steps = multi_model_select({"A": {1, 2, 3}, "B": {3, 4}, "C": {4}}, 10)
    assert [s.models for s in steps] == [("A",), ("A", "B"), ("A", "B", "C")]
    assert steps[-1].gain == 0
    assert steps[0].cumulative_pct == pytest.approx(30.0)
    assert steps[1].gain == pytest.approx(10.0)


def test_multi_model_single_and_identical():
    steps = multi_model_select({"only": {1, 2}}, 4)
    assert len(steps) == 1 and steps[0].gain == 50.0
    steps = multi_model_select({"x": {1, 2}, "y": {1, 2}, "z": {1, 2}}, 4)
    assert [s.gain for s in steps[1:]] == [0, 0]
    # ties remove the lexicographically last name, so "x" survives
    assert steps[0].models == ("x",)
    with pytest.raises(BenchError):
        multi_model_select({}, 3)


@settings(max_examples=200)
@given(st.lists(st.frozensets(st.integers(0, 12), max_size=8), min_size=1, max_size=4))
def test_multi_model_greedy_optimal_at_top_steps(sets):
    matched = {f"m{i}": s for i, s in enumerate(sets)}
    k = len(matched)
    steps = multi_model_select(matched, 13)
    prev = -1.0
    for s in steps:
        assert s.cumulative_pct >= prev
        prev = s.cumulative_pct
    for n in {k, k - 1} - {0}:
        best = max(len(frozenset().union(*(matched[m] for m in combo)))
                   for combo in itertools.combinations(matched, n))
        assert steps[n - 1].cumulative_pct == pytest.approx(100.0 * best / 13)


def test_humanness_normalize():
    b = BaselineBounds(0.2, 0.6, "x")
    assert humanness_normalize(0.2, b) == 0
    assert humanness_normalize(0.6, b) == pytest.approx(100)
    assert humanness_normalize(0.4, b) == pytest.approx(50)
    assert humanness_normalize(1.0, b) > 100 and humanness_normalize(0.0, b) < 0
    with pytest.raises(BenchError, match="degenerate baselines"):
        humanness_normalize(0.3, BaselineBounds(0.3, 0.3, "x"))


@given(st.floats(0, 1), st.floats(0.5, 10), st.floats(-5, 5))
def test_humanness_affine_invariance(d, alpha, beta):
    b = BaselineBounds(0.1, 0.7, "x")
    moved = BaselineBounds(alpha * 0.1 + beta, alpha * 0.7 + beta, "x")
    assert humanness_normalize(alpha * d + beta, moved) == pytest.approx(humanness_normalize(d, b), abs=1e-6)


def test_jsd_examples():
    assert length_jsd(["ab", "cd"], ["ab", "cd"]) == 0
    assert length_jsd(["a"], ["bbb"]) == pytest.approx(math.log(2))
    p, q = np.array([1.0, 0.0]), np.array([0.5, 0.5])
    m = (p + q) / 2
    kl = lambda x, y: sum(xi * math.log(xi / yi) for xi, yi in zip(x, y) if xi > 0)
    expected = 0.5 * kl(p, m) + 0.5 * kl(q, m)
    assert length_jsd(["aa", "bb"], ["aa", "ccc"]) == pytest.approx(expected)
    assert js_divergence({2: 1.0}, {2: 0.5, 3: 0.5}) == pytest.approx(expected)
    with pytest.raises(BenchError):
        js_divergence({}, {1: 1})


@settings(max_examples=100, deadline=None)
@given(WORDS, WORDS)
def test_jsd_properties(a, b):
    for fn in (length_jsd, ngram_jsd, pattern_jsd):
        d = fn(a, b)
        assert 0 <= d <= math.log(2) + 1e-12
        assert d == pytest.approx(fn(b, a), abs=1e-12)
        assert fn(a, a) == pytest.approx(0, abs=1e-12)


def test_humanness_report_shape():
    rng = random.Random(0)
    test = ["".join(rng.choice("abc1") for _ in range(rng.randint(4, 8))) for _ in range(300)]
    train = ["".join(rng.choice("abc1") for _ in range(rng.randint(4, 8))) for _ in range(300)]
    rand = ["".join(rng.choice("xyzQ!#") for _ in range(rng.randint(6, 12))) for _ in range(300)]
    rep = humanness_report(test, train, rand, {"r": rand, "t": train})
    assert set(rep["bounds"]) == {"length_jsd", "ngram_jsd", "pattern_jsd"}
    assert rep["models"]["r"]["mean"] == pytest.approx(100)
    assert rep["models"]["t"]["mean"] == pytest.approx(0, abs=1e-9)
    assert len(EXTERNAL_DISTANCES) == 4


def test_uniqueness():
    assert uniqueness(GuessSetSummary(frozenset("abc"), frozenset(), 3)) == 100
    assert uniqueness(GuessSetSummary(frozenset("a"), frozenset(), 4)) == 25
    assert uniqueness(GuessSetSummary(frozenset("ab"), frozenset(), 3)) == pytest.approx(66.6667, abs=1e-3)
    with pytest.raises(BenchError):
        uniqueness(GuessSetSummary(frozenset(), frozenset(), 0))


def test_coefficient_of_variation():
    assert coefficient_of_variation([10, 10, 10]) == 0
    assert coefficient_of_variation([8, 12]) == pytest.approx(20.0)
    rng = random.Random(2)
    vals = [rng.uniform(1, 50) for _ in range(9)]
    mean = sum(vals) / len(vals)
    sd = math.sqrt(sum((v - mean) ** 2 for v in vals) / len(vals))
    assert coefficient_of_variation(vals) == pytest.approx(100 * sd / mean)
    with pytest.raises(BenchError):
        coefficient_of_variation([1, -1])
    with pytest.raises(BenchError):
        coefficient_of_variation([3])


def test_generalization_loss():
    assert generalization_loss(40, [40, 40]) == 0
    assert generalization_loss(50, [40]) == pytest.approx(20.0)
    assert generalization_loss(50, [30, 50], [1, 1]) == generalization_loss(50, [30, 50])
    assert generalization_loss(50, [30, 50], [3, 1]) == pytest.approx(100 * (50 - 35) / 50)
    with pytest.raises(BenchError):
        generalization_loss(0, [1])
    with pytest.raises(BenchError):
        generalization_loss(10, [1, 2], [1])

