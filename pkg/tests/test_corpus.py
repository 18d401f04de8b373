import json
import string
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from guessbench.corpus import (
    DEFAULT_SYMBOLS,
    PreprocessConfig,
    RawCorpus,
    Vocabulary,
    filter_passwords,
    load_corpus,
    load_split,
    preprocess,
    save_split,
    split_corpus,
    test_only_split as bare_test_split,
)
from guessbench.errors import ConfigError, EmptyCorpusError
from guessbench.rng import SplitMix64, derive_seed, permutation

from conftest import DATA
from oracles import reference_split

SAMPLE = st.text(alphabet=string.ascii_letters[:6] + "19!" + "é\t ", min_size=1, max_size=8)


def test_default_vocabulary_contents():
    v = Vocabulary.default()
    assert len(v) == 26 * 2 + 10 + len(DEFAULT_SYMBOLS)
    assert len(set(v.allowed)) == len(v.allowed)
    assert "`" not in v and " " not in v and "\t" not in v
    for ch in "~!@#$%^&*()_-+=[]{}|\\;:'\",.<>/?":
        assert ch in v
    classes = Counter(v.classes.values())
    assert classes == {"lower": 26, "upper": 26, "digit": 10, "special": len(DEFAULT_SYMBOLS)}


def test_vocabulary_rejects_bad_sets():
    with pytest.raises(ValueError):
        Vocabulary("aa")
    with pytest.raises(ValueError):
        Vocabulary("a b")
    with pytest.raises(ValueError):
        Vocabulary("aé")


@pytest.mark.parametrize("kwargs", [
    {"min_length": 5, "max_length": 3},
    {"split_ratio": 0.0},
    {"split_ratio": 1.0},
    {"seed": -1},
    {"max_length": -2},
])
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        PreprocessConfig(**kwargs)


def test_splitmix_reference_vectors():
    rng = SplitMix64(1234567)
    assert [rng.next_u64() for _ in range(3)] == [
        6457827717110365317, 3203168211198807973, 9817491932198370423,
    ]


def test_permutation_is_a_permutation():
    for n in (0, 1, 2, 17, 1000):
        assert sorted(permutation(n, 9)) == list(range(n))
    assert permutation(50, 1) != permutation(50, 2)


def test_derive_seed_is_stable_and_label_dependent():
    assert derive_seed(42, "x") == derive_seed(42, "x")
    assert derive_seed(42, "x") != derive_seed(42, "y")
    assert 0 <= derive_seed(2**64 - 1, "z") < 2**64


def test_load_corpus_drops_empty_and_invalid_lines(tmp_path):
    p = tmp_path / "c.txt"
    p.write_bytes(b"abc\r\n\np@ss1\n\xff\xfebad\nlast")
    raw = load_corpus(p)
    assert raw.lines == ("abc", "p@ss1", "last")
    assert raw.undecodable == 1
    assert raw.source_name == "c"


def test_load_corpus_empty_file(tmp_path):
    p = tmp_path / "e.txt"
    p.write_bytes(b"")
    assert load_corpus(p).lines == ()


def test_load_corpus_missing_file_names_path(tmp_path):
    with pytest.raises(Exception) as exc:
        load_corpus(tmp_path / "nope.txt")
    assert "nope.txt" in str(exc.value)


def test_filter_examples():
    cfg = PreprocessConfig(max_length=12, min_length=3)
    assert filter_passwords(["abc", "ab", "ürgen", "abcdefghijklm"], cfg) == ["abc"]
    assert filter_passwords(["P@ss1"], PreprocessConfig()) == ["P@ss1"]
    assert filter_passwords(["tab\tx"], PreprocessConfig()) == []
    assert filter_passwords(RawCorpus(("a", "a")), PreprocessConfig()) == ["a", "a"]


def test_split_all_copies_of_one_password():
    s = split_corpus(["x"] * 10, PreprocessConfig(seed=5))
    assert s.train == ()
    assert s.test_unique == {"x"}
    assert s.test_freq == {"x": 2}


def test_split_floor_arithmetic():
    s = split_corpus(list("abcde"), PreprocessConfig(seed=1))
    assert s.stats["train_raw"] == 4
    assert s.stats["test_raw"] == 1


def test_split_empty_corpus():
    with pytest.raises(EmptyCorpusError, match="empty corpus after filtering"):
        split_corpus([], PreprocessConfig())


def test_golden_split():
    # frozen from the independent reference split; see oracles.reference_split
    expected = json.loads((DATA / "golden100.expected.json").read_text())
    split = preprocess(DATA / "golden100.txt", PreprocessConfig(max_length=12, seed=42))
    assert list(split.train) == expected["train"]
    assert split.test_freq == expected["test_freq"]
    assert split.stats["removed"] == 3


def test_save_and_load_roundtrip(tmp_path):
    split = preprocess(DATA / "golden100.txt", PreprocessConfig(seed=42), name="g")
    train_p, test_p, meta_p = save_split(split, tmp_path)
    assert train_p.name == "g.train.txt" and test_p.name == "g.test.txt" and meta_p.name == "g.meta.json"
    back = load_split(test_p)
    assert back.train == split.train
    assert back.test_freq == split.test_freq
    assert back.config == split.config
    assert back.vocab == split.vocab
    meta = json.loads(meta_p.read_text())
    assert meta["schema_version"] == 1
    assert meta["config"]["seed"] == 42


def test_bare_test_split(tmp_path):
    p = tmp_path / "t.txt"
    p.write_text("a\nb\na\n")
    s = bare_test_split(p)
    assert s.test_freq == {"a": 1, "b": 1}


@settings(max_examples=200, deadline=None)
@given(st.lists(SAMPLE, max_size=60), st.integers(0, 2**64 - 1), st.integers(1, 8))
def test_split_properties(lines, seed, max_len):
    cfg = PreprocessConfig(max_length=max_len, seed=seed)
    vocab = Vocabulary.default()
    filtered = filter_passwords(lines, cfg, vocab)
    for p in lines:
        ok = len(p) <= max_len and all(ch in vocab for ch in p)
        assert (p in filtered) == ok
    assert all(len(p) <= max_len and set(p) <= vocab.charset for p in filtered)
    if not filtered:
        return
    s = split_corpus(filtered, cfg, vocab)
    assert not set(s.train) & s.test_unique
    assert s.stats["train_raw"] + sum(s.test_freq.values()) == len(filtered)
    assert s.stats["train"] + s.stats["overlap_removed"] == s.stats["train_raw"]
    train, test = reference_split(lines, max_len, 0, 0.8, seed, vocab.charset)
    assert list(s.train) == train
    assert s.test_freq == dict(test)
    again = split_corpus(filtered, cfg, vocab)
    assert again.train == s.train and list(again.test_freq) == list(s.test_freq)
