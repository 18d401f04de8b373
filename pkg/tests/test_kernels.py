"""Both kernel backends must behave identically; the Python one is the reference."""
import random

import pytest

from guessbench import kernels
from guessbench.corpus import Vocabulary
from guessbench.models import MarkovConfig, train_markov
from guessbench.models.markov import INF

from oracles import markov_bruteforce, random_markov_corpus, splitmix_permutation


def _walk_all(backend, model):
    out = []
    for ell in sorted(model.length_levels):
        lo, hi = model.cell_bounds(ell)
        for s in range(0, 200):
            budget = s - model.length_levels[ell]
            if budget < lo or budget > hi:
                continue
            walker = backend.MarkovCellWalker(model.tables, ell, budget)
            while True:
                batch = walker.take(3)
                if not batch:
                    break
                out.extend((s, ell, g) for g in batch)
    return [g for _, _, g in sorted(out, key=lambda t: (t[0], t[1], model.sort_key(t[2])))]


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("n, seed", [(0, 0), (1, 5), (10, 42), (1000, 2**64 - 1)])
def test_permutation(backend, n, seed):
    assert list(backend.permutation(n, seed)) == splitmix_permutation(n, seed)


def test_permutation_known_value(backend):
    assert list(backend.permutation(10, 42)) == [0, 9, 5, 8, 6, 4, 7, 2, 1, 3]


def test_match_batch(backend):
    ranks, seen = {}, set()
    test = frozenset({"a", "b"})
    assert backend.match_batch(["a", "c", "a"], test, ranks, 0, seen) == 1
    assert backend.match_batch(["b", "a"], test, ranks, 3, seen) == 1
    assert ranks == {"a": 1, "b": 4}
    assert seen == {"a", "b", "c"}
    assert backend.match_batch(["b"], test, ranks, 5, None) == 0


@pytest.mark.parametrize("seed", range(15))
def test_cell_walker_matches_bruteforce(backend, seed):
    rng = random.Random(seed)
    alpha = "xyz"[: rng.randint(1, 3)]
    order = rng.choice([2, 3])
    corpus = random_markov_corpus(rng, alpha)
    model = train_markov(corpus, MarkovConfig(order=order), Vocabulary(alpha))
    assert _walk_all(backend, model) == markov_bruteforce(corpus, alpha, order)


def test_backends_agree_on_larger_model():
    try:
        from guessbench import _ckernels
    except ImportError:
        pytest.skip("compiled kernels not built")
    from guessbench import _pykernels

    rng = random.Random(3)
    corpus = ["".join(rng.choice("abc123!") for _ in range(rng.randint(1, 8))) for _ in range(400)]
    model = train_markov(corpus, MarkovConfig(order=3))
    for ell in (2, 5, 8):
        lo, hi = model.cell_bounds(ell)
        if lo == INF:
            continue
        for budget in range(lo, min(hi, lo + 6) + 1):
            a = _pykernels.MarkovCellWalker(model.tables, ell, budget).take(10**6)
            b = _ckernels.MarkovCellWalker(model.tables, ell, budget).take(10**6)
            assert a == b
