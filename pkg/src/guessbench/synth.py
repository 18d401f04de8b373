"""Synthetic password corpora with a Zipf rank-frequency law.

Real leaks are not redistributable, so tests and demos run on corpora drawn
from a population of human-looking passwords (pronounceable words, digit
suffixes, years, keyboard runs) whose popularity follows ``1 / rank**s``.
"""
from __future__ import annotations

import numpy as np

from guessbench.corpus import Vocabulary

SYLLABLES = (
    "ba be bi bo bu da de di do du ka ke ki ko ku la le li lo lu ma me mi mo mu "
    "na ne ni no nu pa pe pi po pu ra re ri ro ru sa se si so su ta te ti to tu "
    "an en in on ar er or al el il ch sh th st"
).split()
DIGIT_SUFFIXES = ("1", "12", "123", "1234", "007", "69", "11", "01", "2", "7", "99", "13", "21")
SPECIALS = "!@#$.*_-"
KEYBOARD = ("qwerty", "asdf", "zxcvbn", "qwe", "asdfgh", "1q2w3e", "qazwsx")


def _word(rng: np.random.Generator) -> str:
    k = int(rng.choice([1, 2, 3, 4], p=[0.1, 0.45, 0.35, 0.1]))
    return "".join(SYLLABLES[i] for i in rng.integers(0, len(SYLLABLES), size=k))


def _password(rng: np.random.Generator) -> str:
    u = rng.random()
    if u < 0.14:
        n = int(rng.integers(4, 10))
        if rng.random() < 0.4:
            return "".join(str((i + 1) % 10) for i in range(n))
        return "".join(str(d) for d in rng.integers(0, 10, size=n))
    if u < 0.18:
        return KEYBOARD[int(rng.integers(len(KEYBOARD)))] + (str(int(rng.integers(0, 100))) if rng.random() < 0.5 else "")
    word = _word(rng)
    if rng.random() < 0.12:
        word = word.capitalize()
    r = rng.random()
    if r < 0.35:
        suffix = ""
    elif r < 0.65:
        suffix = DIGIT_SUFFIXES[int(rng.integers(len(DIGIT_SUFFIXES)))]
    elif r < 0.8:
        suffix = str(int(rng.integers(1950, 2016)))
    else:
        suffix = "".join(str(d) for d in rng.integers(0, 10, size=int(rng.integers(1, 5))))
    pw = word + suffix
    if rng.random() < 0.06:
        pw += SPECIALS[int(rng.integers(len(SPECIALS)))]
    return pw


def password_population(n_types: int, seed: int, max_length: int = 12,
                        vocab: Vocabulary | None = None) -> list[str]:
    """``n_types`` distinct passwords in popularity order (most popular first)."""
    rng = np.random.default_rng(seed)
    allowed = (vocab or Vocabulary.default()).charset
    seen = set()
    out = []
    while len(out) < n_types:
        pw = _password(rng)
        if 0 < len(pw) <= max_length and allowed.issuperset(pw) and pw not in seen:
            seen.add(pw)
            out.append(pw)
    return out


def zipf_corpus(n_samples: int = 100_000, s: float = 1.0, n_types: int = 10_000,
                seed: int = 0, max_length: int = 12, vocab: Vocabulary | None = None) -> list[str]:
    """Draw ``n_samples`` passwords with P(rank r) proportional to ``r**-s``.

    The returned list is in draw order (unsorted), like a raw leak dump.
    """
    population = password_population(n_types, seed, max_length, vocab)
    weights = 1.0 / np.arange(1, n_types + 1, dtype=float) ** s
    weights /= weights.sum()
    rng = np.random.default_rng(seed + 1)
    draws = rng.choice(n_types, size=n_samples, p=weights)
    return [population[i] for i in draws]
