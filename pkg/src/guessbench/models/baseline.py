"""Uniformly random passwords: the upper (worst-case) humanness baseline."""
from __future__ import annotations

from typing import Iterator

import numpy as np

from guessbench.corpus import Vocabulary
from guessbench.errors import BenchError
from guessbench.models.base import GuessSource


def _random_stream(vocab: Vocabulary, min_len: int, max_len: int, seed: int,
                   chunk: int = 4096) -> Iterator[str]:
    rng = np.random.default_rng(seed)
    alphabet = np.frombuffer(vocab.allowed.encode("ascii"), dtype=np.uint8)
    while True:
        lengths = rng.integers(min_len, max_len + 1, size=chunk)
        chars = alphabet[rng.integers(0, len(alphabet), size=(chunk, max_len))]
        for row, n in zip(chars, lengths):
            yield row[:n].tobytes().decode("ascii")


def random_baseline(vocab: Vocabulary | None = None, min_len: int = 6, max_len: int = 12,
                    seed: int = 0, limit: int | None = None, name: str = "random") -> GuessSource:
    """Lengths uniform on ``[min_len, max_len]``, characters i.i.d. uniform over ``vocab``."""
    if min_len > max_len or min_len < 1:
        raise BenchError("random baseline needs 1 <= min_len <= max_len")
    return GuessSource(name, _random_stream(vocab or Vocabulary.default(), min_len, max_len, seed), limit)
