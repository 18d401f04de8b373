"""The uniform guess-stream contract shared by native and external models."""
from __future__ import annotations

from itertools import islice
from typing import Iterable


class GuessSource:
    """An ordered, possibly duplicated stream of password guesses.

    Iteration ends either because the underlying model ran out of guesses
    (``exhausted`` becomes True) or because ``limit`` guesses were produced
    (``exhausted`` stays False). A source is single-consumer.
    """

    def __init__(self, name: str, guesses: Iterable[str], limit: int | None = None):
        if limit is not None and limit < 0:
            raise ValueError("limit must be non-negative")
        self.name = name
        self.limit = limit
        self.emitted = 0
        self.exhausted = False
        self._it = iter(guesses)

    def __iter__(self):
        return self

    def __next__(self) -> str:
        if self.limit is not None and self.emitted >= self.limit:
            raise StopIteration
        try:
            guess = next(self._it)
        except StopIteration:
            self.exhausted = True
            raise
        self.emitted += 1
        return guess

    def take(self, n: int) -> list[str]:
        """Up to ``n`` further guesses; an empty list means the stream ended."""
        if self.limit is not None:
            n = min(n, self.limit - self.emitted)
        if n <= 0:
            return []
        batch = list(islice(self._it, n))
        if len(batch) < n:
            self.exhausted = True
        self.emitted += len(batch)
        return batch

    def __repr__(self):
        return f"GuessSource({self.name!r}, emitted={self.emitted}, exhausted={self.exhausted})"
