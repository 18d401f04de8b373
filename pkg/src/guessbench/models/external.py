"""Guess files written by external tools (neural models, Hashcat, JtR...).

File order is trusted as the tool's best-first order.
"""
from __future__ import annotations

from pathlib import Path
from typing import Iterator

from guessbench.errors import BenchError
from guessbench.models.base import GuessSource


class ExternalGuessStream(GuessSource):
    def __init__(self, path, dedupe_on_read: bool = False, limit: int | None = None,
                 name: str | None = None):
        self.path = Path(path)
        self.dedupe_on_read = dedupe_on_read
        self.skipped_lines = 0
        try:
            self._fh = open(self.path, "rb")
        except OSError as exc:
            raise BenchError(f"cannot open guess file {self.path}: {exc.strerror or exc}") from exc
        super().__init__(name or self.path.stem, self._lines(), limit)

    def _lines(self) -> Iterator[str]:
        seen = set() if self.dedupe_on_read else None
        with self._fh as fh:
            for raw in fh:
                raw = raw.rstrip(b"\n").rstrip(b"\r")
                if not raw:
                    continue
                try:
                    guess = raw.decode("utf-8")
                except UnicodeDecodeError:
                    self.skipped_lines += 1
                    continue
                if seen is not None:
                    if guess in seen:
                        continue
                    seen.add(guess)
                yield guess


def open_external_stream(path, dedupe_on_read: bool = False, limit: int | None = None,
                         name: str | None = None) -> ExternalGuessStream:
    return ExternalGuessStream(path, dedupe_on_read, limit, name)
