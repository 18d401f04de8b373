"""Weir-style probabilistic context-free grammar.

Passwords are segmented into maximal runs of letters (L), digits (D) and
specials (S). A base structure such as ``L4D2`` has a probability, and each
(class, run-length) slot has a list of terminals sorted by probability.

Enumeration walks a priority queue of "pre-terminal" nodes, a structure plus
one index per slot into its terminal list. A node's children bump a single
index at or after the node's pivot (the slot its parent bumped), so every
node has exactly one parent and is queued exactly once. Nodes of equal
probability are released together, sorted by the realized string.
"""
from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator

from guessbench.errors import BenchError
from guessbench.models.base import GuessSource

# relative gap below which two node probabilities count as a tie
TIE_RTOL = 1e-12


def char_class(ch: str) -> str:
    if ch.isascii() and ch.isalpha():
        return "L"
    if "0" <= ch <= "9":
        return "D"
    return "S"


def segment(password: str) -> list[tuple[str, str]]:
    """Split into maximal same-class runs: ``"ab12!"`` -> L ab, D 12, S !."""
    runs = []
    start = 0
    for i in range(1, len(password) + 1):
        if i == len(password) or char_class(password[i]) != char_class(password[start]):
            runs.append((char_class(password[start]), password[start:i]))
            start = i
    return runs


def structure_name(slots) -> str:
    return "".join(f"{cls}{n}" for cls, n in slots)


def parse_structure(name: str) -> tuple:
    slots = []
    i = 0
    while i < len(name):
        cls = name[i]
        j = i + 1
        while j < len(name) and name[j].isdigit():
            j += 1
        slots.append((cls, int(name[i + 1:j])))
        i = j
    return tuple(slots)


@dataclass(frozen=True)
class Terminal:
    value: str
    prob: float


class PcfgModel:
    def __init__(self, structure_counts: dict, terminal_counts: dict):
        # structure_counts: tuple of (class, length) -> count
        # terminal_counts: (class, length) -> {string: count}
        self.structure_counts = dict(structure_counts)
        self.terminal_counts = {slot: dict(c) for slot, c in terminal_counts.items()}
        total = sum(self.structure_counts.values())
        self.structures = {
            s: c / total
            for s, c in sorted(self.structure_counts.items(), key=lambda kv: (-kv[1], structure_name(kv[0])))
        }
        self.terminals = {}
        for slot, counts in self.terminal_counts.items():
            denom = sum(counts.values())
            ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
            self.terminals[slot] = [Terminal(v, c / denom) for v, c in ranked]

    def prob(self, password: str) -> float:
        """Probability the grammar assigns to ``password`` (0 if unproducible)."""
        runs = segment(password)
        slots = tuple((cls, len(v)) for cls, v in runs)
        p = self.structures.get(slots, 0.0)
        for slot, (_, value) in zip(slots, runs):
            counts = self.terminal_counts.get(slot, {})
            if value not in counts:
                return 0.0
            p *= counts[value] / sum(counts.values())
        return p

    def support_size(self) -> int:
        total = 0
        for slots in self.structures:
            n = 1
            for slot in slots:
                n *= len(self.terminals[slot])
            total += n
        return total

    def to_dict(self) -> dict:
        return {
            "kind": "pcfg",
            "structures": {structure_name(s): c for s, c in self.structure_counts.items()},
            "terminals": {
                structure_name([slot]): dict(sorted(c.items(), key=lambda kv: (-kv[1], kv[0])))
                for slot, c in sorted(self.terminal_counts.items())
            },
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PcfgModel":
        if doc.get("kind") != "pcfg":
            raise BenchError("not a PCFG model document")
        structures = {parse_structure(k): v for k, v in doc["structures"].items()}
        terminals = {parse_structure(k)[0]: v for k, v in doc["terminals"].items()}
        return cls(structures, terminals)


def train_pcfg(train: Iterable[str]) -> PcfgModel:
    """Count base structures and per-slot terminals over a multiset."""
    structures = Counter()
    terminals: dict = {}
    for p, c in Counter(train).items():
        if not p:
            continue
        runs = segment(p)
        slots = tuple((cls, len(v)) for cls, v in runs)
        structures[slots] += c
        for slot, (_, value) in zip(slots, runs):
            terminals.setdefault(slot, Counter())[value] += c
    if not structures:
        raise BenchError("cannot train on an empty corpus")
    return PcfgModel(structures, terminals)


def _pcfg_stream(model: PcfgModel) -> Iterator[str]:
    # heap entries: (-prob, guess, structure index, index tuple, pivot)
    grammar = []
    heap = []
    for sid, (slots, sprob) in enumerate(model.structures.items()):
        lists = [model.terminals[slot] for slot in slots]
        grammar.append((sprob, lists))
        idx = (0,) * len(lists)
        p = sprob
        for lst in lists:
            p *= lst[0].prob
        heap.append((-p, "".join(lst[0].value for lst in lists), sid, idx, 0))
    heapq.heapify(heap)

    pop, push = heapq.heappop, heapq.heappush
    while heap:
        top = heap[0][0]
        floor = top * (1.0 - TIE_RTOL)  # top is negative: floor is slightly larger
        group = []
        while heap and heap[0][0] <= floor:
            neg_p, guess, sid, idx, pivot = pop(heap)
            group.append(guess)
            sprob, lists = grammar[sid]
            for pos in range(pivot, len(idx)):
                nxt = idx[pos] + 1
                if nxt >= len(lists[pos]):
                    continue
                child = idx[:pos] + (nxt,) + idx[pos + 1:]
                p = sprob
                for lst, i in zip(lists, child):
                    p *= lst[i].prob
                push(heap, (-p, "".join(lst[i].value for lst, i in zip(lists, child)), sid, child, pos))
        group.sort()
        yield from group


def enumerate_pcfg(model: PcfgModel, limit: int | None = None, name: str = "pcfg") -> GuessSource:
    return GuessSource(name, _pcfg_stream(model), limit)
