"""Pure-Python kernels; the reference behaviour for ``_ckernels``."""
from __future__ import annotations

from guessbench.rng import permutation  # noqa: F401  (re-exported kernel)

INF = 1 << 20


def match_batch(batch, test, ranks: dict, offset: int, seen=None) -> int:
    """Record first-match ranks for one batch of guesses.

    ``offset`` is the number of guesses consumed before this batch; ranks
    are 1-based. Returns how many test passwords were newly matched.
    """
    new = 0
    rank = offset
    for guess in batch:
        rank += 1
        if seen is not None:
            seen.add(guess)
        if guess in test and guess not in ranks:
            ranks[guess] = rank
            new += 1
    return new


class MarkovCellWalker:
    """Resumable depth-first walk over one (length, level budget) cell.

    Yields every string of ``length`` whose start-prefix level plus
    transition levels equal ``budget``, in alphabet order.
    """

    def __init__(self, tables, length: int, budget: int):
        self._gen = self._walk(tables.as_lists, tables.order - 1, length, budget)

    def take(self, n: int) -> list[str]:
        out = []
        append = out.append
        for s in self._gen:
            append(s)
            if len(out) >= n:
                break
        return out

    def __iter__(self):
        return self._gen

    @staticmethod
    def _walk(t, n1, length, budget):
        start_off = t["start_off"]
        start_str = t["start_str"]
        start_level = t["start_level"]
        if length < n1:
            for i in range(start_off[length], start_off[length + 1]):
                if start_level[i] == budget:
                    yield start_str[i]
            return

        steps = length - n1
        edge_ptr, edge_char = t["edge_ptr"], t["edge_char"]
        edge_level, edge_next = t["edge_level"], t["edge_next"]
        min_sum, max_sum = t["min_sum"], t["max_sum"]
        start_ctx = t["start_ctx"]
        for i in range(start_off[n1], start_off[n1 + 1]):
            need = budget - start_level[i]
            if need < 0:
                continue
            if steps == 0:
                if need == 0:
                    yield start_str[i]
                continue
            ctx = start_ctx[i]
            if not (min_sum[ctx][steps] <= need <= max_sum[ctx][steps]):
                continue
            prefix = start_str[i]
            # explicit stack: per depth the edge cursor, edge end and remaining need
            chars = [""] * steps
            pos = [0] * steps
            end = [0] * steps
            needs = [0] * steps
            pos[0], end[0], needs[0] = edge_ptr[ctx], edge_ptr[ctx + 1], need
            d = 0
            while d >= 0:
                if pos[d] >= end[d]:
                    d -= 1
                    continue
                e = pos[d]
                pos[d] = e + 1
                rem = needs[d] - edge_level[e]
                if rem < 0:
                    continue
                left = steps - d - 1
                if left == 0:
                    if rem == 0:
                        chars[d] = edge_char[e]
                        yield prefix + "".join(chars)
                    continue
                nxt = edge_next[e]
                if min_sum[nxt][left] <= rem <= max_sum[nxt][left]:
                    chars[d] = edge_char[e]
                    d += 1
                    pos[d], end[d], needs[d] = edge_ptr[nxt], edge_ptr[nxt + 1], rem
