"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 3] [--size 200000]

Prints the best-of-N wall time per kernel for each backend and the speedup.
"""
import argparse
import time

from guessbench import _pykernels
from guessbench.models import MarkovConfig, train_markov
from guessbench.synth import zipf_corpus

try:
    from guessbench import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(size):
    corpus = zipf_corpus(size, s=1.0, seed=1)
    test = frozenset(corpus[: size // 10])
    model = train_markov(corpus, MarkovConfig(order=4))
    # a few non-empty cells of the longest common lengths
    cells = []
    for ell in (6, 7, 8):
        lo, hi = model.cell_bounds(ell)
        cells += [(ell, b) for b in range(lo, min(hi, lo + 8) + 1)]

    def perm(k):
        return lambda: k.permutation(size, 42)

    def match(k):
        return lambda: k.match_batch(corpus, test, {}, 0, set())

    def walk(k):
        def run():
            for ell, budget in cells:
                k.MarkovCellWalker(model.tables, ell, budget).take(size)
        return run

    return {"permutation": perm, "match_batch": match, "markov_walk": walk}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--size", type=int, default=200_000)
    args = ap.parse_args(argv)

    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled kernels not built; timing the Python backend only")

    print(f"{'kernel':<14}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, make in cases(args.size).items():
        t = {b: best_of(make(k), args.repeat) for b, k in backends.items()}
        speed = f"{t['python'] / t['cython']:>9.1f}x" if "cython" in t else ""
        print(f"{name:<14}" + "".join(f"{v:>11.3f}s" for v in t.values()) + speed)


if __name__ == "__main__":
    main()
