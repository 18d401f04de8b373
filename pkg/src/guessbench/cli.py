"""``guessbench`` command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.
The default output directory comes from ``$GUESSBENCH_OUTPUT_DIR``.
"""
from __future__ import annotations

import argparse
import json
import logging
import platform
import sys
from datetime import datetime, timezone
from pathlib import Path

from guessbench import __version__, analysis, kernels, metrics
from guessbench.config import FORMATS, default_output_dir, load_run_config
from guessbench.corpus import (
    PreprocessConfig,
    load_split,
    meta_path_for,
    preprocess,
    read_lines,
    save_split,
    test_only_split,
)
from guessbench.errors import BenchError, ConfigError
from guessbench.evaluation import (
    DESK_CHECKPOINTS,
    breakdown_by_frequency,
    breakdown_by_length,
    breakdown_by_pattern,
    consecutive_pairs,
    marginal_gain,
    run_match,
    validate_checkpoints,
)
from guessbench.models import (
    MarkovConfig,
    enumerate_model,
    load_model,
    open_external_stream,
    random_baseline,
    save_model,
    train_markov,
    train_pcfg,
)
from guessbench.reports import atomic_write_text, matrix_rows, write_csv, write_json

log = logging.getLogger("guessbench")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; usage errors are 1 here.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _checkpoints(text: str) -> tuple:
    try:
        return validate_checkpoints(int(float(x)) for x in text.split(","))
    except (ValueError, BenchError) as exc:
        raise argparse.ArgumentTypeError(f"bad checkpoint list {text!r}: {exc}")


def _named_path(text: str) -> tuple[str, str]:
    if "=" in text:
        name, path = text.split("=", 1)
    else:
        name, path = Path(text).stem, text
    if not name or not path:
        raise argparse.ArgumentTypeError(f"expected NAME=PATH, got {text!r}")
    return name, path


def _outdir(args) -> Path:
    return Path(args.output_dir or default_output_dir())


def _formats(fmt: str) -> tuple[bool, bool]:
    return fmt in ("json", "both"), fmt in ("csv", "both")


def _load_test(path) -> object:
    """A split from its meta sidecar when present, else a bare test list."""
    if meta_path_for(path).exists():
        return load_split(path)
    log.info("no metadata next to %s; every test password gets frequency 1", path)
    return test_only_split(path)


def _markov_cfg(args) -> MarkovConfig:
    return MarkovConfig(order=args.order)


def _native_model(args):
    if getattr(args, "model_file", None):
        return load_model(args.model_file)
    if not args.train:
        raise UsageError("--train or --model-file is required for native models")
    train = read_lines(args.train)
    if args.model == "markov":
        return train_markov(train, _markov_cfg(args))
    return train_pcfg(train)


# -- commands -------------------------------------------------------------


def cmd_preprocess(args) -> int:
    cfg = PreprocessConfig(max_length=args.max_len, min_length=args.min_len,
                           split_ratio=args.split_ratio, seed=args.seed)
    name = args.name or Path(args.input).stem
    split = preprocess(args.input, cfg, name=name)
    paths = save_split(split, _outdir(args), name)
    st = split.stats
    print(f"{name}: {st['raw_lines']} lines, removed {st['removed']} ({st['removed_pct']:.2f}%), "
          f"train {st['train']} (overlap removed {st['overlap_removed']}), "
          f"test {st['test_raw']} ({st['test_unique']} unique)")
    for p in paths:
        print(p)
    return 0


def cmd_analyze(args) -> int:
    passwords = read_lines(args.input)
    doc = analysis.analyze(passwords, k=args.top, min_count=args.min_count)
    doc["input"] = str(args.input)
    stem = _outdir(args) / (args.name or Path(args.input).stem)
    want_json, want_csv = _formats(args.format)
    if want_json:
        write_json(stem.with_name(stem.name + ".analysis.json"), doc)
    if want_csv:
        for table, (header, rows) in analysis.analysis_tables(doc).items():
            write_csv(stem.with_name(f"{stem.name}.{table}.csv"), header, rows)
    zipf = doc["zipf"]
    print(f"{doc['total']} passwords, {doc['unique']} unique"
          + (f", zipf slope {zipf['slope']:.3f} (r2 {zipf['r_squared']:.3f})" if zipf else ""))
    return 0


def cmd_train(args) -> int:
    model = _native_model(args)
    out = Path(args.output) if args.output else _outdir(args) / f"{Path(args.train).stem}.{args.model}.json"
    save_model(model, out)
    print(out)
    return 0


def _guess_source(args, limit):
    if args.model == "random":
        return random_baseline(None, args.min_len, args.max_len, args.seed, limit)
    return enumerate_model(_native_model(args), limit, args.model)


def cmd_generate(args) -> int:
    source = _guess_source(args, args.limit)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = out.with_name(f".{out.name}.tmp")
    n = 0
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        while True:
            batch = source.take(1 << 15)
            if not batch:
                break
            fh.write("".join(g + "\n" for g in batch))
            n += len(batch)
    tmp.replace(out)
    print(f"wrote {n} guesses to {out}" + (" (model exhausted)" if source.exhausted else ""))
    return 0


def cmd_evaluate(args) -> int:
    split = _load_test(args.test)
    checkpoints = args.checkpoints
    if args.guesses:
        source = open_external_stream(args.guesses, args.dedupe, checkpoints[-1], args.name)
    elif args.model:
        source = _guess_source(args, checkpoints[-1])
    else:
        raise UsageError("one of --guesses or --model is required")
    name = args.name or source.name
    result = run_match(source, split, checkpoints)
    at = result.ledger.guesses_consumed
    led = result.ledger
    pts = [pt.guess_count for pt in result.curve if not pt.exhausted]
    doc = {
        "model": name,
        "test": str(args.test),
        "ledger": {"guesses_consumed": at, "unique_guesses": led.unique_guesses,
                   "matched": len(led.first_match_rank), "exhausted": led.exhausted,
                   "test_unique": len(split.test_unique)},
        "curve": [pt.to_dict() for pt in result.curve],
        "marginal_gain": [{"from": g.start, "to": g.end, "total": g.total, "relative": g.relative}
                          for g in marginal_gain(result.curve, consecutive_pairs(pts))],
        "by_length": breakdown_by_length(led, split, at),
        "by_pattern": breakdown_by_pattern(led, split, at),
        "by_frequency": breakdown_by_frequency(led, split, at),
    }
    if getattr(source, "skipped_lines", 0):
        doc["skipped_lines"] = source.skipped_lines
    stem = _outdir(args) / name
    want_json, want_csv = _formats(args.format)
    if want_json:
        write_json(stem.with_name(stem.name + ".eval.json"), doc)
    if want_csv:
        write_csv(stem.with_name(stem.name + ".curve.csv"),
                  ["guess_count", "matched_unique", "pct_unique", "pct_weighted", "exhausted"],
                  [[p.guess_count, p.matched_unique, p.pct_unique, p.pct_weighted, int(p.exhausted)]
                   for p in result.curve])
        for key in ("by_length", "by_pattern", "by_frequency"):
            write_csv(stem.with_name(f"{stem.name}.{key}.csv"), ["group", "pct_matched"], list(doc[key].items()))
    atomic_write_text(stem.with_name(stem.name + ".ledger.tsv"), "".join(x + "\n" for x in led.lines()))
    fin = result.final
    print(f"{name}: {fin.matched_unique}/{len(split.test_unique)} matched "
          f"({fin.pct_unique:.2f}%) after {fin.guess_count} guesses")
    return 0


def cmd_compare(args) -> int:
    if len(args.guesses) < 2:
        raise UsageError("compare needs at least two --guesses NAME=PATH entries")
    names = [n for n, _ in args.guesses]
    if len(set(names)) != len(names):
        raise UsageError("model names passed to --guesses must be unique")
    split = _load_test(args.test)
    dataset = split.name or "test"
    summaries = {}
    for name, path in args.guesses:
        src = open_external_stream(path, False, args.limit, name)
        summaries[name] = {dataset: metrics.GuessSetSummary.from_stream(src, split.test_unique)}
    names = sorted(names)
    jac = metrics.pairwise_matrix(summaries, metrics.jaccard_index)
    mer = metrics.pairwise_matrix(summaries, metrics.mergeability_index)
    steps = metrics.multi_model_select({m: summaries[m][dataset].matched for m in names},
                                       len(split.test_unique))
    doc = {
        "models": names,
        "jaccard": {f"{a}|{b}": v for (a, b), v in jac.items()},
        "mergeability": {f"{a}|{b}": v for (a, b), v in mer.items()},
        "multi_model": [s.to_dict() for s in steps],
    }
    out = _outdir(args)
    want_json, want_csv = _formats(args.format)
    if want_json:
        write_json(out / "compare.json", doc)
    if want_csv:
        write_csv(out / "jaccard.csv", ["model"] + names, matrix_rows(names, names, lambda a, b: jac[(a, b)]))
        write_csv(out / "mergeability.csv", ["model"] + names, matrix_rows(names, names, lambda a, b: mer[(a, b)]))
    for s in steps:
        print(f"{'+'.join(s.models)}: {s.cumulative_pct:.2f}% (+{s.gain:.2f})")
    return 0


def cmd_benchmark(args) -> int:
    from guessbench.runner import run_benchmark

    cfg = load_run_config(args.config, seed=args.seed, max_length=args.max_len,
                          checkpoints=args.checkpoints, output_dir=args.output_dir,
                          format=args.format, jobs=args.jobs,
                          scenarios=tuple(args.scenarios.split(",")) if args.scenarios else None)
    doc = run_benchmark(cfg)
    write_json(Path(cfg.output_dir) / "run_info.json", {
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "version": __version__,
        "kernel_backend": kernels.BACKEND,
        "python": platform.python_version(),
        "config": str(args.config),
    })
    for section, block in doc["summary"]["sections"].items():
        print(f"[{section}]")
        for metric, vals in block.items():
            cells = "  ".join(f"{m}={'-' if v is None else f'{v:.2f}'}" for m, v in vals.items())
            print(f"  {metric}: {cells}")
    return 0


def cmd_synth(args) -> int:
    from guessbench.synth import zipf_corpus

    lines = zipf_corpus(args.samples, args.exponent, args.types, args.seed, args.max_len)
    atomic_write_text(args.output, "".join(p + "\n" for p in lines))
    print(f"wrote {len(lines)} passwords to {args.output}")
    return 0


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="guessbench", description="Benchmark password guessing models.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def outdir(p):
        p.add_argument("-d", "--output-dir", help="output directory (default $GUESSBENCH_OUTPUT_DIR or guessbench-out)")

    def fmt(p):
        p.add_argument("--format", choices=FORMATS, default="both")

    def native(p, kinds):
        p.add_argument("--model", choices=kinds)
        p.add_argument("--train", help="training password file (one per line)")
        p.add_argument("--model-file", help="previously trained model JSON")
        p.add_argument("--order", type=int, default=4, help="markov n-gram order")
        p.add_argument("--seed", type=int, default=0, help="seed for the random baseline")
        p.add_argument("--min-len", type=int, default=6)
        p.add_argument("--max-len", type=int, default=12)

    p = sub.add_parser("preprocess", help="filter, split and deduplicate a raw corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--name")
    p.add_argument("--max-len", type=int, default=12)
    p.add_argument("--min-len", type=int, default=0)
    p.add_argument("--split-ratio", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    outdir(p)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("analyze", help="length, pattern, top-k and Zipf statistics")
    p.add_argument("--input", required=True)
    p.add_argument("--name")
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--min-count", type=int, default=3)
    outdir(p)
    fmt(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("train", help="train a native model and save it as JSON")
    p.add_argument("--model", choices=("markov", "pcfg"), required=True)
    p.add_argument("--train", required=True)
    p.add_argument("--order", type=int, default=4)
    p.add_argument("-o", "--output")
    outdir(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("generate", help="write a model's guesses to a file, best first")
    native(p, ("markov", "pcfg", "random"))
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evaluate", help="match a guess stream against a test set")
    p.add_argument("--test", required=True)
    p.add_argument("--guesses", help="external guess file")
    p.add_argument("--dedupe", action="store_true", help="drop repeated guesses while reading")
    p.add_argument("--name")
    p.add_argument("--checkpoints", type=_checkpoints, default=DESK_CHECKPOINTS)
    native(p, ("markov", "pcfg", "random"))
    outdir(p)
    fmt(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="Jaccard, mergeability and multi-model selection")
    p.add_argument("--test", required=True)
    p.add_argument("--guesses", type=_named_path, action="append", default=[], metavar="NAME=PATH")
    p.add_argument("--limit", type=int)
    outdir(p)
    fmt(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("benchmark", help="run a configured end-to-end benchmark")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-len", type=int)
    p.add_argument("--checkpoints", type=_checkpoints)
    p.add_argument("--scenarios", help="comma-separated scenario list")
    p.add_argument("--jobs", type=int)
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("-d", "--output-dir")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("synth", help="write a synthetic Zipf-distributed corpus")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--types", type=int, default=10_000)
    p.add_argument("--exponent", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-len", type=int, default=12)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"guessbench: error: {exc}", file=sys.stderr)
        return 1
    except (BenchError, OSError) as exc:
        print(f"guessbench: error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"guessbench: error: malformed JSON: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
