"""End-to-end benchmark orchestration behind ``guessbench benchmark``."""
from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

from guessbench import analysis, metrics
from guessbench.config import ModelSpec, RunConfig
from guessbench.corpus import SplitCorpus, preprocess, save_split
from guessbench.evaluation import (
    MatchResult,
    breakdown_by_bands,
    breakdown_by_frequency,
    breakdown_by_length,
    breakdown_by_pattern,
    consecutive_pairs,
    cross_dataset_matrix,
    marginal_gain,
    run_match,
    size_sensitivity_run,
)
from guessbench.models import (
    MarkovConfig,
    enumerate_markov,
    enumerate_pcfg,
    open_external_stream,
    random_baseline,
    train_markov,
    train_pcfg,
)
from guessbench.models.base import GuessSource
from guessbench.reports import matrix_rows, write_csv, write_json
from guessbench.rng import derive_seed

log = logging.getLogger(__name__)

LENGTH_BANDS = {
    "short (4-7)": lambda p: 4 <= len(p) <= 7,
    "medium (8-10)": lambda p: 8 <= len(p) <= 10,
    "long (11-12)": lambda p: 11 <= len(p) <= 12,
}
CLASS_BANDS = {
    "simple (1 class)": lambda p: analysis.count_classes(p) == 1,
    "moderate (2 classes)": lambda p: analysis.count_classes(p) == 2,
    "complex (3 classes)": lambda p: analysis.count_classes(p) == 3,
}

SUMMARY_ROWS = (
    ("Performance", "In-Distribution"),
    ("Performance", "Cross-Dataset"),
    ("Performance", "Frequency: Common (Top 5%)"),
    ("Performance", "Frequency: Common (Top 10%)"),
    ("Performance", "Frequency: Rare (Bottom 90%)"),
    ("Performance", "Length: Short (4-7 Chars)"),
    ("Performance", "Length: Medium (8-10 Chars)"),
    ("Performance", "Length: Long (11-12 Chars)"),
    ("Performance", "Pattern: Simple (1 Char Class)"),
    ("Performance", "Pattern: Moderate (2 Char Classes)"),
    ("Performance", "Pattern: Complex (3 Char Classes)"),
    ("Generalizability", "Train Set Size Sensitivity (%)"),
    ("Generalizability", "Cross-Dataset Loss (%)"),
    ("Quality", "Uniqueness (%)"),
    ("Quality", "Humanness Distance (%, built-in distances)"),
)


@dataclass(frozen=True)
class SourceBuilder:
    """Picklable recipe for a fresh guess stream of one model on one dataset."""

    spec: ModelSpec
    dataset: str
    limit: int
    seed: int

    def train(self, train_set) -> Callable[[], GuessSource]:
        kind, p = self.spec.kind, self.spec.params
        if kind == "markov":
            model = train_markov(train_set, MarkovConfig(
                p.get("order", 4), p.get("level_count", 11), p.get("level_base", 2.5)))
            return lambda: enumerate_markov(model, self.limit, self.spec.name)
        if kind == "pcfg":
            model = train_pcfg(train_set)
            return lambda: enumerate_pcfg(model, self.limit, self.spec.name)
        if kind == "random":
            seed = derive_seed(self.seed, f"random/{self.spec.name}/{self.dataset}")
            return lambda: random_baseline(None, p.get("min_len", 6), p.get("max_len", 12),
                                           seed, self.limit, self.spec.name)
        path = p["guesses"][self.dataset]
        return lambda: open_external_stream(path, bool(p.get("dedupe", False)), self.limit, self.spec.name)


def _in_distribution(builder: SourceBuilder, split: SplitCorpus, checkpoints, keep: bool) -> MatchResult:
    return run_match(builder.train(split.train)(), split, checkpoints, keep_generated=keep)


def _stem(model: str, dataset: str) -> str:
    return f"{model}__{dataset}"


def _weighted(values: dict, weights: dict) -> float | None:
    pairs = [(values[k], weights[k]) for k in values if values[k] is not None]
    den = sum(w for _, w in pairs)
    return sum(v * w for v, w in pairs) / den if den else None


class Benchmark:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.out = Path(cfg.output_dir)
        self.splits: dict[str, SplitCorpus] = {}
        self.results: dict[tuple, MatchResult] = {}
        self.doc: dict = {}

    @property
    def want_json(self):
        return self.cfg.format in ("json", "both")

    @property
    def want_csv(self):
        return self.cfg.format in ("csv", "both")

    def builder(self, spec: ModelSpec, dataset: str) -> SourceBuilder:
        return SourceBuilder(spec, dataset, self.cfg.checkpoints[-1], self.cfg.seed)

    # -- stages ----------------------------------------------------------

    def prepare(self):
        for name, path in self.cfg.datasets:
            pre = replace(self.cfg.preprocess, seed=derive_seed(self.cfg.preprocess.seed, f"split/{name}"))
            split = preprocess(path, pre, name=name)
            save_split(split, self.out / "splits", name)
            self.splits[name] = split
            log.info("dataset %s: %d train, %d unique test", name, len(split.train), len(split.test_unique))

    def run_cells(self):
        keep = "compare" in self.cfg.scenarios
        cells = [(spec, name) for spec in self.cfg.models for name in self.splits]
        args = [(self.builder(spec, name), self.splits[name], self.cfg.checkpoints, keep) for spec, name in cells]
        if self.cfg.jobs > 1:
            with ProcessPoolExecutor(max_workers=self.cfg.jobs) as pool:
                outs = list(pool.map(_in_distribution, *zip(*args)))
        else:
            outs = [_in_distribution(*a) for a in args]
        for (spec, name), res in zip(cells, outs):
            self.results[(spec.name, name)] = res
            self._write_cell(spec.name, name, res)

    def _write_cell(self, model: str, dataset: str, res: MatchResult):
        split = self.splits[dataset]
        at = res.ledger.guesses_consumed
        sc = set(self.cfg.scenarios)
        doc = {
            "model": model,
            "dataset": dataset,
            "ledger": {
                "guesses_consumed": res.ledger.guesses_consumed,
                "unique_guesses": res.ledger.unique_guesses,
                "matched": len(res.ledger.first_match_rank),
                "exhausted": res.ledger.exhausted,
                "test_unique": len(split.test_unique),
            },
            "curve": [pt.to_dict() for pt in res.curve],
        }
        if "marginal" in sc:
            pts = [pt.guess_count for pt in res.curve if not pt.exhausted]
            doc["marginal_gain"] = [
                {"from": g.start, "to": g.end, "total": g.total, "relative": g.relative}
                for g in marginal_gain(res.curve, consecutive_pairs(pts))
            ]
        if "lengths" in sc:
            doc["by_length"] = breakdown_by_length(res.ledger, split, at)
        if "patterns" in sc:
            doc["by_pattern"] = breakdown_by_pattern(res.ledger, split, at)
        if "frequency" in sc:
            doc["by_frequency"] = breakdown_by_frequency(res.ledger, split, at)
        stem = self.out / "runs" / _stem(model, dataset)
        if self.want_json:
            write_json(stem.with_suffix(".json"), doc)
        if self.want_csv:
            write_csv(stem.with_name(stem.name + ".curve.csv"),
                      ["guess_count", "matched_unique", "pct_unique", "pct_weighted", "exhausted"],
                      [[p.guess_count, p.matched_unique, p.pct_unique, p.pct_weighted, int(p.exhausted)]
                       for p in res.curve])
            for key in ("by_length", "by_pattern", "by_frequency"):
                if key in doc:
                    write_csv(stem.with_name(f"{stem.name}.{key}.csv"), ["group", "pct_matched"],
                              list(doc[key].items()))
            if "marginal_gain" in doc:
                write_csv(stem.with_name(stem.name + ".marginal.csv"), ["from", "to", "total", "relative"],
                          [[g["from"], g["to"], g["total"], g["relative"]] for g in doc["marginal_gain"]])
        self.doc.setdefault("runs", {})[_stem(model, dataset)] = doc

    def cross_dataset(self):
        names = list(self.splits)
        self.doc["crossdataset"] = {}
        for spec in self.cfg.models:
            factories = {n: self.builder(spec, n).train(self.splits[n].train) for n in names}
            matrix = cross_dataset_matrix(factories, self.splits, self.cfg.checkpoints)
            self.doc["crossdataset"][spec.name] = {f"{a}->{b}": v for (a, b), v in matrix.items()}
            if self.want_csv:
                write_csv(self.out / "crossdataset" / f"{spec.name}.csv", ["train\\test"] + names,
                          matrix_rows(names, names, lambda a, b: matrix[(a, b)]))

    def size_sweep(self):
        self.doc["sizesweep"] = {}
        for spec in self.cfg.models:
            if spec.kind not in ("markov", "pcfg"):
                continue
            per = {}
            for name, split in self.splits.items():
                n = len(split.train)
                sizes = sorted({max(1, int(f * n)) for f in self.cfg.size_fractions})
                b = self.builder(spec, name)
                per[name] = size_sensitivity_run(
                    split, sizes, lambda subset, b=b: b.train(subset)(), self.cfg.checkpoints,
                    derive_seed(self.cfg.seed, f"sizesweep/{name}"))
            self.doc["sizesweep"][spec.name] = {d: {str(k): v for k, v in r.items()} for d, r in per.items()}
            if self.want_csv:
                write_csv(self.out / "sizesweep" / f"{spec.name}.csv", ["dataset", "train_size", "pct_unique"],
                          [[d, s, v] for d, r in per.items() for s, v in r.items()])

    def summaries(self) -> dict:
        out: dict = {}
        for (model, dataset), res in self.results.items():
            gen = frozenset(res.generated or ())
            out.setdefault(model, {})[dataset] = metrics.GuessSetSummary(
                gen, frozenset(res.ledger.first_match_rank), res.ledger.guesses_consumed)
        return out

    def compare(self):
        summ = self.summaries()
        names = sorted(summ)
        jac = metrics.pairwise_matrix(summ, metrics.jaccard_index)
        mer = metrics.pairwise_matrix(summ, metrics.mergeability_index)
        multi = {
            d: [s.to_dict() for s in metrics.multi_model_select(
                {m: summ[m][d].matched for m in names}, len(split.test_unique))]
            for d, split in self.splits.items()
        }
        self.doc["compare"] = {
            "jaccard": {f"{a}|{b}": v for (a, b), v in jac.items()},
            "mergeability": {f"{a}|{b}": v for (a, b), v in mer.items()},
            "multi_model": multi,
        }
        if self.want_csv:
            write_csv(self.out / "compare" / "jaccard.csv", ["model"] + names,
                      matrix_rows(names, names, lambda a, b: jac[(a, b)]))
            write_csv(self.out / "compare" / "mergeability.csv", ["model"] + names,
                      matrix_rows(names, names, lambda a, b: mer[(a, b)]))
        if self.want_json:
            write_json(self.out / "compare" / "multi_model.json", {"multi_model": multi})

    def humanness(self):
        n = self.cfg.humanness_sample
        test = Counter()
        for s in self.splits.values():
            test.update(s.test_freq)
        train = [p for s in self.splits.values() for p in s.train]
        rand = random_baseline(None, 6, 12, derive_seed(self.cfg.seed, "humanness/random"), n).take(n)
        generated = {}
        for spec in self.cfg.models:
            guesses = []
            for name, split in self.splits.items():
                src = SourceBuilder(spec, name, n, self.cfg.seed).train(split.train)()
                guesses.extend(src.take(n))
            generated[spec.name] = guesses
        report = metrics.humanness_report(test, train, rand, generated)
        report["external_slots"] = {slot: None for slot in metrics.EXTERNAL_DISTANCES}
        report["note"] = "built-in distribution distances; not comparable to neural/topological metrics"
        self.doc["humanness"] = report
        if self.want_json:
            write_json(self.out / "humanness.json", report)

    # -- summary ---------------------------------------------------------

    def summary(self) -> dict:
        models = [m.name for m in self.cfg.models]
        weights = {d: len(s.test_unique) for d, s in self.splits.items()}
        rows = {row: {m: None for m in models} for row in SUMMARY_ROWS}
        for m in models:
            cells = {d: self.results[(m, d)] for d in self.splits}
            final = {d: r.final.pct_unique for d, r in cells.items()}
            rows[SUMMARY_ROWS[0]][m] = _weighted(final, weights)
            freq = {d: breakdown_by_frequency(r.ledger, self.splits[d], r.ledger.guesses_consumed)
                    for d, r in cells.items()}
            for i, key in enumerate(("top5", "top10", "bottom90")):
                rows[SUMMARY_ROWS[2 + i]][m] = _weighted({d: f.get(key) for d, f in freq.items()}, weights)
            for base, bands in ((5, LENGTH_BANDS), (8, CLASS_BANDS)):
                per = {d: breakdown_by_bands(r.ledger, self.splits[d], r.ledger.guesses_consumed, bands)
                       for d, r in cells.items()}
                for i, band in enumerate(bands):
                    rows[SUMMARY_ROWS[base + i]][m] = _weighted({d: v.get(band) for d, v in per.items()}, weights)
            uniq = [100.0 * r.ledger.unique_guesses / r.ledger.guesses_consumed
                    for r in cells.values() if r.ledger.guesses_consumed]
            rows[SUMMARY_ROWS[13]][m] = sum(uniq) / len(uniq) if uniq else None

            cross = self.doc.get("crossdataset", {}).get(m)
            if cross:
                off = {}
                losses = []
                for a in self.splits:
                    others = [b for b in self.splits if b != a]
                    pcts = [cross[f"{a}->{b}"] for b in others]
                    off[a] = sum(p * weights[b] for p, b in zip(pcts, others)) / sum(weights[b] for b in others)
                    if cross[f"{a}->{a}"] > 0:
                        losses.append(metrics.generalization_loss(
                            cross[f"{a}->{a}"], pcts, [weights[b] for b in others]))
                rows[SUMMARY_ROWS[1]][m] = _weighted(off, weights)
                rows[SUMMARY_ROWS[12]][m] = sum(losses) / len(losses) if losses else None
            sweep = self.doc.get("sizesweep", {}).get(m)
            if sweep:
                cvs = []
                for vals in sweep.values():
                    v = list(vals.values())
                    if len(v) >= 2 and sum(v) > 0:
                        cvs.append(metrics.coefficient_of_variation(v))
                rows[SUMMARY_ROWS[11]][m] = sum(cvs) / len(cvs) if cvs else None
            hum = self.doc.get("humanness", {}).get("models", {}).get(m)
            if hum:
                rows[SUMMARY_ROWS[14]][m] = hum["mean"]

        sections: dict = {}
        for (section, metric), vals in rows.items():
            sections.setdefault(section, {})[metric] = vals
        return {"models": models, "datasets": list(self.splits), "sections": sections}

    def run(self) -> dict:
        sc = set(self.cfg.scenarios)
        self.prepare()
        self.run_cells()
        if "crossdataset" in sc:
            self.cross_dataset()
        if "sizesweep" in sc:
            self.size_sweep()
        if "compare" in sc:
            self.compare()
        if "humanness" in sc:
            self.humanness()
        summary = self.summary()
        self.doc["summary"] = summary
        if self.want_json:
            write_json(self.out / "summary.json", summary)
        if self.want_csv:
            models = summary["models"]
            write_csv(self.out / "summary.csv", ["section", "metric"] + models,
                      [[sec, metric] + [vals[m] for m in models]
                       for sec, block in summary["sections"].items() for metric, vals in block.items()])
        return self.doc


def run_benchmark(cfg: RunConfig) -> dict:
    return Benchmark(cfg).run()
