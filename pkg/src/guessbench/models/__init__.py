"""Guess producers behind the common :class:`GuessSource` contract."""
import json
from pathlib import Path

from guessbench.errors import BenchError
from guessbench.models.base import GuessSource
from guessbench.models.baseline import random_baseline
from guessbench.models.external import ExternalGuessStream, open_external_stream
from guessbench.models.markov import MarkovConfig, MarkovModel, enumerate_markov, train_markov
from guessbench.models.pcfg import PcfgModel, enumerate_pcfg, train_pcfg

MODEL_KINDS = ("markov", "pcfg", "external", "random")


def save_model(model, path) -> Path:
    from guessbench.reports import write_json
    return write_json(path, model.to_dict())


def load_model(path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise BenchError(f"cannot load model {path}: {exc}") from exc
    kind = doc.get("kind")
    if kind == "markov":
        return MarkovModel.from_dict(doc)
    if kind == "pcfg":
        return PcfgModel.from_dict(doc)
    raise BenchError(f"unknown model kind {kind!r} in {path}")


def enumerate_model(model, limit=None, name=None) -> GuessSource:
    if isinstance(model, MarkovModel):
        return enumerate_markov(model, limit, name or "markov")
    if isinstance(model, PcfgModel):
        return enumerate_pcfg(model, limit, name or "pcfg")
    raise TypeError(f"not a native model: {type(model).__name__}")


__all__ = [
    "MODEL_KINDS", "GuessSource", "ExternalGuessStream", "MarkovConfig", "MarkovModel",
    "PcfgModel", "enumerate_markov", "enumerate_model", "enumerate_pcfg", "load_model",
    "open_external_stream", "random_baseline", "save_model", "train_markov", "train_pcfg",
]
