"""Corpus ingestion, random splits, and the uniform mixture sampler.

All sampling is driven by numpy's splittable SeedSequence/PCG64 so
splits and mixtures are reproducible from the seed alone.
"""

import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import (InsufficientData, MalformedLine, MissingField,
                     SpecInfeasible)

REQUIRED_FIELDS = ("id", "source", "document", "summary")


@dataclass
class Example:
    id: str
    source: str
    document: str
    summary: str


@dataclass
class SplitSpec:
    train_n: int
    valid_n: int
    test_n: int
    seed: int = 0


def load_jsonl(path, lenient: bool = False, on_error=None):
    """Yield Examples from a JSON-lines file.

    In strict mode (default) a bad line raises; in lenient mode it is
    reported through ``on_error(exc)`` and skipped.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(path)

    def report(exc):
        if not lenient:
            raise exc
        if on_error is not None:
            on_error(exc)

    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                report(MalformedLine(lineno, str(e)))
                continue
            missing = [k for k in REQUIRED_FIELDS if k not in obj]
            if missing:
                report(MissingField(lineno, missing[0]))
                continue
            yield Example(id=str(obj["id"]), source=str(obj["source"]),
                          document=str(obj["document"]),
                          summary=str(obj["summary"]))


def _rng(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))


def make_splits(examples, spec: SplitSpec):
    """Disjoint uniform random (train, valid, test) under the seed."""
    pool = list(examples)
    need = spec.train_n + spec.valid_n + spec.test_n
    if need > len(pool):
        raise SpecInfeasible(
            f"requested {need} examples from a corpus of {len(pool)}")
    order = _rng(spec.seed, 0).permutation(len(pool))
    train = [pool[i] for i in order[:spec.train_n]]
    valid = [pool[i] for i in order[spec.train_n:spec.train_n + spec.valid_n]]
    test = [pool[i] for i in order[spec.train_n + spec.valid_n:need]]
    return train, valid, test


def make_mix(datasets, total_n: int, seed: int = 0):
    """Uniform sample without replacement from the pooled union,
    keeping each example's source tag."""
    union = [ex for ds in datasets for ex in ds]
    if total_n > len(union):
        raise InsufficientData(
            f"requested {total_n} examples from a union of {len(union)}")
    order = _rng(seed, 1).permutation(len(union))
    return [union[i] for i in order[:total_n]]


def write_manifest(path, examples) -> None:
    """Split manifest: one id per line."""
    with open(path, "w", encoding="utf-8") as f:
        for ex in examples:
            f.write(ex.id + "\n")


def write_jsonl(path, examples) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for ex in examples:
            f.write(json.dumps(
                {"id": ex.id, "source": ex.source,
                 "document": ex.document, "summary": ex.summary},
                ensure_ascii=False) + "\n")
