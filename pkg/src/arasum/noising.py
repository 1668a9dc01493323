"""BART-style corruption: text infilling and sentence permutation.

Span lengths come from Poisson(lambda); 30% of the content tokens are
replaced by mask symbols by default, one mask per span.  A zero-length
draw inserts a mask without consuming tokens and does not count toward
the budget.  All randomness is derived from (seed, example_index) so a
corpus noised twice is identical, regardless of worker scheduling.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import textnorm
from .tokenizer import EOS, MASK, TokenSequence, Vocabulary, encode


@dataclass
class NoiseConfig:
    mask_ratio: float = 0.30
    poisson_lambda: float = 3.5
    permute_sentences: bool = True
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.mask_ratio < 1:
            raise ValueError(f"mask_ratio {self.mask_ratio} outside [0, 1)")
        if self.poisson_lambda <= 0:
            raise ValueError(f"poisson_lambda {self.poisson_lambda} must be > 0")


def example_rng(seed: int, example_index: int) -> np.random.Generator:
    """Per-example stream: independent of corpus order and worker count."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(example_index,))
    return np.random.Generator(np.random.PCG64(ss))


def sample_span_length(lam: float, rng) -> int:
    """Poisson draw by Knuth's product-of-uniforms method."""
    limit = math.exp(-lam)
    k = 0
    p = 1.0
    while True:
        p *= rng.random()
        if p <= limit:
            return k
        k += 1


def text_infill(tokens: TokenSequence, cfg: NoiseConfig, rng,
                span_sampler=None) -> TokenSequence:
    """Replace Poisson-length spans with single mask tokens until the
    mask budget round(mask_ratio * content length) is reached.

    The input sequence is left untouched; the terminal eos survives.
    """
    if span_sampler is None:
        span_sampler = lambda: sample_span_length(cfg.poisson_lambda, rng)

    ids = list(tokens.ids)
    has_eos = bool(ids) and ids[-1] == EOS
    content = ids[:-1] if has_eos else ids
    n = len(content)
    budget = math.floor(cfg.mask_ratio * n + 0.5)
    if budget == 0:
        return TokenSequence(ids=list(ids), kind=tokens.kind)

    span_of = [0] * n  # 0 = unmasked, else span id
    inserts = []  # (position, insert order) for k=0 draws
    next_span = 1
    masked = 0
    while masked < budget:
        k = span_sampler()
        if k == 0:
            pos = int(rng.integers(n + 1))
            inserts.append(pos)
            continue
        # starts where the whole span is currently unmasked
        starts = [
            i for i in range(n - k + 1)
            if all(span_of[j] == 0 for j in range(i, i + k))
        ]
        if not starts:
            # truncate to the longest unmasked run still available
            best = 0
            run = 0
            for j in range(n):
                run = run + 1 if span_of[j] == 0 else 0
                best = max(best, run)
            if best == 0:
                break
            k = min(k, best)
            starts = [
                i for i in range(n - k + 1)
                if all(span_of[j] == 0 for j in range(i, i + k))
            ]
        start = starts[int(rng.integers(len(starts)))]
        for j in range(start, start + k):
            span_of[j] = next_span
        next_span += 1
        masked += k

    insert_counts = {}
    for pos in inserts:
        insert_counts[pos] = insert_counts.get(pos, 0) + 1

    out = []
    emitted = set()
    for i in range(n + 1):
        out.extend([MASK] * insert_counts.get(i, 0))
        if i == n:
            break
        s = span_of[i]
        if s == 0:
            out.append(content[i])
        elif s not in emitted:
            out.append(MASK)
            emitted.add(s)
    if has_eos:
        out.append(EOS)
    return TokenSequence(ids=out, kind=tokens.kind)


def permute_sentences(text: str, rng) -> str:
    """Shuffle sentences (split on full stops) with Fisher-Yates."""
    sentences = textnorm.split_sentences(text)
    if len(sentences) <= 1:
        return " ".join(sentences) if sentences else " ".join(text.split())
    for i in range(len(sentences) - 1, 0, -1):
        j = int(rng.integers(i + 1))
        sentences[i], sentences[j] = sentences[j], sentences[i]
    return " ".join(sentences)


def make_pretrain_pair(text: str, v: Vocabulary, cfg: NoiseConfig,
                       rng) -> tuple[TokenSequence, TokenSequence]:
    """(corrupted source, clean target) pair for denoising training."""
    target = encode(v, text, kind="target")
    noised_text = permute_sentences(text, rng) if cfg.permute_sentences else text
    source = encode(v, noised_text, kind="source")
    source = text_infill(source, cfg, rng)
    return source, target
