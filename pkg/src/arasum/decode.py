"""Greedy and beam-search generation.

A "scorer" is any callable mapping a decoder prefix (list of ids,
starting with bos) to a vector of next-token log-probabilities; the
transformer scorer re-runs the decoder over the growing prefix.  Ties
are broken toward the lower token id, so decoding is deterministic.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .model import Batch, ModelConfig, forward
from .tokenizer import BOS, EOS, PAD, TokenSequence


@dataclass
class BeamConfig:
    beam_size: int = 3
    max_length: int = 64
    length_penalty: float = 0.0
    min_length: int = 1

    def __post_init__(self):
        if self.beam_size < 1:
            raise ConfigError("beam_size must be >= 1")
        if not self.max_length >= self.min_length >= 1:
            raise ConfigError("need max_length >= min_length >= 1")


def transformer_scorer(params, cfg: ModelConfig, src: TokenSequence):
    """Next-token log-probability function for one source sequence."""
    src_ids = np.asarray([src.ids], dtype=np.int64)
    src_mask = np.ones_like(src_ids, dtype=bool)

    def score(prefix: list[int]) -> np.ndarray:
        dec_in = np.asarray([prefix], dtype=np.int64)
        batch = Batch(src=src_ids, src_mask=src_mask, dec_in=dec_in,
                      target=np.zeros_like(dec_in),
                      tgt_mask=np.ones_like(dec_in, dtype=bool))
        logits = forward(params, cfg, batch)[0, -1].astype(np.float64)
        z = logits - logits.max()
        return z - np.log(np.exp(z).sum())

    return score


def greedy(scorer, max_length: int) -> TokenSequence:
    """Argmax decoding from bos until eos or ``max_length`` generated
    tokens."""
    ids = [BOS]
    while len(ids) - 1 < max_length:
        logp = np.array(scorer(ids), dtype=np.float64)
        logp[PAD] = -np.inf
        nxt = int(np.argmax(logp))
        ids.append(nxt)
        if nxt == EOS:
            break
    return TokenSequence(ids=ids, kind="target")


def beam_search(scorer, cfg: BeamConfig) -> tuple[TokenSequence, float]:
    """Standard beam search over cumulative log-probabilities.

    Finished hypotheses retire to a pool; the best pool entry under
    score / length**length_penalty is returned together with its raw
    cumulative log-probability.
    """
    live = [(0.0, (BOS,))]
    pool: list[tuple[float, tuple[int, ...]]] = []

    def selection_key(item):
        score, ids = item
        n = max(len(ids) - 1, 1)
        return (-(score / n ** cfg.length_penalty), ids)

    for pos in range(cfg.max_length):
        candidates = []
        for h, (score, ids) in enumerate(live):
            logp = scorer(list(ids))
            for tok in range(len(logp)):
                if tok == PAD:
                    continue
                if tok == EOS and pos + 1 < cfg.min_length:
                    continue
                candidates.append((score + float(logp[tok]), ids + (tok,), tok, h))
        candidates.sort(key=lambda c: (-c[0], c[2], c[3]))
        # only the top beam_size expansions survive; an eos there
        # retires its hypothesis, anything else stays live
        live = []
        for score, ids, _tok, _h in candidates[:cfg.beam_size]:
            if ids[-1] == EOS:
                pool.append((score, ids))
            else:
                live.append((score, ids))
        pool.sort(key=selection_key)
        pool = pool[:cfg.beam_size]
        if not live:
            break
        best_live = max(s for s, _ in live)
        if len(pool) >= cfg.beam_size and -selection_key(pool[0])[0] >= best_live:
            break

    # hypotheses still alive at max_length compete truncated
    pool.extend(live)
    pool.sort(key=selection_key)
    score, ids = pool[0]
    return TokenSequence(ids=list(ids), kind="target"), score
