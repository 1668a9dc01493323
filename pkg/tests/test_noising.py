import math
from collections import Counter

import numpy as np
import pytest

from arasum.noising import (NoiseConfig, example_rng, make_pretrain_pair,
                            permute_sentences, sample_span_length, text_infill)
from arasum.tokenizer import EOS, MASK, TokenSequence, train_vocab


class ScriptedRng:
    """Deterministic stand-in exposing the two calls the noiser makes."""

    def __init__(self, integers=(), randoms=()):
        self._integers = list(integers)
        self._randoms = list(randoms)

    def integers(self, n):
        return self._integers.pop(0)

    def random(self, *a):
        return self._randoms.pop(0)


def test_config_validation():
    with pytest.raises(ValueError):
        NoiseConfig(mask_ratio=1.0)
    with pytest.raises(ValueError):
        NoiseConfig(poisson_lambda=0.0)


def test_poisson_mean_and_p0():
    rng = np.random.Generator(np.random.PCG64(0))
    draws = [sample_span_length(3.5, rng) for _ in range(100_000)]
    mean = sum(draws) / len(draws)
    assert 3.40 <= mean <= 3.60
    p0 = draws.count(0) / len(draws)
    assert abs(p0 - math.exp(-3.5)) <= 0.005


def test_poisson_deterministic_under_seed():
    a = np.random.Generator(np.random.PCG64(42))
    b = np.random.Generator(np.random.PCG64(42))
    assert [sample_span_length(3.5, a) for _ in range(500)] == \
           [sample_span_length(3.5, b) for _ in range(500)]


def test_infill_zero_ratio_is_identity():
    seq = TokenSequence(ids=[5, 6, 7, 8, EOS], kind="source")
    cfg = NoiseConfig(mask_ratio=0.0)
    out = text_infill(seq, cfg, ScriptedRng())
    assert out.ids == seq.ids and out is not seq


def test_infill_hand_trace():
    # 10 content tokens, budget round(0.3*10)=3.
    # First span: k=2 starting at content position 3 -> masks {3,4}.
    # Second span: k=1 at position 0 -> masks {0}.  Total 3 = budget.
    seq = TokenSequence(ids=list(range(10, 20)) + [EOS], kind="source")
    cfg = NoiseConfig(mask_ratio=0.3)
    spans = iter([2, 1])
    # first draw: 8 possible starts for k=2 over untouched content -> pick index 3
    # second draw: starts for k=1 are [0,1,2,5,6,7,8,9] -> index 0 picks position 0
    rng = ScriptedRng(integers=[3, 0])
    out = text_infill(seq, cfg, rng, span_sampler=lambda: next(spans))
    assert out.ids == [MASK, 11, 12, MASK, 15, 16, 17, 18, 19, EOS]
    assert len(out.ids) == 10
    assert seq.ids == list(range(10, 20)) + [EOS]  # input untouched


def test_infill_k0_inserts_mask_without_consuming():
    seq = TokenSequence(ids=[10, 11, 12, 13, EOS], kind="source")
    cfg = NoiseConfig(mask_ratio=0.25)  # budget 1
    spans = iter([0, 1])
    # k=0 inserts at gap 2; then k=1 masks position 1 (index 1 of starts [0,1,2,3])
    rng = ScriptedRng(integers=[2, 1])
    out = text_infill(seq, cfg, rng, span_sampler=lambda: next(spans))
    assert out.ids == [10, MASK, MASK, 12, 13, EOS]


def test_infill_preserves_eos_and_order():
    rng = np.random.Generator(np.random.PCG64(3))
    cfg = NoiseConfig(mask_ratio=0.3, seed=0)
    for _ in range(100):
        n = int(rng.integers(1, 40))
        ids = list(rng.integers(10, 100, size=n)) + [EOS]
        out = text_infill(TokenSequence(ids=ids, kind="source"), cfg, rng)
        assert out.ids[-1] == EOS
        survivors = [t for t in out.ids[:-1] if t != MASK]
        # surviving tokens keep their relative order
        it = iter(ids[:-1])
        assert all(any(t == u for u in it) for t in survivors)


def test_infill_mask_fraction_near_30_percent():
    rng = np.random.Generator(np.random.PCG64(7))
    cfg = NoiseConfig(mask_ratio=0.3)
    total = 0
    masked = 0
    while total < 100_000:
        n = int(rng.integers(50, 300))
        ids = list(rng.integers(10, 100, size=n)) + [EOS]
        out = text_infill(TokenSequence(ids=ids, kind="source"), cfg, rng)
        survivors = sum(1 for t in out.ids[:-1] if t != MASK)
        total += n
        masked += n - survivors
    assert 0.28 <= masked / total <= 0.32


def test_permute_single_sentence_unchanged():
    rng = np.random.Generator(np.random.PCG64(0))
    assert permute_sentences("a.", rng) == "a."
    assert permute_sentences("no stops here", rng) == "no stops here"


def test_permute_forced_swap():
    # Fisher-Yates on 2 sentences: one draw, j=0 swaps
    rng = ScriptedRng(integers=[0])
    assert permute_sentences("a. b.", rng) == "b. a."


def test_permute_uniform_over_orders():
    rng = np.random.Generator(np.random.PCG64(11))
    counts = Counter()
    for _ in range(10_000):
        counts[permute_sentences("a. b. c.", rng)] += 1
    assert len(counts) == 6
    for c in counts.values():
        assert abs(c / 10_000 - 1 / 6) <= 0.02


def test_permute_preserves_multiset():
    rng = np.random.Generator(np.random.PCG64(5))
    text = "one two. three? four! five."
    from arasum.textnorm import split_sentences
    base = sorted(split_sentences(text))
    for _ in range(200):
        assert sorted(split_sentences(permute_sentences(text, rng))) == base


@pytest.fixture(scope="module")
def vocab():
    corpus = ["aa bb cc dd . aa cc . bb dd .", "cc aa . dd bb ."]
    return train_vocab(corpus, vocab_size=20)


def test_pretrain_pair_noop_config(vocab):
    cfg = NoiseConfig(mask_ratio=0.0, permute_sentences=False)
    rng = example_rng(0, 0)
    src, tgt = make_pretrain_pair("aa bb . cc dd .", vocab, cfg, rng)
    assert src.content_ids() == tgt.content_ids()
    assert tgt.ids[0] == 2 and tgt.ids[-1] == EOS  # bos...eos framing


def test_pretrain_pair_target_clean_and_reproducible(vocab):
    cfg = NoiseConfig(mask_ratio=0.3, seed=9)
    from arasum.tokenizer import encode
    for i in range(20):
        text = "aa bb cc . dd aa . bb cc dd ."
        s1, t1 = make_pretrain_pair(text, vocab, cfg, example_rng(cfg.seed, i))
        s2, t2 = make_pretrain_pair(text, vocab, cfg, example_rng(cfg.seed, i))
        assert t1.ids == encode(vocab, text, kind="target").ids
        assert s1.ids == s2.ids and t1.ids == t2.ids


def test_pretrain_pair_contains_mask(vocab):
    cfg = NoiseConfig(mask_ratio=0.3, seed=4)
    rng = np.random.Generator(np.random.PCG64(1))
    for i in range(1000):
        words = [["aa", "bb", "cc", "dd"][int(rng.integers(4))]
                 for _ in range(int(rng.integers(4, 12)))]
        text = " ".join(words) + " ."
        src, _ = make_pretrain_pair(text, vocab, cfg, example_rng(cfg.seed, i))
        assert MASK in src.ids


def test_example_rng_order_independent():
    a = [example_rng(1, i).integers(1 << 30) for i in (0, 1, 2)]
    b = [example_rng(1, i).integers(1 << 30) for i in (2, 1, 0)]
    assert a == b[::-1]
