import itertools
import random

import pytest

from arasum.errors import EmptyDataset, LengthMismatch, SummaryTooShort
from arasum.kernels import lcs_length
from arasum.metrics import (corpus_stats, evaluate_run, macro_average,
                            novel_ngram_pct, rouge_l, rouge_n, score_pair)
from rouge_fixtures import ROUGE_FIXTURES


def _score(cand, ref, variant):
    if variant == "R1":
        return rouge_n(cand, ref, 1)
    if variant == "R2":
        return rouge_n(cand, ref, 2)
    return rouge_l(cand, ref)


@pytest.mark.parametrize("cand,ref,variant,p,r,f1", ROUGE_FIXTURES)
def test_rouge_fixture(cand, ref, variant, p, r, f1):
    got = _score(cand, ref, variant)
    assert abs(got.precision - p) < 1e-12
    assert abs(got.recall - r) < 1e-12
    assert abs(got.f1 - f1) < 1e-12


def brute_lcs(a, b):
    """Longest common subsequence by subsequence enumeration."""
    short, other = (a, b) if len(a) <= len(b) else (b, a)
    best = 0
    for k in range(len(short), best, -1):
        for combo in itertools.combinations(short, k):
            it = iter(other)
            if all(any(x == y for y in it) for x in combo):
                return k
    return 0


def test_lcs_against_brute_force():
    rng = random.Random(0)
    for _ in range(200):
        a = [rng.choice("abcd") for _ in range(rng.randint(0, 8))]
        b = [rng.choice("abcd") for _ in range(rng.randint(0, 8))]
        assert lcs_length(a, b) == brute_lcs(a, b), (a, b)


def test_lcs_basic_identities():
    assert lcs_length([], ["a"]) == 0
    assert lcs_length(["a", "b", "c"], ["a", "b", "c"]) == 3
    assert lcs_length(["a", "c", "b"], ["a", "b", "c"]) == 2


def test_f1_symmetry():
    rng = random.Random(1)
    for _ in range(100):
        a = [rng.choice("abcde") for _ in range(rng.randint(0, 10))]
        b = [rng.choice("abcde") for _ in range(rng.randint(0, 10))]
        for v in ("R1", "R2", "RL"):
            x, y = _score(a, b, v), _score(b, a, v)
            assert abs(x.f1 - y.f1) < 1e-12
            assert abs(x.precision - y.recall) < 1e-12


def test_scores_bounded():
    rng = random.Random(2)
    for _ in range(100):
        a = [rng.choice("abc") for _ in range(rng.randint(0, 8))]
        b = [rng.choice("abc") for _ in range(rng.randint(0, 8))]
        for s in score_pair(a, b).values():
            assert 0.0 <= s.precision <= 1.0
            assert 0.0 <= s.recall <= 1.0
            assert 0.0 <= s.f1 <= 1.0


def test_identity_scores_one():
    toks = "w1 w2 w3 w4".split()
    for v, s in score_pair(toks, toks).items():
        assert s.f1 == 1.0, v


def test_novel_ngram_one_third():
    doc = "a b c d".split()
    summ = "a b e".split()
    assert abs(novel_ngram_pct(doc, summ, 1) - 100 / 3) < 1e-12


def test_novel_ngram_half_bigrams():
    doc = "a b c d".split()
    summ = "a b e".split()  # bigrams {ab, be}; only "be" is novel
    assert novel_ngram_pct(doc, summ, 2) == 50.0


def test_novel_ngram_extremes():
    doc = "a b c".split()
    assert novel_ngram_pct(doc, ["a", "b"], 1) == 0.0
    assert novel_ngram_pct(doc, ["x", "y"], 1) == 100.0


def test_novel_ngram_counts_types_not_tokens():
    # "e" repeated still counts once among {a, e}
    assert novel_ngram_pct(["a"], ["a", "e", "e", "e"], 1) == 50.0


def test_novel_ngram_too_short():
    with pytest.raises(SummaryTooShort):
        novel_ngram_pct(["a", "b"], ["a"], 2)


def test_corpus_stats_forty_percent():
    pairs = [
        # 3 novel of 10 distinct unigrams -> 30%
        ("a b c d e f g h i j", "a b c d e f g x y z"),
        # 5 novel of 10 -> 50%
        ("a b c d e", "a b c d e v w x y z"),
    ]
    stats = corpus_stats(pairs)
    assert abs(stats.novel_pct[1] - 40.0) < 1e-9
    assert abs(stats.avg_doc_tokens - 7.5) < 1e-12
    assert abs(stats.avg_summary_tokens - 10.0) < 1e-12


def test_corpus_stats_skips_too_short_summaries():
    stats = corpus_stats([("a b c", "a")])  # no bigrams or trigrams
    assert stats.novel_pct[1] == 0.0
    assert stats.novel_pct[2] == 0.0
    assert stats.novel_pct[3] == 0.0


def test_corpus_stats_empty():
    with pytest.raises(EmptyDataset):
        corpus_stats([])


def test_macro_average_table_row():
    rows = [{"R1": 40.0, "R2": 25.0, "RL": 38.0},
            {"R1": 44.8, "R2": 32.6, "RL": 42.6}]
    avg = macro_average(rows)
    assert abs(avg["R1"] - 42.4) < 1e-12
    assert abs(avg["R2"] - 28.8) < 1e-12
    assert abs(avg["RL"] - 40.3) < 1e-12
    with pytest.raises(EmptyDataset):
        macro_average([])


def test_evaluate_run_identity_modulo_normalization():
    hyps = ["كتابـــي جديد", "مُحَمَّدٌ هنا"]
    refs = ["كتابي جديد", "محمد هنا"]
    per_example, means = evaluate_run(hyps, refs)
    for ex in per_example:
        for v in ("R1", "R2", "RL"):
            assert ex[v].f1 == 1.0
    assert means == {"R1": 1.0, "R2": 1.0, "RL": 1.0}


def test_evaluate_run_empty_hypothesis_zero():
    per_example, _ = evaluate_run([""], ["مرجع هنا"])
    for v in ("R1", "R2", "RL"):
        assert per_example[0][v].f1 == 0.0


def test_evaluate_run_means_are_macro():
    per_example, means = evaluate_run(["a b", ""], ["a b", "a b"])
    assert means["R1"] == 0.5


def test_evaluate_run_length_mismatch():
    with pytest.raises(LengthMismatch):
        evaluate_run(["a"], ["a", "b"])
