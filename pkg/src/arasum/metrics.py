"""ROUGE-1/2/L F1, novel n-gram abstractiveness, and run evaluation.

Protocol: normalize both sides with the Arabic evaluation rules, split
on whitespace, score per example, then macro-average.  Clipped n-gram
counts for ROUGE-N, longest common subsequence for ROUGE-L, no
stemming.  Novel n-gram percentages are computed over distinct n-gram
types.
"""

from collections import Counter
from dataclasses import dataclass

from .errors import EmptyDataset, LengthMismatch, SummaryTooShort
from .kernels import lcs_length
from .textnorm import NormRules, normalize_eval

ROUGE_VARIANTS = ("R1", "R2", "RL")


@dataclass
class RougeScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_pr(cls, p: float, r: float) -> "RougeScore":
        f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
        return cls(precision=p, recall=r, f1=f1)


@dataclass
class AbstractivenessStats:
    avg_doc_tokens: float
    avg_summary_tokens: float
    novel_pct: dict[int, float]  # n in {1, 2, 3} -> percentage


def _ngrams(tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate, reference, n: int) -> RougeScore:
    """Clipped n-gram overlap F1."""
    cand = _ngrams(candidate, n)
    ref = _ngrams(reference, n)
    if not cand or not ref:
        return RougeScore(0.0, 0.0, 0.0)
    overlap = sum((cand & ref).values())
    p = overlap / sum(cand.values())
    r = overlap / sum(ref.values())
    return RougeScore.from_pr(p, r)


def rouge_l(candidate, reference) -> RougeScore:
    """LCS-based F1."""
    if not candidate or not reference:
        return RougeScore(0.0, 0.0, 0.0)
    l = lcs_length(candidate, reference)
    return RougeScore.from_pr(l / len(candidate), l / len(reference))


def score_pair(candidate, reference) -> dict[str, RougeScore]:
    return {
        "R1": rouge_n(candidate, reference, 1),
        "R2": rouge_n(candidate, reference, 2),
        "RL": rouge_l(candidate, reference),
    }


def novel_ngram_pct(document, summary, n: int) -> float:
    """Percentage of distinct summary n-grams absent from the document."""
    if len(summary) < n:
        raise SummaryTooShort(
            f"summary has {len(summary)} tokens, need >= {n}")
    sum_types = set(_ngrams(summary, n))
    doc_types = set(_ngrams(document, n))
    novel = len(sum_types - doc_types)
    return 100.0 * novel / len(sum_types)


def corpus_stats(pairs) -> AbstractivenessStats:
    """Macro-averaged lengths and novel n-gram percentages over
    (document, summary) text pairs."""
    doc_lens = []
    sum_lens = []
    novel = {1: [], 2: [], 3: []}
    for document, summary in pairs:
        doc = document.split()
        summ = summary.split()
        doc_lens.append(len(doc))
        sum_lens.append(len(summ))
        for n in (1, 2, 3):
            if len(summ) >= n:
                novel[n].append(novel_ngram_pct(doc, summ, n))
    if not doc_lens:
        raise EmptyDataset("no (document, summary) pairs")
    return AbstractivenessStats(
        avg_doc_tokens=sum(doc_lens) / len(doc_lens),
        avg_summary_tokens=sum(sum_lens) / len(sum_lens),
        novel_pct={n: (sum(v) / len(v) if v else 0.0) for n, v in novel.items()},
    )


def evaluate_run(hypotheses, references, rules: NormRules | None = None):
    """Normalize, tokenize, and score a generation run.

    Returns (per_example, means) where per_example is a list of
    {variant: RougeScore} dicts and means maps variant to mean F1.
    """
    hyps = list(hypotheses)
    refs = list(references)
    if len(hyps) != len(refs):
        raise LengthMismatch(f"{len(hyps)} hypotheses vs {len(refs)} references")
    per_example = []
    for h, r in zip(hyps, refs):
        h_toks = normalize_eval(h, rules).split()
        r_toks = normalize_eval(r, rules).split()
        per_example.append(score_pair(h_toks, r_toks))
    means = {
        v: (sum(ex[v].f1 for ex in per_example) / len(per_example)
            if per_example else 0.0)
        for v in ROUGE_VARIANTS
    }
    return per_example, means


def macro_average(rows: list[dict[str, float]]) -> dict[str, float]:
    """Unweighted mean of per-dataset score rows (the macro-average
    row of a results table)."""
    if not rows:
        raise EmptyDataset("no rows to average")
    return {v: sum(r[v] for r in rows) / len(rows) for v in ROUGE_VARIANTS}
