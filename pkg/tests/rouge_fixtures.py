"""Hand-computed ROUGE fixtures shared by the unit and acceptance suites.

Each row is (candidate, reference, variant, precision, recall, f1),
worked out by hand with clipped n-gram counts and LCS.
"""

ROUGE_FIXTURES = [
    # identical sequences
    (["a", "b", "c"], ["a", "b", "c"], "R1", 1.0, 1.0, 1.0),
    (["a", "b", "c"], ["a", "b", "c"], "R2", 1.0, 1.0, 1.0),
    (["a", "b", "c"], ["a", "b", "c"], "RL", 1.0, 1.0, 1.0),
    # disjoint
    (["a", "b"], ["c", "d"], "R1", 0.0, 0.0, 0.0),
    (["a", "b"], ["c", "d"], "R2", 0.0, 0.0, 0.0),
    (["a", "b"], ["c", "d"], "RL", 0.0, 0.0, 0.0),
    # clipping: candidate repeats a token more often than the reference
    (["a", "a", "a"], ["a", "a"], "R1", 2 / 3, 1.0, 0.8),
    (["a"], ["a", "a"], "R1", 1.0, 0.5, 2 / 3),
    # bigram overlap of one
    (["a", "b", "c"], ["b", "c", "d"], "R2", 0.5, 0.5, 0.5),
    # the classic LCS order case: "a c b" vs "a b c" shares only 2
    (["a", "c", "b"], ["a", "b", "c"], "RL", 2 / 3, 2 / 3, 2 / 3),
    # non-contiguous subsequence
    (["a", "x", "b", "y", "c"], ["a", "b", "c"], "RL", 0.6, 1.0, 0.75),
    # one token differs
    (["the", "cat", "sat"], ["the", "cat", "ran"], "R1", 2 / 3, 2 / 3, 2 / 3),
    # empty candidate
    ([], ["a", "b"], "R1", 0.0, 0.0, 0.0),
    ([], ["a", "b"], "R2", 0.0, 0.0, 0.0),
    ([], ["a", "b"], "RL", 0.0, 0.0, 0.0),
    # single matching token: no bigrams exist
    (["a"], ["a"], "R1", 1.0, 1.0, 1.0),
    (["a"], ["a"], "R2", 0.0, 0.0, 0.0),
    (["a"], ["a"], "RL", 1.0, 1.0, 1.0),
    # repeats on both sides
    (["a", "a", "b"], ["a", "b", "b"], "R1", 2 / 3, 2 / 3, 2 / 3),
    (["a", "a", "b"], ["a", "b", "b"], "R2", 0.5, 0.5, 0.5),
    (["a", "a", "b"], ["a", "b", "b"], "RL", 2 / 3, 2 / 3, 2 / 3),
    # candidate strictly longer
    (["a", "b", "c", "d"], ["b", "c"], "R1", 0.5, 1.0, 2 / 3),
    (["a", "b", "c", "d"], ["b", "c"], "R2", 1 / 3, 1.0, 0.5),
    (["a", "b", "c", "d"], ["b", "c"], "RL", 0.5, 1.0, 2 / 3),
    # full reversal: unigrams perfect, order destroyed
    (["c", "b", "a"], ["a", "b", "c"], "R1", 1.0, 1.0, 1.0),
    (["c", "b", "a"], ["a", "b", "c"], "R2", 0.0, 0.0, 0.0),
    (["c", "b", "a"], ["a", "b", "c"], "RL", 1 / 3, 1 / 3, 1 / 3),
    # bigram clipping: "a b" appears twice in the candidate, once in ref
    (["a", "b", "a", "b"], ["a", "b"], "R1", 0.5, 1.0, 2 / 3),
    (["a", "b", "a", "b"], ["a", "b"], "R2", 1 / 3, 1.0, 0.5),
    (["a", "b", "a", "b"], ["a", "b"], "RL", 0.5, 1.0, 2 / 3),
    # half overlap, equal lengths
    (["a", "b", "c", "d"], ["a", "b", "x", "y"], "R1", 0.5, 0.5, 0.5),
    # adjacent swap
    (["b", "a", "c"], ["a", "b", "c"], "R1", 1.0, 1.0, 1.0),
    (["b", "a", "c"], ["a", "b", "c"], "RL", 2 / 3, 2 / 3, 2 / 3),
    # reference embedded in a longer candidate
    (["x", "a", "b", "c", "y"], ["a", "b", "c"], "R1", 0.6, 1.0, 0.75),
    (["x", "a", "b", "c", "y"], ["a", "b", "c"], "R2", 0.5, 1.0, 2 / 3),
    (["x", "a", "b", "c", "y"], ["a", "b", "c"], "RL", 0.6, 1.0, 0.75),
    # unigram hit without any bigram hit
    (["a", "c"], ["a", "b"], "R1", 0.5, 0.5, 0.5),
    (["a", "c"], ["a", "b"], "R2", 0.0, 0.0, 0.0),
    (["a", "c"], ["a", "b"], "RL", 0.5, 0.5, 0.5),
]
