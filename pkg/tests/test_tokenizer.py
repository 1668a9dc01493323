import random

import pytest

from arasum import tokenizer as tok
from arasum.errors import EmptyCorpus, InvalidId, VocabTooSmall
from arasum.tokenizer import (BOS, EOS, MASK, PAD, UNK, TokenSequence,
                              decode, encode, load_vocab, save_vocab,
                              train_vocab)


def test_specials_layout():
    v = train_vocab(["x"], vocab_size=7)
    assert v.pieces[:5] == list(tok.SPECIAL_PIECES)
    assert (v.pad_id, v.unk_id, v.bos_id, v.eos_id, v.mask_id) == (0, 1, 2, 3, 4)
    assert v.piece_to_id == {p: i for i, p in enumerate(v.pieces)}


def test_single_char_corpus():
    v = train_vocab(["x"], vocab_size=7, char_coverage=1.0)
    assert "x" in v.pieces
    assert len(v) == 7


def test_empty_corpus_rejected():
    with pytest.raises(EmptyCorpus):
        train_vocab([], vocab_size=10)
    with pytest.raises(EmptyCorpus):
        train_vocab(["   "], vocab_size=10)


def test_vocab_too_small():
    with pytest.raises(VocabTooSmall):
        train_vocab(["abcdef"], vocab_size=6)


def test_pair_merge_learns_frequent_pair():
    # "ab" is the most frequent adjacent pair (4 occurrences)
    v = train_vocab(["abab", "abab"], vocab_size=9, char_coverage=1.0)
    assert {"a", "b", "ab"} <= set(v.pieces)
    seq = encode(v, "abab", kind="source")
    ab = v.piece_to_id["ab"]
    assert seq.ids == [ab, ab, EOS]


def test_coverage_excludes_rare_chars():
    # "b" holds 25% of the character mass and is dropped at coverage 0.5
    v = train_vocab(["aaab"], vocab_size=9, char_coverage=0.5)
    assert "a" in v.pieces and "b" not in v.pieces
    seq = encode(v, "ab", kind="source")
    assert UNK in seq.ids


def test_encode_empty_source():
    v = train_vocab(["ab"], vocab_size=8)
    assert encode(v, "", kind="source").ids == [EOS]


def test_target_framing():
    v = train_vocab(["ab ab"], vocab_size=10)
    seq = encode(v, "ab", kind="target")
    assert seq.ids[0] == BOS and seq.ids[-1] == EOS


def test_roundtrip_simple():
    v = train_vocab(["abab baba ab"], vocab_size=14)
    for text in ["abab", "ab ba", "a b a", "", "ba ab ba"]:
        assert decode(v, encode(v, text)) == text


def test_roundtrip_property_random():
    corpus = ["the cat sat on the mat", "a cat ate a rat", "rats sat"]
    v = train_vocab(corpus, vocab_size=32)
    alphabet = sorted(set("".join(corpus)) - {" "})
    rng = random.Random(0)
    for _ in range(300):
        words = [
            "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 6)))
            for _ in range(rng.randint(0, 5))
        ]
        text = " ".join(words)
        assert decode(v, encode(v, text)) == text


def test_encode_deterministic():
    corpus = ["abc abd abe", "abc abc"]
    v1 = train_vocab(corpus, vocab_size=17)
    v2 = train_vocab(corpus, vocab_size=17)
    assert v1.pieces == v2.pieces and v1.merges == v2.merges
    assert encode(v1, "abc abd").ids == encode(v2, "abc abd").ids


def test_mask_surface_rendering():
    v = train_vocab(["ab"], vocab_size=8)
    assert decode(v, TokenSequence([MASK], "source"), strip_specials=False) == "<mask>"


def test_specials_only_decodes_empty():
    v = train_vocab(["ab"], vocab_size=8)
    assert decode(v, TokenSequence([PAD, BOS, EOS], "target")) == ""


def test_invalid_id():
    v = train_vocab(["ab"], vocab_size=8)
    with pytest.raises(InvalidId):
        decode(v, TokenSequence([len(v)], "source"))


def test_serialization_roundtrip_bit_exact(tmp_path):
    v = train_vocab(["abc abd ab ab cd"], vocab_size=16, char_coverage=0.9999)
    p1 = tmp_path / "v1.vocab"
    p2 = tmp_path / "v2.vocab"
    save_vocab(v, p1)
    v2 = load_vocab(p1)
    save_vocab(v2, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert v2.pieces == v.pieces and v2.merges == v.merges
    header = p1.read_text(encoding="utf-8").splitlines()[0]
    assert header == "#specials pad=0 unk=1 bos=2 eos=3 mask=4"


def test_all_ids_in_range():
    v = train_vocab(["hello world"], vocab_size=20)
    seq = encode(v, "held low zz")
    assert all(0 <= i < len(v) for i in seq.ids)
