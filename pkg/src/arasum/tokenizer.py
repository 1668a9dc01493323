"""Trainable subword vocabulary (deterministic pair-merge BPE).

Training starts from single characters and repeatedly merges the most
frequent adjacent pair (ties broken lexicographically), so two runs on
the same corpus always give the same vocabulary.  Word boundaries are
carried by a marker prefix on pieces that start a new word, which lets
decode reconstruct spacing exactly.

Character coverage mirrors the sentencepiece rule: the most frequent
characters covering at least ``char_coverage`` of the corpus character
mass become single-character pieces; everything else encodes to unk.
"""

from collections import Counter
from dataclasses import dataclass, field

from .errors import EmptyCorpus, InvalidId, VocabTooSmall

BOUNDARY = "▁"  # word-boundary marker prefix

PAD, UNK, BOS, EOS, MASK = 0, 1, 2, 3, 4
SPECIAL_PIECES = ("<pad>", "<unk>", "<s>", "</s>", "<mask>")
N_SPECIALS = len(SPECIAL_PIECES)


@dataclass
class TokenSequence:
    """Encoded text: integer ids plus a source/target role marker."""

    ids: list[int]
    kind: str  # "source" or "target"

    def content_ids(self) -> list[int]:
        """Ids without the framing specials (bos/eos)."""
        ids = self.ids
        if self.kind == "target" and ids and ids[0] == BOS:
            ids = ids[1:]
        if ids and ids[-1] == EOS:
            ids = ids[:-1]
        return list(ids)


@dataclass
class Vocabulary:
    pieces: list[str]
    merges: list[tuple[str, str]]
    char_coverage: float
    piece_to_id: dict[str, int] = field(init=False)

    def __post_init__(self):
        self.piece_to_id = {p: i for i, p in enumerate(self.pieces)}
        self._merge_rank = {m: r for r, m in enumerate(self.merges)}

    def __len__(self) -> int:
        return len(self.pieces)

    @property
    def pad_id(self) -> int:
        return PAD

    @property
    def unk_id(self) -> int:
        return UNK

    @property
    def bos_id(self) -> int:
        return BOS

    @property
    def eos_id(self) -> int:
        return EOS

    @property
    def mask_id(self) -> int:
        return MASK


def _word_symbols(word: str, initial: bool) -> list[str]:
    """Character symbols of one whitespace token; non-initial words get
    the boundary marker as their first symbol."""
    syms = list(word)
    if not initial:
        syms = [BOUNDARY] + syms
    return syms


def _covered_chars(char_counts: Counter, coverage: float) -> set[str]:
    total = sum(char_counts.values())
    covered = set()
    mass = 0
    # frequency-desc, then codepoint for determinism
    for ch, cnt in sorted(char_counts.items(), key=lambda kv: (-kv[1], kv[0])):
        if mass / total >= coverage:
            break
        covered.add(ch)
        mass += cnt
    return covered


def train_vocab(corpus, vocab_size: int, char_coverage: float = 0.9999) -> Vocabulary:
    """Learn a vocabulary of exactly ``vocab_size`` pieces from an
    iterable of text lines."""
    char_counts = Counter()
    word_counts = Counter()  # (word, initial-flag) -> count
    n_lines = 0
    for line in corpus:
        n_lines += 1
        words = line.split()
        for i, w in enumerate(words):
            for ch in w:
                char_counts[ch] += 1
            word_counts[(w, i == 0)] += 1
    if n_lines == 0 or not char_counts:
        raise EmptyCorpus("tokenizer training corpus is empty")

    covered = _covered_chars(char_counts, char_coverage)
    alphabet = sorted(covered) + [BOUNDARY]
    base = N_SPECIALS + len(alphabet)
    if vocab_size < base:
        raise VocabTooSmall(
            f"vocab_size {vocab_size} cannot fit {N_SPECIALS} specials "
            f"plus {len(alphabet)} covered characters"
        )

    # words as symbol tuples, uncovered characters dropped to unk surface
    words = {}
    for (w, initial), cnt in word_counts.items():
        syms = tuple(
            s if (s == BOUNDARY or s in covered) else SPECIAL_PIECES[UNK]
            for s in _word_symbols(w, initial)
        )
        words[syms] = words.get(syms, 0) + cnt

    pieces = list(SPECIAL_PIECES) + alphabet
    merges: list[tuple[str, str]] = []
    existing = set(pieces)
    while len(pieces) < vocab_size:
        pair_counts = Counter()
        for syms, cnt in words.items():
            for a, b in zip(syms, syms[1:]):
                pair_counts[(a, b)] += cnt
        # never merge into the unk surface and never recreate a piece
        candidates = [
            (pair, cnt)
            for pair, cnt in pair_counts.items()
            if SPECIAL_PIECES[UNK] not in pair and pair[0] + pair[1] not in existing
        ]
        if not candidates:
            break
        best = min(candidates, key=lambda kv: (-kv[1], kv[0]))[0]
        merged = best[0] + best[1]
        merges.append(best)
        pieces.append(merged)
        existing.add(merged)
        new_words = {}
        for syms, cnt in words.items():
            out = []
            i = 0
            while i < len(syms):
                if i + 1 < len(syms) and (syms[i], syms[i + 1]) == best:
                    out.append(merged)
                    i += 2
                else:
                    out.append(syms[i])
                    i += 1
            key = tuple(out)
            new_words[key] = new_words.get(key, 0) + cnt
        words = new_words

    if len(pieces) < vocab_size:
        raise VocabTooSmall(
            f"corpus only supports {len(pieces)} pieces, "
            f"vocab_size {vocab_size} requested"
        )
    return Vocabulary(pieces=pieces, merges=merges, char_coverage=char_coverage)


def _encode_word(v: Vocabulary, word: str, initial: bool) -> list[int]:
    syms = [
        s if (s == BOUNDARY or s in v.piece_to_id) else SPECIAL_PIECES[UNK]
        for s in _word_symbols(word, initial)
    ]
    # apply merges in training order
    while len(syms) > 1:
        ranked = [
            (v._merge_rank[(a, b)], i)
            for i, (a, b) in enumerate(zip(syms, syms[1:]))
            if (a, b) in v._merge_rank
        ]
        if not ranked:
            break
        _, i = min(ranked)
        syms = syms[:i] + [syms[i] + syms[i + 1]] + syms[i + 2:]
    return [v.piece_to_id.get(s, UNK) for s in syms]


def encode(v: Vocabulary, text: str, kind: str = "source") -> TokenSequence:
    """Deterministic merge-rank encoding with framing specials."""
    ids: list[int] = []
    words = text.split(" ")
    for i, w in enumerate(words):
        if w == "":
            # explicit leading/trailing space: a bare boundary marker
            if i > 0:
                ids.append(v.piece_to_id[BOUNDARY])
            continue
        ids.extend(_encode_word(v, w, initial=(i == 0)))
    if kind == "target":
        ids = [BOS] + ids + [EOS]
    else:
        ids = ids + [EOS]
    return TokenSequence(ids=ids, kind=kind)


def decode(v: Vocabulary, seq: TokenSequence, strip_specials: bool = True) -> str:
    """Inverse of encode for covered text."""
    out = []
    for i in seq.ids:
        if i < 0 or i >= len(v):
            raise InvalidId(f"id {i} out of range for vocabulary of {len(v)}")
        if strip_specials and i in (PAD, BOS, EOS):
            continue
        out.append(v.pieces[i])
    text = "".join(out)
    return text.replace(BOUNDARY, " ")


def save_vocab(v: Vocabulary, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("#specials pad=0 unk=1 bos=2 eos=3 mask=4\n")
        f.write(f"#coverage {v.char_coverage}\n")
        for pid, piece in enumerate(v.pieces):
            f.write(f"{piece}\t{pid}\n")
        for a, b in v.merges:
            f.write(f"#merge {a}\t{b}\n")


def load_vocab(path) -> Vocabulary:
    pieces = []
    merges = []
    coverage = 1.0
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if line.startswith("#coverage "):
                coverage = float(line.split(" ", 1)[1])
            elif line.startswith("#merge "):
                a, b = line[len("#merge "):].split("\t")
                merges.append((a, b))
            elif line.startswith("#"):
                continue
            else:
                piece, pid = line.split("\t")
                assert int(pid) == len(pieces), "vocabulary file ids not dense"
                pieces.append(piece)
    return Vocabulary(pieces=pieces, merges=merges, char_coverage=coverage)
