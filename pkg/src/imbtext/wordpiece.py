"""Subword vocabulary management and greedy longest-match-first encoding."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator, TransformerMixin

CONTINUATION = "##"
UNK, PAD, CLS, SEP = "[UNK]", "[PAD]", "[CLS]", "[SEP]"
SPECIAL_TOKENS = (PAD, UNK, CLS, SEP)


@dataclass(frozen=True)
class TokenSeq:
    """One encoded instance: fixed-capacity id row with a pad suffix."""

    ids: tuple[int, ...]
    length: int
    label_id: int = -1
    uid: str = ""


class VocabModel:
    """Ordered subword vocabulary; ids equal list position.

    Continuation pieces carry the "##" prefix. The unk token is mandatory;
    pad/cls/sep are resolved when present and required lazily by encode.
    """

    def __init__(self, tokens: Sequence[str], max_word_chars: int = 100):
        tokens = tuple(tokens)
        ids: dict[str, int] = {}
        for i, tok in enumerate(tokens):
            if tok in ids:
                raise ValueError(f"duplicate token {tok!r} (ids {ids[tok]} and {i})")
            ids[tok] = i
        if UNK not in ids:
            raise ValueError(f"vocabulary is missing the unk token {UNK!r}")
        if max_word_chars < 1:
            raise ValueError("max_word_chars must be positive")
        self.tokens = tokens
        self.ids = ids
        self.max_word_chars = max_word_chars
        self.unk_id = ids[UNK]
        self.pad_id = ids.get(PAD)
        self.cls_id = ids.get(CLS)
        self.sep_id = ids.get(SEP)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.ids

    def special_ids(self) -> set[int]:
        return {i for i in (self.unk_id, self.pad_id, self.cls_id, self.sep_id) if i is not None}

    def save(self, path) -> None:
        Path(path).write_text("\n".join(self.tokens) + "\n", encoding="utf-8")


def load_vocab(path, max_word_chars: int = 100) -> VocabModel:
    """Load a one-token-per-line vocabulary file; token id = line index.

    Duplicate or blank lines are errors (they would silently shift every
    later id), as is a file without the unk token.
    """
    path = Path(path)
    tokens = []
    seen: dict[str, int] = {}
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            token = line.rstrip("\r\n")
            if not token:
                raise ValueError(f"{path.name}:{line_no}: blank vocabulary line")
            if token in seen:
                raise ValueError(
                    f"{path.name}:{line_no}: duplicate token {token!r} (first at line {seen[token]})"
                )
            seen[token] = line_no
            tokens.append(token)
    if UNK not in seen:
        raise ValueError(f"{path.name}: missing unk token {UNK!r}")
    return VocabModel(tokens, max_word_chars=max_word_chars)


def train_vocab(corpus: Iterable[str], target_size: int, max_word_chars: int = 100) -> VocabModel:
    """Induce a vocabulary from cleaned texts.

    Layout: the four special tokens, every observed character (plus its "##"
    continuation twin), then whole words and word suffixes ranked by corpus
    frequency (ties broken lexicographically) until ``target_size``. Full
    character coverage means every corpus word (up to ``max_word_chars``)
    encodes without unk.
    """
    texts = list(corpus)
    if not texts:
        raise ValueError("cannot train a vocabulary on an empty corpus")
    word_counts: Counter[str] = Counter()
    for text in texts:
        word_counts.update(text.split())

    alphabet = sorted({ch for word in word_counts for ch in word})
    base = list(SPECIAL_TOKENS) + alphabet + [CONTINUATION + ch for ch in alphabet]
    if target_size < len(base):
        raise ValueError(
            f"target_size {target_size} cannot hold {len(alphabet)} characters, their "
            f"continuations, and {len(SPECIAL_TOKENS)} specials (minimum {len(base)})"
        )

    candidates: Counter[str] = Counter()
    for word, count in word_counts.items():
        if len(word) < 2:
            continue
        candidates[word] += count
        for i in range(1, len(word)):
            candidates[CONTINUATION + word[i:]] += count

    tokens = list(base)
    have = set(base)
    for token, _ in sorted(candidates.items(), key=lambda kv: (-kv[1], kv[0])):
        if len(tokens) >= target_size:
            break
        if token not in have:
            tokens.append(token)
            have.add(token)
    return VocabModel(tokens, max_word_chars=max_word_chars)


def word_pieces(word: str, vocab: VocabModel) -> list[str]:
    """Greedy longest-match-first segmentation of one word.

    At each position the longest vocabulary prefix wins (continuations
    matched with the "##" prefix). If no prefix matches at some position, or
    the word exceeds max_word_chars, the whole word collapses to unk.
    """
    if len(word) > vocab.max_word_chars:
        return [UNK]
    pieces = []
    start = 0
    while start < len(word):
        end = len(word)
        match = None
        while end > start:
            piece = word[start:end]
            if start > 0:
                piece = CONTINUATION + piece
            if piece in vocab.ids:
                match = piece
                break
            end -= 1
        if match is None:
            return [UNK]
        pieces.append(match)
        start = end
    return pieces


def encode(
    text: str,
    vocab: VocabModel,
    capacity: int,
    *,
    label_id: int = -1,
    uid: str = "",
    add_specials: bool = True,
) -> TokenSeq:
    """Encode one cleaned text into a fixed-capacity TokenSeq.

    The piece sequence (framed by cls/sep when ``add_specials``) is truncated
    to ``capacity`` and padded with pad to exactly ``capacity``.
    """
    if capacity < 2:
        raise ValueError(f"capacity must be at least 2, got {capacity}")
    ids = []
    if add_specials:
        if vocab.cls_id is None or vocab.sep_id is None:
            raise ValueError("vocabulary lacks [CLS]/[SEP]; encode with add_specials=False")
        ids.append(vocab.cls_id)
    for word in text.split():
        ids.extend(vocab.ids[piece] for piece in word_pieces(word, vocab))
    if add_specials:
        ids.append(vocab.sep_id)
    ids = ids[:capacity]
    length = len(ids)
    if length < capacity:
        if vocab.pad_id is None:
            raise ValueError("vocabulary lacks [PAD]; cannot pad to capacity")
        ids.extend([vocab.pad_id] * (capacity - length))
    return TokenSeq(ids=tuple(ids), length=length, label_id=label_id, uid=uid)


def decode(seq: TokenSeq, vocab: VocabModel) -> str:
    """Invert encode for in-vocabulary content: drop specials and pads, glue
    "##" continuations onto their head piece, join words with single spaces."""
    specials = vocab.special_ids()
    words: list[str] = []
    for token_id in seq.ids:
        if not 0 <= token_id < len(vocab):
            raise ValueError(f"token id {token_id} out of range [0, {len(vocab)})")
        if token_id in specials:
            continue
        token = vocab.tokens[token_id]
        if token.startswith(CONTINUATION) and words:
            words[-1] += token[len(CONTINUATION):]
        elif token.startswith(CONTINUATION):
            words.append(token[len(CONTINUATION):])
        else:
            words.append(token)
    return " ".join(words)


def unk_count(text: str, vocab: VocabModel) -> int:
    """Number of words in ``text`` that fail to segment (monotone coverage probe)."""
    return sum(1 for word in text.split() if word_pieces(word, vocab) == [UNK])


class WordPieceTokenizer(BaseEstimator, TransformerMixin):
    """Tokenizer with estimator semantics: fit induces (or loads) the
    vocabulary, transform encodes texts into TokenSeq rows."""

    def __init__(
        self,
        target_size: int = 8000,
        capacity: int = 64,
        add_specials: bool = True,
        max_word_chars: int = 100,
        vocab_file=None,
    ):
        self.target_size = target_size
        self.capacity = capacity
        self.add_specials = add_specials
        self.max_word_chars = max_word_chars
        self.vocab_file = vocab_file

    def fit(self, X, y=None):
        if self.vocab_file is not None:
            self.vocab_ = load_vocab(self.vocab_file, max_word_chars=self.max_word_chars)
        else:
            self.vocab_ = train_vocab(X, self.target_size, max_word_chars=self.max_word_chars)
        return self

    def transform(self, X) -> list[TokenSeq]:
        if not hasattr(self, "vocab_"):
            raise ValueError("WordPieceTokenizer is not fitted")
        return [
            encode(text, self.vocab_, self.capacity, add_specials=self.add_specials)
            for text in X
        ]

    def inverse_transform(self, seqs: Iterable[TokenSeq]) -> list[str]:
        return [decode(seq, self.vocab_) for seq in seqs]
