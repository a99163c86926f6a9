"""Tokenization and n-gram extraction primitives shared by all metrics."""

from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass
from functools import cached_property, lru_cache

__all__ = ["Sentence", "NGramMultiset", "tokenize_words", "word_ngrams", "char_ngrams"]


@lru_cache(maxsize=4096)
def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize_words(raw: str, lowercase: bool = True) -> list[str]:
    """Split ``raw`` into word tokens.

    Chunks are separated on Unicode whitespace and every punctuation
    character becomes its own token, so ``"Baku, Azerbaijan"`` yields
    ``["baku", ",", "azerbaijan"]``. Lowercasing is on by default; pass
    ``lowercase=False`` for cased evaluation. Deterministic; an empty or
    all-whitespace string yields an empty list.
    """
    if lowercase:
        raw = raw.lower()
    tokens: list[str] = []
    for chunk in raw.split():
        buf: list[str] = []
        for ch in chunk:
            if _is_punct(ch):
                if buf:
                    tokens.append("".join(buf))
                    buf = []
                tokens.append(ch)
            else:
                buf.append(ch)
        if buf:
            tokens.append("".join(buf))
    return tokens


@dataclass(frozen=True)
class NGramMultiset:
    """Multiset of fixed-order n-grams.

    Keys are sequences of length ``order``: tuples of tokens for word
    n-grams, plain strings for character n-grams. Callers must treat
    ``counts`` as read-only.
    """

    order: int
    counts: Counter

    def total(self) -> int:
        return sum(self.counts.values())

    def overlap(self, other: "NGramMultiset") -> int:
        """Total count of n-grams shared with ``other`` (multiset intersection)."""
        if self.order != other.order:
            raise ValueError("cannot intersect n-gram multisets of different order")
        small, big = self.counts, other.counts
        if len(big) < len(small):
            small, big = big, small
        return sum(min(c, big[g]) for g, c in small.items() if g in big)


def word_ngrams(tokens, n: int) -> NGramMultiset:
    """All contiguous ``n``-token windows of ``tokens`` as a multiset."""
    if n < 1:
        raise ValueError(f"n-gram order must be >= 1, got {n}")
    tokens = tuple(tokens)
    grams = Counter(tokens[i : i + n] for i in range(len(tokens) - n + 1))
    return NGramMultiset(n, grams)


def char_ngrams(raw: str, n: int, strip_whitespace: bool = True) -> NGramMultiset:
    """All contiguous ``n``-character windows of ``raw`` as a multiset.

    With ``strip_whitespace`` (the chrF convention, default) every Unicode
    whitespace character is removed before windowing. Windows are taken over
    Unicode code points, never bytes.
    """
    if n < 1:
        raise ValueError(f"n-gram order must be >= 1, got {n}")
    if strip_whitespace:
        raw = "".join(raw.split())
    grams = Counter(raw[i : i + n] for i in range(len(raw) - n + 1))
    return NGramMultiset(n, grams)


@dataclass(frozen=True)
class Sentence:
    """One sentence with lazily computed, cached word tokens.

    ``lowercase`` controls both tokenization and the character stream used
    by character-level metrics, so a cased evaluation is consistent across
    metrics.
    """

    raw: str
    lowercase: bool = True

    def __post_init__(self):
        if not self.raw.strip():
            raise ValueError("sentence text must be non-empty")
        object.__setattr__(self, "raw", self.raw.strip())

    @cached_property
    def tokens(self) -> tuple[str, ...]:
        return tuple(tokenize_words(self.raw, lowercase=self.lowercase))

    @cached_property
    def chars(self) -> str:
        """Whitespace-stripped character stream (chrF substrate)."""
        text = self.raw.lower() if self.lowercase else self.raw
        return "".join(text.split())

    def __len__(self) -> int:
        return len(self.tokens)
