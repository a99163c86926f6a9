"""Toy generation harness: a count-based n-gram sequence model and the
set-decoding strategies (top-3 beam search with length penalty, total and
top-k random sampling, and a 3-model ensemble) that produce 3-sentence
output sets for end-to-end evaluation.

All generation is a pure function of (model, strategy parameters, seed).
Random strategies draw from per-sample substreams seeded by
(seed, sample index), so sets are stable regardless of evaluation order.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

__all__ = [
    "EOS",
    "BOS",
    "SequenceModel",
    "NGramLM",
    "GenerationSet",
    "train_ngram",
    "beam_search",
    "BeamHypothesis",
    "generate_top3_beam",
    "generate_random",
    "generate_topk_random",
    "generate_ensemble",
    "STRATEGY_BEAM",
    "STRATEGY_RANDOM",
    "STRATEGY_TOPK",
    "STRATEGY_ENSEMBLE",
]

EOS = "</s>"  # end-of-sequence, part of every vocabulary, never emitted in text
BOS = "<s>"  # context padding only, not in the vocabulary

STRATEGY_BEAM = "beam_top3"
STRATEGY_RANDOM = "total_random"
STRATEGY_TOPK = "topk_random"
STRATEGY_ENSEMBLE = "ensemble"

SET_SIZE = 3  # one output set holds three sentences, matching reference sets

_FORMAT_NAME = "multiscore-ngram-lm"
_FORMAT_VERSION = 1


class SequenceModel(Protocol):
    """Anything exposing an ordered vocabulary (with EOS) and a conditional
    next-token distribution."""

    vocabulary: tuple[str, ...]

    def next_distribution(self, context: Sequence[str]) -> np.ndarray: ...


class NGramLM:
    """Count-based n-gram model with add-k smoothing.

    The distribution for a context uses only its last (order - 1) tokens,
    padded with BOS. With add_k > 0 every vocabulary token (including EOS)
    has positive probability in every context; with add_k == 0 an unseen
    context falls back to the uniform distribution.
    """

    def __init__(self, order: int, vocab: Sequence[str], counts: dict[tuple, dict[str, int]], add_k: float = 0.1):
        if order < 1:
            raise ValueError(f"order must be >= 1, got {order}")
        if add_k < 0:
            raise ValueError(f"add_k must be >= 0, got {add_k}")
        if EOS not in vocab:
            raise ValueError("vocabulary must include the end-of-sequence token")
        self.order = order
        self.add_k = float(add_k)
        self.vocabulary = tuple(vocab)
        self._index = {t: i for i, t in enumerate(self.vocabulary)}
        self.counts = {tuple(ctx): dict(table) for ctx, table in counts.items()}
        self._dist_cache: dict[tuple, np.ndarray] = {}

    def _context_key(self, context: Sequence[str]) -> tuple:
        if self.order == 1:
            return ()
        padded = (BOS,) * (self.order - 1) + tuple(context)
        return padded[-(self.order - 1):]

    def next_distribution(self, context: Sequence[str]) -> np.ndarray:
        key = self._context_key(context)
        cached = self._dist_cache.get(key)
        if cached is not None:
            return cached
        table = self.counts.get(key)
        n_vocab = len(self.vocabulary)
        probs = np.full(n_vocab, self.add_k)
        total = 0
        if table:
            for token, count in table.items():
                probs[self._index[token]] += count
                total += count
        denom = total + self.add_k * n_vocab
        if denom <= 0.0:  # add_k == 0 and unseen context
            probs = np.full(n_vocab, 1.0 / n_vocab)
        else:
            probs /= denom
        probs.flags.writeable = False
        self._dist_cache[key] = probs
        return probs

    def save(self, path) -> None:
        """Serialize to a versioned JSON file; round-trips exactly."""
        payload = {
            "format": _FORMAT_NAME,
            "version": _FORMAT_VERSION,
            "order": self.order,
            "add_k": self.add_k,
            "vocab": list(self.vocabulary),
            "contexts": [
                {"context": list(ctx), "counts": dict(sorted(table.items()))}
                for ctx, table in sorted(self.counts.items())
            ],
        }
        with open(os.fspath(path), "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, ensure_ascii=False, indent=None, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "NGramLM":
        with open(os.fspath(path), encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("format") != _FORMAT_NAME:
            raise ValueError(f"not a {_FORMAT_NAME} file: {path}")
        if payload.get("version") != _FORMAT_VERSION:
            raise ValueError(f"unsupported model version {payload.get('version')!r}")
        counts = {tuple(entry["context"]): entry["counts"] for entry in payload["contexts"]}
        return cls(order=payload["order"], vocab=payload["vocab"], counts=counts, add_k=payload["add_k"])


def train_ngram(corpus: Sequence[Sequence[str]], order: int, add_k: float = 0.1) -> NGramLM:
    """Train an n-gram model on tokenized sentences.

    Each sentence is padded with (order - 1) BOS tokens and terminated with
    EOS before counting order-length windows. The vocabulary is the sorted
    set of corpus tokens plus EOS.
    """
    corpus = [tuple(seq) for seq in corpus]
    if not corpus:
        raise ValueError("training corpus must be non-empty")
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    tokens = set()
    for seq in corpus:
        for tok in seq:
            if tok in (BOS, EOS):
                raise ValueError(f"corpus contains the reserved symbol {tok!r}")
            tokens.add(tok)
    vocab = tuple(sorted(tokens | {EOS}))
    counts: dict[tuple, dict[str, int]] = {}
    for seq in corpus:
        padded = (BOS,) * (order - 1) + seq + (EOS,)
        for i in range(order - 1, len(padded)):
            ctx = padded[i - order + 1 : i]
            table = counts.setdefault(ctx, {})
            table[padded[i]] = table.get(padded[i], 0) + 1
    return NGramLM(order=order, vocab=vocab, counts=counts, add_k=add_k)


@dataclass(frozen=True)
class BeamHypothesis:
    tokens: tuple[str, ...]
    logp: float
    score: float  # logp / lp(len), the length-penalized ranking key
    finished: bool

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


def _length_penalty(length: int, alpha: float) -> float:
    return ((5.0 + length) / 6.0) ** alpha


def _penalized(logp: float, length: int, alpha: float) -> float:
    return logp / _length_penalty(length, alpha)


def _beam_pools(
    model: SequenceModel, beam_width: int, max_len: int, alpha: float
) -> tuple[list[BeamHypothesis], list[BeamHypothesis]]:
    """Run the beam and return (finished, unfinished) hypothesis pools, each
    ranked by penalized score with lexicographic token-order tie-breaks.

    Hypotheses that finish occupy beam slots permanently, so a width-1 beam
    is exactly greedy decoding and a wide-enough beam on a fully smoothed
    model reproduces exhaustive enumeration. Extensions created at the final
    step can never finish; they stay out of the slot competition and are
    kept only as truncated leftovers for set-filling.
    """
    vocab = model.vocabulary
    eos_idx = vocab.index(EOS)
    active: list[tuple[tuple[str, ...], float]] = [((), 0.0)]
    finished: list[tuple[tuple[str, ...], float]] = []
    truncated: list[tuple[tuple[str, ...], float]] = []
    for step in range(max_len):
        if not active or len(finished) >= beam_width:
            break
        closures = []  # hypotheses taking EOS now
        extensions = []  # hypotheses growing by one token
        for tokens, logp in active:
            probs = model.next_distribution(tokens)
            for idx in np.flatnonzero(probs > 0.0):
                idx = int(idx)
                cand_logp = logp + math.log(probs[idx])
                if idx == eos_idx:
                    closures.append((tokens, cand_logp))
                else:
                    extensions.append((tokens + (vocab[idx],), cand_logp))
        if step == max_len - 1:
            extensions.sort(key=lambda c: (-c[1], c[0]))
            truncated = extensions[:beam_width]
            pool = [(t, lp, True) for t, lp in closures]
        else:
            pool = [(t, lp, True) for t, lp in closures]
            pool += [(t, lp, False) for t, lp in extensions]
        pool.sort(key=lambda c: (-c[1], c[0]))
        slots = beam_width - len(finished)
        active = []
        for tokens, logp, is_closure in pool[:slots]:
            if is_closure:
                finished.append((tokens, logp))
            else:
                active.append((tokens, logp))

    return _ranked(finished, alpha, True), _ranked(truncated + active, alpha, False)


def _ranked(pool, alpha: float, finished: bool) -> list[BeamHypothesis]:
    hyps = [
        BeamHypothesis(tokens, logp, _penalized(logp, len(tokens), alpha), finished)
        for tokens, logp in pool
    ]
    hyps.sort(key=lambda h: (-h.score, h.tokens))
    return hyps


def beam_search(
    model: SequenceModel, beam_width: int, max_len: int, alpha: float = 0.6
) -> list[BeamHypothesis]:
    """Beam search with length-penalized final ranking.

    Beams grow by summed log-probability; zero-probability continuations
    are never expanded. Finished hypotheses are ranked by
    logp / ((5 + len) / 6)^alpha, ties resolved by lexicographic token
    order. Returns up to ``beam_width`` finished hypotheses; a width of 1
    reduces to greedy decoding.

    ``max_len`` bounds the word-token count: a hypothesis that reaches it
    is truncated, so finished sequences carry at most max_len - 1 tokens
    (the same budget convention the samplers use).
    """
    if beam_width < 1:
        raise ValueError(f"beam_width must be >= 1, got {beam_width}")
    if max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")
    finished, _ = _beam_pools(model, beam_width, max_len, alpha)
    return finished[:beam_width]


def _fill_set(sentences: list[str], pool: list[BeamHypothesis], flags: set[str]) -> list[str]:
    """Top up a generation set to SET_SIZE: unfinished prefixes first, then
    repetition of what exists."""
    for hyp in pool:
        if len(sentences) >= SET_SIZE:
            break
        sentences.append(hyp.text)
        flags.add("filled_from_unfinished")
    if not sentences:
        raise RuntimeError("beam search produced no hypotheses at all")
    base, i = len(sentences), 0
    while len(sentences) < SET_SIZE:
        sentences.append(sentences[i % base])
        i += 1
        flags.add("filled_by_repetition")
    return sentences


@dataclass(frozen=True)
class GenerationSet:
    """Three sentences generated for one instance by one strategy, plus the
    seed and any degeneracy flags ('filled_from_unfinished',
    'filled_by_repetition', 'truncated')."""

    instance_id: str
    strategy: str
    sentences: tuple[str, ...]
    seed: int
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.sentences) != SET_SIZE:
            raise ValueError(f"a generation set holds exactly {SET_SIZE} sentences")


def generate_top3_beam(
    model: SequenceModel,
    beam_width: int = 10,
    max_len: int = 64,
    alpha: float = 0.6,
    instance_id: str = "",
    seed: int = 0,
) -> GenerationSet:
    """The three best finished beam hypotheses. If fewer than three finish
    within ``max_len``, the highest-scoring unfinished prefixes (and, as a
    last resort, repeats) fill the set, with flags recording the fill."""
    if beam_width < SET_SIZE:
        raise ValueError(f"beam_width must be >= {SET_SIZE}, got {beam_width}")
    finished, unfinished = _beam_pools(model, beam_width, max_len, alpha)
    flags: set[str] = set()
    # the empty hypothesis (immediate EOS) is a valid beam result but
    # useless in an output set, so it never occupies a slot here
    sentences = [h.text for h in finished if h.tokens][:SET_SIZE]
    if len(sentences) < SET_SIZE:
        sentences = _fill_set(sentences, unfinished, flags)
    return GenerationSet(
        instance_id=instance_id,
        strategy=STRATEGY_BEAM,
        sentences=tuple(sentences),
        seed=seed,
        flags=tuple(sorted(flags)),
    )


def _sample_tokens(model: SequenceModel, rng: np.random.Generator, max_len: int, top_k: int | None) -> tuple[list[str], bool]:
    """One ancestral sample; returns (tokens, hit_max_len)."""
    vocab = model.vocabulary
    eos_idx = vocab.index(EOS)
    tokens: list[str] = []
    for _ in range(max_len):
        probs = model.next_distribution(tokens)
        if top_k is not None and top_k < len(vocab):
            # k most probable tokens, probability ties kept in token order
            keep = np.argsort(-probs, kind="stable")[:top_k]
            restricted = probs[keep] / probs[keep].sum()
            idx = int(keep[_draw(rng, restricted)])
        else:
            idx = _draw(rng, probs)
        if idx == eos_idx:
            return tokens, False
        tokens.append(vocab[idx])
    return tokens, True


def _draw(rng: np.random.Generator, probs: np.ndarray) -> int:
    cdf = np.cumsum(probs)
    r = rng.random() * cdf[-1]
    return min(int(np.searchsorted(cdf, r, side="right")), len(probs) - 1)


_EMPTY_RESAMPLE_CAP = 100


def _sampling_set(model, seed: int, max_len: int, top_k: int | None, strategy: str, instance_id: str) -> GenerationSet:
    sentences = []
    flags: set[str] = set()
    for k in range(SET_SIZE):
        rng = np.random.default_rng((seed, k))
        # a sample that stops at EOS immediately is redrawn from the same
        # substream so sets stay evaluable; conditional next-token
        # frequencies at non-empty contexts are unaffected
        for _ in range(_EMPTY_RESAMPLE_CAP):
            tokens, truncated = _sample_tokens(model, rng, max_len, top_k)
            if tokens:
                break
        if truncated:
            flags.add("truncated")
        sentences.append(" ".join(tokens))
    return GenerationSet(
        instance_id=instance_id,
        strategy=strategy,
        sentences=tuple(sentences),
        seed=seed,
        flags=tuple(sorted(flags)),
    )


def generate_random(model: SequenceModel, seed: int, max_len: int = 64, instance_id: str = "") -> GenerationSet:
    """Three independent ancestral samples from the full next-token
    distribution, stopping at EOS (or at ``max_len``, flagged 'truncated')."""
    return _sampling_set(model, seed, max_len, None, STRATEGY_RANDOM, instance_id)


def generate_topk_random(
    model: SequenceModel, k: int = 3, seed: int = 0, max_len: int = 64, instance_id: str = ""
) -> GenerationSet:
    """Like :func:`generate_random` but each step samples from the ``k``
    most probable tokens, renormalized."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return _sampling_set(model, seed, max_len, k, STRATEGY_TOPK, instance_id)


def generate_ensemble(
    models: Sequence[SequenceModel],
    beam_width: int = 10,
    max_len: int = 64,
    alpha: float = 0.6,
    instance_id: str = "",
    seed: int = 0,
) -> GenerationSet:
    """One sentence per model: each of the three models contributes its
    single best beam-search output."""
    if len(models) != SET_SIZE:
        raise ValueError(f"ensemble takes exactly {SET_SIZE} models, got {len(models)}")
    sentences = []
    flags: set[str] = set()
    for model in models:
        finished, unfinished = _beam_pools(model, beam_width, max_len, alpha)
        finished = [h for h in finished if h.tokens]
        if finished:
            sentences.append(finished[0].text)
        elif unfinished:
            sentences.append(unfinished[0].text)
            flags.add("filled_from_unfinished")
        else:
            raise RuntimeError("beam search produced no hypotheses at all")
    return GenerationSet(
        instance_id=instance_id,
        strategy=STRATEGY_ENSEMBLE,
        sentences=tuple(sentences),
        seed=seed,
        flags=tuple(sorted(flags)),
    )
