"""Assignment-based joint evaluation of an output set against a reference
set: score every pair under a sentence-level metric, solve the
maximum-weight matching, and average the matched edge weights.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .assignment import Matching, ScoreMatrix, max_weight_matching
from .metrics import SentenceMetric
from .text import Sentence

__all__ = ["EvalInstance", "MultiScoreResult", "score_matrix", "multi_score", "corpus_multi_score"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalInstance:
    """One input's reference set plus (optionally) one system's output set.

    ``outputs`` may be empty for reference-only data; evaluation requires it
    to be populated, e.g. via :func:`multiscore.corpus.bind_outputs`.
    """

    id: str
    references: tuple[str, ...]
    outputs: tuple[str, ...] = ()
    category: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "references", tuple(self.references))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if not self.id:
            raise ValueError("instance id must be non-empty")
        if not self.references:
            raise ValueError(f"instance {self.id!r}: references must be non-empty")
        for text in self.references:
            if not isinstance(text, str) or not text.strip():
                raise ValueError(f"instance {self.id!r}: empty reference sentence")
        for text in self.outputs:
            if not isinstance(text, str) or not text.strip():
                raise ValueError(f"instance {self.id!r}: empty output sentence")

    @cached_property
    def reference_sentences(self) -> tuple[Sentence, ...]:
        return tuple(Sentence(r) for r in self.references)

    @cached_property
    def output_sentences(self) -> tuple[Sentence, ...]:
        return tuple(Sentence(o) for o in self.outputs)


@dataclass(frozen=True)
class MultiScoreResult:
    """Per-instance evaluation: the pairwise score matrix, the optimal
    matching, and the resulting score (average matched edge weight)."""

    instance_id: str
    matrix: ScoreMatrix
    matching: Matching
    score: float


def score_matrix(outputs: Sequence, references: Sequence, metric: SentenceMetric) -> ScoreMatrix:
    """Pairwise score grid: entry (i, j) is ``metric`` applied to output i
    with reference j as its single reference."""
    if not len(outputs) or not len(references):
        raise ValueError("outputs and references must both be non-empty")
    weights = np.empty((len(outputs), len(references)))
    for i, out in enumerate(outputs):
        for j, ref in enumerate(references):
            weights[i, j] = metric.score(out, [ref])
    return ScoreMatrix(weights)


def multi_score(
    outputs: Sequence,
    references: Sequence,
    metric: SentenceMetric,
    allow_unequal: bool = False,
    instance_id: str = "",
) -> MultiScoreResult:
    """Score an output set against a reference set under ``metric``.

    Builds the pairwise score matrix, solves the maximum-weight matching,
    and returns the average matched edge weight. Output and reference sets
    must be the same size unless ``allow_unequal`` is set, in which case the
    matching covers the smaller side and the mismatch is logged.

    :return: a :class:`MultiScoreResult`; ``score`` lies in [0, 100].
    """
    if len(outputs) != len(references):
        if not allow_unequal:
            raise ValueError(
                f"{len(outputs)} outputs vs {len(references)} references"
                f"{' for instance ' + repr(instance_id) if instance_id else ''}; "
                "pass allow_unequal to match the smaller side"
            )
        log.warning(
            "instance %r: matching %d outputs against %d references (averaging over the smaller side)",
            instance_id, len(outputs), len(references),
        )
    matrix = score_matrix(outputs, references, metric)
    matching = max_weight_matching(matrix)
    score = matching.total / len(matching.edges)
    return MultiScoreResult(instance_id=instance_id, matrix=matrix, matching=matching, score=score)


def _instance_result(instance: EvalInstance, metric: SentenceMetric, allow_unequal: bool) -> MultiScoreResult:
    if not instance.outputs:
        raise ValueError(f"instance {instance.id!r} has no outputs to evaluate")
    return multi_score(
        instance.output_sentences,
        instance.reference_sentences,
        metric,
        allow_unequal=allow_unequal,
        instance_id=instance.id,
    )


def corpus_multi_score(
    instances: Sequence[EvalInstance],
    metric: SentenceMetric,
    allow_unequal: bool = False,
    max_workers: int | None = None,
) -> tuple[float, list[MultiScoreResult]]:
    """Macro-averaged score over a corpus of instances.

    Instances are independent; with ``max_workers`` > 1 they are evaluated
    in a thread pool, with results identical to sequential evaluation.

    :return: (mean score, per-instance results in corpus order).
    """
    if not instances:
        raise ValueError("corpus must contain at least one instance")
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(lambda inst: _instance_result(inst, metric, allow_unequal), instances))
    else:
        results = [_instance_result(inst, metric, allow_unequal) for inst in instances]
    mean = sum(r.score for r in results) / len(results)
    return mean, results
