"""Corpus-level evaluation battery and report rendering.

Quality is corpus BLEU / chrF++ averaged over the three output slots, each
slot scored against the full multi-reference sets. Diversity is Self-BLEU
(macro-averaged per instance) plus the assignment-based set scores MS-BLEU
and MS-CHRF. Scores are carried at full precision and rounded to two
decimals (half-up) only when rendered.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Sequence

from .corpus import Dataset
from .metrics import (
    BleuConfig,
    BleuMetric,
    ChrfConfig,
    ChrfMetric,
    SMOOTH_NONE,
    corpus_bleu,
    corpus_chrfpp,
    self_bleu,
)
from .multiscore import EvalInstance, corpus_multi_score
from .text import Sentence

__all__ = ["EvaluationReport", "InstanceSummary", "evaluate_all", "render", "RENDER_FORMATS"]

log = logging.getLogger(__name__)

RENDER_FORMATS = ("json", "tsv", "table")

# TSV header mirrors the usual results-table column naming
_TSV_COLUMNS = ("BLEU", "CHRF++", "Self-B", "MS-B", "MS-C")


@dataclass(frozen=True)
class InstanceSummary:
    id: str
    ms_bleu: float
    ms_chrf: float
    self_bleu: float | None


@dataclass(frozen=True)
class EvaluationReport:
    quality: dict
    diversity: dict
    per_instance: tuple[InstanceSummary, ...]
    config: dict


def _sentences(texts: Sequence[str], lowercase: bool) -> list[Sentence]:
    return [Sentence(t, lowercase=lowercase) for t in texts]


def evaluate_all(
    dataset: Dataset | Sequence[EvalInstance],
    sentence_bleu_config: BleuConfig | None = None,
    corpus_bleu_config: BleuConfig | None = None,
    chrf_config: ChrfConfig | None = None,
    allow_unequal: bool = False,
    lowercase: bool = True,
    max_workers: int | None = None,
) -> EvaluationReport:
    """Compute the full evaluation battery for a dataset with outputs.

    :param dataset: instances, each carrying both references and outputs.
    :param sentence_bleu_config: config for the pairwise BLEU behind MS-BLEU
        and Self-BLEU (default: smoothed order-4).
    :param corpus_bleu_config: config for quality BLEU (default: unsmoothed
        order-4).
    :param allow_unequal: permit output sets whose size differs from the
        reference set (matched over the smaller side).
    :param lowercase: evaluate case-insensitively (the default).
    :param max_workers: evaluate instances in parallel; results are
        identical to sequential evaluation.
    """
    instances = tuple(dataset)
    if not instances:
        raise ValueError("cannot evaluate an empty dataset")
    for inst in instances:
        if not inst.outputs:
            raise ValueError(f"instance {inst.id!r} has no outputs to evaluate")
        if len(inst.outputs) != len(inst.references) and not allow_unequal:
            raise ValueError(
                f"instance {inst.id!r}: {len(inst.outputs)} outputs vs "
                f"{len(inst.references)} references (pass allow_unequal to permit)"
            )
    sentence_bleu_config = sentence_bleu_config or BleuConfig()
    corpus_bleu_config = corpus_bleu_config or BleuConfig(smoothing=SMOOTH_NONE)
    chrf_config = chrf_config or ChrfConfig()

    out_sents = {inst.id: _sentences(inst.outputs, lowercase) for inst in instances}
    ref_sents = {inst.id: _sentences(inst.references, lowercase) for inst in instances}

    # diversity: assignment-based set scores, macro-averaged
    bleu_metric = BleuMetric(sentence_bleu_config)
    chrf_metric = ChrfMetric(chrf_config)
    ms_bleu, bleu_results = _corpus_ms(instances, out_sents, ref_sents, bleu_metric, allow_unequal, max_workers)
    ms_chrf, chrf_results = _corpus_ms(instances, out_sents, ref_sents, chrf_metric, allow_unequal, max_workers)

    # diversity: Self-BLEU per instance (needs at least two outputs)
    self_scores: dict[str, float | None] = {}
    for inst in instances:
        if len(inst.outputs) >= 2:
            self_scores[inst.id] = self_bleu(out_sents[inst.id], sentence_bleu_config)
        else:
            self_scores[inst.id] = None
            log.warning("instance %r has a single output; Self-BLEU skipped", inst.id)
    usable = [s for s in self_scores.values() if s is not None]
    mean_self = sum(usable) / len(usable) if usable else None
    if mean_self is None:
        log.warning("no instance has 2+ outputs; Self-BLEU omitted from the report")

    # quality: corpus scores per output slot against full reference sets
    n_slots = max(len(inst.outputs) for inst in instances)
    slot_bleu, slot_chrf = [], []
    for k in range(n_slots):
        pairs = [
            (out_sents[inst.id][k], ref_sents[inst.id])
            for inst in instances
            if len(inst.outputs) > k
        ]
        slot_bleu.append(corpus_bleu(pairs, corpus_bleu_config))
        slot_chrf.append(corpus_chrfpp(pairs, chrf_config))

    per_instance = tuple(
        InstanceSummary(
            id=inst.id,
            ms_bleu=bleu_results[i].score,
            ms_chrf=chrf_results[i].score,
            self_bleu=self_scores[inst.id],
        )
        for i, inst in enumerate(instances)
    )
    config = {
        "sentence_bleu": asdict(sentence_bleu_config),
        "corpus_bleu": asdict(corpus_bleu_config),
        "chrf": asdict(chrf_config),
        "allow_unequal": allow_unequal,
        "lowercase": lowercase,
    }
    return EvaluationReport(
        quality={
            "bleu": sum(slot_bleu) / n_slots,
            "chrfpp": sum(slot_chrf) / n_slots,
        },
        diversity={"self_bleu": mean_self, "ms_bleu": ms_bleu, "ms_chrf": ms_chrf},
        per_instance=per_instance,
        config=config,
    )


def _corpus_ms(instances, out_sents, ref_sents, metric, allow_unequal, max_workers):
    staged = [
        EvalInstanceView(inst.id, out_sents[inst.id], ref_sents[inst.id])
        for inst in instances
    ]
    return corpus_multi_score(staged, metric, allow_unequal=allow_unequal, max_workers=max_workers)


class EvalInstanceView:
    """Pre-tokenized stand-in for EvalInstance used inside evaluate_all so
    both metrics share Sentence objects (and their token caches)."""

    def __init__(self, id: str, outputs: list[Sentence], references: list[Sentence]):
        self.id = id
        self.outputs = outputs
        self.references = references
        self.output_sentences = outputs
        self.reference_sentences = references


def round2(value: float) -> str:
    """Decimal string with exactly two digits, half-up (54.666... -> '54.67')."""
    return str(Decimal(repr(float(value))).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _json_value(value):
    if isinstance(value, float):
        return _RawNumber(round2(value))
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in sorted(value.items())}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


class _RawNumber:
    def __init__(self, text: str):
        self.text = text


def _dump_canonical(value) -> str:
    if isinstance(value, _RawNumber):
        return value.text
    if isinstance(value, dict):
        items = ", ".join(f"{json.dumps(k)}: {_dump_canonical(v)}" for k, v in sorted(value.items()))
        return "{" + items + "}"
    if isinstance(value, list):
        return "[" + ", ".join(_dump_canonical(v) for v in value) + "]"
    return json.dumps(value, ensure_ascii=False)


def render(report: EvaluationReport, format: str = "table") -> bytes:
    """Render a report to bytes: canonical JSON (sorted keys, fixed
    two-decimal numbers), TSV with the standard column header, or an
    aligned text table. Rendering is deterministic; a missing Self-BLEU
    appears as "-" (TSV/table) or null (JSON)."""
    if format not in RENDER_FORMATS:
        raise ValueError(f"unknown report format {format!r}; choose from {RENDER_FORMATS}")
    values = {
        "BLEU": report.quality["bleu"],
        "CHRF++": report.quality["chrfpp"],
        "Self-B": report.diversity["self_bleu"],
        "MS-B": report.diversity["ms_bleu"],
        "MS-C": report.diversity["ms_chrf"],
    }
    if format == "tsv":
        header = "\t".join(_TSV_COLUMNS)
        row = "\t".join("-" if values[c] is None else round2(values[c]) for c in _TSV_COLUMNS)
        return (header + "\n" + row + "\n").encode("utf-8")
    if format == "json":
        payload = {
            "quality": report.quality,
            "diversity": report.diversity,
            "per_instance": [asdict(s) for s in report.per_instance],
            "config": report.config,
        }
        return (_dump_canonical(_json_value(payload)) + "\n").encode("utf-8")
    lines = ["metric    score", "------    -----"]
    for name in _TSV_COLUMNS:
        shown = "-" if values[name] is None else round2(values[name])
        lines.append(f"{name:<10}{shown:>7}")
    lines.append("")
    lines.append(f"instances: {len(report.per_instance)}")
    return ("\n".join(lines) + "\n").encode("utf-8")
