"""Command-line entry point: evaluate stored outputs, inspect per-instance
matchings, or generate output sets with the toy decoding harness.

Exit codes: 0 success, 1 validation error, 2 I/O error. Reports go to
stdout (or --out, written atomically); diagnostics go to stderr only. The
environment variable MULTISCORE_THREADS (a positive integer) sets the
default worker count for per-instance evaluation; behavior is identical to
sequential evaluation.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile

import numpy as np

from .corpus import Dataset, bind_outputs, load_jsonl, load_outputs_jsonl
from .decoding import (
    STRATEGY_BEAM,
    STRATEGY_ENSEMBLE,
    STRATEGY_RANDOM,
    STRATEGY_TOPK,
    generate_ensemble,
    generate_random,
    generate_top3_beam,
    generate_topk_random,
    train_ngram,
)
from .metrics import SMOOTH_NONE, BleuConfig, BleuMetric, ChrfConfig, ChrfMetric
from .multiscore import corpus_multi_score
from .report import EvalInstanceView, evaluate_all, render, round2
from .text import Sentence, tokenize_words

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2

THREADS_ENV = "MULTISCORE_THREADS"

_STRATEGIES = {
    "beam3": STRATEGY_BEAM,
    "random": STRATEGY_RANDOM,
    "topk3": STRATEGY_TOPK,
    "ensemble": STRATEGY_ENSEMBLE,
}


def _workers() -> int | None:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def _write_atomic(path: str | None, payload: bytes) -> None:
    if path is None:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".multiscore-", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_bound_dataset(data_path: str, outputs_path: str | None) -> Dataset:
    dataset = load_jsonl(data_path)
    if outputs_path and outputs_path != "inline":
        dataset = bind_outputs(dataset, load_outputs_jsonl(outputs_path))
    else:
        missing = [inst.id for inst in dataset if not inst.outputs]
        if missing:
            raise ValueError(
                f"no outputs for instance ids {missing[:5]}"
                f"{'...' if len(missing) > 5 else ''}; pass --outputs or embed them in --data"
            )
    return dataset


def _add_metric_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--bleu-max-order", type=int, default=4, help="BLEU n-gram order (default 4)")
    parser.add_argument("--chrf-char-order", type=int, default=6, help="chrF++ character order (default 6)")
    parser.add_argument("--chrf-word-order", type=int, default=2, help="chrF++ word order (default 2)")
    parser.add_argument("--chrf-beta", type=float, default=2.0, help="chrF++ beta (default 2.0)")
    parser.add_argument("--no-lowercase", action="store_true", help="evaluate case-sensitively")


def _bleu_configs(args) -> tuple[BleuConfig, BleuConfig]:
    sent = BleuConfig(max_order=args.bleu_max_order)
    corp = BleuConfig(max_order=args.bleu_max_order, smoothing=SMOOTH_NONE)
    return sent, corp


def _cmd_evaluate(args) -> int:
    dataset = _load_bound_dataset(args.data, args.outputs)
    sent_cfg, corp_cfg = _bleu_configs(args)
    chrf_cfg = ChrfConfig(char_order=args.chrf_char_order, word_order=args.chrf_word_order, beta=args.chrf_beta)
    report = evaluate_all(
        dataset,
        sentence_bleu_config=sent_cfg,
        corpus_bleu_config=corp_cfg,
        chrf_config=chrf_cfg,
        allow_unequal=args.allow_unequal,
        lowercase=not args.no_lowercase,
        max_workers=_workers(),
    )
    _write_atomic(args.out, render(report, args.format))
    return EXIT_OK


def _matrix_lines(result) -> list[str]:
    lines = ["  matrix (outputs x references):"]
    for row in result.matrix.weights:
        lines.append("    " + " ".join(f"{round2(x):>7}" for x in row))
    pairs = " ".join(
        f"{r}->{c} ({round2(w)})" for (r, c), w in zip(result.matching.edges, result.matching.edge_weights)
    )
    lines.append(f"  matching: {pairs}")
    lines.append(f"  score: {round2(result.score)}")
    return lines


def _cmd_multiscore(args) -> int:
    dataset = _load_bound_dataset(args.data, args.outputs)
    sent_cfg, _ = _bleu_configs(args)
    chrf_cfg = ChrfConfig(char_order=args.chrf_char_order, word_order=args.chrf_word_order, beta=args.chrf_beta)
    if args.metric == "bleu":
        metric = BleuMetric(sent_cfg)
    else:
        metric = ChrfMetric(chrf_cfg)
    lowercase = not args.no_lowercase
    instances = dataset.instances
    if not lowercase:
        instances = tuple(
            EvalInstanceView(
                inst.id,
                [Sentence(o, lowercase=False) for o in inst.outputs],
                [Sentence(r, lowercase=False) for r in inst.references],
            )
            for inst in instances
        )
    mean, results = corpus_multi_score(instances, metric, allow_unequal=args.allow_unequal, max_workers=_workers())
    if args.format == "json":
        payload = {
            "metric": metric.name,
            "multi_score": round2(mean),
            "per_instance": [
                {
                    "id": r.instance_id,
                    "score": round2(r.score),
                    "matrix": [[round2(x) for x in row] for row in r.matrix.weights],
                    "matching": [
                        {"output": e[0], "reference": e[1], "weight": round2(w)}
                        for e, w in zip(r.matching.edges, r.matching.edge_weights)
                    ],
                }
                for r in results
            ]
            if args.per_instance
            else [],
        }
        text = json.dumps(payload, sort_keys=True, ensure_ascii=False) + "\n"
    else:
        lines = [f"MS-{metric.name.upper()}: {round2(mean)}"]
        if args.per_instance:
            for r in results:
                lines.append(f"instance {r.instance_id}")
                lines.extend(_matrix_lines(r))
        text = "\n".join(lines) + "\n"
    _write_atomic(args.out, text.encode("utf-8"))
    return EXIT_OK


def _instance_seed(seed: int, index: int) -> int:
    # stable per-instance substream: mixed, platform-independent
    return int(np.random.SeedSequence((seed, index)).generate_state(1)[0])


def _cmd_generate(args) -> int:
    dataset = load_jsonl(args.train)
    lowercase = not args.no_lowercase
    sequences = [
        tokenize_words(ref, lowercase=lowercase) for inst in dataset for ref in inst.references
    ]
    strategy = _STRATEGIES[args.strategy]
    if strategy == STRATEGY_ENSEMBLE:
        shards: list[list[list[str]]] = [[], [], []]
        for i, seq in enumerate(sequences):
            shards[i % 3].append(seq)
        models = [train_ngram(shard, order=args.order, add_k=args.add_k) for shard in shards]
        model = None
    else:
        model = train_ngram(sequences, order=args.order, add_k=args.add_k)
        models = None
    records = []
    for index, inst in enumerate(dataset):
        if strategy == STRATEGY_BEAM:
            gen = generate_top3_beam(
                model, beam_width=args.beam_width, max_len=args.max_len, alpha=args.alpha,
                instance_id=inst.id, seed=args.seed,
            )
        elif strategy == STRATEGY_ENSEMBLE:
            gen = generate_ensemble(
                models, beam_width=args.beam_width, max_len=args.max_len, alpha=args.alpha,
                instance_id=inst.id, seed=args.seed,
            )
        elif strategy == STRATEGY_RANDOM:
            gen = generate_random(
                model, seed=_instance_seed(args.seed, index), max_len=args.max_len, instance_id=inst.id,
            )
        else:
            gen = generate_topk_random(
                model, k=args.topk, seed=_instance_seed(args.seed, index), max_len=args.max_len,
                instance_id=inst.id,
            )
        record = {"id": inst.id, "outputs": list(gen.sentences), "strategy": gen.strategy, "seed": args.seed}
        if gen.flags:
            record["flags"] = list(gen.flags)
        records.append(record)
    payload = "".join(json.dumps(rec, ensure_ascii=False) + "\n" for rec in records).encode("utf-8")
    _write_atomic(args.out, payload)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multiscore",
        description="Joint quality/diversity evaluation of generated sentence sets.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("evaluate", help="full quality + diversity report")
    p_eval.add_argument("--data", required=True, help="dataset JSONL (id/category/references[/outputs])")
    p_eval.add_argument("--outputs", default=None, help="system outputs JSONL, or 'inline' to use --data's outputs")
    p_eval.add_argument("--format", choices=("json", "tsv", "table"), default="table")
    p_eval.add_argument("--out", default=None, help="write the report here instead of stdout (atomic)")
    p_eval.add_argument("--allow-unequal", action="store_true", help="permit output/reference size mismatch")
    _add_metric_flags(p_eval)
    p_eval.set_defaults(func=_cmd_evaluate)

    p_ms = sub.add_parser("multiscore", help="assignment-based set score only")
    p_ms.add_argument("--data", required=True)
    p_ms.add_argument("--outputs", default=None)
    p_ms.add_argument("--metric", choices=("bleu", "chrf"), default="bleu")
    p_ms.add_argument("--per-instance", action="store_true", help="emit each instance's matrix, matching and score")
    p_ms.add_argument("--format", choices=("json", "table"), default="table")
    p_ms.add_argument("--out", default=None)
    p_ms.add_argument("--allow-unequal", action="store_true")
    _add_metric_flags(p_ms)
    p_ms.set_defaults(func=_cmd_multiscore)

    p_gen = sub.add_parser("generate", help="generate 3-sentence output sets with the toy n-gram harness")
    p_gen.add_argument("--train", required=True, help="dataset JSONL whose references train the model")
    p_gen.add_argument("--order", type=int, default=3, help="n-gram order (default 3)")
    p_gen.add_argument("--strategy", choices=tuple(_STRATEGIES), required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True, help="outputs JSONL path (atomic write)")
    p_gen.add_argument("--add-k", type=float, default=0.1, help="add-k smoothing constant (default 0.1)")
    p_gen.add_argument("--max-len", type=int, default=64)
    p_gen.add_argument("--beam-width", type=int, default=10)
    p_gen.add_argument("--alpha", type=float, default=0.6, help="length-penalty strength (default 0.6)")
    p_gen.add_argument("--topk", type=int, default=3, help="candidate pool for topk3 (default 3)")
    p_gen.add_argument("--no-lowercase", action="store_true", help="train on cased tokens")
    p_gen.set_defaults(func=_cmd_generate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
