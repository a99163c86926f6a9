"""Ingestion and validation of multi-reference evaluation data.

The canonical interchange format is JSON Lines: UTF-8, one object per line,
with fields ``id`` (required string), ``category`` (optional string),
``references`` (required non-empty string array) and ``outputs`` (optional
string array, absent for reference-only datasets). A plain-text importer
covers the shared-task layout of parallel ``ref0.txt``/``out0.txt`` files.
"""

from __future__ import annotations

import json
import os
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .multiscore import EvalInstance

__all__ = [
    "Dataset",
    "DatasetStats",
    "load_jsonl",
    "save_jsonl",
    "load_outputs_jsonl",
    "save_outputs_jsonl",
    "load_parallel_text",
    "bind_outputs",
    "load_bundled",
    "bundled_json",
]


@dataclass(frozen=True)
class DatasetStats:
    instances: int
    references_histogram: dict[int, int]
    outputs_histogram: dict[int, int]


@dataclass(frozen=True)
class Dataset:
    """An ordered, immutable collection of evaluation instances."""

    instances: tuple[EvalInstance, ...]
    source_path: str = ""

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        seen: dict[str, int] = {}
        for pos, inst in enumerate(self.instances):
            if inst.id in seen:
                raise ValueError(f"duplicate instance id {inst.id!r} (positions {seen[inst.id]} and {pos})")
            seen[inst.id] = pos

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    @property
    def stats(self) -> DatasetStats:
        return DatasetStats(
            instances=len(self.instances),
            references_histogram=dict(sorted(Counter(len(i.references) for i in self.instances).items())),
            outputs_histogram=dict(sorted(Counter(len(i.outputs) for i in self.instances).items())),
        )


def _parse_line(obj, line_no: int) -> EvalInstance:
    if not isinstance(obj, dict):
        raise ValueError(f"line {line_no}: expected a JSON object, got {type(obj).__name__}")
    unknown = set(obj) - {"id", "category", "references", "outputs"}
    if unknown:
        raise ValueError(f"line {line_no}: unknown fields {sorted(unknown)}")
    if "id" not in obj or not isinstance(obj["id"], str):
        raise ValueError(f"line {line_no}: missing or non-string 'id'")
    if "references" not in obj:
        raise ValueError(f"line {line_no}: missing 'references'")
    refs = obj["references"]
    if not isinstance(refs, list) or not refs or not all(isinstance(r, str) for r in refs):
        raise ValueError(f"line {line_no}: 'references' must be a non-empty string array")
    outs = obj.get("outputs", [])
    if not isinstance(outs, list) or not all(isinstance(o, str) for o in outs):
        raise ValueError(f"line {line_no}: 'outputs' must be a string array")
    category = obj.get("category")
    if category is not None and not isinstance(category, str):
        raise ValueError(f"line {line_no}: 'category' must be a string")
    try:
        return EvalInstance(id=obj["id"], references=tuple(refs), outputs=tuple(outs), category=category)
    except ValueError as exc:
        raise ValueError(f"line {line_no}: {exc}") from None


def load_jsonl(path) -> Dataset:
    """Load a dataset from a JSON Lines file, preserving line order.

    Raises ValueError naming the offending line for malformed JSON, schema
    violations, or duplicate ids; I/O failures propagate as OSError.
    """
    path = os.fspath(path)
    instances: list[EvalInstance] = []
    id_lines: dict[str, int] = {}
    with open(path, encoding="utf-8-sig") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                raise ValueError(f"line {line_no}: empty line in JSONL file")
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"line {line_no}: malformed JSON ({exc.msg})") from None
            inst = _parse_line(obj, line_no)
            if inst.id in id_lines:
                raise ValueError(f"duplicate id {inst.id!r} on lines {id_lines[inst.id]} and {line_no}")
            id_lines[inst.id] = line_no
            instances.append(inst)
    if not instances:
        raise ValueError(f"{path}: dataset is empty")
    return Dataset(instances=tuple(instances), source_path=path)


def _instance_to_obj(inst: EvalInstance) -> dict:
    obj: dict = {"id": inst.id}
    if inst.category is not None:
        obj["category"] = inst.category
    obj["references"] = list(inst.references)
    if inst.outputs:
        obj["outputs"] = list(inst.outputs)
    return obj


def save_jsonl(dataset: Dataset, path) -> None:
    """Write a dataset back to JSON Lines (UTF-8, LF endings); loading the
    result yields an equal dataset."""
    with open(os.fspath(path), "w", encoding="utf-8", newline="\n") as fh:
        for inst in dataset:
            fh.write(json.dumps(_instance_to_obj(inst), ensure_ascii=False) + "\n")


def load_outputs_jsonl(path) -> dict[str, list[str]]:
    """Load a system-outputs file: one object per line with ``id`` and a
    non-empty ``outputs`` string array (generation metadata fields
    ``strategy``, ``seed`` and ``flags`` are tolerated and ignored)."""
    path = os.fspath(path)
    outputs: dict[str, list[str]] = {}
    id_lines: dict[str, int] = {}
    with open(path, encoding="utf-8-sig") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                raise ValueError(f"line {line_no}: empty line in JSONL file")
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"line {line_no}: malformed JSON ({exc.msg})") from None
            if not isinstance(obj, dict) or "id" not in obj or not isinstance(obj["id"], str):
                raise ValueError(f"line {line_no}: missing or non-string 'id'")
            outs = obj.get("outputs")
            if not isinstance(outs, list) or not outs or not all(isinstance(o, str) for o in outs):
                raise ValueError(f"line {line_no}: 'outputs' must be a non-empty string array")
            if obj["id"] in id_lines:
                raise ValueError(f"duplicate id {obj['id']!r} on lines {id_lines[obj['id']]} and {line_no}")
            id_lines[obj["id"]] = line_no
            outputs[obj["id"]] = list(outs)
    if not outputs:
        raise ValueError(f"{path}: outputs file is empty")
    return outputs


def save_outputs_jsonl(records: Sequence[dict], path) -> None:
    """Write generation records (dicts with at least ``id`` and ``outputs``)
    as JSON Lines."""
    with open(os.fspath(path), "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


_REF_FILE = re.compile(r"^ref(\d+)\.txt$")
_OUT_FILE = re.compile(r"^out(\d+)\.txt$")


def _read_columns(directory, pattern) -> list[list[str]]:
    directory = Path(directory)
    files = sorted(
        (int(m.group(1)), p) for p in directory.iterdir() if (m := pattern.match(p.name))
    )
    if not files:
        raise ValueError(f"{directory}: no files matching the parallel-text layout")
    columns = []
    for _, p in files:
        columns.append(p.read_text(encoding="utf-8-sig").splitlines())
    lengths = {len(col) for col in columns}
    if len(lengths) > 1:
        names = ", ".join(f"{p.name}={len(c)}" for (_, p), c in zip(files, columns))
        raise ValueError(f"{directory}: mismatched line counts across files ({names})")
    return columns


def load_parallel_text(refs_dir, outputs_dir=None) -> Dataset:
    """Assemble a dataset from the shared-task plain-text layout.

    ``refs_dir`` holds ``ref0.txt``, ``ref1.txt``, ... of equal line counts;
    instance k is built from line k of every file. An empty line marks a
    missing slot for that instance and is dropped from its set. With
    ``outputs_dir``, files ``out0.txt``, ... of the same line count attach
    outputs the same way.
    """
    ref_cols = _read_columns(refs_dir, _REF_FILE)
    n_lines = len(ref_cols[0])
    out_cols: list[list[str]] = []
    if outputs_dir is not None:
        out_cols = _read_columns(outputs_dir, _OUT_FILE)
        if len(out_cols[0]) != n_lines:
            raise ValueError(
                f"outputs have {len(out_cols[0])} lines but references have {n_lines}"
            )
    instances = []
    for k in range(n_lines):
        refs = tuple(col[k].strip() for col in ref_cols if col[k].strip())
        if not refs:
            raise ValueError(f"instance {k}: all reference slots are empty")
        outs = tuple(col[k].strip() for col in out_cols if col[k].strip())
        instances.append(EvalInstance(id=str(k), references=refs, outputs=outs))
    return Dataset(instances=tuple(instances), source_path=os.fspath(refs_dir))


def load_bundled(name: str = "demo_corpus.jsonl") -> Dataset:
    """Load one of the datasets shipped with the package."""
    ref = resources.files("multiscore").joinpath("data").joinpath(name)
    with resources.as_file(ref) as path:
        return load_jsonl(path)


def bundled_json(name: str):
    """Parse one of the JSON fixtures shipped with the package."""
    ref = resources.files("multiscore").joinpath("data").joinpath(name)
    return json.loads(ref.read_text(encoding="utf-8"))


def bind_outputs(dataset: Dataset, outputs: Mapping[str, Sequence[str]]) -> Dataset:
    """Attach one output list per instance id, replacing any existing
    outputs. Every dataset id must be covered and no unknown ids allowed."""
    known = {inst.id for inst in dataset}
    unknown = set(outputs) - known
    if unknown:
        raise ValueError(f"outputs name unknown instance ids: {sorted(unknown)}")
    missing = known - set(outputs)
    if missing:
        raise ValueError(f"outputs missing for instance ids: {sorted(missing)}")
    rebound = []
    for inst in dataset:
        outs = tuple(outputs[inst.id])
        if not outs:
            raise ValueError(f"instance {inst.id!r}: bound output list is empty")
        rebound.append(
            EvalInstance(id=inst.id, references=inst.references, outputs=outs, category=inst.category)
        )
    return Dataset(instances=tuple(rebound), source_path=dataset.source_path)
