"""JSONL corpus formats: aligned pair files, prediction files, manifests.

Pair files carry one {"id", "source", "references"} object per line;
prediction files carry {"id", "text"}. Everything is UTF-8 and the writers
are byte-deterministic so identical runs produce identical files.
"""

from __future__ import annotations

import hashlib
import json
from typing import Mapping, TextIO

from .text import AlignedPair, Corpus


class PairFileError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def parse_pair_line(line: str, lineno: int) -> AlignedPair:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise PairFileError(lineno, f"invalid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise PairFileError(lineno, "expected a JSON object")
    try:
        pair_id = str(obj["id"])
        source = obj["source"]
        references = obj["references"]
    except KeyError as exc:
        raise PairFileError(lineno, f"missing field {exc.args[0]!r}") from exc
    if not isinstance(source, str):
        raise PairFileError(lineno, "source must be a string")
    if (
        not isinstance(references, list)
        or not references
        or not all(isinstance(r, str) for r in references)
    ):
        raise PairFileError(lineno, "references must be a non-empty list of strings")
    return AlignedPair(pair_id, source, tuple(references))


def read_pairs(fp: TextIO) -> Corpus:
    pairs = []
    for lineno, line in enumerate(fp, start=1):
        if not line.strip():
            continue
        pairs.append(parse_pair_line(line, lineno))
    return Corpus(pairs)


def load_pairs(path) -> Corpus:
    with open(path, encoding="utf-8") as fp:
        return read_pairs(fp)


def pair_to_json(pair: AlignedPair) -> str:
    return json.dumps(
        {"id": pair.id, "source": pair.source, "references": list(pair.references)},
        ensure_ascii=False,
    )


def write_pairs(corpus: Corpus, fp: TextIO) -> None:
    for pair in corpus:
        fp.write(pair_to_json(pair) + "\n")


def save_pairs(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        write_pairs(corpus, fp)


def read_outputs(fp: TextIO) -> dict[str, str]:
    outputs: dict[str, str] = {}
    for lineno, line in enumerate(fp, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            out_id = str(obj["id"])
            text = obj["text"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise PairFileError(lineno, f"malformed output record: {exc}") from exc
        if not isinstance(text, str):
            raise PairFileError(lineno, "text must be a string")
        if out_id in outputs:
            raise PairFileError(lineno, f"duplicate output id {out_id!r}")
        outputs[out_id] = text
    return outputs


def load_outputs(path) -> dict[str, str]:
    with open(path, encoding="utf-8") as fp:
        return read_outputs(fp)


def write_outputs(outputs: Mapping[str, str], fp: TextIO) -> None:
    for out_id in outputs:
        fp.write(json.dumps({"id": out_id, "text": outputs[out_id]}, ensure_ascii=False) + "\n")


def save_outputs(outputs: Mapping[str, str], path) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        write_outputs(outputs, fp)


def corpus_hash(corpus: Corpus) -> str:
    """sha256 over the canonical JSONL form, for run manifests."""
    h = hashlib.sha256()
    for pair in corpus:
        h.update(pair_to_json(pair).encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def write_manifest(manifest: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        json.dump(manifest, fp, indent=2, sort_keys=True, ensure_ascii=False)
        fp.write("\n")
