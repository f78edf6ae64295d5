"""Sentence-level and token-level loss weights derived from edits.

Sentence weights map a pair's character edit distance through a calibrated
curve w(d) with w(mean_distance) = 1, so an averagely-edited pair trains
exactly like unweighted cross entropy. Token weights raise the loss of
every target token inside an insert or replace opcode to lambda and leave
untouched tokens at 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, TextIO

from .diff import edited_target_mask, levenshtein, opcodes
from .text import Corpus, TokenSeq, tokenize

DEFAULT_MEAN_DISTANCE = 86.49

LINEAR = "linear"
QUADRATIC = "quadratic"


@dataclass(frozen=True)
class SentenceWeightFn:
    """Calibrated sentence weight curve.

    linear:    w(d) = a + (1 - a) * d / mu
    quadratic: w(d) = a + (1 - a) * (d / mu)**2

    Both pass through w(mu) = 1 exactly and are non-decreasing on [0, inf)
    for 0 <= a <= 1. ``mu`` defaults to the mean character edit distance of
    the PLABA training pairs and should be recomputed for other corpora.
    """

    shape: str = LINEAR
    mu: float = DEFAULT_MEAN_DISTANCE
    offset: float = 0.0

    def __post_init__(self) -> None:
        if self.shape not in (LINEAR, QUADRATIC):
            raise ValueError(f"unknown weight shape: {self.shape!r}")
        if self.mu <= 0:
            raise ValueError(f"mean distance mu must be positive, got {self.mu}")
        if not 0.0 <= self.offset <= 1.0:
            raise ValueError(f"offset must lie in [0, 1], got {self.offset}")

    def __call__(self, d: float) -> float:
        return sentence_weight(self, d)


def sentence_weight(fn: SentenceWeightFn, d: float) -> float:
    if d < 0:
        raise ValueError(f"edit distance must be non-negative, got {d}")
    x = d / fn.mu
    if fn.shape == QUADRATIC:
        x = x * x
    return fn.offset + (1.0 - fn.offset) * x


def token_weights(source, target, lam: float) -> list[float]:
    """Per-target-token weights: lambda on edited tokens, 1 elsewhere."""
    if lam < 0:
        raise ValueError(f"lambda must be non-negative, got {lam}")
    src = source.tokens if isinstance(source, TokenSeq) else source
    tgt = target.tokens if isinstance(target, TokenSeq) else target
    mask = edited_target_mask(opcodes(src, tgt), len(tgt))
    return [lam if edited else 1.0 for edited in mask]


def pair_edit_distance(source: str, reference: str) -> int:
    """Character-level edit distance between raw texts, spaces included."""
    return levenshtein(source, reference)


def corpus_mean_edit_distance(corpus: Corpus) -> float:
    """Mean levenshtein(source, first reference) over all pairs."""
    if len(corpus) == 0:
        raise ValueError("cannot take the mean edit distance of an empty corpus")
    total = sum(pair_edit_distance(p.source, p.references[0]) for p in corpus)
    return total / len(corpus)


@dataclass(frozen=True)
class WeightRecord:
    """One exported weight line: a scalar sentence weight plus per-token weights."""

    id: str
    sentence_weight: float
    token_weights: tuple[float, ...]

    def to_json(self) -> str:
        return json.dumps(
            {
                "id": self.id,
                "sentence_weight": self.sentence_weight,
                "token_weights": list(self.token_weights),
            },
            ensure_ascii=False,
        )


def compute_weight_records(
    corpus: Corpus,
    mode: str,
    lam: float = 2.5,
    fn: SentenceWeightFn | None = None,
) -> list[WeightRecord]:
    """Weight records for every pair, against its first reference.

    mode "sentence" fills sentence_weight from ``fn`` and leaves token
    weights at 1; mode "token" fills token weights from lambda and leaves
    the sentence weight at 1.
    """
    if mode not in ("sentence", "token"):
        raise ValueError(f"unknown weighting mode: {mode!r}")
    if mode == "sentence" and fn is None:
        fn = SentenceWeightFn()
    records = []
    for pair in corpus:
        ref = pair.references[0]
        tgt_tokens = tokenize(ref, "word").tokens
        if mode == "sentence":
            sw = sentence_weight(fn, pair_edit_distance(pair.source, ref))
            tw = tuple(1.0 for _ in tgt_tokens)
        else:
            sw = 1.0
            src_tokens = tokenize(pair.source, "word").tokens
            tw = tuple(token_weights(src_tokens, tgt_tokens, lam))
        records.append(WeightRecord(pair.id, sw, tw))
    return records


def write_weights_jsonl(records: Iterable[WeightRecord], fp: TextIO) -> None:
    for rec in records:
        fp.write(rec.to_json() + "\n")


def read_weights_jsonl(fp: TextIO) -> dict[str, WeightRecord]:
    records: dict[str, WeightRecord] = {}
    for lineno, line in enumerate(fp, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            rec = WeightRecord(
                str(obj["id"]),
                float(obj["sentence_weight"]),
                tuple(float(w) for w in obj["token_weights"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed weight record on line {lineno}: {exc}") from exc
        records[rec.id] = rec
    return records
