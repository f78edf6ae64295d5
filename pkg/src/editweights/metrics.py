"""Simplification evaluation metrics and corpus-level aggregation.

SARI follows the released reference script's n-gram multiset algebra with
one pinned convention: a precision or recall whose candidate set is empty
counts as 1, so a component with no candidate n-grams on either side
scores 1 (identical source/output/reference therefore scores 100, not 33).
Known divergences between SARI implementations live exactly here, which is
why the convention is frozen by golden tests.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import asdict, dataclass
from importlib import resources
from typing import Iterable, Mapping, Sequence, TextIO

from .diff import levenshtein
from .text import Corpus, TokenSeq, count_syllables, count_words, is_word_token, tokenize

MAX_NGRAM_ORDER = 4


def _tokens(seq) -> Sequence[str]:
    return seq.tokens if isinstance(seq, TokenSeq) else seq


def _ngrams(tokens: Sequence[str], n: int) -> list[tuple[str, ...]]:
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def _sari_ngram_scores(
    src: list, out: list, refs: list[list], numref: int
) -> tuple[float, float, float]:
    """(keep, delete, add) scores for one n-gram order.

    Source and output counts are replicated ``numref`` times so they compare
    against the references' combined multiset; denominators count distinct
    n-grams. Delete is precision-only.
    """
    s_rep = Counter({g: c * numref for g, c in Counter(src).items()})
    c_rep = Counter({g: c * numref for g, c in Counter(out).items()})
    r_all = Counter(g for ref in refs for g in ref)

    # keep: n-grams retained from the source
    keep_cand = s_rep & c_rep
    keep_good = keep_cand & r_all
    keep_all = s_rep & r_all
    p_num = sum(keep_good[g] / keep_cand[g] for g in keep_good)
    r_num = sum(keep_good[g] / keep_all[g] for g in keep_good)
    keep_p = p_num / len(keep_cand) if keep_cand else 1.0
    keep_r = r_num / len(keep_all) if keep_all else 1.0
    keep = _f1(keep_p, keep_r)

    # delete: n-grams dropped from the source (precision only)
    del_cand = s_rep - c_rep
    del_good = del_cand - r_all
    del_num = sum(del_good[g] / del_cand[g] for g in del_good)
    delete = del_num / len(del_cand) if del_cand else 1.0

    # add: n-grams newly introduced by the output
    add_cand = set(c_rep) - set(s_rep)
    add_good = add_cand & set(r_all)
    add_all = set(r_all) - set(s_rep)
    add_p = len(add_good) / len(add_cand) if add_cand else 1.0
    add_r = len(add_good) / len(add_all) if add_all else 1.0
    add = _f1(add_p, add_r)

    return keep, delete, add


def sari(source, output, references) -> float:
    """SARI on 0-100: mean over n in 1..4 of mean(keep, delete, add).

    Token comparison is case-insensitive, matching the reference script.
    """
    refs = [references] if isinstance(references, TokenSeq) else list(references)
    if not refs:
        raise ValueError("sari requires at least one reference")
    src = [t.lower() for t in _tokens(source)]
    out = [t.lower() for t in _tokens(output)]
    ref_tokens = [[t.lower() for t in _tokens(r)] for r in refs]

    keeps, deletes, adds = [], [], []
    for n in range(1, MAX_NGRAM_ORDER + 1):
        k, d, a = _sari_ngram_scores(
            _ngrams(src, n),
            _ngrams(out, n),
            [_ngrams(r, n) for r in ref_tokens],
            len(ref_tokens),
        )
        keeps.append(k)
        deletes.append(d)
        adds.append(a)
    avg = (
        sum(keeps) / MAX_NGRAM_ORDER
        + sum(deletes) / MAX_NGRAM_ORDER
        + sum(adds) / MAX_NGRAM_ORDER
    ) / 3
    return 100.0 * avg


def _closest_ref_len(out_len: int, refs: Sequence[Sequence[str]]) -> int:
    return len(min(refs, key=lambda r: (abs(len(r) - out_len), len(r))))


def bleu(outputs: Sequence, references: Sequence[Sequence]) -> float:
    """Corpus-level BLEU-4 on 0-100.

    Clipped n-gram precision against the per-sentence maximum reference
    counts, geometric mean over orders, multiplied by the brevity penalty
    (closest reference length, ties to the shorter). Orders with no
    candidate n-grams anywhere are dropped from the mean; when any kept
    order has zero matches, orders 2..4 get add-one smoothing, which is why
    an all-empty system scores 0 while near-empty ones score just above it.
    """
    if len(outputs) != len(references):
        raise ValueError(
            f"{len(outputs)} outputs vs {len(references)} reference lists"
        )
    matches = [0] * (MAX_NGRAM_ORDER + 1)
    totals = [0] * (MAX_NGRAM_ORDER + 1)
    c_total = 0
    r_total = 0
    for out, refs in zip(outputs, references):
        out_t = _tokens(out)
        refs_t = [_tokens(r) for r in refs]
        if not refs_t:
            raise ValueError("every output needs at least one reference")
        c_total += len(out_t)
        r_total += _closest_ref_len(len(out_t), refs_t)
        for n in range(1, MAX_NGRAM_ORDER + 1):
            out_counts = Counter(_ngrams(out_t, n))
            if not out_counts:
                continue
            max_ref: Counter = Counter()
            for ref in refs_t:
                for g, c in Counter(_ngrams(ref, n)).items():
                    if c > max_ref[g]:
                        max_ref[g] = c
            totals[n] += sum(out_counts.values())
            matches[n] += sum(min(c, max_ref[g]) for g, c in out_counts.items())
    if c_total == 0:
        return 0.0
    orders = [n for n in range(1, MAX_NGRAM_ORDER + 1) if totals[n] > 0]
    smooth = any(matches[n] == 0 for n in orders)
    log_sum = 0.0
    for n in orders:
        if smooth and n >= 2:
            p = (matches[n] + 1) / (totals[n] + 1)
        else:
            p = matches[n] / totals[n]
        if p == 0.0:
            return 0.0
        log_sum += math.log(p)
    bp = 1.0 if c_total >= r_total else math.exp(1.0 - r_total / c_total)
    return 100.0 * bp * math.exp(log_sum / len(orders))


def _lcs_len(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(output, reference) -> float:
    """LCS-based F1 (beta = 1) over tokens, on 0-100; 0 when both empty."""
    out = _tokens(output)
    ref = _tokens(reference)
    lcs = _lcs_len(out, ref)
    if lcs == 0:
        return 0.0
    p = lcs / len(out)
    r = lcs / len(ref)
    return 100.0 * _f1(p, r)


def rouge_l_best(output, references) -> float:
    """Maximum ROUGE-L over one or more references."""
    refs = [references] if isinstance(references, TokenSeq) else list(references)
    if not refs:
        raise ValueError("rouge_l_best requires at least one reference")
    return max(rouge_l(output, r) for r in refs)


_SENTENCE_SPLIT = re.compile(r"[.!?]+")
_WORDISH = re.compile(r"\w")


def count_sentences(text: str) -> int:
    """Terminal-punctuation segments containing a word character, minimum 1."""
    segments = _SENTENCE_SPLIT.split(text)
    n = sum(1 for seg in segments if _WORDISH.search(seg))
    return max(1, n)


def fkgl(text: str) -> float:
    """Flesch-Kincaid Grade Level.

    0.39 * words/sentences + 11.8 * syllables/words - 15.59, with both
    ratios defined as 0 for wordless text (so the empty string scores
    -15.59).
    """
    words = [t for t in tokenize(text, "word").tokens if is_word_token(t)]
    if not words:
        return 0.39 * 0.0 + 11.8 * 0.0 - 15.59
    sentences = count_sentences(text)
    syllables = sum(count_syllables(w) for w in words)
    return 0.39 * (len(words) / sentences) + 11.8 * (syllables / len(words)) - 15.59


@dataclass(frozen=True)
class EasyWordList:
    """Case-insensitive set of words not counted as difficult."""

    words: frozenset[str]

    def __post_init__(self) -> None:
        if not self.words:
            raise ValueError("easy word list is empty")

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.words

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "EasyWordList":
        words = frozenset(
            w.strip().lower() for w in lines if w.strip() and not w.startswith("#")
        )
        return cls(words)

    @classmethod
    def from_file(cls, path) -> "EasyWordList":
        with open(path, encoding="utf-8") as fp:
            return cls.from_lines(fp)

    @classmethod
    def bundled(cls) -> "EasyWordList":
        text = resources.files("editweights.data").joinpath("easy_words.txt").read_text(
            encoding="utf-8"
        )
        return cls.from_lines(text.splitlines())


def difficult_words(text: str, easy: EasyWordList) -> int:
    """Unique words with at least two syllables that are not easy-listed."""
    seen = set()
    for tok in tokenize(text, "word").tokens:
        if not is_word_token(tok):
            continue
        w = tok.lower()
        if w in seen:
            continue
        seen.add(w)
    return sum(1 for w in seen if count_syllables(w) >= 2 and w not in easy.words)


@dataclass(frozen=True)
class SentenceEval:
    id: str
    sari: float
    bleu: float
    rouge_l: float
    fkgl: float
    difficult_words: int
    word_count: int
    edit_distance: int


@dataclass(frozen=True)
class CorpusEval:
    pair_count: int
    sari: float
    bleu: float
    rouge_l: float
    fkgl: float
    difficult_words: float
    word_count: float
    edit_distance: float


@dataclass(frozen=True)
class EvalReport:
    per_sentence: tuple[SentenceEval, ...]
    corpus: CorpusEval

    def to_dict(self) -> dict:
        return {
            "per_sentence": [asdict(s) for s in self.per_sentence],
            "corpus": asdict(self.corpus),
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def evaluate_corpus(
    corpus: Corpus,
    outputs: Mapping[str, str],
    easy: EasyWordList | None = None,
) -> EvalReport:
    """Per-sentence metrics plus corpus aggregates, ordered by pair id.

    Aggregates are arithmetic means except BLEU, which is the corpus-level
    score. Iteration order of ``outputs`` never affects the result.
    """
    missing = sorted(p.id for p in corpus if p.id not in outputs)
    if missing:
        raise ValueError(f"outputs missing for ids: {missing}")
    if easy is None:
        easy = EasyWordList.bundled()

    pairs = sorted(corpus.pairs, key=lambda p: p.id)
    rows: list[SentenceEval] = []
    all_out_tokens = []
    all_ref_tokens = []
    for pair in pairs:
        out_text = outputs[pair.id]
        out_tok = tokenize(out_text, "word")
        src_tok = tokenize(pair.source, "word")
        ref_toks = [tokenize(r, "word") for r in pair.references]
        all_out_tokens.append(out_tok)
        all_ref_tokens.append(ref_toks)
        rows.append(
            SentenceEval(
                id=pair.id,
                sari=sari(src_tok, out_tok, ref_toks),
                bleu=bleu([out_tok], [ref_toks]),
                rouge_l=rouge_l_best(out_tok, ref_toks),
                fkgl=fkgl(out_text),
                difficult_words=difficult_words(out_text, easy),
                word_count=count_words(out_text),
                edit_distance=levenshtein(pair.source, out_text),
            )
        )

    n = len(rows)
    if n == 0:
        raise ValueError("cannot evaluate an empty corpus")
    corpus_eval = CorpusEval(
        pair_count=n,
        sari=sum(r.sari for r in rows) / n,
        bleu=bleu(all_out_tokens, all_ref_tokens),
        rouge_l=sum(r.rouge_l for r in rows) / n,
        fkgl=sum(r.fkgl for r in rows) / n,
        difficult_words=sum(r.difficult_words for r in rows) / n,
        word_count=sum(r.word_count for r in rows) / n,
        edit_distance=sum(r.edit_distance for r in rows) / n,
    )
    return EvalReport(tuple(rows), corpus_eval)


def render_table(report: EvalReport, label: str = "system") -> str:
    """Plain-text metrics table grouped into similarity / simplicity / edits."""
    c = report.corpus
    header = (
        f"{'':<12} {'SARI':>7} {'BLEU':>7} {'ROUGE-L':>8} | "
        f"{'FKGL':>7} {'Difficult':>9} {'#Words':>7} | {'EditDist':>8}"
    )
    row = (
        f"{label:<12} {c.sari:>7.1f} {c.bleu:>7.1f} {c.rouge_l:>8.1f} | "
        f"{c.fkgl:>7.1f} {c.difficult_words:>9.1f} {c.word_count:>7.1f} | "
        f"{c.edit_distance:>8.1f}"
    )
    return header + "\n" + row


def write_scatter_csv(report: EvalReport, fp: TextIO) -> None:
    """Edit-distance vs SARI points: one row per sentence plus the corpus row."""
    fp.write("unit,id,edit_distance,sari\n")
    for s in report.per_sentence:
        fp.write(f"sentence,{s.id},{s.edit_distance},{s.sari!r}\n")
    c = report.corpus
    fp.write(f"corpus,,{c.edit_distance!r},{c.sari!r}\n")
