"""Text normalization, tokenization, and the shared sentence/corpus data model.

Raw text is stored verbatim as Python ``str`` (unicode scalars, no
normalization), so every tokenization is exactly reversible.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field

RawText = str

_PUNCT = set(string.punctuation)
_VOWELS = set("aeiouy")


@dataclass(frozen=True)
class TokenSeq:
    """A tokenized sentence with spans back into the originating text.

    ``spans`` are half-open (start, end) offsets in unicode code points,
    strictly increasing and non-overlapping; ``raw[start:end] == token``
    for every token, so the original text can always be reconstructed from
    the tokens plus the inter-span gaps.
    """

    tokens: tuple[str, ...]
    spans: tuple[tuple[int, int], ...]
    raw: RawText

    def __post_init__(self) -> None:
        if len(self.tokens) != len(self.spans):
            raise ValueError("tokens and spans must have equal length")

    def __len__(self) -> int:
        return len(self.tokens)

    def reconstruct(self) -> RawText:
        """Rebuild the original text from tokens and inter-span gaps."""
        parts = []
        pos = 0
        for token, (start, end) in zip(self.tokens, self.spans):
            parts.append(self.raw[pos:start])
            parts.append(token)
            pos = end
        parts.append(self.raw[pos:])
        return "".join(parts)


@dataclass(frozen=True)
class AlignedPair:
    """One source sentence with one or more reference simplifications.

    A source that was dropped entirely by the annotator is represented by a
    single empty reference, so ``references`` is never empty.
    """

    id: str
    source: RawText
    references: tuple[RawText, ...]

    def __post_init__(self) -> None:
        if not self.references:
            raise ValueError(f"pair {self.id!r} has no references")


@dataclass
class Corpus:
    pairs: list[AlignedPair] = field(default_factory=list)

    def __post_init__(self) -> None:
        ids = [p.id for p in self.pairs]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate pair ids: {dupes}")

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def tokenize(text: RawText, mode: str = "word") -> TokenSeq:
    """Split text into tokens with exact spans.

    word mode: whitespace split, then leading/trailing ASCII punctuation
    characters are peeled off into their own single-character tokens.
    Interior punctuation (hyphens, apostrophes) stays inside the token.
    char mode: one token per unicode scalar, whitespace included.
    """
    if mode == "char":
        tokens = tuple(text)
        spans = tuple((i, i + 1) for i in range(len(text)))
        return TokenSeq(tokens, spans, text)
    if mode != "word":
        raise ValueError(f"unknown tokenize mode: {mode!r}")

    tokens: list[str] = []
    spans: list[tuple[int, int]] = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        _split_chunk(text, i, j, tokens, spans)
        i = j
    return TokenSeq(tuple(tokens), tuple(spans), text)


def _split_chunk(text: str, start: int, end: int, tokens: list, spans: list) -> None:
    """Peel edge punctuation off text[start:end] into one-char tokens."""
    lo, hi = start, end
    lead: list[int] = []
    trail: list[int] = []
    while lo < hi and text[lo] in _PUNCT:
        lead.append(lo)
        lo += 1
    while hi > lo and text[hi - 1] in _PUNCT:
        trail.append(hi - 1)
        hi -= 1
    for p in lead:
        tokens.append(text[p])
        spans.append((p, p + 1))
    if lo < hi:
        tokens.append(text[lo:hi])
        spans.append((lo, hi))
    for p in reversed(trail):
        tokens.append(text[p])
        spans.append((p, p + 1))


def detokenize(tokens) -> RawText:
    """Join tokens with spaces, attaching closing punctuation to the left.

    Inverse-ish of word tokenization for generated token streams: no space
    is inserted before . , ! ? ; : ) ] or closing quotes, and none after
    ( [ or opening quotes.
    """
    no_space_before = set(".,!?;:)]}'’”%")
    no_space_after = set("([{‘“")
    out: list[str] = []
    for tok in tokens:
        if not out:
            out.append(tok)
        elif tok and tok[0] in no_space_before and len(tok) == 1:
            out.append(tok)
        elif out[-1] and len(out[-1]) == 1 and out[-1] in no_space_after:
            out.append(tok)
        else:
            out.append(" " + tok)
    return "".join(out)


def is_word_token(token: str) -> bool:
    """True unless the token consists solely of punctuation characters."""
    return bool(token) and not all(c in _PUNCT for c in token)


def count_words(text: RawText) -> int:
    """Number of word-mode tokens that are not punctuation-only."""
    return sum(1 for t in tokenize(text, "word").tokens if is_word_token(t))


def count_syllables(word: str) -> int:
    """Heuristic syllable count: vowel-letter runs, minimum one.

    Counts maximal runs of vowel letters (aeiouy, case-insensitive;
    non-letters break runs), then subtracts one for a terminal silent "e".
    A terminal "e" is treated as non-silent when the word ends in "le"
    preceded by a consonant ("table", "little"), and is never subtracted
    when doing so would leave zero syllables ("the", "see").
    """
    if not word:
        raise ValueError("count_syllables requires a non-empty word")
    w = word.lower()
    runs = 0
    in_run = False
    for c in w:
        if c in _VOWELS:
            if not in_run:
                runs += 1
            in_run = True
        else:
            in_run = False
    if runs > 1 and w.endswith("e") and not _ends_consonant_le(w):
        runs -= 1
    return max(runs, 1)


def _ends_consonant_le(w: str) -> bool:
    return len(w) >= 3 and w.endswith("le") and w[-3] not in _VOWELS and w[-3].isalpha()
