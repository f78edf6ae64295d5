"""Character-level edit distance and token-level edit opcodes.

The opcode alignment follows the Ratcliff-Obershelp recursive
longest-matching-block scheme with junk heuristics disabled, so short
sentences diff deterministically and every token of both sequences is
covered by exactly one opcode.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

EQUAL = "equal"
REPLACE = "replace"
INSERT = "insert"
DELETE = "delete"


@dataclass(frozen=True)
class Opcode:
    """One aligned edit operation over half-open token ranges."""

    tag: str
    src_start: int
    src_end: int
    tgt_start: int
    tgt_end: int

    @property
    def src_range(self) -> tuple[int, int]:
        return (self.src_start, self.src_end)

    @property
    def tgt_range(self) -> tuple[int, int]:
        return (self.tgt_start, self.tgt_end)


OpcodeAlignment = list[Opcode]


def levenshtein(a: str, b: str) -> int:
    """Minimum number of single-character insert/delete/substitute edits."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(b) > len(a):
        a, b = b, a
    prev = list(range(len(b) + 1))
    cur = [0] * (len(b) + 1)
    for i, ca in enumerate(a, start=1):
        cur[0] = i
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
        prev, cur = cur, prev
    return prev[len(b)]


def _tokens(seq) -> Sequence[str]:
    return seq.tokens if hasattr(seq, "tokens") else seq


def _find_longest_match(a, b, b2j, alo, ahi, blo, bhi):
    """Longest block a[i:i+k] == b[j:j+k] inside the given windows.

    Ties resolve exactly like the reference matcher: the inner DP keeps the
    first maximal block it completes while scanning i ascending and the
    positions of a[i] in b ascending.
    """
    besti, bestj, bestsize = alo, blo, 0
    j2len: dict[int, int] = {}
    for i in range(alo, ahi):
        newj2len: dict[int, int] = {}
        for j in b2j.get(a[i], ()):
            if j < blo:
                continue
            if j >= bhi:
                break
            k = newj2len[j] = j2len.get(j - 1, 0) + 1
            if k > bestsize:
                besti, bestj, bestsize = i - k + 1, j - k + 1, k
        j2len = newj2len
    return besti, bestj, bestsize


def matching_blocks(source, target) -> list[tuple[int, int, int]]:
    """Non-overlapping maximal matching blocks (i, j, size), in order.

    Adjacent blocks are coalesced; a terminal (len(a), len(b), 0) sentinel
    closes the list.
    """
    a = _tokens(source)
    b = _tokens(target)
    b2j: dict[str, list[int]] = {}
    for j, tok in enumerate(b):
        b2j.setdefault(tok, []).append(j)

    queue = [(0, len(a), 0, len(b))]
    blocks: list[tuple[int, int, int]] = []
    while queue:
        alo, ahi, blo, bhi = queue.pop()
        i, j, k = _find_longest_match(a, b, b2j, alo, ahi, blo, bhi)
        if k:
            blocks.append((i, j, k))
            if alo < i and blo < j:
                queue.append((alo, i, blo, j))
            if i + k < ahi and j + k < bhi:
                queue.append((i + k, ahi, j + k, bhi))
    blocks.sort()

    merged: list[tuple[int, int, int]] = []
    mi = mj = msize = 0
    for i, j, k in blocks:
        if mi + msize == i and mj + msize == j:
            msize += k
        else:
            if msize:
                merged.append((mi, mj, msize))
            mi, mj, msize = i, j, k
    if msize:
        merged.append((mi, mj, msize))
    merged.append((len(a), len(b), 0))
    return merged


def opcodes(source, target) -> OpcodeAlignment:
    """Edit operations transforming the source token sequence into the target.

    The src ranges partition [0, len(source)) and the tgt ranges partition
    [0, len(target)), both in order.
    """
    ops: OpcodeAlignment = []
    i = j = 0
    for ai, bj, size in matching_blocks(source, target):
        tag = ""
        if i < ai and j < bj:
            tag = REPLACE
        elif i < ai:
            tag = DELETE
        elif j < bj:
            tag = INSERT
        if tag:
            ops.append(Opcode(tag, i, ai, j, bj))
        i, j = ai + size, bj + size
        if size:
            ops.append(Opcode(EQUAL, ai, i, bj, j))
    return ops


def apply_opcodes(ops: OpcodeAlignment, source, target) -> list[str]:
    """Replay opcodes against the source, drawing edited spans from target."""
    a = _tokens(source)
    b = _tokens(target)
    out: list[str] = []
    for op in ops:
        if op.tag == EQUAL:
            out.extend(a[op.src_start : op.src_end])
        elif op.tag in (REPLACE, INSERT):
            out.extend(b[op.tgt_start : op.tgt_end])
    return out


def edited_target_mask(ops: OpcodeAlignment, target_len: int) -> list[bool]:
    """mask[i] is True iff target token i sits inside a replace or insert op."""
    covered = ops[-1].tgt_end if ops else 0
    if covered != target_len:
        raise ValueError(
            f"alignment covers {covered} target tokens, expected {target_len}"
        )
    mask = [False] * target_len
    for op in ops:
        if op.tag in (REPLACE, INSERT):
            for i in range(op.tgt_start, op.tgt_end):
                mask[i] = True
    return mask
