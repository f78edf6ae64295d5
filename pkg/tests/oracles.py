"""Independent reference implementations used only as test oracles.

These deliberately avoid the library's code paths: the edit distance is a
full-matrix DP rather than the two-row scan, and the SARI oracle counts
n-gram multisets with explicit dict arithmetic in the style of the
original released script (with empty candidate sets scoring 1).
"""

from __future__ import annotations


def levenshtein_dp(a: str, b: str) -> int:
    """Textbook full-matrix dynamic program."""
    m, n = len(a), len(b)
    table = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        table[i][0] = i
    for j in range(n + 1):
        table[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            table[i][j] = min(
                table[i - 1][j] + 1,
                table[i][j - 1] + 1,
                table[i - 1][j - 1] + cost,
            )
    return table[m][n]


def _grams(tokens, n):
    out = []
    for i in range(len(tokens) - n + 1):
        out.append(" ".join(tokens[i : i + n]))
    return out


def _tally(grams):
    counts = {}
    for g in grams:
        counts[g] = counts.get(g, 0) + 1
    return counts


def _sari_oracle_ngram(sgrams, cgrams, rgramslist, numref):
    rcounts = {}
    for rgrams in rgramslist:
        for g in rgrams:
            rcounts[g] = rcounts.get(g, 0) + 1
    scounts = {g: c * numref for g, c in _tally(sgrams).items()}
    ccounts = {g: c * numref for g, c in _tally(cgrams).items()}

    # keep
    keepcand = {}
    for g in scounts:
        if g in ccounts:
            keepcand[g] = min(scounts[g], ccounts[g])
    keepgood = {}
    for g in keepcand:
        if g in rcounts:
            got = min(keepcand[g], rcounts[g])
            if got > 0:
                keepgood[g] = got
    keepall = {}
    for g in scounts:
        if g in rcounts:
            keepall[g] = min(scounts[g], rcounts[g])
    p_sum = 0.0
    r_sum = 0.0
    for g in keepgood:
        p_sum += keepgood[g] / keepcand[g]
        r_sum += keepgood[g] / keepall[g]
    keep_p = p_sum / len(keepcand) if keepcand else 1.0
    keep_r = r_sum / len(keepall) if keepall else 1.0
    keep = 0.0
    if keep_p > 0 or keep_r > 0:
        keep = 2 * keep_p * keep_r / (keep_p + keep_r)

    # delete (precision only)
    delcand = {}
    for g in scounts:
        extra = scounts[g] - ccounts.get(g, 0)
        if extra > 0:
            delcand[g] = extra
    delgood = {}
    for g in delcand:
        extra = delcand[g] - rcounts.get(g, 0)
        if extra > 0:
            delgood[g] = extra
    d_sum = 0.0
    for g in delgood:
        d_sum += delgood[g] / delcand[g]
    delete = d_sum / len(delcand) if delcand else 1.0

    # add
    addcand = set(ccounts) - set(scounts)
    addgood = addcand & set(rcounts)
    addall = set(rcounts) - set(scounts)
    add_p = len(addgood) / len(addcand) if addcand else 1.0
    add_r = len(addgood) / len(addall) if addall else 1.0
    add = 0.0
    if add_p > 0 or add_r > 0:
        add = 2 * add_p * add_r / (add_p + add_r)

    return keep, delete, add


def sari_oracle(source_tokens, output_tokens, reference_token_lists) -> float:
    """SARI on 0-100 via direct n-gram multiset enumeration."""
    src = [t.lower() for t in source_tokens]
    out = [t.lower() for t in output_tokens]
    refs = [[t.lower() for t in r] for r in reference_token_lists]
    numref = len(refs)
    keeps, deletes, adds = [], [], []
    for n in (1, 2, 3, 4):
        k, d, a = _sari_oracle_ngram(
            _grams(src, n), _grams(out, n), [_grams(r, n) for r in refs], numref
        )
        keeps.append(k)
        deletes.append(d)
        adds.append(a)
    return 100.0 * (sum(keeps) / 4 + sum(deletes) / 4 + sum(adds) / 4) / 3
