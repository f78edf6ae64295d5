"""Autoregressive generation: temperature scaling, nucleus truncation,
and repeated sampling with a deterministic metric-composite critic.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import torch

from .metrics import EasyWordList, difficult_words, fkgl
from .model import BOS, EOS, SEP, TransformerLM, Vocab
from .text import count_words, detokenize, tokenize

DEFAULT_REPEAT_TEMPERATURES = (0.4, 0.6, 0.8, 1.0)


@dataclass(frozen=True)
class GenConfig:
    temperature: float = 0.6
    top_p: float = 0.7
    max_new_tokens: int = 128
    seed: int = 0
    greedy: bool = False

    def __post_init__(self) -> None:
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must lie in (0, 1]")
        if self.max_new_tokens < 0:
            raise ValueError("max_new_tokens must be non-negative")


def sample_from_logits(
    logits: torch.Tensor,
    temperature: float,
    top_p: float,
    rng: torch.Generator,
) -> int:
    """One draw: softmax(logits / temperature) truncated to the nucleus.

    The nucleus is the smallest probability-sorted prefix whose cumulative
    mass reaches top_p (the crossing token is kept), renormalized.
    """
    probs = torch.softmax(logits.double() / temperature, dim=-1)
    if top_p < 1.0:
        sorted_probs, sorted_ids = torch.sort(probs, descending=True, stable=True)
        cum = torch.cumsum(sorted_probs, dim=-1)
        cutoff = int(torch.searchsorted(cum, torch.tensor(top_p, dtype=cum.dtype)))
        cutoff = min(cutoff, len(sorted_probs) - 1)
        kept = sorted_probs[: cutoff + 1]
        choice = int(torch.multinomial(kept / kept.sum(), 1, generator=rng))
        return int(sorted_ids[choice])
    return int(torch.multinomial(probs, 1, generator=rng))


@torch.no_grad()
def generate(model: TransformerLM, vocab: Vocab, source: str, gcfg: GenConfig) -> str:
    """Sample a simplification for one source sentence.

    Stops at <eos>, at max_new_tokens, or when the context window fills.
    Deterministic for a fixed seed; greedy mode takes the argmax instead of
    sampling (the temperature -> 0 limit).
    """
    model.eval()
    src_ids = vocab.encode(tokenize(source, "word").tokens)
    ids = [BOS] + src_ids + [SEP]
    if len(ids) >= model.cfg.context_len:
        raise ValueError("source does not fit in the model context")
    rng = torch.Generator().manual_seed(gcfg.seed)
    out_ids: list[int] = []
    for _ in range(gcfg.max_new_tokens):
        if len(ids) >= model.cfg.context_len:
            break
        logits = model(torch.tensor(ids, dtype=torch.long))[0, -1]
        if gcfg.greedy:
            nxt = int(torch.argmax(logits))
        else:
            nxt = sample_from_logits(logits, gcfg.temperature, gcfg.top_p, rng)
        if nxt == EOS:
            break
        ids.append(nxt)
        out_ids.append(nxt)
    return detokenize(vocab.decode(out_ids))


Critic = Callable[[str, str], float]


def default_critic(
    source: str,
    candidate: str,
    easy: EasyWordList | None = None,
    target_fkgl: float = 6.0,
) -> float:
    """Deterministic stand-in for an external judge of candidate quality.

    Higher is better: penalizes difficult words, distance from a target
    reading grade, and length drift relative to the source. Chosen for
    reproducibility over cleverness.
    """
    if easy is None:
        easy = EasyWordList.bundled()
    wc = count_words(candidate)
    src_wc = max(count_words(source), 1)
    length_drift = abs(wc / src_wc - 1.0)
    return (
        -1.0 * difficult_words(candidate, easy)
        - 0.5 * abs(fkgl(candidate) - target_fkgl)
        - 2.0 * length_drift
    )


def repeated_sample(
    model: TransformerLM,
    vocab: Vocab,
    source: str,
    n: int,
    temperatures: Sequence[float] | None = None,
    critic: Critic | None = None,
    gcfg: GenConfig | None = None,
) -> str:
    """Generate n candidates cycling through temperatures; return the best.

    Candidate i samples at temperatures[i % len(temperatures)] with seed
    gcfg.seed + i, so the whole procedure is reproducible and n=1 with the
    default temperature list degenerates to a single generate() call. Ties
    break toward the earliest candidate.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if gcfg is None:
        gcfg = GenConfig()
    if temperatures is None:
        temperatures = (gcfg.temperature,)
    if not temperatures:
        raise ValueError("temperatures must be non-empty")
    if critic is None:
        easy = EasyWordList.bundled()

        def critic(src: str, cand: str) -> float:
            return default_critic(src, cand, easy)

    best_text = ""
    best_score = float("-inf")
    for i in range(n):
        cand_cfg = replace(
            gcfg, temperature=temperatures[i % len(temperatures)], seed=gcfg.seed + i
        )
        text = generate(model, vocab, source, cand_cfg)
        score = critic(source, text)
        if score > best_score:
            best_text, best_score = text, score
    return best_text
