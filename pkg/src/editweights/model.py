"""Word-level vocabulary and a small decoder-only transformer.

The model consumes "<bos> source <sep> target <eos>" as one causal stream;
the trainer masks the loss to the target side. A word-level vocabulary
keeps every target position aligned 1:1 with a diff opcode token, so
token-level loss weights need no subword mapping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
from torch import nn

PAD, BOS, EOS, SEP, UNK = 0, 1, 2, 3, 4
RESERVED = ("<pad>", "<bos>", "<eos>", "<sep>", "<unk>")


class Vocab:
    """Bijective token<->id map with reserved pad/bos/eos/sep/unk ids."""

    def __init__(self, tokens: list[str]):
        if list(tokens[: len(RESERVED)]) != list(RESERVED):
            tokens = list(RESERVED) + [t for t in tokens if t not in RESERVED]
        self.id_to_token: list[str] = list(tokens)
        self.token_to_id: dict[str, int] = {t: i for i, t in enumerate(tokens)}
        if len(self.token_to_id) != len(self.id_to_token):
            raise ValueError("vocabulary tokens are not unique")

    def __len__(self) -> int:
        return len(self.id_to_token)

    @classmethod
    def build(cls, token_iter, cap: int = 20000) -> "Vocab":
        """Vocabulary from corpus tokens, most frequent first, capped."""
        counts: dict[str, int] = {}
        for tok in token_iter:
            counts[tok] = counts.get(tok, 0) + 1
        ordered = sorted(counts, key=lambda t: (-counts[t], t))
        room = max(cap - len(RESERVED), 0)
        return cls(list(RESERVED) + ordered[:room])

    def encode(self, tokens) -> list[int]:
        get = self.token_to_id.get
        return [get(t, UNK) for t in tokens]

    def decode(self, ids) -> list[str]:
        return [self.id_to_token[i] for i in ids]


@dataclass(frozen=True)
class ModelConfig:
    embedding_dim: int = 64
    hidden_dim: int = 128
    layer_count: int = 2
    head_count: int = 2
    context_len: int = 128
    seed: int = 0
    vocab_cap: int = 20000

    def __post_init__(self) -> None:
        for name in ("embedding_dim", "hidden_dim", "layer_count", "head_count", "context_len"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.embedding_dim % self.head_count != 0:
            raise ValueError("embedding_dim must be divisible by head_count")


class _Block(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        d = cfg.embedding_dim
        self.ln1 = nn.LayerNorm(d)
        self.qkv = nn.Linear(d, 3 * d)
        self.proj = nn.Linear(d, d)
        self.ln2 = nn.LayerNorm(d)
        self.fc1 = nn.Linear(d, cfg.hidden_dim)
        self.fc2 = nn.Linear(cfg.hidden_dim, d)
        self.heads = cfg.head_count

    def forward(self, x: torch.Tensor, causal_mask: torch.Tensor) -> torch.Tensor:
        b, t, d = x.shape
        h = self.heads
        q, k, v = self.qkv(self.ln1(x)).split(d, dim=2)
        q = q.view(b, t, h, d // h).transpose(1, 2)
        k = k.view(b, t, h, d // h).transpose(1, 2)
        v = v.view(b, t, h, d // h).transpose(1, 2)
        att = (q @ k.transpose(-2, -1)) / math.sqrt(d // h)
        att = att.masked_fill(causal_mask[:t, :t], float("-inf"))
        att = torch.softmax(att, dim=-1)
        y = (att @ v).transpose(1, 2).reshape(b, t, d)
        x = x + self.proj(y)
        x = x + self.fc2(torch.nn.functional.gelu(self.fc1(self.ln2(x))))
        return x


class TransformerLM(nn.Module):
    """Decoder-only causal language model over word tokens."""

    def __init__(self, cfg: ModelConfig, vocab_size: int):
        super().__init__()
        self.cfg = cfg
        self.vocab_size = vocab_size
        torch.manual_seed(cfg.seed)
        self.tok_emb = nn.Embedding(vocab_size, cfg.embedding_dim)
        self.pos_emb = nn.Embedding(cfg.context_len, cfg.embedding_dim)
        self.blocks = nn.ModuleList(_Block(cfg) for _ in range(cfg.layer_count))
        self.ln_f = nn.LayerNorm(cfg.embedding_dim)
        self.head = nn.Linear(cfg.embedding_dim, vocab_size, bias=False)
        mask = torch.triu(
            torch.ones(cfg.context_len, cfg.context_len, dtype=torch.bool), diagonal=1
        )
        self.register_buffer("causal_mask", mask)

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        if ids.dim() == 1:
            ids = ids.unsqueeze(0)
        b, t = ids.shape
        if t > self.cfg.context_len:
            raise ValueError(f"sequence length {t} exceeds context_len {self.cfg.context_len}")
        pos = torch.arange(t, device=ids.device)
        x = self.tok_emb(ids) + self.pos_emb(pos)[None, :, :]
        for block in self.blocks:
            x = block(x, self.causal_mask)
        return self.head(self.ln_f(x))

    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())
