"""Weighted cross-entropy training for the desk-scale simplification model.

The objective is a per-position weighted sum of negative log-likelihoods
over the target side of each "<bos> source <sep> target <eos>" stream.
Weighting mode "none" is plain cross entropy; "sentence" multiplies a
pair's whole loss by w(edit distance); "token" multiplies edited target
tokens by lambda; "external" consumes exported weight records verbatim,
so an exported file reproduces either internal mode exactly.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace

import torch

from .model import BOS, EOS, PAD, SEP, ModelConfig, TransformerLM, Vocab
from .text import Corpus, tokenize
from .weights import SentenceWeightFn, WeightRecord, pair_edit_distance, token_weights

WEIGHTING_MODES = ("none", "sentence", "token", "external")


class TrainingDivergedError(RuntimeError):
    def __init__(self, step: int):
        super().__init__(f"non-finite loss at optimization step {step}")
        self.step = step


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 5e-5
    batch_size: int = 32
    epochs: int = 3
    weighting: str = "none"
    lam: float = 2.5
    sentence_fn: SentenceWeightFn = field(default_factory=SentenceWeightFn)
    momentum: float = 0.0
    seed: int = 0
    dtype: str = "float64"

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size <= 0 or self.epochs <= 0:
            raise ValueError("batch_size and epochs must be positive")
        if self.weighting not in WEIGHTING_MODES:
            raise ValueError(f"weighting must be one of {WEIGHTING_MODES}")
        if self.lam < 0:
            raise ValueError("lambda must be non-negative")
        if self.dtype not in ("float64", "float32"):
            raise ValueError("dtype must be float64 or float32")

    def torch_dtype(self) -> torch.dtype:
        return torch.float64 if self.dtype == "float64" else torch.float32


def weighted_ce_loss(logits: torch.Tensor, targets: torch.Tensor, weights) -> torch.Tensor:
    """Sum over positions of weight_i * (-log softmax(logits_i)[target_i]).

    ``weights`` is either a per-position 1-D tensor/sequence or a scalar
    that multiplies the unweighted sum. All-ones weights reduce to plain
    cross entropy bit for bit.
    """
    if logits.dim() != 2:
        raise ValueError("logits must be a 2-D (positions, vocab) tensor")
    if targets.dim() != 1 or targets.shape[0] != logits.shape[0]:
        raise ValueError("targets must be 1-D and aligned with logits")
    nll = -torch.log_softmax(logits, dim=-1).gather(1, targets.unsqueeze(1)).squeeze(1)
    if isinstance(weights, (int, float)):
        return float(weights) * nll.sum()
    if not torch.is_tensor(weights):
        weights = torch.tensor(weights, dtype=logits.dtype, device=logits.device)
    if weights.shape != nll.shape:
        raise ValueError(f"{tuple(weights.shape)} weights vs {tuple(nll.shape)} positions")
    return (weights * nll).sum()


@dataclass
class EncodedPair:
    """One training stream with the target-side loss positions and weights."""

    ids: list[int]
    loss_positions: list[int]
    loss_weights: list[float]


def encode_pair(
    vocab: Vocab,
    source: str,
    reference: str,
    weighting: str = "none",
    lam: float = 2.5,
    sentence_fn: SentenceWeightFn | None = None,
    external: WeightRecord | None = None,
) -> EncodedPair:
    """Build "<bos> src <sep> tgt <eos>" ids plus per-target-position weights.

    Positions are indices into the stream whose next-token prediction is
    scored: every target token and the closing <eos>. The <eos> position
    carries weight 1 under token weighting and the sentence weight under
    sentence weighting.
    """
    src_tokens = tokenize(source, "word").tokens
    tgt_tokens = tokenize(reference, "word").tokens
    ids = [BOS] + vocab.encode(src_tokens) + [SEP] + vocab.encode(tgt_tokens) + [EOS]
    first_tgt = 1 + len(src_tokens) + 1
    positions = list(range(first_tgt - 1, first_tgt - 1 + len(tgt_tokens) + 1))

    n = len(tgt_tokens) + 1
    if weighting == "none":
        w = [1.0] * n
    elif weighting == "token":
        w = token_weights(src_tokens, tgt_tokens, lam) + [1.0]
    elif weighting == "sentence":
        fn = sentence_fn if sentence_fn is not None else SentenceWeightFn()
        w = [fn(pair_edit_distance(source, reference))] * n
    elif weighting == "external":
        if external is None:
            raise ValueError("external weighting requires a WeightRecord")
        if len(external.token_weights) != len(tgt_tokens):
            raise ValueError(
                f"weight record {external.id!r} has {len(external.token_weights)} token "
                f"weights for {len(tgt_tokens)} target tokens"
            )
        w = [external.sentence_weight * tw for tw in external.token_weights]
        w.append(external.sentence_weight * 1.0)
    else:
        raise ValueError(f"unknown weighting mode {weighting!r}")
    return EncodedPair(ids, positions, w)


def encode_corpus(
    vocab: Vocab,
    corpus: Corpus,
    cfg: TrainConfig,
    external_weights: dict[str, WeightRecord] | None = None,
) -> list[EncodedPair]:
    encoded = []
    for pair in corpus:
        rec = None
        if cfg.weighting == "external":
            if not external_weights or pair.id not in external_weights:
                raise ValueError(f"no external weight record for pair {pair.id!r}")
            rec = external_weights[pair.id]
        encoded.append(
            encode_pair(
                vocab,
                pair.source,
                pair.references[0],
                weighting=cfg.weighting,
                lam=cfg.lam,
                sentence_fn=cfg.sentence_fn,
                external=rec,
            )
        )
    return encoded


def build_vocab(corpus: Corpus, cap: int = 20000) -> Vocab:
    def toks():
        for pair in corpus:
            yield from tokenize(pair.source, "word").tokens
            for ref in pair.references:
                yield from tokenize(ref, "word").tokens

    return Vocab.build(toks(), cap=cap)


def _batch_tensors(batch: list[EncodedPair], dtype: torch.dtype):
    """Pad a batch and flatten its loss positions into gather indices."""
    width = max(len(p.ids) for p in batch)
    ids = torch.full((len(batch), width), PAD, dtype=torch.long)
    flat_pos = []
    flat_tgt = []
    flat_w = []
    for row, p in enumerate(batch):
        ids[row, : len(p.ids)] = torch.tensor(p.ids, dtype=torch.long)
        for pos, w in zip(p.loss_positions, p.loss_weights):
            flat_pos.append(row * width + pos)
            flat_tgt.append(p.ids[pos + 1])
            flat_w.append(w)
    return (
        ids,
        torch.tensor(flat_pos, dtype=torch.long),
        torch.tensor(flat_tgt, dtype=torch.long),
        torch.tensor(flat_w, dtype=dtype),
    )


def batch_loss(
    model: TransformerLM, batch: list[EncodedPair]
) -> tuple[torch.Tensor, torch.Tensor]:
    """Weighted loss summed over the batch, plus the summed weights.

    The weight sum is the natural normalizer for optimization steps: with
    all-ones weights it equals the number of scored positions, so the
    normalized loss of an unweighted run reads in nats per token.
    """
    dtype = next(model.parameters()).dtype
    ids, flat_pos, flat_tgt, flat_w = _batch_tensors(batch, dtype)
    logits = model(ids)
    flat_logits = logits.reshape(-1, model.vocab_size).index_select(0, flat_pos)
    return weighted_ce_loss(flat_logits, flat_tgt, flat_w), flat_w.sum()


@dataclass
class TrainResult:
    model: TransformerLM
    vocab: Vocab
    model_config: ModelConfig
    train_config: TrainConfig
    step_losses: list[float]
    epoch_losses: list[float]


def train(
    corpus: Corpus,
    mcfg: ModelConfig,
    tcfg: TrainConfig,
    external_weights: dict[str, WeightRecord] | None = None,
    vocab: Vocab | None = None,
) -> TrainResult:
    """Deterministic shuffled-minibatch gradient-descent training run.

    Plain gradient descent with optional momentum on the weighted loss
    normalized by the batch weight sum, so the step size does not scale
    with lambda; the recorded loss is that weighted mean (nats per token
    for unweighted runs). A batch whose weights sum to zero contributes no
    update. Raises TrainingDivergedError with the offending step index if
    the loss goes non-finite.
    """
    if len(corpus) == 0:
        raise ValueError("cannot train on an empty corpus")
    if vocab is None:
        vocab = build_vocab(corpus, cap=mcfg.vocab_cap)
    encoded = encode_corpus(vocab, corpus, tcfg, external_weights)
    longest = max(len(p.ids) for p in encoded)
    if longest > mcfg.context_len:
        raise ValueError(
            f"longest encoded pair ({longest} tokens) exceeds context_len {mcfg.context_len}"
        )

    model = TransformerLM(mcfg, len(vocab)).to(tcfg.torch_dtype())
    model.train()
    params = [p for p in model.parameters() if p.requires_grad]
    momentum_buf = [torch.zeros_like(p) for p in params] if tcfg.momentum else None

    order_rng = torch.Generator().manual_seed(tcfg.seed)
    step_losses: list[float] = []
    epoch_losses: list[float] = []
    step = 0
    for _ in range(tcfg.epochs):
        perm = torch.randperm(len(encoded), generator=order_rng).tolist()
        epoch_sum = 0.0
        epoch_weight = 0.0
        for start in range(0, len(perm), tcfg.batch_size):
            batch = [encoded[i] for i in perm[start : start + tcfg.batch_size]]
            loss, w_sum = batch_loss(model, batch)
            if not torch.isfinite(loss):
                raise TrainingDivergedError(step)
            if w_sum.item() == 0.0:
                step_losses.append(0.0)
                step += 1
                continue
            mean_loss = loss / w_sum
            model.zero_grad(set_to_none=True)
            mean_loss.backward()
            with torch.no_grad():
                for i, p in enumerate(params):
                    g = p.grad
                    if g is None:
                        continue
                    if momentum_buf is not None:
                        momentum_buf[i].mul_(tcfg.momentum).add_(g)
                        g = momentum_buf[i]
                    p.add_(g, alpha=-tcfg.learning_rate)
            step_losses.append(mean_loss.item())
            epoch_sum += loss.item()
            epoch_weight += w_sum.item()
            step += 1
        epoch_losses.append(epoch_sum / epoch_weight if epoch_weight else 0.0)
    return TrainResult(model, vocab, mcfg, tcfg, step_losses, epoch_losses)


def grad_check(
    model: TransformerLM,
    batch: list[EncodedPair],
    eps: float = 1e-5,
    n_coords: int = 24,
    seed: int = 0,
) -> float:
    """Max relative error between analytic and central-difference gradients.

    Samples ``n_coords`` scalar parameters spread across all tensors. The
    relative error divides by max(1, |analytic|, |numeric|), so near-zero
    gradients are compared absolutely. Requires a float64 model.
    """
    if next(model.parameters()).dtype != torch.float64:
        raise ValueError("grad_check requires a float64 model")
    model.zero_grad(set_to_none=True)
    loss, _ = batch_loss(model, batch)
    if not torch.isfinite(loss):
        raise TrainingDivergedError(0)
    loss.backward()

    params = [p for p in model.parameters() if p.requires_grad]
    rng = torch.Generator().manual_seed(seed)
    worst = 0.0
    for _ in range(n_coords):
        t_idx = int(torch.randint(len(params), (1,), generator=rng))
        p = params[t_idx]
        flat_idx = int(torch.randint(p.numel(), (1,), generator=rng))
        analytic = p.grad.reshape(-1)[flat_idx].item()
        with torch.no_grad():
            orig = p.reshape(-1)[flat_idx].item()
            p.reshape(-1)[flat_idx] = orig + eps
            up, _ = batch_loss(model, batch)
            p.reshape(-1)[flat_idx] = orig - eps
            down, _ = batch_loss(model, batch)
            p.reshape(-1)[flat_idx] = orig
        numeric = (up.item() - down.item()) / (2 * eps)
        rel = abs(analytic - numeric) / max(1.0, abs(analytic), abs(numeric))
        worst = max(worst, rel)
    return worst


CHECKPOINT_VERSION = 1


def save_checkpoint(result: TrainResult, path) -> None:
    torch.save(
        {
            "format_version": CHECKPOINT_VERSION,
            "model_config": asdict(result.model_config),
            "train_config": train_config_to_json(result.train_config),
            "vocab": result.vocab.id_to_token,
            "state_dict": result.model.state_dict(),
        },
        path,
    )


def load_checkpoint(path) -> tuple[TransformerLM, Vocab, ModelConfig, dict]:
    blob = torch.load(path, weights_only=True)
    if blob.get("format_version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version: {blob.get('format_version')}")
    mcfg = ModelConfig(**blob["model_config"])
    vocab = Vocab(blob["vocab"])
    model = TransformerLM(mcfg, len(vocab))
    state = blob["state_dict"]
    dtype = next(t.dtype for t in state.values() if t.is_floating_point())
    model = model.to(dtype)
    model.load_state_dict(state)
    model.eval()
    return model, vocab, mcfg, blob["train_config"]


def write_loss_curve(step_losses: list[float], fp) -> None:
    fp.write("step,loss\n")
    for i, loss in enumerate(step_losses):
        fp.write(f"{i},{loss!r}\n")


def train_config_to_json(tcfg: TrainConfig) -> dict:
    return asdict(tcfg)


def train_config_from_json(d: dict) -> TrainConfig:
    d = dict(d)
    fn = d.pop("sentence_fn", None)
    cfg = TrainConfig(**d)
    if fn is not None:
        cfg = replace(cfg, sentence_fn=SentenceWeightFn(**fn))
    return cfg
