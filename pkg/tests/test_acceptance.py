"""Acceptance criteria, one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v`. Criterion 5 is
dataset-gated: it runs only when EDITWEIGHTS_PLABA_DIR points at a
directory containing train.jsonl and test.jsonl in the aligned-pair
format, and skips otherwise.
"""

import difflib
import os
import random
import time

import pytest
import torch

from editweights.cli import main
from editweights.corpus_io import load_pairs, save_pairs
from editweights.diff import apply_opcodes, levenshtein, opcodes
from editweights.metrics import bleu, evaluate_corpus, fkgl, rouge_l, sari
from editweights.model import ModelConfig, TransformerLM
from editweights.synthetic import default_rules, make_synthetic_corpus
from editweights.text import tokenize
from editweights.training import (
    TrainConfig,
    batch_loss,
    build_vocab,
    encode_corpus,
    grad_check,
    train,
    weighted_ce_loss,
)
from editweights.weights import SentenceWeightFn, corpus_mean_edit_distance
from oracles import levenshtein_dp, sari_oracle


def report(capsys, criterion: int, message: str) -> None:
    # suspend capture so the per-criterion line shows without -s
    with capsys.disabled():
        print(f"\nACCEPTANCE {criterion} PASS: {message}", flush=True)


TOY_MCFG = ModelConfig(
    embedding_dim=32, hidden_dim=48, layer_count=2, head_count=2, context_len=64, seed=0
)


def toy_corpus(n=8, seed=11):
    return make_synthetic_corpus(default_rules(), n, seed=seed)


def test_criterion_1_gradient_correctness(capsys):
    start = time.time()
    corpus = toy_corpus(n=4)
    worst = {}
    for weighting in ("none", "sentence", "token"):
        tcfg = TrainConfig(weighting=weighting, lam=2.5, seed=0)
        vocab = build_vocab(corpus)
        batch = encode_corpus(vocab, corpus, tcfg)
        model = TransformerLM(TOY_MCFG, len(vocab)).to(torch.float64)
        worst[weighting] = grad_check(model, batch, eps=1e-5, n_coords=24, seed=1)
        assert worst[weighting] < 1e-4, f"{weighting}: {worst[weighting]}"
    elapsed = time.time() - start
    assert elapsed < 60.0
    report(capsys, 1, f"grad_check max relative errors {worst} in {elapsed:.1f}s")


def test_criterion_2_objective_reduction_identities(capsys):
    corpus = toy_corpus()
    tcfg_base = dict(learning_rate=0.2, momentum=0.9, batch_size=8, epochs=3, seed=0)

    plain = train(corpus, TOY_MCFG, TrainConfig(**tcfg_base, weighting="none"))
    lam1 = train(corpus, TOY_MCFG, TrainConfig(**tcfg_base, weighting="token", lam=1.0))
    unit = train(
        corpus,
        TOY_MCFG,
        TrainConfig(**tcfg_base, weighting="sentence", sentence_fn=SentenceWeightFn(offset=1.0)),
    )
    assert plain.step_losses == lam1.step_losses == unit.step_losses
    for other in (lam1, unit):
        for key, tensor in plain.model.state_dict().items():
            assert torch.equal(tensor, other.model.state_dict()[key]), key

    # gradient bit-identity on one batch
    vocab = build_vocab(corpus)
    batch_plain = encode_corpus(vocab, corpus, TrainConfig(weighting="none"))
    batch_lam1 = encode_corpus(vocab, corpus, TrainConfig(weighting="token", lam=1.0))
    model = TransformerLM(TOY_MCFG, len(vocab)).to(torch.float64)
    grads = []
    for batch in (batch_plain, batch_lam1):
        model.zero_grad(set_to_none=True)
        loss, _ = batch_loss(model, batch)
        loss.backward()
        grads.append([p.grad.clone() for p in model.parameters()])
    assert all(torch.equal(a, b) for a, b in zip(*grads))

    # scaling: exact for the scalar weight path and for power-of-two vectors
    g = torch.Generator().manual_seed(5)
    logits = torch.randn(7, 13, generator=g, dtype=torch.float64)
    targets = torch.randint(13, (7,), generator=g)
    base_w = [0.5, 1.0, 2.5, 1.5, 3.0, 0.25, 1.0]
    base = weighted_ce_loss(logits, targets, base_w)
    for c in (2.0, 0.5, 4.0):
        scaled = weighted_ce_loss(logits, targets, [c * w for w in base_w])
        assert scaled.item() == c * base.item()
    for c in (3.0, 2.5, 0.1):
        assert weighted_ce_loss(logits, targets, c).item() == c * weighted_ce_loss(
            logits, targets, 1.0
        ).item()
    report(capsys, 2, "lambda=1 / w=1 runs bit-identical to unweighted; scaling exact")


def test_criterion_3_diff_fidelity(capsys):
    rng = random.Random(1234)
    alphabet = list("abcdefgh")
    for _ in range(1000):
        a = [rng.choice(alphabet) for _ in range(rng.randint(0, 20))]
        b = [rng.choice(alphabet) for _ in range(rng.randint(0, 20))]
        ours = [(o.tag, o.src_start, o.src_end, o.tgt_start, o.tgt_end) for o in opcodes(a, b)]
        ref = [tuple(op) for op in difflib.SequenceMatcher(None, a, b, autojunk=False).get_opcodes()]
        assert ours == ref, (a, b)
        assert apply_opcodes(opcodes(a, b), a, b) == b
    for _ in range(1000):
        s = "".join(rng.choice("abcdxyz ") for _ in range(rng.randint(0, 15)))
        t = "".join(rng.choice("abcdxyz ") for _ in range(rng.randint(0, 15)))
        assert levenshtein(s, t) == levenshtein_dp(s, t)
    report(capsys, 3, "1000 opcode pairs match the reference matcher; 1000 distances match the DP oracle")


def test_criterion_4_metric_oracles(capsys):
    rng = random.Random(99)
    vocab = list("abcdef")
    worst = 0.0
    for _ in range(200):
        src = [rng.choice(vocab) for _ in range(rng.randint(0, 6))]
        out = [rng.choice(vocab) for _ in range(rng.randint(0, 6))]
        refs = [
            [rng.choice(vocab) for _ in range(rng.randint(0, 6))]
            for _ in range(rng.randint(1, 3))
        ]
        diff = abs(sari(src, out, refs) - sari_oracle(src, out, refs))
        worst = max(worst, diff)
        assert diff <= 1e-9
    assert fkgl("") == -15.59
    assert abs(fkgl("") - (-15.7)) <= 0.2
    t = tokenize("the quick brown fox jumps over the lazy dog tonight")
    assert rouge_l(t, t) == 100.0
    assert bleu([t], [[t]]) == 100.0
    report(capsys, 4, f"SARI within {worst:.1e} of oracle; FKGL/ROUGE-L/BLEU anchors exact")


PLABA_ENV = "EDITWEIGHTS_PLABA_DIR"


def test_criterion_5_plaba_dataset_gated(capsys):
    plaba_dir = os.environ.get(PLABA_ENV)
    if not plaba_dir:
        with capsys.disabled():
            print(
                f"\nACCEPTANCE 5 SKIP: dataset-gated, set {PLABA_ENV} to a directory "
                "with train.jsonl/test.jsonl",
                flush=True,
            )
        pytest.skip(f"dataset-gated: set {PLABA_ENV} to a directory with train.jsonl/test.jsonl")
    train_corpus = load_pairs(os.path.join(plaba_dir, "train.jsonl"))
    test_corpus = load_pairs(os.path.join(plaba_dir, "test.jsonl"))

    mean_dist = corpus_mean_edit_distance(train_corpus)
    assert abs(mean_dist - 86.49) <= 0.5

    copy_outputs = {p.id: p.source for p in test_corpus}
    copy = evaluate_corpus(test_corpus, copy_outputs).corpus
    assert abs(copy.sari - 15.6) <= 0.5
    assert abs(copy.bleu - 27.0) <= 1.0
    assert abs(copy.rouge_l - 53.9) <= 1.0
    assert abs(copy.fkgl - 13.8) <= 0.5
    assert copy.edit_distance == 0.0

    empty_outputs = {p.id: "" for p in test_corpus}
    empty = evaluate_corpus(test_corpus, empty_outputs).corpus
    assert abs(empty.sari - 21.7) <= 0.5
    report(capsys, 5, f"PLABA: mean distance {mean_dist:.2f}; Copy/Empty rows within tolerance")


@pytest.fixture(scope="module")
def lambda_sweep():
    from editweights.experiment import run_sweep

    start = time.time()
    sweep = run_sweep([1.0, 2.5, 5.0, 10.0], [0, 1, 2], n_pairs=500, n_eval=150)
    return sweep, time.time() - start


def test_criterion_6_lambda_control_trend(lambda_sweep, capsys):
    sweep, elapsed = lambda_sweep
    assert not sweep.failures, sweep.failures
    rows = {r.lam: r for r in sweep.rows}
    distances = [rows[lam].edit_distance_mean for lam in (1.0, 2.5, 5.0, 10.0)]
    fkgls = [rows[lam].fkgl_mean for lam in (1.0, 2.5, 5.0, 10.0)]
    assert all(d2 >= d1 for d1, d2 in zip(distances, distances[1:])), distances
    assert distances[-1] >= 1.25 * distances[0], distances
    assert all(f2 <= f1 for f1, f2 in zip(fkgls, fkgls[1:])), fkgls
    assert elapsed < 1800.0
    report(
        capsys,
        6,
        f"edit distance {['%.1f' % d for d in distances]} non-decreasing "
        f"(+{100 * (distances[-1] / distances[0] - 1):.0f}%), "
        f"FKGL {['%.1f' % f for f in fkgls]} non-increasing, {elapsed:.0f}s",
    )


def test_criterion_7_weighting_efficacy(lambda_sweep, capsys):
    sweep, _ = lambda_sweep
    rows = {r.lam: r for r in sweep.rows}
    unweighted = rows[1.0].edit_distance_mean
    weighted = rows[2.5].edit_distance_mean
    assert weighted > unweighted
    report(
        capsys,
        7,
        f"token weighting at lambda=2.5 edits more than unweighted "
        f"({weighted:.1f} vs {unweighted:.1f} mean characters)",
    )


def test_criterion_8_cli_determinism(tmp_path, capsys):
    corpus = make_synthetic_corpus(default_rules(), 24, seed=3)
    pairs = tmp_path / "pairs.jsonl"
    save_pairs(corpus, pairs)
    artifacts = {}
    for run in ("one", "two"):
        ckpt = tmp_path / f"{run}.pt"
        preds = tmp_path / f"{run}.jsonl"
        assert main([
            "train", "--pairs", str(pairs), "--checkpoint", str(ckpt),
            "--lr", "0.3", "--momentum", "0.9", "--epochs", "5",
            "--embedding-dim", "32", "--hidden-dim", "48", "--context-len", "64",
            "--seed", "0",
            "--manifest", str(tmp_path / f"{run}.train.json"),
        ]) == 0
        assert main([
            "generate", "--checkpoint", str(ckpt), "--pairs", str(pairs),
            "-o", str(preds), "--seed", "1",
            "--manifest", str(tmp_path / f"{run}.gen.json"),
        ]) == 0
        artifacts[run] = (
            preds.read_bytes(),
            (tmp_path / f"{run}.train.json").read_bytes(),
            (tmp_path / f"{run}.gen.json").read_bytes(),
        )
    assert artifacts["one"] == artifacts["two"]
    report(capsys, 8, "repeated cmd_train + cmd_generate byte-identical (predictions and manifests)")
