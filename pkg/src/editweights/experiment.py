"""Lambda-sweep experiment driver on the synthetic corpus.

Trains one token-weighted model per (lambda, seed), generates on a held-out
synthetic split with the paper-default sampling settings, and aggregates
SARI, FKGL, and edit distance per lambda. This is the desk-scale analogue
of the lambda-control experiment: edit distance should rise and FKGL fall
as lambda grows.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, replace
from typing import Callable, TextIO

from .metrics import EasyWordList, EvalReport, evaluate_corpus
from .model import ModelConfig
from .sampling import GenConfig, generate
from .synthetic import SynthRules, default_rules, make_synthetic_corpus
from .text import Corpus
from .training import TrainConfig, TrainResult, train

EVAL_SEED_OFFSET = 7919


def sweep_model_config(seed: int = 0) -> ModelConfig:
    return ModelConfig(
        embedding_dim=64,
        hidden_dim=128,
        layer_count=2,
        head_count=2,
        context_len=64,
        seed=seed,
    )


def sweep_train_config(lam: float, seed: int = 0) -> TrainConfig:
    """Training settings tuned for the synthetic templates."""
    return TrainConfig(
        learning_rate=0.5,
        batch_size=32,
        epochs=30,
        weighting="token",
        lam=lam,
        momentum=0.9,
        seed=seed,
    )


def generate_outputs(model, vocab, corpus: Corpus, gcfg: GenConfig) -> dict[str, str]:
    """One output per pair; pair i samples with seed gcfg.seed + i."""
    outputs: dict[str, str] = {}
    for i, pair in enumerate(corpus):
        outputs[pair.id] = generate(model, vocab, pair.source, replace(gcfg, seed=gcfg.seed + i))
    return outputs


@dataclass(frozen=True)
class RunOutcome:
    lam: float
    seed: int
    sari: float
    fkgl: float
    edit_distance: float


@dataclass(frozen=True)
class RunFailure:
    lam: float
    seed: int
    error: str


@dataclass(frozen=True)
class SweepRow:
    lam: float
    n_runs: int
    sari_mean: float
    sari_std: float
    fkgl_mean: float
    fkgl_std: float
    edit_distance_mean: float
    edit_distance_std: float


@dataclass
class SweepReport:
    rows: list[SweepRow]
    runs: list[RunOutcome]
    failures: list[RunFailure]


def run_one(
    train_corpus: Corpus,
    eval_corpus: Corpus,
    mcfg: ModelConfig,
    tcfg: TrainConfig,
    gcfg: GenConfig,
    easy: EasyWordList | None = None,
) -> tuple[TrainResult, EvalReport]:
    result = train(train_corpus, mcfg, tcfg)
    outputs = generate_outputs(result.model, result.vocab, eval_corpus, gcfg)
    report = evaluate_corpus(eval_corpus, outputs, easy=easy)
    return result, report


def _std(values: list[float]) -> float:
    return statistics.stdev(values) if len(values) > 1 else 0.0


def run_sweep(
    lambdas: list[float],
    seeds: list[int],
    rules: SynthRules | None = None,
    n_pairs: int = 500,
    n_eval: int = 150,
    corpus_seed: int = 7,
    make_tcfg: Callable[[float, int], TrainConfig] | None = None,
    mcfg: ModelConfig | None = None,
    gcfg: GenConfig | None = None,
    easy: EasyWordList | None = None,
    progress: Callable[[str], None] | None = None,
) -> SweepReport:
    """Train/evaluate every (lambda, seed) combination and aggregate by lambda.

    Individual run failures are recorded and the sweep continues; a row is
    emitted for every lambda with at least one successful run.
    """
    if not lambdas:
        raise ValueError("lambda list must be non-empty")
    if not seeds:
        raise ValueError("seed list must be non-empty")
    if rules is None:
        rules = default_rules()
    if make_tcfg is None:
        make_tcfg = sweep_train_config
    if gcfg is None:
        gcfg = GenConfig()
    if easy is None:
        easy = EasyWordList.bundled()

    train_corpus = make_synthetic_corpus(rules, n_pairs, seed=corpus_seed)
    eval_corpus = make_synthetic_corpus(rules, n_eval, seed=corpus_seed + EVAL_SEED_OFFSET)

    runs: list[RunOutcome] = []
    failures: list[RunFailure] = []
    for lam in lambdas:
        for seed in seeds:
            label = f"lambda={lam} seed={seed}"
            try:
                run_mcfg = mcfg if mcfg is not None else sweep_model_config(seed=seed)
                tcfg = make_tcfg(lam, seed)
                _, report = run_one(
                    train_corpus, eval_corpus, run_mcfg, tcfg, replace(gcfg, seed=seed), easy
                )
            except Exception as exc:
                failures.append(RunFailure(lam, seed, f"{type(exc).__name__}: {exc}"))
                if progress:
                    progress(f"{label} FAILED: {exc}")
                continue
            c = report.corpus
            runs.append(RunOutcome(lam, seed, c.sari, c.fkgl, c.edit_distance))
            if progress:
                progress(
                    f"{label} sari={c.sari:.2f} fkgl={c.fkgl:.2f} "
                    f"edit_distance={c.edit_distance:.2f}"
                )

    rows = []
    for lam in lambdas:
        outcomes = [r for r in runs if r.lam == lam]
        if not outcomes:
            continue
        rows.append(
            SweepRow(
                lam=lam,
                n_runs=len(outcomes),
                sari_mean=statistics.fmean(r.sari for r in outcomes),
                sari_std=_std([r.sari for r in outcomes]),
                fkgl_mean=statistics.fmean(r.fkgl for r in outcomes),
                fkgl_std=_std([r.fkgl for r in outcomes]),
                edit_distance_mean=statistics.fmean(r.edit_distance for r in outcomes),
                edit_distance_std=_std([r.edit_distance for r in outcomes]),
            )
        )
    return SweepReport(rows, runs, failures)


def write_sweep_csv(report: SweepReport, fp: TextIO) -> None:
    fp.write(
        "lambda,n_runs,sari_mean,sari_std,fkgl_mean,fkgl_std,"
        "edit_distance_mean,edit_distance_std\n"
    )
    for r in report.rows:
        fp.write(
            f"{r.lam!r},{r.n_runs},{r.sari_mean!r},{r.sari_std!r},"
            f"{r.fkgl_mean!r},{r.fkgl_std!r},{r.edit_distance_mean!r},{r.edit_distance_std!r}\n"
        )


def write_runs_csv(report: SweepReport, fp: TextIO) -> None:
    """Per-run scatter points (edit distance vs SARI) across the sweep."""
    fp.write("lambda,seed,sari,fkgl,edit_distance\n")
    for r in report.runs:
        fp.write(f"{r.lam!r},{r.seed},{r.sari!r},{r.fkgl!r},{r.edit_distance!r}\n")
