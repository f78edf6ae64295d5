"""Command-line pipeline: diff, weights, eval, train, generate, sweep.

Data travels as UTF-8 JSONL; diagnostics go to stderr, data to stdout or
output files. Every training or generation artifact is accompanied by a
run manifest capturing config, seed, corpus hash, and package version, so
identical invocations produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, replace

from . import __version__
from .corpus_io import (
    PairFileError,
    corpus_hash,
    load_outputs,
    load_pairs,
    save_outputs,
    write_manifest,
)
from .diff import edited_target_mask, levenshtein, opcodes
from .experiment import run_sweep, write_runs_csv, write_sweep_csv
from .metrics import EasyWordList, evaluate_corpus, render_table, write_scatter_csv
from .model import ModelConfig
from .sampling import (
    DEFAULT_REPEAT_TEMPERATURES,
    GenConfig,
    default_critic,
    generate,
    repeated_sample,
)
from .synthetic import SynthRules, default_rules
from .text import tokenize
from .training import (
    TrainConfig,
    load_checkpoint,
    save_checkpoint,
    train,
    train_config_from_json,
    train_config_to_json,
    write_loss_curve,
)
from .weights import (
    SentenceWeightFn,
    compute_weight_records,
    corpus_mean_edit_distance,
    read_weights_jsonl,
    write_weights_jsonl,
)

EASY_WORDS_ENV = "EDITWEIGHTS_EASY_WORDS"


class CliError(Exception):
    pass


def _load_easy_words(path: str | None) -> EasyWordList:
    path = path or os.environ.get(EASY_WORDS_ENV)
    return EasyWordList.from_file(path) if path else EasyWordList.bundled()


def _open_out(path: str | None):
    return open(path, "w", encoding="utf-8") if path else sys.stdout


def _mark_edited(tokens, mask) -> str:
    return " ".join(f"[[{t}]]" if m else t for t, m in zip(tokens, mask))


def cmd_diff(args) -> int:
    corpus = load_pairs(args.pairs)
    out = _open_out(args.output)
    try:
        for pair in corpus:
            ref = pair.references[0]
            src_tok = tokenize(pair.source, "word").tokens
            tgt_tok = tokenize(ref, "word").tokens
            ops = opcodes(src_tok, tgt_tok)
            mask = edited_target_mask(ops, len(tgt_tok))
            counts = {"equal": 0, "replace": 0, "insert": 0, "delete": 0}
            for op in ops:
                counts[op.tag] += 1
            summary = " ".join(f"{k}={v}" for k, v in counts.items())
            out.write(f"{pair.id}\tdistance={levenshtein(pair.source, ref)}\t{summary}\n")
            out.write(f"{pair.id}\t{_mark_edited(tgt_tok, mask)}\n")
        if len(corpus):
            out.write(f"mean_edit_distance={corpus_mean_edit_distance(corpus)!r}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _sentence_fn_from_args(args, corpus) -> SentenceWeightFn:
    if args.mu == "auto":
        mu = corpus_mean_edit_distance(corpus)
    else:
        try:
            mu = float(args.mu)
        except ValueError:
            raise CliError(f"--mu must be a number or 'auto', got {args.mu!r}")
    return SentenceWeightFn(shape=args.shape, mu=mu, offset=args.offset)


def cmd_weights(args) -> int:
    corpus = load_pairs(args.pairs)
    fn = _sentence_fn_from_args(args, corpus) if args.mode == "sentence" else None
    records = compute_weight_records(corpus, args.mode, lam=args.lam, fn=fn)
    out = _open_out(args.output)
    try:
        write_weights_jsonl(records, out)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_eval(args) -> int:
    corpus = load_pairs(args.pairs)
    outputs = load_outputs(args.outputs)
    ids = {p.id for p in corpus}
    missing = sorted(ids - outputs.keys())
    extra = sorted(outputs.keys() - ids)
    if missing or extra:
        raise CliError(f"output ids do not match pairs: missing={missing} extra={extra}")
    easy = _load_easy_words(args.easy_words)
    report = evaluate_corpus(corpus, outputs, easy=easy)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fp:
            fp.write(report.to_json() + "\n")
    if args.scatter:
        with open(args.scatter, "w", encoding="utf-8") as fp:
            write_scatter_csv(report, fp)
    if args.table or not args.report:
        print(render_table(report, label=args.label))
    return 0


def _model_config_from_args(args) -> ModelConfig:
    return ModelConfig(
        embedding_dim=args.embedding_dim,
        hidden_dim=args.hidden_dim,
        layer_count=args.layers,
        head_count=args.heads,
        context_len=args.context_len,
        seed=args.seed,
        vocab_cap=args.vocab_cap,
    )


def _train_config_from_args(args) -> TrainConfig:
    if args.config:
        with open(args.config, encoding="utf-8") as fp:
            cfg = train_config_from_json(json.load(fp))
    else:
        cfg = TrainConfig()
    overrides = {}
    for field_name, arg_name in [
        ("learning_rate", "lr"),
        ("batch_size", "batch_size"),
        ("epochs", "epochs"),
        ("weighting", "weighting"),
        ("lam", "lam"),
        ("momentum", "momentum"),
        ("seed", "seed"),
        ("dtype", "dtype"),
    ]:
        value = getattr(args, arg_name)
        if value is not None:
            overrides[field_name] = value
    if args.shape is not None or args.mu is not None or args.offset is not None:
        fn = cfg.sentence_fn
        overrides["sentence_fn"] = SentenceWeightFn(
            shape=args.shape if args.shape is not None else fn.shape,
            mu=float(args.mu) if args.mu not in (None, "auto") else fn.mu,
            offset=args.offset if args.offset is not None else fn.offset,
        )
    return replace(cfg, **overrides) if overrides else cfg


def cmd_train(args) -> int:
    corpus = load_pairs(args.pairs)
    tcfg = _train_config_from_args(args)
    if args.mu == "auto":
        tcfg = replace(
            tcfg, sentence_fn=replace(tcfg.sentence_fn, mu=corpus_mean_edit_distance(corpus))
        )
    mcfg = _model_config_from_args(args)
    external = None
    if tcfg.weighting == "external":
        if not args.weights_file:
            raise CliError("--weights-file is required for weighting=external")
        with open(args.weights_file, encoding="utf-8") as fp:
            external = read_weights_jsonl(fp)
    result = train(corpus, mcfg, tcfg, external_weights=external)
    save_checkpoint(result, args.checkpoint)
    if args.curve:
        with open(args.curve, "w", encoding="utf-8") as fp:
            write_loss_curve(result.step_losses, fp)
    manifest = {
        "command": "train",
        "version": __version__,
        "seed": tcfg.seed,
        "corpus_hash": corpus_hash(corpus),
        "model_config": asdict(mcfg),
        "train_config": train_config_to_json(tcfg),
        "final_epoch_loss": result.epoch_losses[-1],
    }
    write_manifest(manifest, args.manifest or args.checkpoint + ".manifest.json")
    print(f"trained {len(corpus)} pairs, final epoch loss {result.epoch_losses[-1]:.4f}",
          file=sys.stderr)
    return 0


def cmd_generate(args) -> int:
    model, vocab, _, _ = load_checkpoint(args.checkpoint)
    corpus = load_pairs(args.pairs)
    gcfg = GenConfig(
        temperature=args.temperature,
        top_p=args.top_p,
        max_new_tokens=args.max_new_tokens,
        seed=args.seed,
        greedy=args.greedy,
    )
    temperatures = (
        tuple(float(t) for t in args.temperatures.split(","))
        if args.temperatures
        else DEFAULT_REPEAT_TEMPERATURES
    )
    critic = None
    if args.repeat > 1:
        easy = _load_easy_words(args.easy_words)

        def critic(src: str, cand: str) -> float:
            return default_critic(src, cand, easy)

    outputs: dict[str, str] = {}
    for i, pair in enumerate(corpus):
        pair_cfg = replace(gcfg, seed=gcfg.seed + i)
        if args.repeat > 1:
            outputs[pair.id] = repeated_sample(
                model,
                vocab,
                pair.source,
                args.repeat,
                temperatures=temperatures,
                critic=critic,
                gcfg=pair_cfg,
            )
        else:
            outputs[pair.id] = generate(model, vocab, pair.source, pair_cfg)
    save_outputs(outputs, args.output)
    manifest = {
        "command": "generate",
        "version": __version__,
        "seed": gcfg.seed,
        "corpus_hash": corpus_hash(corpus),
        "gen_config": asdict(gcfg),
        "repeat": args.repeat,
        "temperatures": list(temperatures) if args.repeat > 1 else None,
    }
    write_manifest(manifest, args.manifest or args.output + ".manifest.json")
    return 0


def cmd_sweep(args) -> int:
    lambdas = [float(x) for x in args.lambdas.split(",") if x.strip()]
    seeds = [int(x) for x in args.seeds.split(",") if x.strip()]
    if not lambdas:
        raise CliError("--lambdas must name at least one value")
    if not seeds:
        raise CliError("--seeds must name at least one value")
    rules = default_rules()
    if args.edit_prob is not None:
        rules = SynthRules(edit_prob=args.edit_prob)

    def make_tcfg(lam: float, seed: int) -> TrainConfig:
        return TrainConfig(
            learning_rate=args.lr,
            batch_size=args.batch_size,
            epochs=args.epochs,
            weighting="token",
            lam=lam,
            momentum=args.momentum,
            seed=seed,
        )

    report = run_sweep(
        lambdas,
        seeds,
        rules=rules,
        n_pairs=args.pairs_n,
        n_eval=args.eval_n,
        corpus_seed=args.corpus_seed,
        make_tcfg=make_tcfg,
        progress=lambda msg: print(msg, file=sys.stderr),
    )
    out = _open_out(args.output)
    try:
        write_sweep_csv(report, out)
    finally:
        if out is not sys.stdout:
            out.close()
    if args.runs_csv:
        with open(args.runs_csv, "w", encoding="utf-8") as fp:
            write_runs_csv(report, fp)
    for failure in report.failures:
        print(f"run failed: lambda={failure.lam} seed={failure.seed}: {failure.error}",
              file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="editweights",
        description="Edit-derived loss weighting, metrics, and desk-scale training "
        "for text simplification",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diff", help="per-pair edit distances, opcodes, and edit markup")
    p.add_argument("--pairs", required=True, help="aligned pair JSONL file")
    p.add_argument("-o", "--output", default=None, help="write report here instead of stdout")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("weights", help="export sentence- or token-level loss weights")
    p.add_argument("--pairs", required=True)
    p.add_argument("--mode", choices=("sentence", "token"), required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=2.5,
                   help="weight for edited target tokens (token mode)")
    p.add_argument("--shape", choices=("linear", "quadratic"), default="linear")
    p.add_argument("--mu", default="86.49",
                   help="calibration distance, or 'auto' for the corpus mean")
    p.add_argument("--offset", type=float, default=0.0)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("eval", help="score outputs against references")
    p.add_argument("--pairs", required=True)
    p.add_argument("--outputs", required=True, help="id->text predictions JSONL")
    p.add_argument("--report", default=None, help="write the full JSON report here")
    p.add_argument("--table", action="store_true", help="print the metrics table")
    p.add_argument("--scatter", default=None, help="write edit-distance/SARI CSV here")
    p.add_argument("--easy-words", default=None,
                   help=f"easy word list path (default ${EASY_WORDS_ENV} or bundled)")
    p.add_argument("--label", default="system", help="row label for the table")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("train", help="train the desk-scale model")
    p.add_argument("--pairs", required=True)
    p.add_argument("--checkpoint", required=True, help="checkpoint output path")
    p.add_argument("--config", default=None, help="TrainConfig JSON file")
    p.add_argument("--weighting", choices=("none", "sentence", "token", "external"),
                   default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--shape", choices=("linear", "quadratic"), default=None)
    p.add_argument("--mu", default=None)
    p.add_argument("--offset", type=float, default=None)
    p.add_argument("--weights-file", default=None, help="weights JSONL for weighting=external")
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--momentum", type=float, default=None)
    p.add_argument("--dtype", choices=("float64", "float32"), default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--embedding-dim", type=int, default=64)
    p.add_argument("--hidden-dim", type=int, default=128)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--heads", type=int, default=2)
    p.add_argument("--context-len", type=int, default=128)
    p.add_argument("--vocab-cap", type=int, default=20000)
    p.add_argument("--curve", default=None, help="loss curve CSV output path")
    p.add_argument("--manifest", default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("generate", help="generate simplifications from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--pairs", required=True, help="pair file naming the sources")
    p.add_argument("-o", "--output", required=True, help="predictions JSONL path")
    p.add_argument("--temperature", type=float, default=0.6)
    p.add_argument("--top-p", type=float, default=0.7)
    p.add_argument("--max-new-tokens", type=int, default=128)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--greedy", action="store_true")
    p.add_argument("--repeat", type=int, default=1,
                   help="sample n candidates and keep the critic's best")
    p.add_argument("--temperatures", default=None,
                   help="comma-separated temperature cycle for --repeat")
    p.add_argument("--easy-words", default=None)
    p.add_argument("--manifest", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sweep", help="lambda sweep on the synthetic corpus")
    p.add_argument("--lambdas", default="1,2.5,5,10")
    p.add_argument("--seeds", default="0,1,2")
    p.add_argument("--pairs-n", type=int, default=500)
    p.add_argument("--eval-n", type=int, default=150)
    p.add_argument("--corpus-seed", type=int, default=7)
    p.add_argument("--edit-prob", type=float, default=None)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("-o", "--output", default=None, help="sweep CSV path (default stdout)")
    p.add_argument("--runs-csv", default=None, help="per-run CSV path")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, PairFileError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
