#!/usr/bin/env python3
"""Write a synthetic aligned-pair JSONL corpus for experiments."""

import argparse

from editweights.corpus_io import save_pairs
from editweights.synthetic import SynthRules, make_synthetic_corpus
from editweights.weights import corpus_mean_edit_distance


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("output", help="pair JSONL path")
    ap.add_argument("-n", type=int, default=500)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--edit-prob", type=float, default=0.4)
    args = ap.parse_args()

    corpus = make_synthetic_corpus(SynthRules(edit_prob=args.edit_prob), args.n, seed=args.seed)
    save_pairs(corpus, args.output)
    print(f"wrote {len(corpus)} pairs to {args.output} "
          f"(mean edit distance {corpus_mean_edit_distance(corpus):.2f})")


if __name__ == "__main__":
    main()
