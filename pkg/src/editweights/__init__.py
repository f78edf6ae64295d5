"""Edit-operation-derived loss weighting for text simplification."""

__version__ = "0.1.0"

from .diff import Opcode, edited_target_mask, levenshtein, opcodes
from .metrics import EasyWordList, EvalReport, bleu, difficult_words, evaluate_corpus, fkgl, rouge_l, sari
from .model import ModelConfig, TransformerLM, Vocab
from .sampling import GenConfig, generate, repeated_sample
from .synthetic import SynthRules, default_rules, make_synthetic_corpus
from .text import AlignedPair, Corpus, TokenSeq, count_syllables, count_words, tokenize
from .training import TrainConfig, grad_check, train, weighted_ce_loss
from .weights import (
    SentenceWeightFn,
    corpus_mean_edit_distance,
    sentence_weight,
    token_weights,
)

__all__ = [
    "AlignedPair",
    "Corpus",
    "EasyWordList",
    "EvalReport",
    "GenConfig",
    "ModelConfig",
    "Opcode",
    "SentenceWeightFn",
    "SynthRules",
    "TokenSeq",
    "TrainConfig",
    "TransformerLM",
    "Vocab",
    "bleu",
    "corpus_mean_edit_distance",
    "count_syllables",
    "count_words",
    "default_rules",
    "difficult_words",
    "edited_target_mask",
    "evaluate_corpus",
    "fkgl",
    "generate",
    "grad_check",
    "levenshtein",
    "make_synthetic_corpus",
    "opcodes",
    "repeated_sample",
    "rouge_l",
    "sari",
    "sentence_weight",
    "token_weights",
    "tokenize",
    "train",
    "weighted_ce_loss",
]
