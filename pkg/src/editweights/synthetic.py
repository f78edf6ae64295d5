"""Synthetic simplification corpus with a controllable edit distribution.

Sources are templated two-clause sentences stuffed with multi-syllable
phrases and a long conjunction; references simplify a random subset of the
five editable sites (two verbs, two object phrases, the connector, which
splits the sentence). Because each site is edited with probability
``edit_prob`` across the corpus, the reference distribution at every site
is genuinely ambiguous between copying and editing, which is exactly the
tension the loss weights act on.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .text import AlignedPair, Corpus


def _default_subjects() -> tuple[str, ...]:
    return ("doctors", "nurses", "patients", "teams", "workers", "students")


def _default_verb_subs() -> dict[str, str]:
    return {
        "utilize": "use",
        "administer": "give",
        "demonstrate": "show",
        "investigate": "study",
        "commence": "start",
        "terminate": "stop",
        "anticipate": "expect",
        "accumulate": "gather",
    }


def _default_object_subs() -> dict[str, str]:
    return {
        "the medication regimen": "the drug plan",
        "a comprehensive evaluation": "a full check",
        "the experimental procedure": "the test steps",
        "an innovative methodology": "a new method",
        "the rehabilitation programme": "the recovery plan",
        "the preliminary documentation": "the first notes",
    }


def _default_connector_subs() -> dict[str, str]:
    return {
        "and consequently": ". so",
        "and furthermore": ". also",
        "and subsequently": ". then",
    }


@dataclass(frozen=True)
class SynthRules:
    """Substitution tables and split patterns for the generator.

    Connector replacements that begin with ". " split the sentence in two.
    ``edit_prob`` is the chance each site is simplified in the reference;
    at least one site is always edited, so every pair has nonzero edit
    distance under non-identity tables.
    """

    subjects: tuple[str, ...] = field(default_factory=_default_subjects)
    verb_subs: dict[str, str] = field(default_factory=_default_verb_subs)
    object_subs: dict[str, str] = field(default_factory=_default_object_subs)
    connector_subs: dict[str, str] = field(default_factory=_default_connector_subs)
    edit_prob: float = 0.4

    def __post_init__(self) -> None:
        if not (self.subjects and self.verb_subs and self.object_subs and self.connector_subs):
            raise ValueError("all rule tables must be non-empty")
        if not 0.0 <= self.edit_prob <= 1.0:
            raise ValueError("edit_prob must lie in [0, 1]")

    @classmethod
    def identity(cls) -> "SynthRules":
        """Rules whose substitutions map every phrase to itself."""
        return cls(
            verb_subs={k: k for k in _default_verb_subs()},
            object_subs={k: k for k in _default_object_subs()},
            connector_subs={k: k for k in _default_connector_subs()},
        )


def default_rules() -> SynthRules:
    return SynthRules()


def make_synthetic_corpus(rules: SynthRules, n: int, seed: int = 0) -> Corpus:
    """n aligned pairs drawn deterministically from the rule tables."""
    rng = random.Random(seed)
    verbs = sorted(rules.verb_subs)
    objects = sorted(rules.object_subs)
    connectors = sorted(rules.connector_subs)
    pairs = []
    for i in range(n):
        subj1, subj2 = rng.choice(rules.subjects), rng.choice(rules.subjects)
        verb1, verb2 = rng.choice(verbs), rng.choice(verbs)
        obj1, obj2 = rng.choice(objects), rng.choice(objects)
        conn = rng.choice(connectors)

        edited = [rng.random() < rules.edit_prob for _ in range(5)]
        if not any(edited):
            edited[rng.randrange(5)] = True

        source = f"the {subj1} {verb1} {obj1} {conn} the {subj2} {verb2} {obj2}."
        ref = "the {} {} {} {} the {} {} {}.".format(
            subj1,
            rules.verb_subs[verb1] if edited[0] else verb1,
            rules.object_subs[obj1] if edited[1] else obj1,
            rules.connector_subs[conn] if edited[2] else conn,
            subj2,
            rules.verb_subs[verb2] if edited[3] else verb2,
            rules.object_subs[obj2] if edited[4] else obj2,
        )
        ref = ref.replace(" . ", ". ")
        pairs.append(AlignedPair(f"syn-{i:05d}", source, (ref,)))
    return Corpus(pairs)
