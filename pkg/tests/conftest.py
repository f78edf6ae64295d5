import pytest

from editweights.model import ModelConfig
from editweights.synthetic import default_rules, make_synthetic_corpus
from editweights.training import TrainConfig, train


@pytest.fixture(scope="session")
def memorized():
    """An 8-pair corpus trained to memorization, shared across tests."""
    corpus = make_synthetic_corpus(default_rules(), 8, seed=11)
    mcfg = ModelConfig(context_len=64, seed=0)
    tcfg = TrainConfig(learning_rate=0.5, momentum=0.9, batch_size=8, epochs=200, seed=0)
    result = train(corpus, mcfg, tcfg)
    return corpus, result
