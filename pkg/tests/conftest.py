import json
import random
from pathlib import Path

import pytest

from seqeval.corpus import (
    EvalSet,
    Modality,
    ModelPredictions,
    ReferenceStream,
    SourceStream,
    TagOrigin,
    TagSet,
)
from seqeval.store import EvalSetConfig, write_eval_set

FIXTURES = Path(__file__).parent / "fixtures"

WORDS = (
    "cat dog bird fish horse apple river stone cloud light "
    "green silver round broken quiet early deep narrow warm cold "
    "runs jumps sings walks holds finds keeps makes turns opens"
).split()


def random_sentence(rng: random.Random, length=None) -> str:
    length = length or rng.randint(4, 12)
    return " ".join(rng.choice(WORDS) for _ in range(length))


def noisy_copy(rng: random.Random, sentence: str) -> str:
    tokens = sentence.split()
    action = rng.random()
    if action < 0.5 and len(tokens) > 1:
        tokens[rng.randrange(len(tokens))] = rng.choice(WORDS)
    elif action < 0.7 and len(tokens) > 2:
        del tokens[rng.randrange(len(tokens))]
    elif action < 0.9 and len(tokens) > 2:
        i = rng.randrange(len(tokens) - 1)
        tokens[i], tokens[i + 1] = tokens[i + 1], tokens[i]
    return " ".join(tokens)


def make_corpus(size: int, seed: int = 13, min_len: int = 4):
    """(hypotheses, per-example references) with noisy-but-overlapping pairs."""
    rng = random.Random(seed)
    hypotheses, references = [], []
    for _ in range(size):
        ref = random_sentence(rng, rng.randint(min_len, 12))
        hypotheses.append(noisy_copy(rng, ref))
        references.append([ref, noisy_copy(rng, ref)])
    return hypotheses, references


def identity_corpus(size: int = 10, seed: int = 5):
    """Sentences of 4+ distinct-feeling tokens; hypothesis equals the reference."""
    rng = random.Random(seed)
    sentences = []
    for i in range(size):
        base = random_sentence(rng, rng.randint(5, 9))
        sentences.append(f"{base} marker{i}")
    return sentences, [[s] for s in sentences]


def build_demo_eval_set(tagged=True) -> EvalSet:
    sources = [SourceStream("source_0", Modality.TEXT, (
        "the cat sat on the mat",
        "a quick brown fox jumps over it",
        "birds sing in the early morning",
        "the river runs deep and cold",
    ))]
    references = [
        ReferenceStream("reference_0", (
            "le chat assis sur le tapis",
            "un renard brun rapide saute",
            "les oiseaux chantent le matin",
            "la riviere est profonde et froide",
        )),
        ReferenceStream("reference_1", (
            "le chat est sur le tapis",
            None,
            "les oiseaux chantent tot le matin",
            None,
        )),
    ]
    models = [
        ModelPredictions("copy", (
            "le chat assis sur le tapis",
            "un renard brun rapide saute",
            "les oiseaux chantent le matin",
            "la riviere est profonde et froide",
        )),
        ModelPredictions("noisy", (
            "le chat assis sur un tapis",
            "un renard rouge rapide saute",
            "les oiseaux chantent la nuit",
            "la riviere est profonde",
        )),
    ]
    tags = (
        TagSet("animals", TagOrigin.USER, frozenset({0, 1, 2})),
        TagSet("nature", TagOrigin.USER, frozenset({2, 3})),
    ) if tagged else ()
    return EvalSet.build(task="mt", name="demo", sources=sources,
                         references=references, models=models, tags=tags)


@pytest.fixture
def demo_eval_set():
    return build_demo_eval_set()


@pytest.fixture
def demo_root(tmp_path):
    """A data root with the demo eval set written to disk."""
    write_eval_set(build_demo_eval_set(), tmp_path,
                   EvalSetConfig(default_metrics=["bleu", "chrf"]))
    return tmp_path


@pytest.fixture(scope="session")
def oracle_fixture():
    base = FIXTURES / "oracle"
    return {
        "expected": json.loads((base / "expected.json").read_text()),
        "hypotheses": (base / "hypotheses.txt").read_text().splitlines(),
        "reference_streams": [
            (base / "reference_0.txt").read_text().splitlines(),
            (base / "reference_1.txt").read_text().splitlines(),
        ],
    }
