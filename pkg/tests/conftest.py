import random
from pathlib import Path

import pytest

from runokone.corpus import Poem, Token, Verse, load_stanza_poems
from runokone.lexres import (
    PosLexicon,
    Resources,
    build_relatedness,
    load_concreteness,
    load_embeddings,
    load_morphology,
    load_ngrams,
    load_sentiment,
)

TOY_DIR = Path(__file__).resolve().parent.parent / "data" / "toy"


def make_poem(poem_id, verses, era=None):
    """Build a poem from [[(surface, lemma, pos[, morph[, deprel]]), ...], ...]."""
    built = []
    for verse in verses:
        tokens = []
        for spec in verse:
            surface, lemma, pos = spec[:3]
            morph = spec[3] if len(spec) > 3 else {}
            deprel = spec[4] if len(spec) > 4 else None
            tokens.append(Token(surface, lemma, pos, dict(morph), deprel))
        built.append(Verse(tuple(tokens)))
    return Poem(poem_id, tuple(built), era)


def simple_poem(poem_id, verse_lines, pos="NOUN", era=None):
    """Poem from plain strings; every token is its own lemma with one POS."""
    return make_poem(
        poem_id,
        [[(w, w, pos) for w in line.split()] for line in verse_lines],
        era,
    )


@pytest.fixture(scope="session")
def toy_poems():
    return load_stanza_poems((TOY_DIR / "corpus.conllu").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def toy_resources(toy_poems):
    return Resources(
        embeddings=load_embeddings(TOY_DIR / "embeddings.txt"),
        relatedness=build_relatedness(load_ngrams(TOY_DIR / "ngrams.tsv")),
        concreteness=load_concreteness(TOY_DIR / "concreteness.tsv"),
        sentiment=load_sentiment(TOY_DIR / "sentiment.tsv"),
        morphology=load_morphology(TOY_DIR / "morphology.tsv"),
        pos_lexicon=PosLexicon.from_poems(toy_poems),
    )


class FakeRng(random.Random):
    """random.Random that replays scripted results for targeted methods.

    Construct with e.g. FakeRng(randint=[1, 1], random=[0.0]); anything not
    scripted falls back to seeded real randomness.
    """

    def __init__(self, **scripts):
        super().__init__(0)
        self._scripts = {name: list(values) for name, values in scripts.items()}

    def _next(self, name, fallback, *args):
        queue = self._scripts.get(name)
        if queue:
            return queue.pop(0)
        return fallback(*args)

    def randint(self, a, b):
        return self._next("randint", super().randint, a, b)

    def randrange(self, start, stop=None, step=1):
        return self._next("randrange", super().randrange, start, stop, step)

    def random(self):
        return self._next("random", super().random)

    def sample(self, population, k, **kwargs):
        queue = self._scripts.get("sample")
        if queue:
            return list(queue.pop(0))[:k]
        return super().sample(population, k, **kwargs)
