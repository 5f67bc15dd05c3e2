"""Lexical-semantic resources: embeddings, n-gram relatedness, lexicons
and the pluggable morphology provider.

All resources are immutable after loading and safe to share across
threads.  File formats are plain UTF-8 text, see the individual loaders.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

import numpy as np

from .corpus import Poem, Verse


class LexresError(ValueError):
    """Malformed resource file."""


class MissingWordError(KeyError):
    """A word is not in the resource's vocabulary; callers decide the fallback."""

    def __init__(self, word: str):
        super().__init__(word)
        self.word = word


def _open_lines(source: str | Path | IO[str] | Iterable[str]) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as handle:
            yield from handle
    else:
        yield from source


class EmbeddingStore:
    """Dense word vectors of one fixed dimension, queried by cosine."""

    def __init__(self, vectors: dict[str, np.ndarray], duplicate_count: int = 0):
        if not vectors:
            raise LexresError("embedding store must not be empty")
        dims = {v.shape for v in vectors.values()}
        if len(dims) != 1:
            raise LexresError(f"inconsistent embedding dimensions: {sorted(dims)}")
        self.dim = next(iter(dims))[0]
        self.duplicate_count = duplicate_count
        self._words = sorted(vectors)
        self._index = {w: i for i, w in enumerate(self._words)}
        matrix = np.stack([vectors[w] for w in self._words]).astype(np.float64)
        norms = np.linalg.norm(matrix, axis=1)
        norms[norms == 0.0] = 1.0
        self._matrix = matrix
        self._unit = matrix / norms[:, None]

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def __len__(self) -> int:
        return len(self._words)

    @property
    def vocabulary(self) -> list[str]:
        return list(self._words)

    def vector(self, word: str) -> np.ndarray:
        try:
            return self._matrix[self._index[word]]
        except KeyError:
            raise MissingWordError(word) from None

    def _unit_vector(self, word: str) -> np.ndarray:
        try:
            return self._unit[self._index[word]]
        except KeyError:
            raise MissingWordError(word) from None

    def cosine(self, a: str, b: str) -> float:
        """Cosine similarity of two vocabulary words, in [-1, 1]."""
        return float(np.dot(self._unit_vector(a), self._unit_vector(b)))

    def top_similar(self, word: str, k: int) -> list[tuple[str, float]]:
        """The k highest-cosine words, excluding the word itself.

        Ties break lexicographically; fewer than k come back when the
        vocabulary is small.
        """
        i = self._index.get(word)
        if i is None:
            raise MissingWordError(word)
        scores = self._unit @ self._unit[i]
        order = sorted(
            (j for j in range(len(self._words)) if j != i),
            key=lambda j: (-scores[j], self._words[j]),
        )
        return [(self._words[j], float(scores[j])) for j in order[:k]]

    def nearest_to_vector(self, vector: np.ndarray) -> str:
        """The vocabulary word nearest to an arbitrary vector by cosine."""
        norm = np.linalg.norm(vector)
        unit = vector / norm if norm else vector
        scores = self._unit @ unit
        best = min(range(len(self._words)), key=lambda j: (-scores[j], self._words[j]))
        return self._words[best]


def load_embeddings(source: str | Path | IO[str] | Iterable[str]) -> EmbeddingStore:
    """Load text-format embeddings.

    An optional ``<count> <dim>`` header line may precede the entries; each
    entry is the word followed by its components, space-separated.
    Duplicate words keep the last vector and bump ``duplicate_count``.
    """
    vectors: dict[str, np.ndarray] = {}
    duplicates = 0
    dim: int | None = None
    for lineno, raw in enumerate(_open_lines(source), start=1):
        parts = raw.split()
        if not parts:
            continue
        if lineno == 1 and len(parts) == 2:
            try:
                int(parts[0]), int(parts[1])
            except ValueError:
                pass
            else:
                continue  # header line
        word, comps = parts[0], parts[1:]
        if not comps:
            raise LexresError(f"line {lineno}: word {word!r} has no vector components")
        try:
            vec = np.array([float(c) for c in comps], dtype=np.float64)
        except ValueError:
            raise LexresError(f"line {lineno}: non-numeric component for word {word!r}") from None
        if dim is None:
            dim = len(vec)
        elif len(vec) != dim:
            raise LexresError(
                f"line {lineno}: word {word!r} has {len(vec)} components, expected {dim}"
            )
        if word in vectors:
            duplicates += 1
        vectors[word] = vec
    return EmbeddingStore(vectors, duplicate_count=duplicates)


NGRAM_ORDER = 5


class RelatednessModel:
    """Pairwise word relatedness in [0, 1] from n-gram co-occurrence.

    Scores are positive pointwise mutual information over co-occurrence
    within an n-gram window, rescaled by the model's maximum PPMI so the
    strongest association is exactly 1.  Per-word association lists are
    truncated to the ``top_k`` strongest neighbours.
    """

    def __init__(self, ranked: dict[str, list[tuple[str, float]]]):
        self._ranked = ranked
        self._scores = {w: dict(pairs) for w, pairs in ranked.items()}

    def relatedness(self, a: str, b: str) -> float:
        """Stored association score, 0 for unseen pairs; symmetric."""
        hit = self._scores.get(a, {}).get(b)
        if hit is None:
            hit = self._scores.get(b, {}).get(a)
        return hit if hit is not None else 0.0

    def top_related(self, word: str, k: int | None = None) -> list[tuple[str, float]]:
        pairs = self._ranked.get(word, [])
        return list(pairs if k is None else pairs[:k])

    def __len__(self) -> int:
        return len(self._ranked)


def build_relatedness(
    ngrams: Iterable[tuple[Iterable[str], int]], top_k: int = 1000
) -> RelatednessModel:
    """Estimate the relatedness model from (5-gram, count) pairs.

    Every unordered pair of distinct words inside an n-gram is one
    co-occurrence event weighted by the n-gram count.  PPMI uses the event
    totals: P(a,b) = C(a,b)/T and P(a) = m(a)/2T where m sums a word's
    events.  The log base cancels in the final max-rescaling.
    """
    pair_counts: Counter[tuple[str, str]] = Counter()
    for words, count in ngrams:
        words = list(words)
        if len(words) != NGRAM_ORDER:
            raise LexresError(f"expected {NGRAM_ORDER}-grams, got {len(words)} words: {words!r}")
        if count <= 0:
            raise LexresError(f"non-positive n-gram count {count!r}")
        for i in range(len(words)):
            for j in range(i + 1, len(words)):
                a, b = words[i], words[j]
                if a == b:
                    continue
                pair_counts[(a, b) if a <= b else (b, a)] += count
    if not pair_counts:
        return RelatednessModel({})

    marginals: Counter[str] = Counter()
    for (a, b), c in pair_counts.items():
        marginals[a] += c
        marginals[b] += c
    total = sum(pair_counts.values())

    ppmi: dict[tuple[str, str], float] = {}
    for (a, b), c in pair_counts.items():
        pmi = math.log((c / total) / ((marginals[a] / (2 * total)) * (marginals[b] / (2 * total))))
        if pmi > 0.0:
            ppmi[(a, b)] = pmi
    if not ppmi:
        return RelatednessModel({})

    peak = max(ppmi.values())
    by_word: dict[str, list[tuple[str, float]]] = {}
    for (a, b), value in ppmi.items():
        score = value / peak
        by_word.setdefault(a, []).append((b, score))
        by_word.setdefault(b, []).append((a, score))
    ranked = {
        w: sorted(pairs, key=lambda p: (-p[1], p[0]))[:top_k] for w, pairs in by_word.items()
    }
    return RelatednessModel(ranked)


def load_ngrams(source: str | Path | IO[str] | Iterable[str]) -> Iterator[tuple[list[str], int]]:
    """Read `w1 w2 w3 w4 w5<TAB>count` lines."""
    for lineno, raw in enumerate(_open_lines(source), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        gram, sep, count = line.rpartition("\t")
        if not sep:
            raise LexresError(f"line {lineno}: expected a tab before the count")
        try:
            n = int(count)
        except ValueError:
            raise LexresError(f"line {lineno}: non-integer count {count!r}") from None
        yield gram.split(), n


CONCRETE = "concrete"
ABSTRACT = "abstract"
UNKNOWN = "unknown"

CONCRETENESS_THRESHOLD = 3.0


class ConcretenessLexicon:
    """Lemma -> human-annotated concreteness on the 1-5 scale."""

    def __init__(self, entries: dict[str, float]):
        for lemma, score in entries.items():
            if not 1.0 <= score <= 5.0:
                raise LexresError(f"concreteness score {score} for {lemma!r} outside [1, 5]")
        self._entries = dict(entries)

    def __contains__(self, lemma: str) -> bool:
        return lemma in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def score(self, lemma: str) -> float | None:
        return self._entries.get(lemma)

    def classify(self, lemma: str) -> str:
        """CONCRETE at score >= 3, ABSTRACT below, UNKNOWN when absent."""
        score = self._entries.get(lemma)
        if score is None:
            return UNKNOWN
        return CONCRETE if score >= CONCRETENESS_THRESHOLD else ABSTRACT


def is_concrete(lexicon: ConcretenessLexicon, lemma: str) -> str:
    return lexicon.classify(lemma)


def load_concreteness(source: str | Path | IO[str] | Iterable[str]) -> ConcretenessLexicon:
    return ConcretenessLexicon(dict(_load_tsv_scores(source)))


class SentimentScorer:
    """Interface: verse-level sentiment in [-1, 1]."""

    def score_verse(self, verse: Verse) -> float:
        raise NotImplementedError


class LexiconSentiment(SentimentScorer):
    """Mean per-lemma polarity over the lemmas the lexicon knows, else 0.

    Stands behind the scorer interface so a cross-lingual neural model can
    replace it without touching callers.
    """

    def __init__(self, polarity: dict[str, float]):
        for lemma, value in polarity.items():
            if not -1.0 <= value <= 1.0:
                raise LexresError(f"polarity {value} for {lemma!r} outside [-1, 1]")
        self._polarity = dict(polarity)

    def score_verse(self, verse: Verse) -> float:
        hits = [self._polarity[t.lemma] for t in verse.tokens if t.lemma in self._polarity]
        return sum(hits) / len(hits) if hits else 0.0


def load_sentiment(source: str | Path | IO[str] | Iterable[str]) -> LexiconSentiment:
    return LexiconSentiment(dict(_load_tsv_scores(source)))


def _load_tsv_scores(source: str | Path | IO[str] | Iterable[str]) -> Iterator[tuple[str, float]]:
    for lineno, raw in enumerate(_open_lines(source), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        lemma, sep, score = line.partition("\t")
        if not sep or not lemma:
            raise LexresError(f"line {lineno}: expected `lemma<TAB>score`")
        try:
            value = float(score)
        except ValueError:
            raise LexresError(f"line {lineno}: non-numeric score {score!r}") from None
        yield lemma, value


def canonical_tags(morph: dict[str, str]) -> str:
    """Deterministic lookup key for a morph tag set: sorted feature=value."""
    return "|".join(sorted(f"{k}={v}" for k, v in morph.items()))


OBJECT_TAG = ("deprel", "obj")


class MorphologyProvider:
    """Interface for surface realization of a lemma under morph tags.

    Implementations return the surface form or None (not realizable).
    They must never silently return the bare lemma for a non-empty,
    unknown tag set.
    """

    def realize(self, lemma: str, morph: dict[str, str]) -> str | None:
        raise NotImplementedError

    def realize_object(self, lemma: str, morph: dict[str, str]) -> str | None:
        """Realization for tokens in object relation (case government).

        Default: same as plain realization.
        """
        return self.realize(lemma, morph)


class TableMorphology(MorphologyProvider):
    """Morphology backed by a (lemma, canonical tags) -> surface table.

    An empty tag set realizes as the citation form (the lemma itself).
    Object-relation realization first tries the table with an extra
    ``deprel=obj`` tag and falls back to the plain entry.
    """

    def __init__(self, entries: dict[tuple[str, str], str]):
        self._entries = dict(entries)

    def __len__(self) -> int:
        return len(self._entries)

    def realize(self, lemma: str, morph: dict[str, str]) -> str | None:
        if not morph:
            return lemma
        return self._entries.get((lemma, canonical_tags(morph)))

    def realize_object(self, lemma: str, morph: dict[str, str]) -> str | None:
        augmented = dict(morph)
        augmented.setdefault(*OBJECT_TAG)
        hit = self._entries.get((lemma, canonical_tags(augmented)))
        return hit if hit is not None else self.realize(lemma, morph)


def load_morphology(source: str | Path | IO[str] | Iterable[str]) -> TableMorphology:
    """Read `lemma<TAB>tags<TAB>surface` rows; tags as Feature=Value|... or `_`."""
    entries: dict[tuple[str, str], str] = {}
    for lineno, raw in enumerate(_open_lines(source), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise LexresError(f"line {lineno}: expected 3 tab-separated columns")
        lemma, tags, surface = cols
        if not lemma or not surface:
            raise LexresError(f"line {lineno}: empty lemma or surface")
        canon = "" if tags == "_" else "|".join(sorted(tags.split("|")))
        entries[(lemma, canon)] = surface
    return TableMorphology(entries)


class PosLexicon:
    """Lemma -> observed POS tags, for checking replacement-word POS.

    Built from annotated poems; a lemma never seen with a POS does not
    match it, so unknown candidate words are filtered out of mutations.
    """

    def __init__(self, known: dict[str, frozenset[str]] | None = None):
        self._known: dict[str, set[str]] = {k: set(v) for k, v in (known or {}).items()}

    @classmethod
    def from_poems(cls, poems: Iterable[Poem]) -> "PosLexicon":
        lex = cls()
        for poem in poems:
            for tok in poem.tokens():
                lex._known.setdefault(tok.lemma, set()).add(tok.pos)
        return lex

    def matches(self, lemma: str, pos: str) -> bool:
        return pos in self._known.get(lemma, ())

    def __len__(self) -> int:
        return len(self._known)


@dataclass
class Resources:
    """Everything the aesthetics and the mutation operator need."""

    embeddings: EmbeddingStore
    relatedness: RelatednessModel
    concreteness: ConcretenessLexicon
    sentiment: SentimentScorer
    morphology: MorphologyProvider
    pos_lexicon: PosLexicon = field(default_factory=PosLexicon)
