"""Metaphoricity of a poem over tenor-vehicle pairs of cluster topics.

A word reads metaphorically under (tenor, vehicle) when it relates to
both concepts and leans towards the vehicle.  Both measures come from the
n-gram relatedness model, so scoring is fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Poem, content_lemmas
from .lexres import RelatednessModel
from .semfields import SemanticFields


@dataclass(frozen=True)
class Interpretation:
    word: str
    tenor: str
    vehicle: str
    score: float


@dataclass(frozen=True)
class MetaphorAesthetics:
    """The two metaphor aesthetics plus the readings behind them.

    ``n_metaphorical_clusters`` counts tenor-vehicle combinations whose
    score is above zero; ``interpretations`` holds the best-scoring word
    for each such combination.
    """

    max_metaphoricity: float
    n_metaphorical_clusters: int
    interpretations: tuple[Interpretation, ...]


EMPTY_METAPHOR = MetaphorAesthetics(0.0, 0, ())


def metaphoricity(word: str, tenor: str, vehicle: str, model: RelatednessModel) -> float:
    """Score of reading `word` metaphorically with the given tenor and vehicle.

    m1 = min(rel(word, tenor), rel(word, vehicle))   relates to both
    m2 = max(0, rel(word, vehicle) - rel(word, tenor))  leans to the vehicle
    The score is the mean of the two when both are positive, else 0.
    """
    rel_tenor = model.relatedness(word, tenor)
    rel_vehicle = model.relatedness(word, vehicle)
    m1 = min(rel_tenor, rel_vehicle)
    m2 = max(0.0, rel_vehicle - rel_tenor)
    if m1 > 0.0 and m2 > 0.0:
        return (m1 + m2) / 2.0
    return 0.0


def metaphor_aesthetics(
    poem: Poem, fields: SemanticFields, model: RelatednessModel
) -> MetaphorAesthetics:
    """Evaluate every ordered (tenor, vehicle) pair of cluster topics.

    A pair's score is the best metaphoricity over the poem's content
    lemmas outside both clusters; fewer than two clusters yield zeros.
    """
    k = fields.n_clusters
    if k < 2:
        return EMPTY_METAPHOR

    lemmas = content_lemmas(poem)
    interpretations: list[Interpretation] = []
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            tenor, vehicle = fields.topics[i], fields.topics[j]
            excluded = set(fields.clusters[i]) | set(fields.clusters[j])
            best: Interpretation | None = None
            for word in lemmas:
                if word in excluded:
                    continue
                score = metaphoricity(word, tenor, vehicle, model)
                if score > 0.0 and (
                    best is None or score > best.score or (score == best.score and word < best.word)
                ):
                    best = Interpretation(word, tenor, vehicle, score)
            if best is not None:
                interpretations.append(best)

    if not interpretations:
        return EMPTY_METAPHOR
    return MetaphorAesthetics(
        max_metaphoricity=max(i.score for i in interpretations),
        n_metaphorical_clusters=len(interpretations),
        interpretations=tuple(interpretations),
    )
