"""The genetic-algorithm master.

A run copies one seed poem into a population, assigns each copy a theme
from the expansion of the run theme, and evolves the population with
POS- and morphology-preserving word substitution, verse-level crossover
and NSGA-II survivor selection over the four fitness values.
"""

from __future__ import annotations

import json
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from . import moo
from .aesthetics import AestheticProfile, AestheticReport, FitnessVector, evaluate, fitness
from .corpus import Poem, Token, Verse
from .lexres import EmbeddingStore, MissingWordError, Resources

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Individual:
    poem: Poem
    theme: str
    lineage: str


@dataclass(frozen=True)
class ScoredIndividual:
    individual: Individual
    report: AestheticReport
    fitness: FitnessVector

    @property
    def liked(self) -> bool:
        return self.fitness.all_positive()


@dataclass(frozen=True)
class RunConfig:
    population_size: int = 100
    offspring_size: int = 100
    generations: int = 50
    theme_expansion: int = 30
    related_pool: int = 1000
    similar_pool: int = 300
    crossover_prob: float = 0.9
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("population_size", "offspring_size", "generations", "theme_expansion",
                     "related_pool", "similar_pool"):
            value = getattr(self, name)
            if name != "generations" and value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")
            if name == "generations" and value < 0:
                raise ValueError(f"generations must be >= 0, got {value}")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError(f"crossover_prob must be in [0, 1], got {self.crossover_prob}")

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls(**json.loads(text))

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


class ThemeError(ValueError):
    """The requested theme cannot be expanded."""


def expand_theme(theme: str, store: EmbeddingStore, n: int) -> list[str]:
    """The n most similar vocabulary words to the theme, most similar first."""
    try:
        return [word for word, _ in store.top_similar(theme, n)]
    except MissingWordError:
        raise ThemeError(
            f"theme {theme!r} is not in the embedding vocabulary; "
            "choose an in-vocabulary lemma"
        ) from None


def _replace_token(poem: Poem, vi: int, ti: int, token: Token) -> Poem:
    verse = poem.verses[vi]
    tokens = verse.tokens[:ti] + (token,) + verse.tokens[ti + 1 :]
    verses = poem.verses[:vi] + (Verse(tokens),) + poem.verses[vi + 1 :]
    return replace(poem, verses=verses)


def mutate(
    ind: Individual,
    resources: Resources,
    rng: random.Random,
    related_pool: int = 1000,
    similar_pool: int = 300,
) -> tuple[Individual, bool]:
    """Swap one random content word for a theme-related or similar word.

    The replacement must match the original's part of speech and be
    realizable under the original token's morph tags (tokens in object
    relation go through the provider's object-inflection hook).  Returns
    the new individual and whether anything changed; an empty candidate
    set is a no-op, not an error.
    """
    positions = [
        (vi, ti)
        for vi, verse in enumerate(ind.poem.verses)
        for ti, tok in enumerate(verse.tokens)
        if tok.is_content_word()
    ]
    if not positions:
        return ind, False
    vi, ti = positions[rng.randrange(len(positions))]
    original = ind.poem.verses[vi].tokens[ti]

    pool: set[str] = set(
        word for word, _ in resources.relatedness.top_related(ind.theme, related_pool)
    )
    try:
        pool.update(word for word, _ in resources.embeddings.top_similar(original.lemma, similar_pool))
    except MissingWordError:
        pass
    pool.discard(original.lemma)

    candidates: list[tuple[str, str]] = []
    for lemma in sorted(pool):
        if not resources.pos_lexicon.matches(lemma, original.pos):
            continue
        if original.deprel == "obj":
            surface = resources.morphology.realize_object(lemma, original.morph)
        else:
            surface = resources.morphology.realize(lemma, original.morph)
        if surface is not None:
            candidates.append((lemma, surface))
    if not candidates:
        return ind, False

    lemma, surface = candidates[rng.randrange(len(candidates))]
    token = replace(original, surface=surface, lemma=lemma)
    return replace(ind, poem=_replace_token(ind.poem, vi, ti, token)), True


def crossover(
    a: Individual, b: Individual, rng: random.Random
) -> tuple[Individual, Individual]:
    """Verse-level single-point crossover.

    A cut point is drawn independently in each parent (1..verse count, so
    every child keeps at least one verse) and the right-hand verse
    suffixes are swapped.  Each child keeps its prefix parent's theme.
    """
    cut_a = rng.randint(1, len(a.poem.verses))
    cut_b = rng.randint(1, len(b.poem.verses))
    verses_a = a.poem.verses[:cut_a] + b.poem.verses[cut_b:]
    verses_b = b.poem.verses[:cut_b] + a.poem.verses[cut_a:]
    child_a = replace(a, poem=replace(a.poem, verses=verses_a))
    child_b = replace(b, poem=replace(b.poem, verses=verses_b))
    return child_a, child_b


def init_population(
    seed_poem: Poem,
    theme: str,
    cfg: RunConfig,
    resources: Resources,
    rng: random.Random,
) -> list[Individual]:
    """population_size copies of the seed, each with a random theme from
    the expansion set and mutated exactly once."""
    expansion = expand_theme(theme, resources.embeddings, cfg.theme_expansion)
    population = []
    for _ in range(cfg.population_size):
        ind = Individual(seed_poem, expansion[rng.randrange(len(expansion))], seed_poem.id)
        ind, _ = mutate(ind, resources, rng, cfg.related_pool, cfg.similar_pool)
        population.append(ind)
    return population


@dataclass
class RunResult:
    survivors: list[ScoredIndividual]
    generations_run: int
    # every objective vector ever scored, for elitism checks and debugging
    objective_log: list[tuple[float, float, float, float]] = field(default_factory=list)

    def best(self, rng: random.Random) -> ScoredIndividual:
        """A uniformly random liked survivor, else the top fitness sum."""
        liked = [s for s in self.survivors if s.liked]
        if liked:
            return liked[rng.randrange(len(liked))]
        return max(self.survivors, key=lambda s: s.fitness.total())


def _score_many(
    individuals: Sequence[Individual],
    profile: AestheticProfile,
    resources: Resources,
    threads: int,
) -> list[ScoredIndividual]:
    def score(ind: Individual) -> ScoredIndividual:
        report = evaluate(ind.poem, resources)
        return ScoredIndividual(ind, report, fitness(report, profile))

    if threads > 1 and len(individuals) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(score, individuals))
    return [score(ind) for ind in individuals]


def _tournament(
    rng: random.Random,
    scored: Sequence[ScoredIndividual],
    rank: dict[int, int],
    crowd: dict[int, float],
) -> ScoredIndividual:
    i = rng.randrange(len(scored))
    j = rng.randrange(len(scored))
    if rank[j] < rank[i] or (rank[j] == rank[i] and crowd[j] > crowd[i]):
        return scored[j]
    return scored[i]


def run(
    seed_poem: Poem,
    theme: str,
    cfg: RunConfig,
    profile: AestheticProfile,
    resources: Resources,
    rng: random.Random,
    threads: int = 1,
) -> RunResult:
    """Evolve the population for cfg.generations generations.

    Each generation builds offspring by binary-tournament parent selection
    (front rank, then crowding distance), applies crossover with
    cfg.crossover_prob and one mutation per child, then NSGA-II selection
    keeps population_size of parents plus offspring.
    """
    population = _score_many(
        init_population(seed_poem, theme, cfg, resources, rng), profile, resources, threads
    )
    log_objectives = [s.fitness.as_tuple() for s in population]

    for _ in range(cfg.generations):
        points = [(i, s.fitness.as_tuple()) for i, s in enumerate(population)]
        rank, crowd = moo.rank_and_crowding(points)

        offspring: list[Individual] = []
        while len(offspring) < cfg.offspring_size:
            parent_a = _tournament(rng, population, rank, crowd)
            parent_b = _tournament(rng, population, rank, crowd)
            if rng.random() < cfg.crossover_prob:
                child_a, child_b = crossover(parent_a.individual, parent_b.individual, rng)
            else:
                child_a, child_b = parent_a.individual, parent_b.individual
            for child in (child_a, child_b):
                if len(offspring) >= cfg.offspring_size:
                    break
                child, _ = mutate(child, resources, rng, cfg.related_pool, cfg.similar_pool)
                offspring.append(child)

        scored_offspring = _score_many(offspring, profile, resources, threads)
        log_objectives.extend(s.fitness.as_tuple() for s in scored_offspring)
        combined = population + scored_offspring
        points = [(i, s.fitness.as_tuple()) for i, s in enumerate(combined)]
        keep = moo.select_survivors(points, cfg.population_size)
        population = [combined[i] for i in keep]

    return RunResult(population, cfg.generations, log_objectives)


def export_pairs(
    runs: Iterable[tuple[Poem, Poem]], era: str | int | None = None
) -> list[dict]:
    """Aligned verse pairs from (seed poem, transformed poem) runs.

    Runs whose verse counts diverged (crossover can shift them) are
    skipped with a warning.  One JSON-ready record per verse pair.
    """
    records: list[dict] = []
    for seed, output in runs:
        if len(seed.verses) != len(output.verses):
            log.warning(
                "skipping pair export for %s: %d seed verses vs %d output verses",
                seed.id, len(seed.verses), len(output.verses),
            )
            continue
        for index, (src, dst) in enumerate(zip(seed.verses, output.verses)):
            records.append(
                {
                    "source": src.text(),
                    "target": dst.text(),
                    "poem_id": seed.id,
                    "verse_index": index,
                    "era": era,
                }
            )
    return records


def write_pairs_jsonl(records: Iterable[dict], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def read_pairs_jsonl(path) -> list[dict]:
    with open(path, encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]
