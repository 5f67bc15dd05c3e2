"""Aesthetic registry and fitness assembly.

Fourteen aesthetic functions are computed per poem, gated by learned
per-era value ranges, weighted by random-forest feature importances and
summed into four fitness values (sonic, semantic, imagerial,
metaphorical).  A poem is *liked* when all four are positive.
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.ensemble import RandomForestClassifier

from .corpus import Poem
from .lexres import ABSTRACT, CONCRETE, Resources
from .metaphor import EMPTY_METAPHOR, MetaphorAesthetics, metaphor_aesthetics
from .semfields import SemanticFields, cluster_poem, semantic_aesthetics
from .sonic import sonic_report

GROUPS: dict[str, tuple[str, ...]] = {
    "sonic": (
        "full_rhyme",
        "assonance",
        "consonance",
        "alliteration",
        "syllable_count_mean",
        "syllable_count_stdev",
        "long_ratio",
    ),
    "semantic": ("n_clusters", "avg_cluster_distance", "max_cluster_distance"),
    "imagerial": ("concrete_ratio", "sentiment_variance"),
    "metaphorical": ("max_metaphoricity", "n_metaphorical"),
}

AESTHETIC_NAMES: tuple[str, ...] = tuple(name for names in GROUPS.values() for name in names)

GROUP_OF: dict[str, str] = {name: group for group, names in GROUPS.items() for name in names}


@dataclass(frozen=True)
class AestheticReport:
    """Raw value of every aesthetic function for one poem."""

    values: dict[str, float]

    def __post_init__(self):
        missing = [n for n in AESTHETIC_NAMES if n not in self.values]
        if missing:
            raise ValueError(f"aesthetic report missing {missing}")
        for name, value in self.values.items():
            if not math.isfinite(value):
                raise ValueError(f"aesthetic {name!r} is not finite: {value}")

    def __getitem__(self, name: str) -> float:
        return self.values[name]

    def as_vector(self, names: Sequence[str] = AESTHETIC_NAMES) -> list[float]:
        return [self.values[n] for n in names]


@dataclass(frozen=True)
class FitnessVector:
    sonic: float
    semantic: float
    imagerial: float
    metaphorical: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.sonic, self.semantic, self.imagerial, self.metaphorical)

    def all_positive(self) -> bool:
        return all(v > 0.0 for v in self.as_tuple())

    def total(self) -> float:
        return sum(self.as_tuple())


@dataclass(frozen=True)
class AestheticProfile:
    """Per-era weights and accepted value ranges for every aesthetic."""

    era: str
    weights: dict[str, float]
    ranges: dict[str, tuple[float, float]]
    seed: int = 0
    grouping: dict[str, str] = field(default_factory=lambda: dict(GROUP_OF))

    def __post_init__(self):
        for name in AESTHETIC_NAMES:
            if name not in self.weights or name not in self.ranges:
                raise ValueError(f"profile missing aesthetic {name!r}")
            lo, hi = self.ranges[name]
            if lo > hi:
                raise ValueError(f"invalid range for {name!r}: [{lo}, {hi}]")
            if self.weights[name] < 0.0:
                raise ValueError(f"negative weight for {name!r}")
            if self.grouping.get(name) not in GROUPS:
                raise ValueError(f"aesthetic {name!r} mapped to unknown group")


def identity_profile(era: str = "any") -> AestheticProfile:
    """Weights of 1 and unbounded ranges: fitness sums the raw values."""
    return AestheticProfile(
        era=era,
        weights={n: 1.0 for n in AESTHETIC_NAMES},
        ranges={n: (-math.inf, math.inf) for n in AESTHETIC_NAMES},
    )


@dataclass(frozen=True)
class PoemAnalysis:
    """Everything evaluate() computed, for callers that need the details."""

    report: AestheticReport
    fields: SemanticFields | None
    metaphors: MetaphorAesthetics


def analyze(poem: Poem, resources: Resources) -> PoemAnalysis:
    """Run every aesthetic function once over a poem.

    Poems whose content words have no embeddings get zeroed semantic and
    metaphor aesthetics.
    """
    sonic = sonic_report(poem)
    counts = sonic.syllable_counts
    values: dict[str, float] = {
        "full_rhyme": float(sonic.full_rhyme_count),
        "assonance": float(sonic.assonance_count),
        "consonance": float(sonic.consonance_count),
        "alliteration": float(sonic.alliteration_count),
        "syllable_count_mean": statistics.fmean(counts) if counts else 0.0,
        "syllable_count_stdev": statistics.pstdev(counts) if counts else 0.0,
        "long_ratio": sonic.long_ratio,
    }

    fields = cluster_poem(poem, resources.embeddings)
    if fields is None:
        metaphors = EMPTY_METAPHOR
        values.update(n_clusters=0.0, avg_cluster_distance=0.0, max_cluster_distance=0.0)
    else:
        sem = semantic_aesthetics(fields)
        metaphors = metaphor_aesthetics(poem, fields, resources.relatedness)
        values.update(
            n_clusters=float(sem.n_clusters),
            avg_cluster_distance=sem.avg_distance,
            max_cluster_distance=sem.max_distance,
        )
    values["max_metaphoricity"] = metaphors.max_metaphoricity
    values["n_metaphorical"] = float(metaphors.n_metaphorical_clusters)

    concrete = abstract = 0
    for tok in poem.tokens():
        kind = resources.concreteness.classify(tok.lemma)
        if kind == CONCRETE:
            concrete += 1
        elif kind == ABSTRACT:
            abstract += 1
    values["concrete_ratio"] = concrete / (concrete + abstract) if concrete + abstract else 0.0

    sentiments = [resources.sentiment.score_verse(v) for v in poem.verses]
    values["sentiment_variance"] = statistics.pvariance(sentiments) if sentiments else 0.0

    return PoemAnalysis(AestheticReport(values), fields, metaphors)


def evaluate(poem: Poem, resources: Resources) -> AestheticReport:
    return analyze(poem, resources).report


def gate(value: float, accepted: tuple[float, float], weight: float) -> float:
    """weight * value inside the accepted range (inclusive), else 0."""
    lo, hi = accepted
    return weight * value if lo <= value <= hi else 0.0


def fitness(report: AestheticReport, profile: AestheticProfile) -> FitnessVector:
    """Sum the gated, weighted aesthetics of each group."""
    sums = {group: 0.0 for group in GROUPS}
    for name in AESTHETIC_NAMES:
        group = profile.grouping[name]
        sums[group] += gate(report[name], profile.ranges[name], profile.weights[name])
    return FitnessVector(**sums)


def likes(poem: Poem, profile: AestheticProfile, resources: Resources) -> bool:
    """The master's liking: every fitness component strictly positive."""
    return fitness(evaluate(poem, resources), profile).all_positive()


class EraProfileLearner(BaseEstimator):
    """Learn an era's aesthetic profile from labeled reports.

    fit(X, y) takes aesthetic reports (or an array of values in
    AESTHETIC_NAMES order) and a boolean target-era label per sample.
    One random forest per fitness group is trained on that group's
    aesthetics to separate the era; the forests are used only for their
    impurity-decrease feature importances, which become the weights.
    Accepted ranges are the [P25, P75] of the target-era samples.
    """

    def __init__(self, era: str = "era", n_trees: int = 100, seed: int = 0):
        self.era = era
        self.n_trees = n_trees
        self.seed = seed

    def fit(self, X, y):
        matrix = np.asarray(
            [r.as_vector() if isinstance(r, AestheticReport) else list(r) for r in X],
            dtype=np.float64,
        )
        labels = np.asarray(y, dtype=bool)
        if matrix.ndim != 2 or matrix.shape[1] != len(AESTHETIC_NAMES):
            raise ValueError(f"expected {len(AESTHETIC_NAMES)} aesthetic values per sample")
        if len(labels) != len(matrix):
            raise ValueError("sample and label counts differ")
        positives = int(labels.sum())
        if positives < 2 or len(labels) - positives < 2:
            raise ValueError(
                "profile learning needs at least 2 samples of the target era and 2 of others "
                f"(got {positives} / {len(labels) - positives})"
            )

        column = {name: i for i, name in enumerate(AESTHETIC_NAMES)}
        weights: dict[str, float] = {}
        for group_index, (group, names) in enumerate(sorted(GROUPS.items())):
            cols = [column[n] for n in names]
            forest = RandomForestClassifier(
                n_estimators=self.n_trees,
                criterion="gini",
                max_depth=None,
                max_features=max(1, math.ceil(math.sqrt(len(cols)))),
                bootstrap=True,
                random_state=self.seed + group_index,
            )
            forest.fit(matrix[:, cols], labels)
            for name, importance in zip(names, forest.feature_importances_):
                weights[name] = float(importance)

        target = matrix[labels]
        ranges = {
            name: (
                float(np.percentile(target[:, column[name]], 25.0)),
                float(np.percentile(target[:, column[name]], 75.0)),
            )
            for name in AESTHETIC_NAMES
        }
        self.profile_ = AestheticProfile(
            era=str(self.era), weights=weights, ranges=ranges, seed=self.seed
        )
        return self


def learn_profile(
    samples: Iterable[tuple[AestheticReport, bool]], era: str = "era", seed: int = 0
) -> AestheticProfile:
    """Functional wrapper over EraProfileLearner."""
    pairs = list(samples)
    reports = [report for report, _ in pairs]
    labels = [label for _, label in pairs]
    return EraProfileLearner(era=era, seed=seed).fit(reports, labels).profile_


def profile_to_json(profile: AestheticProfile) -> str:
    payload = {
        "era": profile.era,
        "seed": profile.seed,
        "grouping": profile.grouping,
        "aesthetics": {
            name: {
                "weight": profile.weights[name],
                "lo": profile.ranges[name][0],
                "hi": profile.ranges[name][1],
            }
            for name in AESTHETIC_NAMES
        },
    }
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def profile_from_json(text: str) -> AestheticProfile:
    payload = json.loads(text)
    aesthetics = payload["aesthetics"]
    return AestheticProfile(
        era=payload["era"],
        weights={name: entry["weight"] for name, entry in aesthetics.items()},
        ranges={name: (entry["lo"], entry["hi"]) for name, entry in aesthetics.items()},
        seed=payload.get("seed", 0),
        grouping=dict(payload.get("grouping", GROUP_OF)),
    )


def save_profile(profile: AestheticProfile, path: str | Path) -> None:
    Path(path).write_text(profile_to_json(profile), encoding="utf-8")


def load_profile(path: str | Path) -> AestheticProfile:
    return profile_from_json(Path(path).read_text(encoding="utf-8"))
