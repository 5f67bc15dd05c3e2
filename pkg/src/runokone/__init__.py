"""runokone: an evolutionary Finnish poem transformation engine.

A multi-objective genetic algorithm (the *master*) rewrites existing
poems under aesthetics learned from era-labeled poetry, explains its
output with template framing, judges poems with its liking predicate and
exports verse pairs for training a neural *apprentice*.
"""

from .aesthetics import (
    AESTHETIC_NAMES,
    GROUPS,
    AestheticProfile,
    AestheticReport,
    EraProfileLearner,
    FitnessVector,
    analyze,
    evaluate,
    fitness,
    gate,
    identity_profile,
    learn_profile,
    likes,
    load_profile,
    save_profile,
)
from .corpus import (
    Poem,
    Token,
    Verse,
    annotate_plain,
    content_words,
    load_stanza_poems,
    parse_corpus,
    serialize_corpus,
    split_stanzas,
)
from .framing import FramingDocument, generate_framing, render_framing, score_agreement
from .lexres import (
    EmbeddingStore,
    Resources,
    build_relatedness,
    load_concreteness,
    load_embeddings,
    load_morphology,
    load_ngrams,
    load_sentiment,
)
from .master import Individual, RunConfig, RunResult, export_pairs, expand_theme, run
from .semfields import AffinityPropagation, cluster_poem, semantic_aesthetics

__version__ = "0.1.0"
