"""Template framing: thirteen statements explaining a poem's aesthetics.

Statements 1-4 highlight the words behind each rhyme family; 5, 10 and 11
name randomly drawn verses together with the system's own meter and
sentiment judgment of them; 6-8 describe the semantic fields; 9 lists
concrete words; 12-13 present metaphorical readings, falling back to
random filler words (flagged) when the poem has none.  Agreement scoring
compares the system's predictions with majority human judgments.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from importlib import resources as importlib_resources
from typing import Iterable, Sequence

from .aesthetics import PoemAnalysis
from .corpus import Poem
from .lexres import CONCRETE, Resources
from .sonic import Span, sonic_report, verse_weight_pattern

N_STATEMENTS = 13

# statements whose subject may be randomly drawn rather than detected
FILLER_ALLOWED = frozenset({5, 10, 11, 12, 13})


@dataclass(frozen=True)
class Statement:
    index: int
    text: str
    highlights: tuple[Span, ...] = ()
    prediction: bool = False
    is_filler: bool = False
    applicable: bool = True


@dataclass(frozen=True)
class FramingDocument:
    poem_id: str
    language: str
    statements: tuple[Statement, ...]

    def __post_init__(self):
        if len(self.statements) != N_STATEMENTS:
            raise ValueError(f"framing needs {N_STATEMENTS} statements, got {len(self.statements)}")
        for st in self.statements:
            if st.is_filler and st.index not in FILLER_ALLOWED:
                raise ValueError(f"statement {st.index} cannot be a filler")


def _load_templates(language: str) -> dict[str, str]:
    name = f"framing_{language}.json"
    path = importlib_resources.files("runokone.templates").joinpath(name)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ValueError(f"no framing templates for language {language!r}") from None


def _token_positions(poem: Poem) -> list[tuple[Span, str, str]]:
    return [
        ((vi, ti), tok.surface, tok.lemma)
        for vi, verse in enumerate(poem.verses)
        for ti, tok in enumerate(verse.tokens)
    ]


def generate_framing(
    poem: Poem,
    analysis: PoemAnalysis,
    resources: Resources,
    rng: random.Random,
    language: str = "fi",
) -> FramingDocument:
    """Build the framing document for an analyzed poem."""
    templates = _load_templates(language)
    sonic = sonic_report(poem)
    fields = analysis.fields
    statements: list[Statement] = []

    # 1-4: rhyme families, highlighting every word involved
    for index, family in enumerate(("full_rhyme", "assonance", "consonance", "alliteration"), 1):
        pairs = sonic.rhyme_spans[family]
        spans = tuple(sorted({span for pair in pairs for span in pair}))
        statements.append(
            Statement(index, templates[str(index)], highlights=spans, prediction=bool(pairs))
        )

    # 5: meter of two random distinct verses
    n_verses = len(poem.verses)
    if n_verses < 2:
        statements.append(Statement(5, templates["5_na"], applicable=False))
    else:
        x, y = rng.sample(range(1, n_verses + 1), 2)
        same = (
            sonic.syllable_counts[x - 1] == sonic.syllable_counts[y - 1]
            and verse_weight_pattern(poem.verses[x - 1]) == verse_weight_pattern(poem.verses[y - 1])
        )
        statements.append(Statement(5, templates["5"].format(x=x, y=y), prediction=same))

    # 6-8: semantic fields
    topics = list(fields.topics) if fields is not None else []
    k = len(topics)
    statements.append(
        Statement(6, templates["6"].format(count=k, fields=", ".join(topics)), prediction=k > 0)
    )
    if k < 2:
        statements.append(Statement(7, templates["7_na"], applicable=False))
        statements.append(Statement(8, templates["8_na"], applicable=False))
    else:
        pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
        closest = min(pairs, key=lambda p: (float(fields.pairwise_distances[p]), p))
        furthest = min(pairs, key=lambda p: (-float(fields.pairwise_distances[p]), p))
        statements.append(
            Statement(
                7,
                templates["7"].format(a=topics[closest[0]], b=topics[closest[1]]),
                prediction=True,
            )
        )
        statements.append(
            Statement(
                8,
                templates["8"].format(a=topics[furthest[0]], b=topics[furthest[1]]),
                prediction=True,
            )
        )

    # 9: concrete words
    concrete = [
        (span, surface)
        for span, surface, lemma in _token_positions(poem)
        if resources.concreteness.classify(lemma) == CONCRETE
    ]
    if concrete:
        text = templates["9"].format(words=", ".join(s for _, s in concrete))
        statements.append(
            Statement(9, text, highlights=tuple(span for span, _ in concrete), prediction=True)
        )
    else:
        statements.append(Statement(9, templates["9_empty"], prediction=False))

    # 10-11: sentiment of random verses
    x = rng.randint(1, n_verses)
    positive = resources.sentiment.score_verse(poem.verses[x - 1]) > 0.0
    statements.append(Statement(10, templates["10"].format(x=x), prediction=positive))
    y = rng.randint(1, n_verses)
    negative = resources.sentiment.score_verse(poem.verses[y - 1]) < 0.0
    statements.append(Statement(11, templates["11"].format(y=y), prediction=negative))

    # 12-13: metaphorical words, or random filler words when there are none
    interpretations = analysis.metaphors.interpretations
    positions = _token_positions(poem)
    if interpretations:
        words: list[str] = []
        for reading in interpretations:
            if reading.word not in words:
                words.append(reading.word)
        spans = tuple(span for span, _, lemma in positions if lemma in words)
        statements.append(
            Statement(
                12, templates["12"].format(words=", ".join(words)),
                highlights=spans, prediction=True,
            )
        )
        top = max(interpretations, key=lambda r: (r.score, r.word))
        top_spans = tuple(span for span, _, lemma in positions if lemma == top.word)
        statements.append(
            Statement(
                13, templates["13"].format(x=top.word, y=top.vehicle),
                highlights=top_spans, prediction=True,
            )
        )
    else:
        content = sorted(
            {
                tok.lemma
                for verse in poem.verses
                for tok in verse.tokens
                if tok.is_content_word()
            }
        )
        picks = rng.sample(content, min(2, len(content))) if content else []
        spans = tuple(span for span, _, lemma in positions if lemma in picks)
        statements.append(
            Statement(
                12, templates["12"].format(words=", ".join(picks)),
                highlights=spans, prediction=False, is_filler=True,
            )
        )
        pair = picks if len(picks) == 2 else (picks + picks)[:2]
        x_word, y_word = (pair + ["?", "?"])[:2]
        pair_spans = tuple(span for span, _, lemma in positions if lemma == x_word)
        statements.append(
            Statement(
                13, templates["13"].format(x=x_word, y=y_word),
                highlights=pair_spans, prediction=False, is_filler=True,
            )
        )

    return FramingDocument(poem.id, language, tuple(statements))


def render_framing(poem: Poem, doc: FramingDocument) -> str:
    """Plain-text rendering: the poem with rhyme words in *italics*, then
    the numbered statements."""
    italic = {span for st in doc.statements if st.index <= 4 for span in st.highlights}
    lines = []
    for vi, verse in enumerate(poem.verses):
        lines.append(
            " ".join(
                f"*{tok.surface}*" if (vi, ti) in italic else tok.surface
                for ti, tok in enumerate(verse.tokens)
            )
        )
    lines.append("")
    for st in doc.statements:
        lines.append(f"{st.index}. {st.text}")
    return "\n".join(lines) + "\n"


def framing_to_json(doc: FramingDocument) -> str:
    payload = {
        "poem_id": doc.poem_id,
        "language": doc.language,
        "statements": [
            {
                "index": st.index,
                "text": st.text,
                "highlights": [list(span) for span in st.highlights],
                "prediction": st.prediction,
                "is_filler": st.is_filler,
                "applicable": st.applicable,
            }
            for st in doc.statements
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def framing_from_json(text: str) -> FramingDocument:
    payload = json.loads(text)
    return FramingDocument(
        poem_id=payload["poem_id"],
        language=payload["language"],
        statements=tuple(
            Statement(
                index=st["index"],
                text=st["text"],
                highlights=tuple((vi, ti) for vi, ti in st["highlights"]),
                prediction=st["prediction"],
                is_filler=st["is_filler"],
                applicable=st["applicable"],
            )
            for st in payload["statements"]
        ),
    )


@dataclass(frozen=True)
class Tally:
    agree: int
    disagree: int
    dont_know: int

    def __post_init__(self):
        if min(self.agree, self.disagree, self.dont_know) < 0:
            raise ValueError("tallies must be non-negative")


@dataclass(frozen=True)
class AgreementScore:
    accuracy: float | None  # None when no statement had a majority
    tie_rate: float
    dont_know_rate: float


def score_agreement(doc: FramingDocument, tallies: Sequence[Tally]) -> AgreementScore:
    """Compare system predictions with human judgments.

    Accuracy counts statements whose prediction matches the strict
    agree/disagree majority, over statements that have one; equal counts
    are ties and drop out of the accuracy denominator.  The don't-know
    rate is over all answers of all statements.
    """
    if len(tallies) != len(doc.statements):
        raise ValueError(f"expected {len(doc.statements)} tallies, got {len(tallies)}")
    matches = 0
    decided = 0
    ties = 0
    answers = 0
    dont_know = 0
    for st, tally in zip(doc.statements, tallies):
        answers += tally.agree + tally.disagree + tally.dont_know
        dont_know += tally.dont_know
        if tally.agree == tally.disagree:
            ties += 1
            continue
        decided += 1
        majority = tally.agree > tally.disagree
        if majority == st.prediction:
            matches += 1
    return AgreementScore(
        accuracy=matches / decided if decided else None,
        tie_rate=ties / len(doc.statements),
        dont_know_rate=dont_know / answers if answers else 0.0,
    )


def read_judgments_csv(lines: Iterable[str]) -> list[Tally]:
    """Parse `statement_index,agree,disagree,dont_know` rows (header allowed)."""
    by_index: dict[int, Tally] = {}
    for raw in lines:
        line = raw.strip()
        if not line or line.lower().startswith("statement"):
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise ValueError(f"expected 4 comma-separated fields: {line!r}")
        index, agree, disagree, dont_know = (int(p) for p in parts)
        by_index[index] = Tally(agree, disagree, dont_know)
    missing = [i for i in range(1, N_STATEMENTS + 1) if i not in by_index]
    if missing:
        raise ValueError(f"missing judgment rows for statements {missing}")
    return [by_index[i] for i in range(1, N_STATEMENTS + 1)]
