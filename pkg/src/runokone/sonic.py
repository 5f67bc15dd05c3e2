"""Rule-based Finnish phonology: syllables, syllable weight, rhyme families.

Finnish spelling maps almost one-to-one to pronunciation, so everything
here works directly on lowercased letters.  Comparisons ignore any
non-letter characters.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .corpus import Poem, Verse

VOWELS = frozenset("aeiouyäöå")

# The closed set of Finnish diphthongs; any other vowel pair splits into
# two nuclei (ta-e), while a doubled vowel is a single long nucleus (maa).
DIPHTHONGS = frozenset(
    {
        "ai", "ei", "oi", "ui", "yi", "äi", "öi",
        "au", "eu", "iu", "ou",
        "ey", "iy", "äy", "öy",
        "ie", "uo", "yö",
    }
)

SHORT = "short"
LONG = "long"


@dataclass(frozen=True)
class Syllabification:
    """Syllable spans of a single word, with per-syllable weight.

    The spans concatenate to the letters of the word; a syllable is long
    when it holds a long vowel or diphthong, or ends in a consonant.
    """

    syllables: tuple[str, ...]
    weights: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.syllables)


@lru_cache(maxsize=65536)
def letters(word: str) -> str:
    """Lowercased letters of a word, everything else stripped."""
    return "".join(ch for ch in word.lower() if ch.isalpha())


def _nuclei(word: str) -> list[tuple[int, int]]:
    """(start, end) spans of vowel nuclei, longest-first within the scan."""
    spans = []
    i = 0
    while i < len(word):
        if word[i] in VOWELS:
            pair = word[i : i + 2]
            if len(pair) == 2 and pair[1] in VOWELS and (pair[0] == pair[1] or pair in DIPHTHONGS):
                spans.append((i, i + 2))
                i += 2
            else:
                spans.append((i, i + 1))
                i += 1
        else:
            i += 1
    return spans


@lru_cache(maxsize=65536)
def syllabify(word: str) -> Syllabification | None:
    """Break a word into syllables, or None for vowelless tokens.

    Rules: every vowel nucleus (single vowel, doubled vowel or diphthong)
    carries one syllable; a single consonant directly before a nucleus is
    its onset; any remaining consonants close the preceding syllable.
    """
    clean = letters(word)
    nuclei = _nuclei(clean)
    if not nuclei:
        return None
    starts = [0]
    for (_, prev_end), (start, _) in zip(nuclei, nuclei[1:]):
        starts.append(start - 1 if start > prev_end else start)
    ends = starts[1:] + [len(clean)]
    syllables = tuple(clean[a:b] for a, b in zip(starts, ends))
    weights = tuple(
        LONG if (nuc_end - nuc_start == 2 or clean[b - 1] not in VOWELS) else SHORT
        for (nuc_start, nuc_end), (a, b) in zip(nuclei, zip(starts, ends))
    )
    return Syllabification(syllables, weights)


def _vowel_sequence(word: str) -> str:
    return "".join(ch for ch in word if ch in VOWELS)


def _consonant_sequence(word: str) -> str:
    return "".join(ch for ch in word if ch not in VOWELS)


@lru_cache(maxsize=262144)
def full_rhyme(a: str, b: str) -> bool:
    """Whether two distinct words rhyme fully (heikko / peikko).

    Stripping each word's initial consonant run must leave identical,
    non-empty remainders.  Words shorter than two letters never count.
    """
    wa, wb = letters(a), letters(b)
    if wa == wb or len(wa) < 2 or len(wb) < 2:
        return False
    ra = _strip_onset(wa)
    rb = _strip_onset(wb)
    return bool(ra) and ra == rb


def _strip_onset(word: str) -> str:
    for i, ch in enumerate(word):
        if ch in VOWELS:
            return word[i:]
    return ""


@lru_cache(maxsize=262144)
def assonance(a: str, b: str) -> bool:
    """Whether two distinct, non-full-rhyming words share their exact
    vowel sequence (talo / sano)."""
    wa, wb = letters(a), letters(b)
    if wa == wb or full_rhyme(wa, wb):
        return False
    va, vb = _vowel_sequence(wa), _vowel_sequence(wb)
    return bool(va) and va == vb


@lru_cache(maxsize=262144)
def consonance(a: str, b: str) -> bool:
    """Whether two distinct, non-full-rhyming words share their exact
    consonant sequence, geminates included (sakko / sokka, jo / ja)."""
    wa, wb = letters(a), letters(b)
    if wa == wb or full_rhyme(wa, wb):
        return False
    ca, cb = _consonant_sequence(wa), _consonant_sequence(wb)
    return bool(ca) and ca == cb


Span = tuple[int, int]  # (verse index, token index)


def alliteration_pairs(verse: Verse, verse_index: int = 0) -> list[tuple[Span, Span]]:
    """Unordered in-verse token pairs starting with the same letter."""
    initials = [(ti, letters(tok.surface)[:1]) for ti, tok in enumerate(verse.tokens)]
    return [
        ((verse_index, ti), (verse_index, tj))
        for (ti, ca), (tj, cb) in combinations(initials, 2)
        if ca and ca == cb
    ]


def alliteration_count(verse: Verse) -> int:
    return len(alliteration_pairs(verse))


@dataclass(frozen=True)
class SonicReport:
    """Rhyme-pair counts, their token spans and meter features of a poem."""

    full_rhyme_count: int
    assonance_count: int
    consonance_count: int
    alliteration_count: int
    syllable_counts: tuple[int, ...]
    long_ratio: float
    rhyme_spans: dict[str, list[tuple[Span, Span]]]


def interverse_counts(poem: Poem) -> tuple[int, int, int, dict[str, list[tuple[Span, Span]]]]:
    """Count rhyming word pairs between distinct verses.

    Every cross-verse pair of tokens is compared on its surface form.  A
    pair is credited to full rhyme first; otherwise assonance and
    consonance are counted independently (a pair may be both).
    """
    spans: dict[str, list[tuple[Span, Span]]] = {
        "full_rhyme": [],
        "assonance": [],
        "consonance": [],
    }
    for (vi, verse_a), (vj, verse_b) in combinations(enumerate(poem.verses), 2):
        for ti, tok_a in enumerate(verse_a.tokens):
            for tj, tok_b in enumerate(verse_b.tokens):
                a, b = tok_a.surface, tok_b.surface
                pair = ((vi, ti), (vj, tj))
                if full_rhyme(a, b):
                    spans["full_rhyme"].append(pair)
                else:
                    if assonance(a, b):
                        spans["assonance"].append(pair)
                    if consonance(a, b):
                        spans["consonance"].append(pair)
    return (
        len(spans["full_rhyme"]),
        len(spans["assonance"]),
        len(spans["consonance"]),
        spans,
    )


def meter_features(poem: Poem) -> tuple[tuple[int, ...], float, float]:
    """Per-verse syllable counts, poem-level long-syllable ratio and the
    population standard deviation of the per-verse counts."""
    counts = []
    long_syllables = 0
    total_syllables = 0
    for verse in poem.verses:
        n = 0
        for tok in verse.tokens:
            syl = syllabify(tok.surface)
            if syl is None:
                continue
            n += len(syl)
            long_syllables += sum(1 for w in syl.weights if w == LONG)
        counts.append(n)
        total_syllables += n
    long_ratio = long_syllables / total_syllables if total_syllables else 0.0
    stdev = statistics.pstdev(counts) if counts else 0.0
    return tuple(counts), long_ratio, stdev


def verse_weight_pattern(verse: Verse) -> tuple[str, ...]:
    """Concatenated long/short pattern over a verse, for meter comparison."""
    pattern: list[str] = []
    for tok in verse.tokens:
        syl = syllabify(tok.surface)
        if syl is not None:
            pattern.extend(syl.weights)
    return tuple(pattern)


def sonic_report(poem: Poem) -> SonicReport:
    """Run every sonic aesthetic over a poem."""
    full, asso, cons, spans = interverse_counts(poem)
    allit_spans: list[tuple[Span, Span]] = []
    for vi, verse in enumerate(poem.verses):
        allit_spans.extend(alliteration_pairs(verse, vi))
    spans["alliteration"] = allit_spans
    counts, long_ratio, _ = meter_features(poem)
    return SonicReport(
        full_rhyme_count=full,
        assonance_count=asso,
        consonance_count=cons,
        alliteration_count=len(allit_spans),
        syllable_counts=counts,
        long_ratio=long_ratio,
        rhyme_spans=spans,
    )
