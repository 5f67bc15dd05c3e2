"""Annotated poem corpus: domain types plus reading, writing and stanza splitting.

The corpus file format is CoNLL-U-like: ten tab-separated columns
(ID FORM LEMMA UPOS XPOS FEATS HEAD DEPREL DEPS MISC), ``_`` for absent
values, a blank line ending a verse.  A comment line ``# poem_id = ...``
starts a poem, ``# era = 1800`` attaches a century label and a bare
``# stanza`` comment marks a stanza boundary before the next verse.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

OPEN_CLASS_POS = frozenset({"NOUN", "VERB", "ADJ", "ADV"})

_ABSENT = "_"


class CorpusError(ValueError):
    """Malformed corpus input, carrying the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Token:
    """One annotated word.

    ``morph`` holds the FEATS column as a feature -> value mapping (unique
    per feature by construction).  The remaining file columns are kept
    verbatim so that parsing and serializing round-trips byte-identically.
    """

    surface: str
    lemma: str
    pos: str
    morph: dict[str, str] = field(default_factory=dict)
    deprel: str | None = None
    col_id: str | None = None
    xpos: str = _ABSENT
    head: str = _ABSENT
    deps: str = _ABSENT
    misc: str = _ABSENT

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")
        if not self.lemma:
            raise ValueError("token lemma must be non-empty")

    def is_content_word(self) -> bool:
        return self.pos in OPEN_CLASS_POS


@dataclass(frozen=True)
class Verse:
    tokens: tuple[Token, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("verse must contain at least one token")

    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)


@dataclass(frozen=True)
class Poem:
    id: str
    verses: tuple[Verse, ...]
    era_label: int | None = None
    # verse indices where a `# stanza` marker occurred, usable as
    # split_stanzas boundaries
    stanza_breaks: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.verses:
            raise ValueError(f"poem {self.id!r} must contain at least one verse")

    def tokens(self) -> Iterator[Token]:
        for verse in self.verses:
            yield from verse.tokens

    def text(self) -> str:
        return "\n".join(v.text() for v in self.verses)


def _parse_feats(feats: str, lineno: int) -> dict[str, str]:
    if feats == _ABSENT:
        return {}
    morph: dict[str, str] = {}
    for pair in feats.split("|"):
        name, sep, value = pair.partition("=")
        if not sep or not name or not value:
            raise CorpusError(f"malformed feature {pair!r}", lineno)
        if name in morph:
            raise CorpusError(f"duplicate feature {name!r}", lineno)
        morph[name] = value
    return morph


def _format_feats(morph: dict[str, str]) -> str:
    if not morph:
        return _ABSENT
    return "|".join(f"{name}={value}" for name, value in morph.items())


def _parse_token(line: str, lineno: int) -> Token:
    cols = line.split("\t")
    if len(cols) != 10:
        raise CorpusError(f"expected 10 tab-separated columns, got {len(cols)}", lineno)
    col_id, form, lemma, upos, xpos, feats, head, deprel, deps, misc = cols
    if form == _ABSENT or not form:
        raise CorpusError("missing FORM", lineno)
    if lemma == _ABSENT or not lemma:
        raise CorpusError("missing LEMMA", lineno)
    return Token(
        surface=form,
        lemma=lemma,
        pos=upos,
        morph=_parse_feats(feats, lineno),
        deprel=None if deprel == _ABSENT else deprel,
        col_id=col_id,
        xpos=xpos,
        head=head,
        deps=deps,
        misc=misc,
    )


def parse_corpus(stream: Iterable[str] | str) -> list[Poem]:
    """Parse an annotated corpus into poems.

    ``stream`` is an iterable of lines (an open file works) or a single
    string.  Malformed lines raise :class:`CorpusError` naming the line.
    """
    if isinstance(stream, str):
        stream = stream.splitlines()

    poems: list[Poem] = []
    seen_ids: set[str] = set()
    poem_id: str | None = None
    era: int | None = None
    verses: list[Verse] = []
    breaks: list[int] = []
    tokens: list[Token] = []

    def flush_verse(lineno: int) -> None:
        if tokens:
            verses.append(Verse(tuple(tokens)))
            tokens.clear()

    def flush_poem(lineno: int) -> None:
        flush_verse(lineno)
        if poem_id is None:
            if verses:
                raise CorpusError("token lines before any '# poem_id' comment", lineno)
            return
        if not verses:
            raise CorpusError(f"poem {poem_id!r} has no verses", lineno)
        if poem_id in seen_ids:
            raise CorpusError(f"duplicate poem id {poem_id!r}", lineno)
        seen_ids.add(poem_id)
        poems.append(Poem(poem_id, tuple(verses), era, tuple(breaks)))
        verses.clear()
        breaks.clear()

    lineno = 0
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            flush_verse(lineno)
        elif line.startswith("#"):
            comment = line[1:].strip()
            name, sep, value = comment.partition("=")
            name = name.strip()
            value = value.strip()
            if name == "poem_id" and sep:
                flush_poem(lineno)
                if not value:
                    raise CorpusError("empty poem_id", lineno)
                poem_id = value
                era = None
            elif name == "era" and sep:
                try:
                    era = int(value)
                except ValueError:
                    raise CorpusError(f"non-numeric era {value!r}", lineno) from None
            elif comment == "stanza":
                flush_verse(lineno)
                if verses:
                    breaks.append(len(verses))
            # other comments are ignored
        else:
            if poem_id is None:
                raise CorpusError("token line before any '# poem_id' comment", lineno)
            tokens.append(_parse_token(line, lineno))
    flush_poem(lineno + 1)
    return poems


def serialize_corpus(poems: Iterable[Poem]) -> str:
    """Write poems back to the corpus text format.

    Token annotations survive a parse/serialize round-trip byte-identically;
    column values absent on hand-built tokens are emitted as ``_`` (the ID
    column falls back to the 1-based position within the verse).
    """
    out: list[str] = []
    for poem in poems:
        out.append(f"# poem_id = {poem.id}")
        if poem.era_label is not None:
            out.append(f"# era = {poem.era_label}")
        breaks = set(poem.stanza_breaks)
        for vi, verse in enumerate(poem.verses):
            if vi in breaks:
                out.append("# stanza")
            for ti, tok in enumerate(verse.tokens):
                out.append(
                    "\t".join(
                        (
                            tok.col_id if tok.col_id is not None else str(ti + 1),
                            tok.surface,
                            tok.lemma,
                            tok.pos,
                            tok.xpos,
                            _format_feats(tok.morph),
                            tok.head,
                            tok.deprel if tok.deprel is not None else _ABSENT,
                            tok.deps,
                            tok.misc,
                        )
                    )
                )
            out.append("")
    while out and out[-1] == "":
        out.pop()
    return "\n".join(out) + ("\n" if out else "")


def split_stanzas(poem: Poem, boundaries: Iterable[int]) -> list[Poem]:
    """Cut a poem at the given verse indices.

    Boundaries must be strictly increasing and inside the verse range.
    Flattening the result reproduces the input verse sequence; stanza ids
    get a 1-based ordinal suffix.  No boundaries -> the poem unchanged.
    """
    bounds = list(boundaries)
    if not bounds:
        return [poem]
    previous = 0
    for b in bounds:
        if not previous < b < len(poem.verses):
            raise ValueError(
                f"stanza boundary {b} out of range for poem {poem.id!r} "
                f"({len(poem.verses)} verses, previous boundary {previous})"
            )
        previous = b
    edges = [0, *bounds, len(poem.verses)]
    return [
        Poem(
            id=f"{poem.id}/{ordinal}",
            verses=poem.verses[start:end],
            era_label=poem.era_label,
        )
        for ordinal, (start, end) in enumerate(zip(edges, edges[1:]), start=1)
    ]


def load_stanza_poems(stream: Iterable[str] | str) -> list[Poem]:
    """Parse a corpus and split every poem at its recorded stanza marks."""
    out: list[Poem] = []
    for poem in parse_corpus(stream):
        out.extend(split_stanzas(poem, poem.stanza_breaks))
    return out


def content_words(poem: Poem) -> list[Token]:
    """Open-class tokens (NOUN, VERB, ADJ, ADV) in order of appearance."""
    return [tok for tok in poem.tokens() if tok.is_content_word()]


def content_lemmas(poem: Poem) -> list[str]:
    """Deduplicated content-word lemmas in order of first appearance."""
    seen: dict[str, None] = {}
    for tok in content_words(poem):
        seen.setdefault(tok.lemma)
    return list(seen)


_WORD_RE = re.compile(r"\S+")


class SurfaceLookup:
    """Surface form -> (lemma, pos) table for naively annotating plain text.

    Built from an annotated corpus; the most frequent analysis per surface
    wins, ties by first occurrence.  Lookups are case-insensitive.
    """

    def __init__(self, poems: Iterable[Poem] = ()):
        counts: dict[str, dict[tuple[str, str], int]] = {}
        order: dict[str, list[tuple[str, str]]] = {}
        for poem in poems:
            for tok in poem.tokens():
                key = tok.surface.lower()
                analysis = (tok.lemma, tok.pos)
                per = counts.setdefault(key, {})
                if analysis not in per:
                    order.setdefault(key, []).append(analysis)
                per[analysis] = per.get(analysis, 0) + 1
        self._best: dict[str, tuple[str, str]] = {}
        for key, per in counts.items():
            self._best[key] = max(order[key], key=per.__getitem__)

    def get(self, surface: str) -> tuple[str, str] | None:
        return self._best.get(surface.lower())


def annotate_plain(text: str, lookup: SurfaceLookup | None = None, id_prefix: str = "plain") -> list[Poem]:
    """Turn plain poem text into naively annotated poems.

    Blank lines separate poems, one verse per line.  Tokens found in the
    lookup get its lemma and POS; everything else falls back to the
    lowercased surface as lemma with POS ``X``.  This stands in for a real
    morphological parser, which is out of scope.
    """
    poems: list[Poem] = []
    block: list[Verse] = []

    def flush() -> None:
        if block:
            poems.append(Poem(f"{id_prefix}-{len(poems) + 1}", tuple(block)))
            block.clear()

    for line in text.splitlines():
        if not line.strip():
            flush()
            continue
        tokens = []
        for surface in _WORD_RE.findall(line):
            hit = lookup.get(surface) if lookup is not None else None
            lemma, pos = hit if hit is not None else (surface.lower(), "X")
            tokens.append(Token(surface=surface, lemma=lemma, pos=pos))
        block.append(Verse(tuple(tokens)))
    flush()
    return poems
