#!/usr/bin/env python3
"""Generate the deterministic toy dataset under data/toy/.

The vocabulary is real Finnish, grouped into four semantic zones so the
embeddings have cluster structure and the n-gram relatedness is zone
coherent.  Era 1800 poems lean on the nature/emotion zones with rhyming
verse endings; era 1900 poems use the people/time zones with longer,
mostly unrhymed verses, which gives the profile learner something to
separate.  Inflected surface forms come from naive suffix rules; they are
approximations, not reference Finnish, and the morphology table is
generated with the same rules so realization always agrees.

Run from the repository root:  python3 tools/make_toydata.py
"""

from __future__ import annotations

import random
from collections import Counter
from pathlib import Path

import numpy as np

from runokone.corpus import Poem, Token, Verse, serialize_corpus

OUT_DIR = Path(__file__).resolve().parent.parent / "data" / "toy"
SEED = 7
DIM = 16

ZONES: dict[str, dict[str, list[str]]] = {
    "luonto": {
        "NOUN": [
            "vesi", "mesi", "järvi", "meri", "metsä", "puu", "lintu", "kala", "kukka",
            "ranta", "kanta", "aalto", "taivas", "pilvi", "tuuli", "myrsky", "lumi",
            "jää", "kivi", "vuori", "laakso", "joki", "kuu", "tähti", "aurinko",
            "sade", "ruoho", "lehti", "juuri", "siemen", "marja", "karja", "koivu",
            "honka", "salo", "niitty", "pelto", "suo", "saari", "lahti", "kallio", "hiekka",
        ],
        "VERB": [
            "virrata", "kasvaa", "kukkia", "lentää", "uida", "laulaa", "loistaa",
            "sataa", "paistaa", "kahista", "välkkyä", "kimmeltää",
        ],
        "ADJ": [
            "sininen", "vihreä", "kirkas", "tumma", "syvä", "matala", "kylmä",
            "lämmin", "märkä", "jäinen",
        ],
        "ADV": [],
    },
    "tunne": {
        "NOUN": [
            "rakkaus", "suru", "ilo", "kaipaus", "toivo", "pelko", "viha", "onni",
            "muisto", "sydän", "sielu", "mieli", "unelma", "kyynel", "hymy",
            "murhe", "riemu", "lempi", "ikävä", "huoli",
        ],
        "VERB": [
            "rakastaa", "itkeä", "nauraa", "kaivata", "toivoa", "pelätä",
            "unohtaa", "muistaa", "surra", "iloita", "huokailla", "riemuita",
        ],
        "ADJ": [
            "heikko", "vahva", "surullinen", "iloinen", "hellä", "katkera",
            "onnellinen", "levoton", "arka", "rohkea",
        ],
        "ADV": ["hiljaa", "kauniisti"],
    },
    "aika": {
        "NOUN": [
            "aika", "hetki", "päivä", "yö", "aamu", "ilta", "silta", "kevät",
            "kesä", "syksy", "talvi", "vuosi", "ikuisuus", "hämärä", "viikko",
        ],
        "VERB": ["alkaa", "loppua", "kestää", "kulua", "odottaa", "viipyä", "joutua", "ehtiä"],
        "ADJ": ["uusi", "nuori", "ikuinen", "nopea", "hidas", "varhainen", "myöhäinen"],
        "ADV": ["nyt", "silloin", "aina", "usein", "harvoin", "kauan", "pian", "jo"],
    },
    "ihminen": {
        "NOUN": [
            "äiti", "isä", "lapsi", "ystävä", "vieras", "laulaja", "peikko",
            "kansa", "koti", "talo", "ovi", "ikkuna", "polku", "tie", "matka",
            "kylä", "kirkko", "piha", "tupa", "sauna", "neito", "sulho",
            "vanhus", "paimen", "kuningas", "laulu", "runo", "sana", "ääni",
            "tarina", "satu", "sormus",
        ],
        "VERB": [
            "kulkea", "astua", "sanoa", "kertoa", "kysyä", "vastata", "huutaa",
            "kuiskata", "istua", "seisoa", "nukkua", "herätä", "tanssia",
        ],
        "ADJ": ["vanha", "köyhä", "rikas", "viisas", "hullu", "kaunis", "pieni", "suuri"],
        "ADV": ["yksin", "yhdessä", "kotona", "kaukana", "lähellä", "täällä"],
    },
}

FUNCTION_WORDS: list[tuple[str, str]] = [
    ("ja", "CCONJ"), ("mutta", "CCONJ"), ("kun", "SCONJ"), ("kuin", "SCONJ"),
    ("se", "PRON"), ("hän", "PRON"), ("minä", "PRON"),
    ("on", "AUX"), ("oli", "AUX"), ("en", "AUX"), ("ei", "AUX"),
]

# verse-final word families per era; era 1800 alternates two families per
# poem (ABAB), which guarantees cross-verse full rhymes
RHYME_FAMILIES_1800 = [
    ("talo", "salo"),
    ("vesi", "mesi"),
    ("marja", "karja"),
    ("ranta", "kanta"),
    ("ilta", "silta"),
    ("heikko", "peikko"),
]

SENTIMENT = {
    "ilo": 0.9, "onni": 1.0, "rakkaus": 0.8, "hymy": 0.7, "riemu": 0.9,
    "toivo": 0.6, "lempi": 0.7, "nauraa": 0.8, "iloita": 0.9, "rakastaa": 0.7,
    "iloinen": 0.8, "onnellinen": 1.0, "kaunis": 0.5, "kirkas": 0.4,
    "suru": -0.9, "pelko": -0.8, "viha": -1.0, "kyynel": -0.7, "murhe": -0.9,
    "ikävä": -0.6, "huoli": -0.5, "itkeä": -0.8, "pelätä": -0.7, "surra": -0.9,
    "surullinen": -0.8, "katkera": -0.7, "levoton": -0.5, "tumma": -0.3,
    "kylmä": -0.4, "myrsky": -0.5,
}


def vocabulary() -> list[tuple[str, str, str]]:
    """(lemma, pos, zone) triples, lemma-unique."""
    out: list[tuple[str, str, str]] = []
    seen: set[str] = set()
    for zone, by_pos in ZONES.items():
        for pos, lemmas in by_pos.items():
            for lemma in lemmas:
                if lemma in seen:
                    raise ValueError(f"duplicate toy lemma {lemma!r}")
                seen.add(lemma)
                out.append((lemma, pos, zone))
    return out


def genitive(lemma: str) -> str:
    if lemma.endswith("nen"):
        return lemma[:-3] + "sen"
    if lemma[-1] in "aeiouyäö":
        return lemma + "n"
    return lemma + "in"


def partitive(lemma: str) -> str:
    ending = "a" if any(ch in "aou" for ch in lemma) else "ä"
    if lemma[-1] in "aeiouyäö":
        return lemma + ending
    return lemma + "i" + ending


def past(verb: str) -> str:
    if verb[-1] in "aä":
        return verb[:-1] + "i"
    return verb + "i"


def make_embeddings(rng: np.random.Generator, vocab) -> dict[str, np.ndarray]:
    zone_names = sorted(ZONES)
    centers = rng.normal(size=(len(zone_names), DIM))
    # orthonormalize the zone centers so the zones are well separated
    q, _ = np.linalg.qr(centers.T)
    centers = q.T[: len(zone_names)]
    center_of = dict(zip(zone_names, centers))
    vectors = {}
    for lemma, _, zone in vocab:
        vectors[lemma] = center_of[zone] + 0.30 * rng.normal(size=DIM)
    return vectors


def make_poems(rng: random.Random, vocab) -> list[Poem]:
    by_zone_pos: dict[tuple[str, str], list[str]] = {}
    for lemma, pos, zone in vocab:
        by_zone_pos.setdefault((zone, pos), []).append(lemma)

    def pick(zone: str, pos: str) -> str:
        return rng.choice(by_zone_pos[(zone, pos)])

    def token(lemma: str, pos: str, inflect: bool) -> Token:
        if not inflect:
            return Token(lemma, lemma, pos)
        if pos == "NOUN":
            if rng.random() < 0.5:
                return Token(genitive(lemma), lemma, pos, {"Case": "Gen", "Number": "Sing"})
            return Token(
                partitive(lemma), lemma, pos,
                {"Case": "Par", "Number": "Sing"}, deprel="obj",
            )
        if pos == "VERB":
            return Token(past(lemma), lemma, pos, {"Tense": "Past"})
        return Token(lemma, lemma, pos)

    def verse_1800(zones: tuple[str, str], final_lemma: str, final_pos: str) -> Verse:
        tokens = [
            token(pick(zones[0], "ADJ"), "ADJ", False),
            token(pick(zones[rng.randrange(2)], "NOUN"), "NOUN", rng.random() < 0.25),
            token(pick(zones[rng.randrange(2)], "VERB"), "VERB", rng.random() < 0.2),
            Token(final_lemma, final_lemma, final_pos),
        ]
        return Verse(tuple(tokens))

    def verse_1900(zones: tuple[str, str]) -> Verse:
        tokens = [token(pick(zones[rng.randrange(2)], "NOUN"), "NOUN", rng.random() < 0.3)]
        if rng.random() < 0.6:
            word, pos = rng.choice(FUNCTION_WORDS)
            tokens.append(Token(word, word, pos))
        tokens.append(token(pick(zones[rng.randrange(2)], "VERB"), "VERB", rng.random() < 0.25))
        if rng.random() < 0.7:
            adv_zone = "aika" if rng.random() < 0.7 else "ihminen"
            tokens.append(token(pick(adv_zone, "ADV"), "ADV", False))
        tokens.append(token(pick(zones[rng.randrange(2)], "NOUN"), "NOUN", rng.random() < 0.3))
        if rng.random() < 0.5:
            tokens.append(token(pick(zones[rng.randrange(2)], "ADJ"), "ADJ", False))
        return Verse(tuple(tokens))

    pos_of = {lemma: pos for lemma, pos, _ in vocab}
    poems: list[Poem] = []
    for i in range(14):
        families = rng.sample(RHYME_FAMILIES_1800, 2)
        finals = [families[0][0], families[1][0], families[0][1], families[1][1]]
        verses = tuple(
            verse_1800(("luonto", "tunne"), final, pos_of[final]) for final in finals
        )
        # two documents carry two stanzas with an explicit marker
        breaks = (2,) if i >= 12 else ()
        poems.append(Poem(f"toy-1800-{i + 1:02d}", verses, 1800, breaks))
    for i in range(14):
        n_verses = 3 if i < 12 else 4
        verses = tuple(verse_1900(("ihminen", "aika")) for _ in range(n_verses))
        breaks = (2,) if i >= 12 else ()
        poems.append(Poem(f"toy-1900-{i + 1:02d}", verses, 1900, breaks))
    return poems


def make_ngrams(rng: random.Random, vocab, poems) -> Counter:
    counts: Counter = Counter()
    for poem in poems:
        lemmas = [tok.lemma for tok in poem.tokens()]
        for i in range(len(lemmas) - 4):
            counts[tuple(lemmas[i : i + 5])] += 1
    by_zone: dict[str, list[str]] = {}
    for lemma, _, zone in vocab:
        by_zone.setdefault(zone, []).append(lemma)
    for zone in sorted(by_zone):
        for _ in range(60):
            counts[tuple(rng.choice(by_zone[zone]) for _ in range(5))] += rng.randint(1, 3)
    # cross-zone bridges so metaphor scoring sees tenor/vehicle relations
    for _ in range(80):
        zone_a, zone_b = rng.sample(sorted(by_zone), 2)
        gram = [rng.choice(by_zone[zone_a]) for _ in range(3)]
        gram += [rng.choice(by_zone[zone_b]) for _ in range(2)]
        rng.shuffle(gram)
        counts[tuple(gram)] += 1
    return counts


def make_concreteness(rng: random.Random, vocab) -> dict[str, float]:
    scores: dict[str, float] = {}
    concrete_zones = {"luonto", "ihminen"}
    for lemma, pos, zone in vocab:
        if pos == "NOUN":
            if zone in concrete_zones:
                scores[lemma] = round(rng.uniform(3.2, 4.9), 2)
            else:
                scores[lemma] = round(rng.uniform(1.3, 2.8), 2)
        elif pos == "ADJ" and rng.random() < 0.4:
            scores[lemma] = round(rng.uniform(1.8, 3.6), 2)
    return scores


def main() -> None:
    rng = random.Random(SEED)
    nprng = np.random.default_rng(SEED)
    vocab = vocabulary()
    OUT_DIR.mkdir(parents=True, exist_ok=True)

    vectors = make_embeddings(nprng, vocab)
    lines = [f"{len(vectors)} {DIM}"]
    for lemma, _, _ in vocab:
        comps = " ".join(f"{x:.6f}" for x in vectors[lemma])
        lines.append(f"{lemma} {comps}")
    (OUT_DIR / "embeddings.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    poems = make_poems(rng, vocab)
    (OUT_DIR / "corpus.conllu").write_text(serialize_corpus(poems), encoding="utf-8")

    ngrams = make_ngrams(rng, vocab, poems)
    gram_lines = [f"{' '.join(gram)}\t{count}" for gram, count in sorted(ngrams.items())]
    (OUT_DIR / "ngrams.tsv").write_text("\n".join(gram_lines) + "\n", encoding="utf-8")

    concreteness = make_concreteness(rng, vocab)
    conc_lines = [f"{lemma}\t{score}" for lemma, score in sorted(concreteness.items())]
    (OUT_DIR / "concreteness.tsv").write_text("\n".join(conc_lines) + "\n", encoding="utf-8")

    sent_lines = [f"{lemma}\t{value}" for lemma, value in sorted(SENTIMENT.items())]
    (OUT_DIR / "sentiment.tsv").write_text("\n".join(sent_lines) + "\n", encoding="utf-8")

    morph_lines: list[str] = []
    for lemma, pos, _ in vocab:
        if pos == "NOUN":
            morph_lines.append(f"{lemma}\tCase=Gen|Number=Sing\t{genitive(lemma)}")
            morph_lines.append(f"{lemma}\tCase=Par|Number=Sing\t{partitive(lemma)}")
            morph_lines.append(
                f"{lemma}\tCase=Par|Number=Sing|deprel=obj\t{partitive(lemma)}"
            )
        elif pos == "VERB":
            morph_lines.append(f"{lemma}\tTense=Past\t{past(lemma)}")
    (OUT_DIR / "morphology.tsv").write_text("\n".join(sorted(morph_lines)) + "\n", encoding="utf-8")

    n_tokens = sum(1 for p in poems for _ in p.tokens())
    print(
        f"wrote toy data: {len(vectors)} embeddings, {len(poems)} documents "
        f"({n_tokens} tokens), {len(ngrams)} n-grams, {len(concreteness)} "
        f"concreteness entries -> {OUT_DIR}"
    )


if __name__ == "__main__":
    main()
