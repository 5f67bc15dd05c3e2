"""Command-line surface: learn, generate, frame, like, export-pairs.

Exit codes: 0 success, 1 usage error, 2 data error.  Every command is
reproducible under a fixed ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from . import aesthetics, corpus, framing, lexres, master

USAGE_EXIT = 1
DATA_EXIT = 2


class DataError(Exception):
    """Bad input data; reported with exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _add_resource_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("resources")
    group.add_argument("--embeddings", required=True, help="text embeddings file")
    group.add_argument("--ngrams", required=True, help="5-gram counts TSV")
    group.add_argument("--concreteness", required=True, help="concreteness lexicon TSV")
    group.add_argument("--sentiment", required=True, help="sentiment lexicon TSV")
    group.add_argument("--morphology", required=True, help="morphology table TSV")


def _load_resources(args, poems_for_pos) -> lexres.Resources:
    return lexres.Resources(
        embeddings=lexres.load_embeddings(args.embeddings),
        relatedness=lexres.build_relatedness(lexres.load_ngrams(args.ngrams)),
        concreteness=lexres.load_concreteness(args.concreteness),
        sentiment=lexres.load_sentiment(args.sentiment),
        morphology=lexres.load_morphology(args.morphology),
        pos_lexicon=lexres.PosLexicon.from_poems(poems_for_pos),
    )


def _load_corpus(path: str) -> list[corpus.Poem]:
    poems = corpus.load_stanza_poems(Path(path).read_text(encoding="utf-8"))
    if not poems:
        raise DataError(f"corpus {path} contains no poems")
    return poems


def _run_config(args) -> master.RunConfig:
    if getattr(args, "config", None):
        cfg = master.RunConfig.from_json(Path(args.config).read_text(encoding="utf-8"))
    else:
        cfg = master.RunConfig()
    if args.seed is not None:
        cfg = master.RunConfig(**{**cfg.__dict__, "rng_seed": args.seed})
    return cfg


def _threads(args) -> int:
    if args.threads is not None:
        if args.threads < 1:
            raise DataError("--threads must be >= 1")
        return args.threads
    return os.cpu_count() or 1


def cmd_learn(args) -> int:
    poems = _load_corpus(args.corpus)
    labeled = [p for p in poems if p.era_label is not None]
    if not any(p.era_label == args.era for p in labeled):
        raise DataError(f"no poems labeled with era {args.era}")
    resources = _load_resources(args, poems)
    samples = [
        (aesthetics.evaluate(p, resources), p.era_label == args.era) for p in labeled
    ]
    try:
        profile = aesthetics.learn_profile(samples, era=str(args.era), seed=args.seed or 0)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    aesthetics.save_profile(profile, args.out)
    print(f"learned profile for era {args.era} from {len(samples)} poems -> {args.out}")
    return 0


def cmd_generate(args) -> int:
    poems = _load_corpus(args.corpus)
    profile = aesthetics.load_profile(args.profile)
    resources = _load_resources(args, poems)
    cfg = _run_config(args)
    rng = random.Random(cfg.rng_seed)

    if args.seed_poem_id is not None:
        matches = [p for p in poems if p.id == args.seed_poem_id]
        if not matches:
            raise DataError(f"no poem with id {args.seed_poem_id!r} in corpus")
        seed_poem = matches[0]
    else:
        seed_poem = poems[rng.randrange(len(poems))]

    try:
        result = master.run(seed_poem, args.theme, cfg, profile, resources, rng, _threads(args))
    except master.ThemeError as exc:
        raise DataError(str(exc)) from exc

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    survivors = [
        corpus.Poem(
            id=f"{seed_poem.id}~{i}",
            verses=s.individual.poem.verses,
            era_label=seed_poem.era_label,
        )
        for i, s in enumerate(result.survivors, start=1)
    ]
    (out_dir / "poems.conllu").write_text(corpus.serialize_corpus(survivors), encoding="utf-8")
    report = {
        "config": json.loads(cfg.to_json()),
        "profile_era": profile.era,
        "seed_poem_id": seed_poem.id,
        "theme": args.theme,
        "survivors": [
            {
                "id": survivors[i].id,
                "theme": s.individual.theme,
                "lineage": s.individual.lineage,
                "fitness": {
                    "sonic": s.fitness.sonic,
                    "semantic": s.fitness.semantic,
                    "imagerial": s.fitness.imagerial,
                    "metaphorical": s.fitness.metaphorical,
                },
                "liked": s.liked,
                "text": s.individual.poem.text(),
            }
            for i, s in enumerate(result.survivors)
        ],
    }
    (out_dir / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    liked = sum(1 for s in result.survivors if s.liked)
    print(
        f"evolved {len(result.survivors)} poems over {result.generations_run} generations "
        f"({liked} liked) -> {out_dir}"
    )
    return 0


def cmd_frame(args) -> int:
    poems = _load_corpus(args.poems)
    if args.poem_id is not None:
        matches = [p for p in poems if p.id == args.poem_id]
        if not matches:
            raise DataError(f"no poem with id {args.poem_id!r}")
        poem = matches[0]
    else:
        poem = poems[0]
    resources = _load_resources(args, poems)
    rng = random.Random(args.seed or 0)
    analysis = aesthetics.analyze(poem, resources)
    doc = framing.generate_framing(poem, analysis, resources, rng, language=args.language)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "framing.txt").write_text(framing.render_framing(poem, doc), encoding="utf-8")
    (out_dir / "framing.json").write_text(framing.framing_to_json(doc), encoding="utf-8")
    print(f"framed poem {poem.id} -> {out_dir}")
    return 0


def _read_poem_file(path: str, lookup: corpus.SurfaceLookup | None) -> list[corpus.Poem]:
    """Poems from a corpus-format or plain-text file (detected per file)."""
    text = Path(path).read_text(encoding="utf-8")
    if any(line.count("\t") >= 2 for line in text.splitlines()):
        return corpus.load_stanza_poems(text)
    stem = Path(path).stem
    return corpus.annotate_plain(text, lookup, id_prefix=stem)


def cmd_like(args) -> int:
    lookup = None
    pos_poems: list[corpus.Poem] = []
    if args.annotate_from:
        pos_poems = _load_corpus(args.annotate_from)
        lookup = corpus.SurfaceLookup(pos_poems)
    resources = _load_resources(args, pos_poems)
    profiles = [aesthetics.load_profile(p) for p in args.profiles]

    rows: list[dict] = []
    for path in args.poems:
        poems = _read_poem_file(path, lookup)
        liked_pct: list[float | None] = []
        for profile in profiles:
            if not poems:
                liked_pct.append(None)
                continue
            liked = sum(1 for poem in poems if aesthetics.likes(poem, profile, resources))
            liked_pct.append(round(100.0 * liked / len(poems), 1))
        rows.append({"poems": path, "n": len(poems), "liked_pct": liked_pct})

    matrix = {"profiles": [p.era for p in profiles], "rows": rows}
    print("\t".join(["poems", "n"] + [f"liked by {p.era} (%)" for p in profiles]))
    for row in rows:
        cells = [str(row["poems"]), str(row["n"])]
        cells.extend("n/a" if v is None else str(v) for v in row["liked_pct"])
        print("\t".join(cells))
    if args.out:
        Path(args.out).write_text(
            json.dumps(matrix, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
    return 0


def cmd_export_pairs(args) -> int:
    poems = _load_corpus(args.corpus)
    profile = aesthetics.load_profile(args.profile)
    resources = _load_resources(args, poems)
    cfg = _run_config(args)
    rng = random.Random(cfg.rng_seed)
    vocabulary = resources.embeddings.vocabulary

    pairs: list[tuple[corpus.Poem, corpus.Poem]] = []
    for _ in range(args.n_runs):
        seed_poem = poems[rng.randrange(len(poems))]
        theme = vocabulary[rng.randrange(len(vocabulary))]
        result = master.run(seed_poem, theme, cfg, profile, resources, rng, _threads(args))
        pairs.append((seed_poem, result.best(rng).individual.poem))

    records = master.export_pairs(pairs, era=profile.era)
    master.write_pairs_jsonl(records, args.out)
    print(f"exported {len(records)} verse pairs from {args.n_runs} runs -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="runokone", description=__doc__)
    parser.add_argument("--seed", type=int, default=None, help="run RNG seed")
    parser.add_argument("--config", default=None, help="JSON run-config file")
    parser.add_argument("--threads", type=int, default=None, help="scoring threads")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="learn an era's aesthetic profile")
    p.add_argument("--corpus", required=True)
    p.add_argument("--era", type=int, required=True)
    p.add_argument("--out", required=True)
    _add_resource_args(p)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("generate", help="evolve poems from a seed poem")
    p.add_argument("--corpus", required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--theme", required=True)
    p.add_argument("--seed-poem-id", default=None)
    p.add_argument("--out-dir", required=True)
    _add_resource_args(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("frame", help="generate framing statements for a poem")
    p.add_argument("--poems", required=True, help="corpus-format poem file")
    p.add_argument("--poem-id", default=None)
    p.add_argument("--language", default="fi", choices=("fi", "en"))
    p.add_argument("--out-dir", required=True)
    _add_resource_args(p)
    p.set_defaults(func=cmd_frame)

    p = sub.add_parser("like", help="liking matrix of poem sets against profiles")
    p.add_argument("--profiles", nargs="+", required=True)
    p.add_argument("--poems", nargs="+", required=True, help="corpus-format or plain-text files")
    p.add_argument("--annotate-from", default=None, help="corpus for annotating plain text")
    p.add_argument("--out", default=None, help="write the matrix as JSON")
    _add_resource_args(p)
    p.set_defaults(func=cmd_like)

    p = sub.add_parser("export-pairs", help="run the master and export training pairs")
    p.add_argument("--corpus", required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--n-runs", type=int, required=True)
    p.add_argument("--out", required=True)
    _add_resource_args(p)
    p.set_defaults(func=cmd_export_pairs)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataError, corpus.CorpusError, lexres.LexresError) as exc:
        print(f"runokone: {exc}", file=sys.stderr)
        return DATA_EXIT
    except FileNotFoundError as exc:
        print(f"runokone: {exc}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
