import io
import json
import logging
import random

import pytest

from runokone.aesthetics import identity_profile
from runokone.lexres import (
    ConcretenessLexicon,
    LexiconSentiment,
    PosLexicon,
    RelatednessModel,
    Resources,
    load_embeddings,
    load_morphology,
)
from runokone.master import (
    Individual,
    RunConfig,
    ThemeError,
    crossover,
    expand_theme,
    export_pairs,
    init_population,
    mutate,
    read_pairs_jsonl,
    run,
    write_pairs_jsonl,
)
from runokone.moo import dominates, fast_nondominated_sort

from conftest import FakeRng, make_poem, simple_poem


def test_run_config_paper_scale_defaults():
    cfg = RunConfig()
    assert cfg.population_size == 100
    assert cfg.offspring_size == 100
    assert cfg.generations == 50
    assert cfg.theme_expansion == 30
    assert cfg.related_pool == 1000
    assert cfg.similar_pool == 300


def test_run_config_validation_and_json():
    with pytest.raises(ValueError):
        RunConfig(population_size=0)
    with pytest.raises(ValueError):
        RunConfig(crossover_prob=1.5)
    cfg = RunConfig(population_size=10, generations=2)
    assert RunConfig.from_json(cfg.to_json()) == cfg


def test_expand_theme_matches_brute_force(toy_resources):
    store = toy_resources.embeddings
    expansion = expand_theme("vesi", store, 30)
    assert len(expansion) == 30
    expected = [w for w, _ in store.top_similar("vesi", 30)]
    assert expansion == expected


def test_expand_theme_capped_by_vocabulary():
    store = load_embeddings(io.StringIO("a 1 0\nb 0 1\nc 1 1\nd 2 1\ne 1 2\n"))
    assert len(expand_theme("a", store, 30)) == 4


def test_expand_theme_oov_raises_helpful_error(toy_resources):
    with pytest.raises(ThemeError, match="in-vocabulary"):
        expand_theme("zzz-ei-ole", toy_resources.embeddings, 5)


def _single_candidate_resources():
    """Only 'laine' is a viable replacement, via the theme-related pool."""
    reference = make_poem("ref", [[("laine", "laine", "NOUN"), ("talo", "talo", "NOUN")]])
    return Resources(
        embeddings=load_embeddings(io.StringIO("teema 1 0\nmuu 0 1\n")),
        relatedness=RelatednessModel({"teema": [("laine", 1.0), ("muu", 0.9)]}),
        concreteness=ConcretenessLexicon({}),
        sentiment=LexiconSentiment({}),
        morphology=load_morphology(
            io.StringIO(
                "laine\tCase=Par|Number=Sing\tlainet\n"
                "laine\tCase=Par|Number=Sing|deprel=obj\tlainetta\n"
            )
        ),
        pos_lexicon=PosLexicon.from_poems([reference]),
    )


def test_mutate_single_candidate_trace():
    res = _single_candidate_resources()
    poem = make_poem(
        "p",
        [[
            ("Hän", "hän", "PRON"),
            ("näki", "nähdä", "X"),
            ("vettä", "vesi", "NOUN", {"Case": "Par", "Number": "Sing"}, "obj"),
        ]],
    )
    ind = Individual(poem, "teema", "p")
    mutated, changed = mutate(ind, res, random.Random(0))
    assert changed
    token = mutated.poem.verses[0].tokens[2]
    # 'muu' fails the POS filter; 'talo' is not in the candidate pools;
    # 'laine' realizes through the object-inflection hook
    assert token.lemma == "laine"
    assert token.surface == "lainetta"
    assert token.pos == "NOUN"
    assert token.morph == {"Case": "Par", "Number": "Sing"}
    assert token.deprel == "obj"
    # everything else is untouched
    assert mutated.poem.verses[0].tokens[:2] == poem.verses[0].tokens[:2]
    assert mutated.theme == ind.theme


def test_mutate_no_candidates_is_noop():
    res = _single_candidate_resources()
    # verse whose only content word cannot be replaced: wrong POS pools
    poem = make_poem("p", [[("juoksi", "juosta", "VERB")]])
    ind = Individual(poem, "teema", "p")
    mutated, changed = mutate(ind, res, random.Random(0))
    assert not changed
    assert mutated.poem is poem


def test_mutate_no_content_words_is_noop():
    res = _single_candidate_resources()
    poem = make_poem("p", [[("ja", "ja", "CCONJ")]])
    ind = Individual(poem, "teema", "p")
    mutated, changed = mutate(ind, res, random.Random(0))
    assert not changed


def test_mutate_never_emits_bare_lemma_for_unknown_tags():
    res = _single_candidate_resources()
    poem = make_poem(
        "p", [[("vettä", "vesi", "NOUN", {"Case": "Ine", "Number": "Sing"})]]
    )
    ind = Individual(poem, "teema", "p")
    mutated, changed = mutate(ind, res, random.Random(0))
    assert not changed  # laine has no Ine entry, so the candidate is skipped


def test_mutate_preserves_structure_and_pos_100_seeded(toy_poems, toy_resources):
    rng = random.Random(7)
    poem = toy_poems[0]
    ind = Individual(poem, "vesi", poem.id)
    changed_count = 0
    for _ in range(100):
        mutated, changed = mutate(ind, toy_resources, rng)
        assert len(mutated.poem.verses) == len(poem.verses)
        diffs = []
        for vi, (va, vb) in enumerate(zip(poem.verses, mutated.poem.verses)):
            assert len(va.tokens) == len(vb.tokens)
            for ti, (ta, tb) in enumerate(zip(va.tokens, vb.tokens)):
                if ta != tb:
                    diffs.append((vi, ti, ta, tb))
        if changed:
            changed_count += 1
            assert len(diffs) == 1
            _, _, original, replacement = diffs[0]
            assert replacement.pos == original.pos
            assert replacement.morph == original.morph
            assert replacement.lemma != original.lemma
        else:
            assert diffs == []
    assert changed_count == 100  # toy resources always offer candidates


def test_crossover_far_right_cuts_give_identical_children():
    a = Individual(simple_poem("a", ["yksi sana", "toinen sana", "kolmas sana"]), "t1", "a")
    b = Individual(simple_poem("b", ["neljäs sana", "viides sana"]), "t2", "b")
    rng = FakeRng(randint=[3, 2])
    child_a, child_b = crossover(a, b, rng)
    assert child_a.poem.verses == a.poem.verses
    assert child_b.poem.verses == b.poem.verses


def test_crossover_definition_trace():
    a = Individual(simple_poem("a", ["a1", "a2", "a3"]), "t1", "a")
    b = Individual(simple_poem("b", ["b1", "b2"]), "t2", "b")
    rng = FakeRng(randint=[1, 1])
    child_a, child_b = crossover(a, b, rng)
    assert [v.text() for v in child_a.poem.verses] == ["a1", "b2"]
    assert [v.text() for v in child_b.poem.verses] == ["b1", "a2", "a3"]
    assert child_a.theme == "t1" and child_b.theme == "t2"


def test_crossover_conserves_total_verse_count_1000_trials():
    rng = random.Random(3)
    a = Individual(simple_poem("a", [f"a{i}" for i in range(4)]), "t1", "a")
    b = Individual(simple_poem("b", [f"b{i}" for i in range(3)]), "t2", "b")
    for _ in range(1000):
        child_a, child_b = crossover(a, b, rng)
        assert (
            len(child_a.poem.verses) + len(child_b.poem.verses)
            == len(a.poem.verses) + len(b.poem.verses)
        )
        assert len(child_a.poem.verses) >= 1
        assert len(child_b.poem.verses) >= 1


def test_init_population_size_and_themes(toy_poems, toy_resources):
    cfg = RunConfig(population_size=25, generations=0)
    rng = random.Random(5)
    expansion = set(expand_theme("vesi", toy_resources.embeddings, cfg.theme_expansion))
    population = init_population(toy_poems[0], "vesi", cfg, toy_resources, rng)
    assert len(population) == 25
    assert all(ind.theme in expansion for ind in population)
    assert all(ind.lineage == toy_poems[0].id for ind in population)
    for ind in population:
        # mutated exactly once: at most one token differs from the seed
        diffs = sum(
            ta != tb
            for va, vb in zip(toy_poems[0].verses, ind.poem.verses)
            for ta, tb in zip(va.tokens, vb.tokens)
        )
        assert diffs <= 1


def test_init_population_single_individual(toy_poems, toy_resources):
    cfg = RunConfig(population_size=1, generations=0)
    population = init_population(toy_poems[0], "vesi", cfg, toy_resources, random.Random(1))
    assert len(population) == 1


def _small_cfg(**kw):
    defaults = dict(population_size=12, offspring_size=12, generations=4, rng_seed=9)
    defaults.update(kw)
    return RunConfig(**defaults)


def test_run_zero_generations_returns_scored_initial_population(toy_poems, toy_resources):
    cfg = _small_cfg(generations=0)
    profile = identity_profile()
    result = run(toy_poems[0], "vesi", cfg, profile, toy_resources, random.Random(cfg.rng_seed))
    assert result.generations_run == 0
    assert len(result.survivors) == cfg.population_size
    assert len(result.objective_log) == cfg.population_size


def test_run_population_constant_after_each_selection(toy_poems, toy_resources):
    cfg = _small_cfg()
    profile = identity_profile()
    result = run(toy_poems[0], "vesi", cfg, profile, toy_resources, random.Random(cfg.rng_seed))
    assert len(result.survivors) == cfg.population_size
    expected_evals = cfg.population_size + cfg.generations * cfg.offspring_size
    assert len(result.objective_log) == expected_evals


def test_run_final_front_is_globally_nondominated(toy_poems, toy_resources):
    cfg = _small_cfg(generations=6)
    profile = identity_profile()
    result = run(toy_poems[0], "vesi", cfg, profile, toy_resources, random.Random(cfg.rng_seed))
    points = [(i, s.fitness.as_tuple()) for i, s in enumerate(result.survivors)]
    final_front = {
        result.survivors[i].fitness.as_tuple() for i in fast_nondominated_sort(points)[0]
    }
    for vector in final_front:
        assert not any(dominates(logged, vector) for logged in result.objective_log)


def test_run_reproducible_under_seed(toy_poems, toy_resources):
    cfg = _small_cfg()
    profile = identity_profile()
    results = [
        run(toy_poems[1], "meri", cfg, profile, toy_resources, random.Random(cfg.rng_seed))
        for _ in range(2)
    ]
    texts = [[s.individual.poem.text() for s in r.survivors] for r in results]
    fits = [[s.fitness.as_tuple() for s in r.survivors] for r in results]
    assert texts[0] == texts[1]
    assert fits[0] == fits[1]


def test_run_threads_do_not_change_results(toy_poems, toy_resources):
    cfg = _small_cfg(generations=2)
    profile = identity_profile()
    a = run(toy_poems[0], "vesi", cfg, profile, toy_resources, random.Random(1), threads=1)
    b = run(toy_poems[0], "vesi", cfg, profile, toy_resources, random.Random(1), threads=4)
    assert [s.individual.poem.text() for s in a.survivors] == [
        s.individual.poem.text() for s in b.survivors
    ]


def test_run_best_prefers_liked(toy_poems, toy_resources):
    cfg = _small_cfg(generations=3)
    profile = identity_profile()
    result = run(toy_poems[0], "vesi", cfg, profile, toy_resources, random.Random(2))
    best = result.best(random.Random(0))
    if any(s.liked for s in result.survivors):
        assert best.liked
    else:
        assert best.fitness.total() == max(s.fitness.total() for s in result.survivors)


def test_export_pairs_identity_and_per_verse_records():
    seed = simple_poem("runo", ["yksi kaksi", "kolme neljä", "viisi kuusi"])
    records = export_pairs([(seed, seed)], era=1800)
    assert len(records) == 3
    assert all(r["source"] == r["target"] for r in records)
    assert [r["verse_index"] for r in records] == [0, 1, 2]
    assert all(r["poem_id"] == "runo" and r["era"] == 1800 for r in records)


def test_export_pairs_skips_mismatched_verse_counts(caplog):
    seed = simple_poem("a", ["yksi", "kaksi"])
    output = simple_poem("b", ["yksi"])
    with caplog.at_level(logging.WARNING):
        records = export_pairs([(seed, output)])
    assert records == []
    assert "skipping pair export" in caplog.text


def test_pairs_jsonl_round_trip(tmp_path):
    seed = simple_poem("runo", ["yksi kaksi", "kolme neljä"])
    records = export_pairs([(seed, seed)], era="1900")
    path = tmp_path / "pairs.jsonl"
    write_pairs_jsonl(records, path)
    assert read_pairs_jsonl(path) == records
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            parsed = json.loads(line)
            assert set(parsed) == {"source", "target", "poem_id", "verse_index", "era"}
