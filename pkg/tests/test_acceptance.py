"""Acceptance criteria, one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` (or `-rA`) to see the lines.
"""

import random
import time

import pytest

from idiolect.actions import ActionCatalog, load_default_catalog, make_descriptor
from idiolect.dispatch import EngineSettings, Session, UtteranceInput
from idiolect.evaluation import (
    NoiseCondition,
    NoiseModel,
    corrupt,
    generate_corpus,
    run_harness,
    wer,
)
from idiolect.grammar import language_membership, parse_grammar
from idiolect.ranker import rank
from idiolect.repair import (
    DEFAULT_FILLERS,
    grammar_vocabulary,
    minimal_repair_phrases,
    repair,
    strip_fillers,
)

from oracles import OracleGrammar, oracle_edit_distance, oracle_repair


def report(line: str) -> None:
    print(f"PASS: {line}")


# --- 1. WER oracle equivalence ------------------------------------------------


def test_wer_oracle_equivalence_1000_pairs():
    rng = random.Random(20240809)
    pool = ["open", "file", "save", "all", "the", "line", "goto", "a", "b", "uh"]
    started = time.monotonic()
    for _ in range(1000):
        ref = [rng.choice(pool) for _ in range(rng.randint(1, 8))]
        hyp = [rng.choice(pool) for _ in range(rng.randint(0, 8))]
        expected = oracle_edit_distance(tuple(ref), tuple(hyp)) / len(ref)
        assert wer(ref, hyp) == pytest.approx(expected)
    elapsed = time.monotonic() - started
    assert elapsed < 10.0, f"took {elapsed:.1f}s"
    report(f"WER matches brute-force alignment oracle on 1000 pairs ({elapsed:.1f}s)")


# --- 2. repair oracle equivalence ----------------------------------------------

_FILES_GRAMMAR = parse_grammar(
    'command "open file <f:filename>" -> OpenFile(file=f)\n'
    'command "open folder <p:path>" -> OpenFolder(path=p)\n'
    'command "close the file" -> CloseFile\n'
    'command "save all" -> SaveAll\n'
    'command "run the tests" -> RunTests\n'
    'command "find <w:words> in files" -> FindInFiles(query=w)\n'
    'command "replace <a:word> with <b:word>" -> Replace(target=a, replacement=b)\n'
    'command "show the terminal" -> ShowTerminal\n'
)

_NAV_GRAMMAR = parse_grammar(
    'command "go to start" -> GotoStart\n'
    'command "go to end" -> GotoEnd\n'
    'command "next page" -> NextPage\n'
    'command "last page" -> LastPage\n'
    'command "scroll up" -> ScrollUp\n'
    'command "scroll down" -> ScrollDown\n'
    'command "open tab <t:word>" -> OpenTab(tab=t)\n'
    'command "close tab <t:word>" -> CloseTab(tab=t)\n'
    'command "move tab <t:word> [to end]" -> MoveTab(tab=t)\n'
    'command "mark <w:words>" -> Mark(what=w)\n'
    'command "clear marks" -> ClearMarks\n'
    'command "split view" -> SplitView\n'
    'command "merge view" -> MergeView\n'
    'command "zoom in" -> ZoomIn\n'
    'command "zoom out" -> ZoomOut\n'
)


def _big_grammar():
    verbs = ["open", "close", "start", "stop", "show", "hide"]
    things = ["editor", "panel", "view", "log", "map", "list"]
    lines = [
        f'command "{v} the {t}" -> A{v.title()}{t.title()}'
        for v in verbs for t in things
    ]
    lines.append('command "pick <w:word> from <s:words>" -> Pick(item=w, source=s)')
    lines.append('command "drop <w:words>" -> Drop(what=w)')
    doc = parse_grammar("\n".join(lines))
    assert not doc.errors
    return doc


def _corrupt_with_ops(sample_tokens, vocab, rng):
    """Seeded 1-2 token edits plus occasional fillers and gibberish."""
    tokens = list(sample_tokens)
    roll = rng.random()
    n_ops = 1 if roll < 0.6 else 2
    if roll > 0.92:
        return [rng.choice(["zork", "grue", "xyzzy"]) for _ in range(rng.randint(2, 4))]
    for _ in range(n_ops):
        op = rng.choice(["del", "sub", "ins", "chars"])
        if op == "del" and len(tokens) > 1:
            tokens.pop(rng.randrange(len(tokens)))
        elif op == "sub" and tokens:
            tokens[rng.randrange(len(tokens))] = rng.choice(vocab + ["blip"])
        elif op == "chars" and tokens:
            i = rng.randrange(len(tokens))
            t = tokens[i]
            j = rng.randrange(len(t))
            tokens[i] = (t[:j] + t[j + 1:]) or "q"
        else:
            tokens.insert(rng.randrange(len(tokens) + 1), rng.choice(vocab))
    if rng.random() < 0.2:
        tokens.insert(rng.randrange(len(tokens) + 1), rng.choice(sorted(DEFAULT_FILLERS)))
    return tokens


def test_repair_oracle_equivalence_three_grammars():
    started = time.monotonic()
    grammars = [_FILES_GRAMMAR, _NAV_GRAMMAR, _big_grammar()]
    total = 0
    for g_index, grammar in enumerate(grammars):
        assert len(grammar.patterns) <= 50
        vocab = grammar_vocabulary(grammar)
        assert len(vocab) <= 60
        og = OracleGrammar(grammar)
        rng = random.Random(1000 + g_index)
        corpus = generate_corpus(grammar, 60, seed=500 + g_index)
        for i in range(200):
            sample = corpus[i % len(corpus)]
            tokens = _corrupt_with_ops(sample.tokens, vocab, rng)
            got = [(c.pattern_index, c.phrase, c.distance) for c in repair(tokens, grammar)]
            want = oracle_repair(tokens, grammar, oracle_grammar=og)
            assert got == want, f"grammar {g_index}, tokens {tokens}"
            total += 1
    elapsed = time.monotonic() - started
    assert elapsed < 60.0, f"took {elapsed:.1f}s"
    report(f"repair equals brute-force neighborhood oracle on {total} samples ({elapsed:.1f}s)")


# --- 3. near-miss scenario reproduction ---------------------------------------


def test_near_miss_scenario_reproduction():
    grammar = parse_grammar(
        'command "open file <f:filename>" -> OpenFile(file=f)\n'
        'command "open folder <p:path>" -> OpenFolder(path=p)\n'
    )
    catalog = ActionCatalog()
    catalog.register(make_descriptor("OpenFile"))
    catalog.register(make_descriptor("OpenFolder"))
    session = Session(catalog, [grammar])
    outcome = session.dispatch_text("open uh foo java")
    assert outcome.kind == "needs_disambiguation"
    prompt = outcome.prompt
    assert [o.display for o in prompt.options] == [
        "open file foo.java", "open folder foo/java", "something else",
    ]
    assert prompt.text == (
        "Did you mean (a) open file foo.java, (b) open folder foo/java, "
        "or (c) something else?"
    )
    resolved = session.resolve(prompt.prompt_id, "a")
    assert resolved.kind == "executed"
    assert resolved.record.intent.action == "OpenFile"
    assert resolved.record.intent.bindings == {"f": "foo.java"}
    report('"open uh foo java" yields exactly the two candidates and a 3-option prompt')


# --- 4. zero-noise round trip ---------------------------------------------------


def test_zero_noise_round_trip(default_grammar):
    started = time.monotonic()
    catalog = load_default_catalog()
    report_data = run_harness(
        default_grammar, catalog,
        [NoiseCondition("clean", NoiseModel())],
        n=100, seed=42,
    )
    elapsed = time.monotonic() - started
    row = report_data.rows[0]
    assert row.n == 100
    assert row.mean_wer == 0.0
    assert row.intent_accuracy == 1.0
    assert elapsed < 5.0, f"took {elapsed:.1f}s"
    report(f"zero-noise: intent accuracy 1.0, mean WER 0.0 over 100 utterances ({elapsed:.1f}s)")


# --- 5. filler neutrality --------------------------------------------------------


def test_filler_neutrality_ten_seeds(default_grammar):
    catalog = load_default_catalog()
    for seed in range(10):
        report_data = run_harness(
            default_grammar, catalog,
            [NoiseCondition("fillers", NoiseModel(filler_rate=0.3))],
            n=100, seed=seed,
        )
        row = report_data.rows[0]
        assert row.intent_accuracy == 1.0, f"seed {seed}: {row.intent_accuracy}"
    report("filler_rate=0.3 keeps intent accuracy 1.0 over 100 utterances x 10 seeds")


# --- 6. unique-repair recovery ----------------------------------------------------


def test_unique_repair_recovery(default_grammar):
    """Two forms of the guarantee; a repair counts as unique only when the set
    of ALL minimal-distance in-language phrases is a singleton.

    General corrupted corpora: every utterance with a unique minimal repair
    within 2 edits executes exactly that repair (the pipeline never drops or
    mangles one). Ground truth can differ when the noise landed inside a slot
    value: the transcript then faithfully repairs to the corrupted value,
    which no grammar-level recognizer could undo.

    Literal-only corruption: when noise strikes only the command's literal
    structure, unique minimal repairs recover the ground-truth intent, 100%.
    """
    catalog = load_default_catalog()
    settings = EngineSettings()
    conditions = [
        NoiseModel(p_sub=0.15, seed=0),
        NoiseModel(p_del=0.12, seed=0),
        NoiseModel(p_sub=0.1, p_ins=0.08, filler_rate=0.1, seed=0),
    ]
    corpus = generate_corpus(default_grammar, 100, seed=7)

    def unique_minimal(corrupted):
        dmin, phrases = minimal_repair_phrases(
            corrupted, default_grammar, settings.max_edits, settings.fillers
        )
        if dmin is None or dmin > 2 or len(phrases) != 1:
            return None
        candidates = repair(corrupted, default_grammar,
                            settings.max_edits, settings.fillers)
        assert len(candidates) == 1 and candidates[0].phrase in phrases
        return candidates[0]

    subset = 0
    executed_as_repaired = 0
    for c_index, base_noise in enumerate(conditions):
        session = Session(catalog, [default_grammar], settings=settings)
        for i, sample in enumerate(corpus):
            noise = NoiseModel(
                p_sub=base_noise.p_sub, p_del=base_noise.p_del,
                p_ins=base_noise.p_ins, filler_rate=base_noise.filler_rate,
                seed=9000 * (c_index + 1) + i,
            )
            corrupted = corrupt(sample.tokens, noise)
            stripped, _ = strip_fillers(corrupted, settings.fillers)
            if not stripped or language_membership(default_grammar, stripped) is not None:
                continue
            unique = unique_minimal(corrupted)
            if unique is None:
                continue
            subset += 1
            session.listening = True
            outcome = session.dispatch_text(" ".join(corrupted))
            hit = (
                outcome.kind == "executed"
                and outcome.record.intent.action == unique.pattern.action
                and outcome.record.intent.bindings == unique.bindings
            )
            executed_as_repaired += int(hit)
    assert subset > 20, f"subset unexpectedly small: {subset}"
    assert executed_as_repaired == subset, f"{executed_as_repaired}/{subset}"

    # literal-only corruption: unique repairs recover the ground truth
    rng = random.Random(321)
    session = Session(catalog, [default_grammar], settings=settings)
    truth_subset = 0
    truth_recovered = 0
    for sample in corpus:
        member = language_membership(default_grammar, list(sample.tokens))
        slot_positions = {
            i for _, (s, e) in member.detail.slot_spans.items() for i in range(s, e)
        }
        literal_positions = [i for i in range(len(sample.tokens))
                             if i not in slot_positions]
        if not literal_positions:
            continue
        corrupted = list(sample.tokens)
        target = rng.choice(literal_positions)
        token = corrupted[target]
        j = rng.randrange(len(token))
        corrupted[target] = (token[:j] + token[j + 1:]) or "q"
        if language_membership(default_grammar, corrupted) is not None:
            continue
        if unique_minimal(corrupted) is None:
            continue
        truth_subset += 1
        session.listening = True
        outcome = session.dispatch_text(" ".join(corrupted))
        hit = (
            outcome.kind == "executed"
            and outcome.record.intent.action == sample.action
            and outcome.record.intent.bindings == sample.bindings
        )
        truth_recovered += int(hit)
    assert truth_subset > 20, f"literal-noise subset too small: {truth_subset}"
    assert truth_recovered == truth_subset, f"{truth_recovered}/{truth_subset}"
    report(
        f"unique repairs: {executed_as_repaired}/{subset} executed as repaired; "
        f"{truth_recovered}/{truth_subset} ground-truth recoveries under literal noise"
    )


# --- 7. dispatch invariants under generated cases ---------------------------------


def _random_utterances(default_grammar, rng, count):
    corpus = generate_corpus(default_grammar, count, seed=rng.randint(0, 10**6))
    vocab = grammar_vocabulary(default_grammar)
    out = []
    for sample in corpus:
        roll = rng.random()
        if roll < 0.4:
            out.append(list(sample.tokens))
        elif roll < 0.8:
            out.append(_corrupt_with_ops(sample.tokens, vocab, rng))
        else:
            out.append([rng.choice(["zork", "blue", "xyzzy", "fizz"])
                        for _ in range(rng.randint(1, 5))])
    return out


def test_dispatch_invariants_1000_cases(default_grammar):
    catalog = load_default_catalog()
    rng = random.Random(99)
    cases = 0

    # single consumption: no recognizer past the consuming rank is called
    session = Session(catalog, [default_grammar])
    rank_of = {r.name: r.rank for r in session.chain}
    for tokens in _random_utterances(default_grammar, rng, 400):
        session.listening = True
        before = {r.name: r.calls for r in session.chain}
        outcome = session.dispatch(UtteranceInput.from_text(" ".join(tokens)))
        after = {r.name: r.calls for r in session.chain}
        if outcome.kind == "executed":
            consumed = rank_of[outcome.record.intent.provenance.recognizer]
            for recognizer in session.chain:
                if recognizer.rank > consumed:
                    assert after[recognizer.name] == before[recognizer.name]
        cases += 1

    # listening gate: while paused, rank > 0 recognizers receive zero calls
    session = Session(catalog, [default_grammar])
    session.dispatch_text("stop listening")
    for tokens in _random_utterances(default_grammar, rng, 300):
        before = {r.name: r.calls for r in session.chain}
        outcome = session.dispatch(UtteranceInput.from_text(" ".join(tokens) or "x"))
        after = {r.name: r.calls for r in session.chain}
        assert outcome.kind == "unrecognized"
        for recognizer in session.chain:
            if recognizer.rank > 0:
                assert after[recognizer.name] == before[recognizer.name]
        cases += 1

    # binding immediacy: once bound, the exact phrase executes with 0 repairs
    session = Session(
        catalog, [default_grammar], settings=EngineSettings(fallback_enabled=False)
    )
    oov = ["zork", "grue", "plugh", "fizz", "quux", "warble", "snark"]
    # engine-control actions would pause the session or rebind phrases mid-test
    actions = [d.id for d in catalog.descriptors()[:50]
               if not d.id.startswith("Idiolect.")]
    bound = 0
    for i in range(300):
        phrase_tokens = [rng.choice(oov) for _ in range(rng.randint(1, 3))] + [f"w{i}"]
        if language_membership(session.grammar, phrase_tokens) is not None:
            continue
        session.listening = True
        before_outcome = session.dispatch_text(" ".join(phrase_tokens))
        # out-of-language input is unrecognized or repaired (a prompt, or an
        # auto-repair with at least one edit onto some earlier binding)
        assert before_outcome.kind in ("unrecognized", "needs_disambiguation") or (
            before_outcome.record.intent.provenance.repair_edits > 0
        )
        action = rng.choice(actions)
        session.bind_phrase(" ".join(phrase_tokens), action)
        after_outcome = session.dispatch_text(" ".join(phrase_tokens))
        assert after_outcome.kind == "executed"
        assert after_outcome.record.intent.action == action
        assert after_outcome.record.intent.provenance.repair_edits == 0
        bound += 1
        cases += 1
    assert bound >= 250

    assert cases >= 1000
    report(f"dispatch invariants hold over {cases} generated cases")


# --- 8. WER monotonic in substitution noise ----------------------------------------


def test_wer_monotonic_in_substitution_rate(default_grammar):
    p_subs = [0.0, 0.05, 0.1, 0.2]
    means = []
    corpus = generate_corpus(default_grammar, 100, seed=42)
    for p_sub in p_subs:
        total = 0.0
        count = 0
        for seed in range(30):
            for i, sample in enumerate(corpus):
                noise = NoiseModel(p_sub=p_sub, seed=seed * 100003 + i)
                total += wer(sample.tokens, corrupt(sample.tokens, noise))
                count += 1
        means.append(total / count)
    for lower, higher in zip(means, means[1:]):
        assert lower <= higher, f"means not monotone: {means}"
    report(f"mean WER non-decreasing in p_sub: {[round(m, 4) for m in means]}")


# --- 9. ranking the edit-vs-execute example -----------------------------------------


def test_rank_prefers_open_over_execute():
    small = ActionCatalog()
    small.register(make_descriptor("OpenFile"))
    small.register(make_descriptor("ExecuteFile"))
    ranking = rank("I want to edit foo.java", small)
    scores = {r.action: r.score for r in ranking}
    assert ranking[0].action == "OpenFile"
    assert scores["OpenFile"] > scores["ExecuteFile"]

    full = load_default_catalog()
    full_rank = rank("I want to edit foo.java", full)
    full_scores = {r.action: r.score for r in full_rank}
    assert full_scores["OpenFile"] > full_scores["ExecuteFile"]
    report('"I want to edit foo.java" ranks OpenFile above ExecuteFile')


# --- 10. harness determinism ----------------------------------------------------------


def test_harness_determinism_byte_identical(default_grammar):
    catalog = load_default_catalog()
    grid = [
        NoiseCondition("00-clean", NoiseModel()),
        NoiseCondition("01-fillers", NoiseModel(filler_rate=0.3)),
        NoiseCondition("02-sub", NoiseModel(p_sub=0.1)),
        NoiseCondition("03-mixed", NoiseModel(p_sub=0.1, p_del=0.05, p_ins=0.05,
                                              filler_rate=0.1)),
    ]
    first = run_harness(default_grammar, catalog, grid, n=100, seed=77).to_csv()
    second = run_harness(default_grammar, catalog, grid, n=100, seed=77).to_csv()
    assert first.encode("utf-8") == second.encode("utf-8")
    report("two harness runs with the same seed produce byte-identical CSV")
