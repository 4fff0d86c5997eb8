"""Evaluation harness: seeded noise channel, WER, and end-to-end accuracy.

The real system's TTS-to-ASR channel is replaced by a parametric noise model so
experiments run offline and reproduce bit-for-bit: a corpus is sampled from the
grammar, corrupted, and dispatched through a fresh engine session. Reported per
condition: mean word error rate (clean vs corrupted), intent accuracy (action
id and slot bindings both equal to ground truth), and repair recovery rate
(the fraction of corrupted utterances that fell out of the language but still
executed the right intent).
"""

from __future__ import annotations

import json
import random
import zlib
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .actions import ActionCatalog
from .dispatch import EngineSettings, Session
from .grammar import (
    GrammarDoc,
    Literal,
    Optional_,
    Slot,
    convert_slot,
    language_membership,
    render_number,
    render_ordinal,
    tokenize,
)
from .repair import DEFAULT_FILLERS, strip_fillers, token_edit_distance

_LETTERS = "abcdefghijklmnopqrstuvwxyz"

# Spoken sample pools for slot types: entries are token tuples.
FILENAME_POOL = [
    ("readme", "md"), ("main", "py"), ("app", "java"), ("engine", "kt"),
    ("lib", "rs"), ("docs", "md"), ("data", "yaml"), ("schema", "xml"),
    ("server", "go"), ("client", "js"), ("index", "ts"), ("notes", "txt"),
    ("config", "json"), ("my", "utils", "py"), ("setup", "py"),
]
PATH_POOL = [
    ("src",), ("docs",), ("src", "main"), ("src", "tests"), ("docs", "api"),
    ("build", "output"), ("assets",), ("scripts",), ("src", "main", "java"),
]
WORD_POOL = [
    "alpha", "beta", "gamma", "delta", "main", "utils", "parser", "engine",
    "config", "docs", "build", "tests", "demo", "sample", "core", "shared",
    "legacy", "server", "client", "data",
]
WORDS_POOL = [
    ("alpha",), ("beta",), ("demo", "project"), ("sample", "app"),
    ("core", "engine"), ("legacy", "code"), ("shared", "utils"), ("test", "data"),
]


@dataclass(frozen=True)
class NoiseModel:
    p_sub: float = 0.0
    p_del: float = 0.0
    p_ins: float = 0.0
    filler_rate: float = 0.0
    confusion: tuple[tuple[str, tuple[str, ...]], ...] = ()
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("p_sub", "p_del", "p_ins", "filler_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be a probability, got {value}")

    def confusion_map(self) -> dict[str, tuple[str, ...]]:
        return dict(self.confusion)


def wer(reference: Sequence[str], hypothesis: Sequence[str]) -> float:
    """(substitutions + deletions + insertions) / len(reference) under a
    minimal word-level alignment. May exceed 1.0; empty reference is an error."""
    if not reference:
        raise ValueError("wer is undefined for an empty reference")
    distance, _ = token_edit_distance(list(reference), list(hypothesis))
    return distance / len(reference)


def _perturb_token(token: str, rng: random.Random) -> str:
    """One random character edit; always returns something different from the
    input when possible."""
    for _ in range(8):
        op = rng.choice(("replace", "delete", "insert"))
        pos = rng.randrange(len(token)) if token else 0
        if op == "replace" and token:
            out = token[:pos] + rng.choice(_LETTERS) + token[pos + 1:]
        elif op == "delete" and len(token) > 1:
            out = token[:pos] + token[pos + 1:]
        else:
            out = token[:pos] + rng.choice(_LETTERS) + token[pos:]
        if out and out != token:
            return out
    return token + rng.choice(_LETTERS)


def corrupt(tokens: Sequence[str], noise: NoiseModel) -> list[str]:
    """Apply the noise channel: per-token deletion then substitution (confusion
    map when present, character perturbation otherwise), per-gap insertions
    (a repeated token from the utterance), and per-gap filler words. Output is
    fully determined by the model's seed."""
    rng = random.Random(noise.seed)
    confusion = noise.confusion_map()
    source = list(tokens)
    out: list[str] = []

    def maybe_insert() -> None:
        if noise.p_ins > 0 and rng.random() < noise.p_ins and source:
            out.append(rng.choice(source))
        if noise.filler_rate > 0 and rng.random() < noise.filler_rate:
            out.append(rng.choice(sorted(DEFAULT_FILLERS)))

    for token in source:
        maybe_insert()
        if noise.p_del > 0 and rng.random() < noise.p_del:
            continue
        if noise.p_sub > 0 and rng.random() < noise.p_sub:
            candidates = confusion.get(token)
            if candidates:
                out.append(rng.choice(list(candidates)))
            else:
                out.extend(tokenize(_perturb_token(token, rng)))
            continue
        out.append(token)
    maybe_insert()
    return out


@dataclass(frozen=True)
class CorpusSample:
    tokens: tuple[str, ...]
    action: str
    bindings: dict
    pattern_index: int

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


def _sample_slot(slot: Slot, rng: random.Random) -> tuple[str, ...]:
    if slot.type == "filename":
        return rng.choice(FILENAME_POOL)
    if slot.type == "path":
        return rng.choice(PATH_POOL)
    if slot.type == "word":
        return (rng.choice(WORD_POOL),)
    if slot.type in ("words", "phrase"):
        return rng.choice(WORDS_POOL)
    if slot.type == "ordinal":
        return tuple(render_ordinal(rng.randint(1, 20)).split())
    if slot.type == "number":
        return tuple(render_number(rng.randint(1, 20)).split())
    if slot.type == "multiplier":
        return (rng.choice(["once", "twice", "thrice"]),)
    raise ValueError(f"no sample pool for slot type {slot.type!r}")


def generate_corpus(grammar: GrammarDoc, n: int, seed: int = 0) -> list[CorpusSample]:
    """Sample n in-language utterances with their ground-truth intents.

    Patterns are drawn uniformly; slots fill from fixed spoken pools; optional
    groups toss a fair coin. Engine-control and binding patterns (actions in
    the Idiolect namespace) are excluded: pausing the recognizer or rebinding
    phrases mid-experiment would poison every later measurement.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    eligible = [
        (i, p) for i, p in enumerate(grammar.patterns)
        if not p.action.startswith("Idiolect.")
    ]
    if not eligible:
        raise ValueError("grammar has no patterns eligible for corpus generation")
    rng = random.Random(seed)
    samples: list[CorpusSample] = []
    for _ in range(n):
        index, pattern = rng.choice(eligible)
        tokens: list[str] = []
        bindings: dict = {}

        def emit(elements) -> None:
            for el in elements:
                if isinstance(el, Literal):
                    tokens.append(el.text)
                elif isinstance(el, Slot):
                    span = _sample_slot(el, rng)
                    tokens.extend(span)
                    bindings[el.name] = convert_slot(el.type, list(span))
                elif isinstance(el, Optional_):
                    if rng.random() < 0.5:
                        emit(el.elements)

        emit(pattern.elements)
        samples.append(
            CorpusSample(
                tokens=tuple(tokens),
                action=pattern.action,
                bindings=bindings,
                pattern_index=index,
            )
        )
    return samples


@dataclass(frozen=True)
class NoiseCondition:
    label: str
    noise: NoiseModel


@dataclass(frozen=True)
class ConditionResult:
    condition: str
    noise: NoiseModel
    n: int
    mean_wer: float
    intent_accuracy: float
    repair_recovery: float


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[ConditionResult, ...]
    corpus_size: int
    seed: int
    traces: tuple = ()

    def to_csv(self) -> str:
        lines = ["condition,p_sub,p_del,p_ins,filler_rate,n,mean_wer,intent_accuracy,repair_recovery"]
        for row in self.rows:
            noise = row.noise
            lines.append(
                f"{row.condition},{noise.p_sub:g},{noise.p_del:g},{noise.p_ins:g},"
                f"{noise.filler_rate:g},{row.n},{row.mean_wer:.6f},"
                f"{row.intent_accuracy:.6f},{row.repair_recovery:.6f}"
            )
        return "\n".join(lines) + "\n"

    def traces_json(self) -> str:
        return json.dumps(list(self.traces), indent=2)


def _condition_seed(base_seed: int, label: str) -> int:
    return (base_seed * 1000003 + zlib.crc32(label.encode("utf-8"))) & 0x7FFFFFFF


def default_noise_grid() -> list[NoiseCondition]:
    return [
        NoiseCondition("00-clean", NoiseModel()),
        NoiseCondition("01-fillers", NoiseModel(filler_rate=0.3)),
        NoiseCondition("02-light-sub", NoiseModel(p_sub=0.05)),
        NoiseCondition("03-heavy-sub", NoiseModel(p_sub=0.2)),
        NoiseCondition("04-mixed", NoiseModel(p_sub=0.1, p_del=0.05, p_ins=0.05, filler_rate=0.1)),
    ]


def run_harness(
    grammar: GrammarDoc,
    catalog: ActionCatalog,
    noise_grid: Optional[Sequence[NoiseCondition]] = None,
    n: int = 100,
    seed: int = 42,
    settings: EngineSettings = EngineSettings(),
    collect_traces: bool = False,
) -> EvalReport:
    """Corpus -> noise channel -> recognition, one fresh session per condition.

    WER compares the clean utterance against its corrupted form (before any
    filler stripping). Intent accuracy demands the executed action id and all
    slot bindings equal the ground truth. Repair recovery is measured over the
    corrupted utterances that left the language; when none did, the rate is
    reported as 1.0 (vacuously complete). Listening is re-enabled between
    samples so a corrupted utterance that happens to hit the sleep phrase
    cannot silence the rest of the condition.
    """
    grid = list(noise_grid) if noise_grid is not None else default_noise_grid()
    corpus = generate_corpus(grammar, n, seed)
    rows: list[ConditionResult] = []
    traces: list[dict] = []
    for condition in sorted(grid, key=lambda c: c.label):
        base = _condition_seed(seed, condition.label)
        session = Session(catalog, [grammar], settings=settings,
                          session_id=f"eval-{condition.label}")
        wer_total = 0.0
        intent_hits = 0
        out_of_language = 0
        recovered = 0
        for i, sample in enumerate(corpus):
            noise = replace(condition.noise, seed=base + i * 9973)
            corrupted = corrupt(sample.tokens, noise)
            wer_value = wer(sample.tokens, corrupted)
            wer_total += wer_value
            stripped, _ = strip_fillers(corrupted, settings.fillers)
            in_language = (
                bool(stripped) and language_membership(grammar, stripped) is not None
            )
            session.listening = True
            outcome = session.dispatch_text(" ".join(corrupted))
            hit = (
                outcome.kind == "executed"
                and outcome.record is not None
                and outcome.record.ok
                and outcome.record.intent.action == sample.action
                and outcome.record.intent.bindings == sample.bindings
            )
            intent_hits += int(hit)
            if not in_language:
                out_of_language += 1
                recovered += int(hit)
            if collect_traces:
                traces.append({
                    "condition": condition.label,
                    "index": i,
                    "clean": sample.text,
                    "corrupted": " ".join(corrupted),
                    "wer": round(wer_value, 6),
                    "truth_action": sample.action,
                    "outcome": outcome.kind,
                    "hit": hit,
                    "out_of_language": not in_language,
                })
        n_samples = len(corpus)
        rows.append(
            ConditionResult(
                condition=condition.label,
                noise=condition.noise,
                n=n_samples,
                mean_wer=wer_total / n_samples,
                intent_accuracy=intent_hits / n_samples,
                repair_recovery=(recovered / out_of_language) if out_of_language else 1.0,
            )
        )
    return EvalReport(
        rows=tuple(rows), corpus_size=len(corpus), seed=seed, traces=tuple(traces)
    )
