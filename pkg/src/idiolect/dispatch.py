"""Turn-based dispatch: each utterance passes down a priority chain of
recognizers, the first match consumes it, and the resolved intent executes
against simulated action handlers.

Chain ranks (lower runs first):

      0  plugin control: wake/sleep phrases and the "whenever i say ..."
         binding meta-commands
     10  user-defined exact phrases
     20  user-defined slotted patterns
     30  default lexicon, exact phrases
     40  default slotted patterns
     50  edit-distance repair over the N-best alternatives
     60  fallback ranker (recognizer of last resort)

While the engine is not listening only rank 0 runs, and it matches nothing but
the wake phrase. Plugins may register recognizers at unused ranks without a
restart, and new phrase bindings are matchable by the very next dispatch.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, Union

from .actions import ActionCatalog, ActionError
from .grammar import (
    CommandPattern,
    GrammarDoc,
    Literal,
    match_pattern_detailed,
    merge_grammars,
    parse_grammar,
    render_pattern_line,
    tokenize,
)
from .ranker import (
    DescriptionIndex,
    RankerConfig,
    fallback_recognize,
    resolve_description,
)
from .repair import (
    DEFAULT_FILLERS,
    DEFAULT_MAX_EDITS,
    DEFAULT_RERANK_LAMBDA,
    DisambiguationPrompt,
    PromptOption,
    RepairCandidate,
    build_prompt,
    make_prompt,
    rerank_alternatives,
    strip_fillers,
)

# Event kinds, in the order they typically appear.
UTTERANCE_RECEIVED = "UtteranceReceived"
TRANSCRIBED = "Transcribed"
INTENT_RECOGNIZED = "IntentRecognized"
ACTION_EXECUTED = "ActionExecuted"
REPAIR_PROPOSED = "RepairProposed"
REPAIR_RESOLVED = "RepairResolved"
UNRECOGNIZED = "Unrecognized"
BINDING_ADDED = "BindingAdded"

EVENT_KINDS = frozenset({
    UTTERANCE_RECEIVED, TRANSCRIBED, INTENT_RECOGNIZED, ACTION_EXECUTED,
    REPAIR_PROPOSED, REPAIR_RESOLVED, UNRECOGNIZED, BINDING_ADDED,
})

PAUSE_ACTION = "Idiolect.Pause"
RESUME_ACTION = "Idiolect.Resume"
REPEAT_ACTION = "Idiolect.RepeatLast"
BIND_MACRO_ACTION = "Idiolect.BindMacro"
BIND_ACTION_ACTION = "Idiolect.BindAction"


class DispatchError(RuntimeError):
    pass


class UnknownPromptError(DispatchError):
    pass


@dataclass(frozen=True)
class UtteranceInput:
    """One spoken input as an N-best list of (text, confidence) alternatives,
    sorted by confidence descending (stable, so equal confidences keep their
    given order)."""

    alternatives: tuple[tuple[str, float], ...]
    id: int = 0

    @staticmethod
    def from_text(text: str, utterance_id: int = 0) -> "UtteranceInput":
        return UtteranceInput(alternatives=((text, 1.0),), id=utterance_id)

    @staticmethod
    def from_alternatives(
        alternatives: Sequence[tuple[str, float]], utterance_id: int = 0
    ) -> "UtteranceInput":
        if not alternatives:
            raise ValueError("utterance needs at least one alternative")
        for _, conf in alternatives:
            if not 0.0 <= conf <= 1.0:
                raise ValueError("confidence must be in [0, 1]")
        ordered = tuple(sorted(alternatives, key=lambda a: -a[1]))
        return UtteranceInput(alternatives=ordered, id=utterance_id)

    @property
    def top_text(self) -> str:
        return self.alternatives[0][0]


@dataclass(frozen=True)
class Provenance:
    recognizer: str
    alternative_index: int = 0
    repair_edits: int = 0
    matched_phrase: str = ""


@dataclass(frozen=True)
class Intent:
    action: str
    bindings: dict
    provenance: Provenance
    args: dict = field(default_factory=dict)  # bindings mapped to action argument names

    def to_payload(self) -> dict:
        return {
            "action": self.action,
            "bindings": dict(self.bindings),
            "recognizer": self.provenance.recognizer,
            "alternative_index": self.provenance.alternative_index,
            "repair_edits": self.provenance.repair_edits,
            "matched_phrase": self.provenance.matched_phrase,
        }


@dataclass(frozen=True)
class Diagnostic:
    """A recognizer pass that carries an explanation (e.g. backend down)."""

    message: str


RecognizerResult = Union[None, Intent, "PendingPrompt", Diagnostic]


@dataclass
class Recognizer:
    name: str
    rank: int
    fn: Callable[["UtteranceInput", "SessionContext"], RecognizerResult]
    calls: int = 0


@dataclass(frozen=True)
class ExecutionRecord:
    seq: int
    intent: Intent
    outcome: tuple[str, str]  # ("ok", effect) | ("error", message)
    timestamp: float

    @property
    def ok(self) -> bool:
        return self.outcome[0] == "ok"


@dataclass(frozen=True)
class Event:
    seq: int
    kind: str
    payload: dict

    def to_json(self) -> dict:
        return {"seq": self.seq, "kind": self.kind, "payload": self.payload}


class EventBus:
    """Append-only event log with cursor-based subscriptions (each subscriber
    sees every event after its subscription point exactly once, in order)."""

    def __init__(self) -> None:
        self._events: list[Event] = []
        self._lock = threading.Lock()

    def emit(self, kind: str, payload: dict) -> Event:
        assert kind in EVENT_KINDS, kind
        with self._lock:
            event = Event(seq=len(self._events) + 1, kind=kind, payload=payload)
            self._events.append(event)
            return event

    def events_after(self, seq: int, kinds: Optional[frozenset] = None) -> list[Event]:
        with self._lock:
            batch = self._events[seq:]
        if kinds is not None:
            batch = [e for e in batch if e.kind in kinds]
        return batch

    @property
    def last_seq(self) -> int:
        with self._lock:
            return len(self._events)

    def subscribe(self, kinds: Optional[Sequence[str]] = None) -> "Subscription":
        return Subscription(self, self.last_seq, frozenset(kinds) if kinds else None)


@dataclass
class Subscription:
    bus: EventBus
    cursor: int
    kinds: Optional[frozenset]

    def poll(self) -> list[Event]:
        events = self.bus.events_after(self.cursor)
        if events:
            self.cursor = events[-1].seq
        if self.kinds is not None:
            events = [e for e in events if e.kind in self.kinds]
        return events


@dataclass(frozen=True)
class SessionContext:
    listening: bool
    history: tuple[ExecutionRecord, ...]
    state: dict
    grammar: GrammarDoc
    catalog: ActionCatalog
    settings: "EngineSettings"


@dataclass
class PendingPrompt:
    prompt: DisambiguationPrompt
    intents: dict  # option label -> Intent | None ("something else")


@dataclass(frozen=True)
class DispatchOutcome:
    kind: str  # "executed" | "needs_disambiguation" | "unrecognized"
    record: Optional[ExecutionRecord] = None
    prompt: Optional[DisambiguationPrompt] = None


@dataclass(frozen=True)
class EngineSettings:
    wake_phrase: str = "start listening"
    sleep_phrase: str = "stop listening"
    fillers: frozenset = DEFAULT_FILLERS
    max_edits: int = DEFAULT_MAX_EDITS
    auto_repair: bool = True
    rerank_lambda: float = DEFAULT_RERANK_LAMBDA
    ranker: RankerConfig = RankerConfig()
    fallback_enabled: bool = True


# Meta-command patterns (rank 0). They also ship in the default grammar file so
# documentation and membership queries can see them.
_META_GRAMMAR = parse_grammar(
    'command "whenever i say <p:phrase> repeat the last action <n:number> times"'
    " -> Idiolect.BindMacro(phrase=p, count=n)\n"
    'command "whenever i say <p:phrase> repeat the last action <m:multiplier>"'
    " -> Idiolect.BindMacro(phrase=p, count=m)\n"
    'command "whenever i say <p:phrase> run <d:words>"'
    " -> Idiolect.BindAction(phrase=p, description=d)\n",
    source="default",
)
assert not _META_GRAMMAR.errors, _META_GRAMMAR.errors


def _intent_from_match(
    pattern: CommandPattern,
    bindings: dict,
    recognizer: str,
    alternative_index: int,
    matched_phrase: str,
    repair_edits: int = 0,
) -> Intent:
    args = {arg: bindings[slot] for slot, arg in pattern.arg_map if slot in bindings}
    args.update({arg: value for arg, value in pattern.const_args})
    return Intent(
        action=pattern.action,
        bindings=dict(bindings),
        args=args,
        provenance=Provenance(
            recognizer=recognizer,
            alternative_index=alternative_index,
            repair_edits=repair_edits,
            matched_phrase=matched_phrase,
        ),
    )


def meta_command_recognizer(
    utterance: UtteranceInput,
    context: SessionContext,
    index: DescriptionIndex | None = None,
) -> RecognizerResult:
    """Recognize the "whenever i say <phrase> ..." binding commands.

    The "run <description>" form resolves its description against the action
    catalog via the fallback ranker; a murky resolution prompts over the top
    ranked actions instead of guessing."""
    if not context.listening:
        return None
    settings = context.settings
    for alt_idx, (text, _conf) in enumerate(utterance.alternatives):
        tokens, _ = strip_fillers(tokenize(text), settings.fillers)
        for pattern in _META_GRAMMAR.patterns:
            detail = match_pattern_detailed(pattern, tokens)
            if detail is None:
                continue
            phrase_text = " ".join(tokens)
            if pattern.action == BIND_MACRO_ACTION:
                return _intent_from_match(
                    pattern, detail.bindings, "plugin-control", alt_idx, phrase_text
                )
            # BindAction: resolve the spoken description to an action id.
            description = detail.bindings["d"]
            decision = resolve_description(
                description, context.catalog, settings.ranker, index
            )
            if decision.kind == "accept":
                intent = _intent_from_match(
                    pattern, detail.bindings, "plugin-control", alt_idx, phrase_text
                )
                intent.args["target"] = decision.action
                return intent
            if decision.kind == "ambiguous":
                options = []
                intents = {}
                for ranked in decision.options:
                    descriptor = context.catalog.get(ranked.action)
                    display = f"{ranked.action} ({descriptor.description})"
                    base = _intent_from_match(
                        pattern, detail.bindings, "plugin-control", alt_idx, phrase_text
                    )
                    base.args["target"] = ranked.action
                    options.append(PromptOption(label="", display=display, action=ranked.action))
                    intents[display] = base
                prompt = build_prompt(options, prompt_id="", source="binding")
                mapping = {}
                for opt in prompt.options:
                    mapping[opt.label] = intents.get(opt.display)
                return PendingPrompt(prompt=prompt, intents=mapping)
            if decision.diagnostic:
                return Diagnostic(decision.diagnostic)
    return None


def _plugin_control_recognizer(utterance: UtteranceInput, context: SessionContext,
                               index_cache: Optional["_IndexCache"] = None) -> RecognizerResult:
    settings = context.settings
    wake = tokenize(settings.wake_phrase)
    sleep = tokenize(settings.sleep_phrase)
    for alt_idx, (text, _conf) in enumerate(utterance.alternatives):
        tokens, _ = strip_fillers(tokenize(text), settings.fillers)
        if tokens == wake:
            return Intent(
                action=RESUME_ACTION, bindings={}, args={},
                provenance=Provenance("plugin-control", alt_idx, 0, " ".join(tokens)),
            )
        if context.listening and tokens == sleep:
            return Intent(
                action=PAUSE_ACTION, bindings={}, args={},
                provenance=Provenance("plugin-control", alt_idx, 0, " ".join(tokens)),
            )
    index = index_cache.get(context.catalog) if index_cache else None
    return meta_command_recognizer(utterance, context, index)


def _grammar_recognizer(name: str, user_source: bool, literal_only: bool):
    def fn(utterance: UtteranceInput, context: SessionContext) -> RecognizerResult:
        patterns = [
            p for p in context.grammar.patterns
            if (p.source == "user") == user_source and p.is_literal_only() == literal_only
        ]
        if not patterns:
            return None
        for alt_idx, (text, _conf) in enumerate(utterance.alternatives):
            tokens, _ = strip_fillers(tokenize(text), context.settings.fillers)
            if not tokens:
                continue
            for pattern in patterns:
                detail = match_pattern_detailed(pattern, tokens)
                if detail is not None:
                    return _intent_from_match(
                        pattern, detail.bindings, name, alt_idx, " ".join(tokens)
                    )
        return None

    return fn


def _repair_recognizer(utterance: UtteranceInput, context: SessionContext) -> RecognizerResult:
    settings = context.settings
    choice = rerank_alternatives(
        utterance.alternatives,
        context.grammar,
        lam=settings.rerank_lambda,
        max_edits=settings.max_edits,
        fillers=settings.fillers,
    )
    if choice is None or not choice.candidates:
        return None

    def intent_for(candidate: RepairCandidate) -> Intent:
        return _intent_from_match(
            candidate.pattern,
            candidate.bindings,
            "repair",
            choice.alternative_index,
            candidate.display,
            repair_edits=candidate.distance,
        )

    resolved = make_prompt(choice.candidates, prompt_id="", auto_repair=settings.auto_repair)
    if isinstance(resolved, RepairCandidate):
        return intent_for(resolved)
    mapping = {}
    by_display = {c.display: c for c in choice.candidates}
    for opt in resolved.options:
        cand = by_display.get(opt.display)
        mapping[opt.label] = intent_for(cand) if cand is not None else None
    return PendingPrompt(prompt=resolved, intents=mapping)


class _IndexCache:
    """Rebuilds the ranker's description index only when the catalog changes."""

    def __init__(self) -> None:
        self._key = None
        self._index: DescriptionIndex | None = None

    def get(self, catalog: ActionCatalog) -> DescriptionIndex:
        key = (id(catalog), len(catalog))
        if self._index is None or key != self._key:
            self._index = DescriptionIndex(catalog)
            self._key = key
        return self._index


def _fallback_recognizer_factory(index_cache: _IndexCache):
    def fn(utterance: UtteranceInput, context: SessionContext) -> RecognizerResult:
        settings = context.settings
        text = utterance.top_text
        decision = fallback_recognize(
            text, context.catalog, settings.ranker, index_cache.get(context.catalog)
        )
        if decision.kind == "accept":
            return Intent(
                action=decision.action, bindings={}, args={},
                provenance=Provenance("fallback", 0, 0, text),
            )
        if decision.kind == "ambiguous":
            options = []
            intents = {}
            for ranked in decision.options:
                descriptor = context.catalog.get(ranked.action)
                display = f"{ranked.action} ({descriptor.description})"
                options.append(PromptOption(label="", display=display, action=ranked.action))
                intents[display] = Intent(
                    action=ranked.action, bindings={}, args={},
                    provenance=Provenance("fallback", 0, 0, text),
                )
            prompt = build_prompt(options, prompt_id="", source="fallback")
            mapping = {opt.label: intents.get(opt.display) for opt in prompt.options}
            return PendingPrompt(prompt=prompt, intents=mapping)
        if decision.diagnostic:
            return Diagnostic(decision.diagnostic)
        return None

    return fn


def builtin_chain(settings: EngineSettings) -> list[Recognizer]:
    """The default recognizer chain, ascending rank."""
    index_cache = _IndexCache()
    chain = [
        Recognizer("plugin-control", 0,
                   lambda u, c: _plugin_control_recognizer(u, c, index_cache)),
        Recognizer("user-exact", 10, _grammar_recognizer("user-exact", True, True)),
        Recognizer("user-pattern", 20, _grammar_recognizer("user-pattern", True, False)),
        Recognizer("default-exact", 30, _grammar_recognizer("default-exact", False, True)),
        Recognizer("default-pattern", 40, _grammar_recognizer("default-pattern", False, False)),
        Recognizer("repair", 50, _repair_recognizer),
    ]
    if settings.fallback_enabled:
        chain.append(Recognizer("fallback", 60, _fallback_recognizer_factory(index_cache)))
    return chain


class Session:
    """One dispatch session: owns the catalog and grammar snapshots, the
    recognizer chain, history, effects, and the event bus. Dispatches are
    serialized; snapshots handed to recognizers are immutable."""

    def __init__(
        self,
        catalog: ActionCatalog,
        grammar_docs: Sequence[GrammarDoc],
        settings: EngineSettings = EngineSettings(),
        user_grammar_path=None,
        session_id: str = "local",
    ) -> None:
        self.session_id = session_id
        self.settings = settings
        self.catalog = catalog
        self.bus = EventBus()
        self.effects: list[str] = []
        self.history: list[ExecutionRecord] = []
        self.state: dict[str, str] = {}
        self.listening = True
        self._lock = threading.RLock()
        self._docs = list(grammar_docs)
        self._bound_patterns: list[CommandPattern] = []
        self._grammar_cache: GrammarDoc | None = None
        self._chain = builtin_chain(settings)
        self._handlers: dict[str, Callable[[Intent, "Session"], str]] = {}
        self._pending: PendingPrompt | None = None
        self._prompt_counter = 0
        self._utterance_counter = 0
        self._record_counter = 0
        self._user_grammar_path = user_grammar_path

    # -- grammar and chain ---------------------------------------------------

    @property
    def grammar(self) -> GrammarDoc:
        if self._grammar_cache is None:
            docs = self._docs + [
                GrammarDoc(patterns=tuple(self._bound_patterns), source="user")
            ]
            self._grammar_cache = merge_grammars(docs)
        return self._grammar_cache

    def context(self) -> SessionContext:
        return SessionContext(
            listening=self.listening,
            history=tuple(self.history),
            state=dict(self.state),
            grammar=self.grammar,
            catalog=self.catalog,
            settings=self.settings,
        )

    def load_grammar_doc(self, doc: GrammarDoc) -> None:
        """Append a parsed grammar document; effective on the next dispatch."""
        with self._lock:
            self._docs.append(doc)
            self._grammar_cache = None

    def register_recognizer(self, recognizer: Recognizer) -> None:
        with self._lock:
            if any(r.rank == recognizer.rank for r in self._chain):
                raise DispatchError(f"rank {recognizer.rank} already taken")
            self._chain.append(recognizer)
            self._chain.sort(key=lambda r: r.rank)

    @property
    def chain(self) -> list[Recognizer]:
        return sorted(self._chain, key=lambda r: r.rank)

    def register_handler(self, action: str, handler: Callable[[Intent, "Session"], str]) -> None:
        self._handlers[action] = handler

    # -- dispatch -------------------------------------------------------------

    def dispatch_text(self, text: str) -> DispatchOutcome:
        return self.dispatch(UtteranceInput.from_text(text))

    def dispatch(self, utterance: UtteranceInput) -> DispatchOutcome:
        with self._lock:
            self._utterance_counter += 1
            if utterance.id == 0:
                utterance = replace(utterance, id=self._utterance_counter)
            self.bus.emit(UTTERANCE_RECEIVED, {
                "id": utterance.id,
                "alternatives": [
                    {"text": t, "confidence": c} for t, c in utterance.alternatives
                ],
            })
            self.bus.emit(TRANSCRIBED, {"id": utterance.id, "text": utterance.top_text})
            self._pending = None  # a new utterance supersedes any open prompt
            context = self.context()
            diagnostics: list[str] = []
            for recognizer in self.chain:
                if not context.listening and recognizer.rank > 0:
                    continue
                recognizer.calls += 1
                result = recognizer.fn(utterance, context)
                if result is None:
                    continue
                if isinstance(result, Diagnostic):
                    diagnostics.append(result.message)
                    continue
                if isinstance(result, PendingPrompt):
                    self._prompt_counter += 1
                    prompt = replace(result.prompt, prompt_id=f"p{self._prompt_counter}")
                    self._pending = PendingPrompt(prompt=prompt, intents=result.intents)
                    self.bus.emit(REPAIR_PROPOSED, {
                        "prompt_id": prompt.prompt_id,
                        "text": prompt.text,
                        "source": prompt.source,
                        "options": [
                            {"label": o.label, "display": o.display} for o in prompt.options
                        ],
                    })
                    return DispatchOutcome(kind="needs_disambiguation", prompt=prompt)
                intent: Intent = result
                self.bus.emit(INTENT_RECOGNIZED, intent.to_payload())
                record = self.execute(intent)
                return DispatchOutcome(kind="executed", record=record)
            payload = {"id": utterance.id, "text": utterance.top_text}
            if diagnostics:
                payload["diagnostics"] = diagnostics
            self.bus.emit(UNRECOGNIZED, payload)
            return DispatchOutcome(kind="unrecognized")

    def resolve(self, prompt_id: str, choice: str) -> DispatchOutcome:
        """Answer a pending disambiguation prompt by option label."""
        with self._lock:
            pending = self._pending
            if pending is None or pending.prompt.prompt_id != prompt_id:
                raise UnknownPromptError(prompt_id)
            option = pending.prompt.option_for(choice)
            if option is None:
                raise UnknownPromptError(f"{prompt_id}: no option {choice!r}")
            intent = pending.intents.get(option.label)
            self._pending = None
            self.bus.emit(REPAIR_RESOLVED, {
                "prompt_id": prompt_id,
                "choice": option.label,
                "action": intent.action if intent is not None else None,
            })
            if intent is None:  # "something else"
                return DispatchOutcome(kind="unrecognized")
            record = self.execute(intent)
            return DispatchOutcome(kind="executed", record=record)

    @property
    def pending_prompt(self) -> Optional[DisambiguationPrompt]:
        return self._pending.prompt if self._pending else None

    # -- execution ------------------------------------------------------------

    def execute(self, intent: Intent) -> ExecutionRecord:
        descriptor = self.catalog.get(intent.action)
        if descriptor is None:
            return self._record(intent, ("error", f"action {intent.action!r} not in catalog"))
        if intent.action == REPEAT_ACTION:
            return self._execute_repeat(intent)
        if intent.action == PAUSE_ACTION:
            self.listening = False
            return self._record(intent, ("ok", "listening paused"))
        if intent.action == RESUME_ACTION:
            self.listening = True
            return self._record(intent, ("ok", "listening resumed"))
        if intent.action == BIND_MACRO_ACTION:
            return self._execute_bind_macro(intent)
        if intent.action == BIND_ACTION_ACTION:
            return self._execute_bind_action(intent)
        handler = self._handlers.get(intent.action)
        if handler is not None:
            try:
                effect = handler(intent, self)
            except Exception as exc:  # noqa: BLE001 - contain handler failures
                return self._record(intent, ("error", f"handler failed: {exc}"))
            return self._record(intent, ("ok", effect))
        if descriptor.kind in ("scripted", "external"):
            return self._record(
                intent, ("error", f"no handler registered for {intent.action}")
            )
        # Builtin actions are simulated: log the described effect.
        rendered = " ".join(
            f"{k}={v}" for k, v in sorted(intent.args.items())
        ) or " ".join(f"{k}={v}" for k, v in sorted(intent.bindings.items()))
        effect = descriptor.description + (f" [{rendered}]" if rendered else "")
        return self._record(intent, ("ok", effect))

    def _execute_repeat(self, intent: Intent) -> ExecutionRecord:
        count = int(intent.args.get("count") or intent.bindings.get("count") or 1)
        target: Optional[ExecutionRecord] = None
        for record in reversed(self.history):
            if record.intent.action != REPEAT_ACTION and record.ok:
                target = record
                break
        if target is None:
            return self._record(intent, ("error", "no previous action"))
        last = None
        for _ in range(count):
            last = self.execute(target.intent)
        return last

    def _execute_bind_macro(self, intent: Intent) -> ExecutionRecord:
        phrase = str(intent.args.get("phrase", "")).strip()
        count = intent.args.get("count")
        if not phrase or not count:
            return self._record(intent, ("error", "bind macro needs a phrase and a count"))
        try:
            self.bind_phrase(phrase, REPEAT_ACTION, const_args={"count": int(count)})
        except DispatchError as exc:
            return self._record(intent, ("error", str(exc)))
        return self._record(intent, ("ok", f"bound '{phrase}' to repeat x{count}"))

    def _execute_bind_action(self, intent: Intent) -> ExecutionRecord:
        phrase = str(intent.args.get("phrase", "")).strip()
        target = intent.args.get("target")
        if target is None:
            description = str(intent.args.get("description", ""))
            decision = resolve_description(description, self.catalog, self.settings.ranker)
            if decision.kind != "accept":
                return self._record(
                    intent, ("error", f"cannot resolve action for {description!r}")
                )
            target = decision.action
        if not phrase:
            return self._record(intent, ("error", "bind needs a phrase"))
        try:
            self.bind_phrase(phrase, str(target))
        except DispatchError as exc:
            return self._record(intent, ("error", str(exc)))
        return self._record(intent, ("ok", f"bound '{phrase}' to {target}"))

    def _record(self, intent: Intent, outcome: tuple[str, str]) -> ExecutionRecord:
        self._record_counter += 1
        record = ExecutionRecord(
            seq=self._record_counter,
            intent=intent,
            outcome=outcome,
            timestamp=time.time(),
        )
        self.history.append(record)
        if outcome[0] == "ok":
            self.effects.append(outcome[1])
        self.bus.emit(ACTION_EXECUTED, {
            "seq": record.seq,
            "action": intent.action,
            "bindings": dict(intent.bindings),
            "outcome": {"status": outcome[0], "detail": outcome[1]},
            "recognizer": intent.provenance.recognizer,
        })
        return record

    # -- runtime binding -------------------------------------------------------

    def bind_phrase(
        self,
        phrase: str,
        action: str,
        const_args: Optional[dict] = None,
        override: bool = False,
    ) -> CommandPattern:
        """Bind a literal spoken phrase to an action; matchable immediately and
        persisted to the user grammar file when one is configured."""
        tokens = tokenize(phrase)
        if not tokens:
            raise DispatchError("cannot bind an empty phrase")
        if action not in self.catalog:
            raise DispatchError(f"unknown action {action!r}")
        elements = tuple(Literal(text=t) for t in tokens)
        for p in self.grammar.patterns:
            if p.source == "user" and p.elements == elements:
                if p.action == action and not const_args:
                    return p  # already bound
                if not override:
                    raise DispatchError(
                        f"phrase '{phrase}' already bound to {p.action}; pass override"
                    )
                self._bound_patterns = [bp for bp in self._bound_patterns if bp.elements != elements]
                self._docs = [
                    GrammarDoc(
                        patterns=tuple(
                            dp for dp in doc.patterns
                            if not (dp.source == "user" and dp.elements == elements)
                        ),
                        source=doc.source,
                        errors=doc.errors,
                    )
                    for doc in self._docs
                ]
        pattern = CommandPattern(
            elements=elements,
            action=action,
            const_args=tuple(sorted((const_args or {}).items())),
            source="user",
        )
        self._bound_patterns.append(pattern)
        self._grammar_cache = None
        try:
            self.catalog.attach_phrase(action, pattern.display())
        except ActionError:
            pass
        if self._user_grammar_path is not None:
            with open(self._user_grammar_path, "a", encoding="utf-8") as fh:
                fh.write(render_pattern_line(pattern) + "\n")
        self.bus.emit(BINDING_ADDED, {
            "phrase": " ".join(tokens),
            "action": action,
            "pattern": pattern.display(),
        })
        return pattern
