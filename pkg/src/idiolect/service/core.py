"""Message-level session service, shared by the HTTP layer and the local CLI
client so both drive exactly the same engine code path."""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Optional

from ..actions import generate_docs, load_default_catalog
from ..config import Config
from ..dispatch import (
    DispatchError,
    DispatchOutcome,
    Session,
    UnknownPromptError,
    UtteranceInput,
)
from ..grammar import merge_grammars, parse_grammar
from ..repair import DisambiguationPrompt


class ServiceError(Exception):
    def __init__(self, code: str, message: str = "", status: int = 400) -> None:
        super().__init__(message or code)
        self.code = code
        self.message = message
        self.status = status

    def body(self) -> dict:
        out = {"type": "error", "code": self.code}
        if self.message:
            out["message"] = self.message
        return out


def prompt_payload(prompt: DisambiguationPrompt) -> dict:
    return {
        "prompt_id": prompt.prompt_id,
        "text": prompt.text,
        "source": prompt.source,
        "options": [{"label": o.label, "display": o.display} for o in prompt.options],
    }


def outcome_payload(outcome: DispatchOutcome) -> dict:
    body: dict = {"kind": outcome.kind}
    if outcome.record is not None:
        record = outcome.record
        body.update({
            "action": record.intent.action,
            "bindings": dict(record.intent.bindings),
            "outcome": record.outcome[0],
            "detail": record.outcome[1],
            "repair_edits": record.intent.provenance.repair_edits,
            "recognizer": record.intent.provenance.recognizer,
        })
    if outcome.prompt is not None:
        body["prompt"] = prompt_payload(outcome.prompt)
    return body


class ServiceCore:
    """Owns the sessions. Each session gets its own catalog instance (catalog
    mutations stay session-local); grammar documents are immutable and shared."""

    def __init__(self, config: Config) -> None:
        self.config = config
        self._grammar_docs = config.load_grammars()
        self._settings = config.engine_settings()
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._counter = 0
        self._docs_catalog = load_default_catalog()

    # -- session lifecycle --------------------------------------------------

    def create_session(self) -> str:
        with self._lock:
            self._counter += 1
            sid = f"s{self._counter}"
            self._sessions[sid] = Session(
                load_default_catalog(),
                self._grammar_docs,
                settings=self._settings,
                user_grammar_path=self.config.user_grammar_path,
                session_id=sid,
            )
            return sid

    def session(self, sid: str) -> Session:
        session = self._sessions.get(sid)
        if session is None:
            raise ServiceError("unknown_session", f"no session {sid!r}", status=404)
        return session

    def session_state(self, sid: str) -> dict:
        session = self.session(sid)
        pending = session.pending_prompt
        return {
            "session_id": sid,
            "listening": session.listening,
            "history_length": len(session.history),
            "pending_prompt": prompt_payload(pending) if pending else None,
            "last_seq": session.bus.last_seq,
        }

    @property
    def session_count(self) -> int:
        return len(self._sessions)

    # -- messages -------------------------------------------------------------

    def handle_message(self, sid: str, message: dict) -> dict:
        session = self.session(sid)
        mtype = message.get("type")
        if mtype == "utterance":
            return self._handle_utterance(session, message)
        if mtype == "resolve":
            return self._handle_resolve(session, message)
        if mtype == "bind":
            return self._handle_bind(session, message)
        if mtype == "subscribe":
            after = int(message.get("after_seq", 0) or 0)
            events = [e.to_json() for e in session.bus.events_after(after)]
            return {"events": events}
        if mtype == "load":
            return self._handle_load(session, message)
        raise ServiceError("unknown_message_type", f"unsupported type {mtype!r}")

    def _handle_utterance(self, session: Session, message: dict) -> dict:
        alternatives = message.get("alternatives") or []
        try:
            pairs = [(a["text"], float(a.get("confidence", 1.0))) for a in alternatives]
            utterance = UtteranceInput.from_alternatives(pairs)
        except (KeyError, TypeError, ValueError) as exc:
            raise ServiceError("invalid_utterance", str(exc)) from exc
        before = session.bus.last_seq
        outcome = session.dispatch(utterance)
        events = [e.to_json() for e in session.bus.events_after(before)]
        return {"events": events, "outcome": outcome_payload(outcome)}

    def _handle_resolve(self, session: Session, message: dict) -> dict:
        prompt_id = str(message.get("prompt_id", ""))
        choice = str(message.get("choice", ""))
        before = session.bus.last_seq
        try:
            outcome = session.resolve(prompt_id, choice)
        except UnknownPromptError as exc:
            raise ServiceError("unknown_prompt", str(exc), status=404) from exc
        events = [e.to_json() for e in session.bus.events_after(before)]
        return {"events": events, "outcome": outcome_payload(outcome)}

    def _handle_bind(self, session: Session, message: dict) -> dict:
        phrase = str(message.get("phrase", ""))
        action = str(message.get("action", ""))
        override = bool(message.get("override", False))
        before = session.bus.last_seq
        try:
            session.bind_phrase(phrase, action, override=override)
        except DispatchError as exc:
            raise ServiceError("bind_conflict", str(exc), status=409) from exc
        events = [e.to_json() for e in session.bus.events_after(before)]
        return {"events": events, "outcome": {"kind": "bound"}}

    def _handle_load(self, session: Session, message: dict) -> dict:
        path = Path(str(message.get("path", "")))
        if not path.exists():
            raise ServiceError("missing_grammar", f"no such file: {path}", status=404)
        source = "user" if "user" in path.stem else "default"
        doc = parse_grammar(path.read_text("utf-8"), source=source)
        session.load_grammar_doc(doc)
        return {
            "events": [],
            "outcome": {
                "kind": "loaded",
                "detail": f"{len(doc.patterns)} patterns, {len(doc.errors)} errors",
            },
        }

    # -- documentation ---------------------------------------------------------

    def docs(self, sid: Optional[str] = None) -> list[dict]:
        if sid is not None:
            session = self.session(sid)
            grammar, catalog = session.grammar, session.catalog
        else:
            grammar = merge_grammars(self._grammar_docs)
            catalog = self._docs_catalog
        entries = generate_docs(catalog, grammar)
        return [
            {"id": e.id, "description": e.description, "phrases": list(e.phrases)}
            for e in entries
        ]
