"""Action catalog: the set of invokable actions and their spoken descriptions.

Action identifiers look like IDE action ids ("editor.GotoNextError"): dot-namespaced
CamelCase segments. Descriptions are derived from the identifier so every action is
addressable by voice without hand-written docs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

ACTION_KINDS = frozenset({"builtin", "macro", "scripted", "external"})
ACTION_SOURCES = frozenset({"default", "user", "plugin"})

_FIXTURE_RESOURCE = "actions.txt"


class ActionError(ValueError):
    """Invalid action id or conflicting registration."""


def validate_action_id(value: str) -> str:
    """Check the identifier shape: nonempty dot-separated segments, each starting
    with a letter, containing only letters and digits. Returns the value."""
    if not value or value != value.strip():
        raise ActionError(f"invalid action id {value!r}: empty or padded")
    for segment in value.split("."):
        if not segment or not segment[0].isalpha():
            raise ActionError(
                f"invalid action id {value!r}: segment {segment!r} must begin with a letter"
            )
        if not segment.isalnum() or not segment.isascii():
            raise ActionError(
                f"invalid action id {value!r}: segment {segment!r} has illegal characters"
            )
    return value


def camel_case_to_description(action_id: str) -> str:
    """Derive a lowercase word sequence from a CamelCase identifier.

    Splits at lower-to-upper boundaries, at letter-to-digit boundaries, and before
    the final capital of an uppercase run that is followed by a lowercase letter
    (so "ExportHTMLReport" reads "export html report"). Dots are word breaks.
    """
    validate_action_id(action_id)
    words: list[str] = []
    for segment in action_id.split("."):
        start = 0
        for i in range(1, len(segment)):
            prev, cur = segment[i - 1], segment[i]
            boundary = (
                (prev.islower() and cur.isupper())
                or (prev.isalpha() and cur.isdigit())
                or (
                    prev.isupper()
                    and cur.isupper()
                    and i + 1 < len(segment)
                    and segment[i + 1].islower()
                )
            )
            if boundary:
                words.append(segment[start:i].lower())
                start = i
        words.append(segment[start:].lower())
    return " ".join(w for w in words if w)


@dataclass(frozen=True)
class ActionDescriptor:
    id: str
    description: str
    kind: str = "builtin"
    source: str = "default"
    bound_phrases: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        validate_action_id(self.id)
        if not self.description:
            raise ActionError(f"action {self.id}: empty description")
        if self.kind not in ACTION_KINDS:
            raise ActionError(f"action {self.id}: unknown kind {self.kind!r}")
        if self.source not in ACTION_SOURCES:
            raise ActionError(f"action {self.id}: unknown source {self.source!r}")
        if len(set(self.bound_phrases)) != len(self.bound_phrases):
            raise ActionError(f"action {self.id}: duplicate bound phrases")


def make_descriptor(action_id: str, kind: str = "builtin", source: str = "default") -> ActionDescriptor:
    return ActionDescriptor(
        id=action_id,
        description=camel_case_to_description(action_id),
        kind=kind,
        source=source,
    )


class ActionCatalog:
    """Insertion-ordered registry of ActionDescriptors, keyed by id.

    Mutations happen on the owning session; `snapshot()` hands out an immutable
    view that is safe to share across threads.
    """

    def __init__(self) -> None:
        self._entries: dict[str, ActionDescriptor] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, action_id: str) -> bool:
        return action_id in self._entries

    def get(self, action_id: str) -> ActionDescriptor | None:
        return self._entries.get(action_id)

    def ids(self) -> list[str]:
        return list(self._entries)

    def descriptors(self) -> list[ActionDescriptor]:
        return list(self._entries.values())

    def register(self, descriptor: ActionDescriptor) -> "ActionCatalog":
        """Register a descriptor. Re-registering an existing id is only allowed
        when the new descriptor is user-sourced (user descriptions win)."""
        existing = self._entries.get(descriptor.id)
        if existing is not None and descriptor.source != "user":
            raise ActionError(
                f"action {descriptor.id!r} already registered from source {existing.source!r}"
            )
        self._entries[descriptor.id] = descriptor
        return self

    def attach_phrase(self, action_id: str, phrase: str) -> None:
        """Record a grammar phrase as bound to an action (deduplicated)."""
        entry = self._entries.get(action_id)
        if entry is None:
            raise ActionError(f"unknown action {action_id!r}")
        if phrase not in entry.bound_phrases:
            self._entries[action_id] = replace(
                entry, bound_phrases=entry.bound_phrases + (phrase,)
            )

    def snapshot(self) -> Mapping[str, ActionDescriptor]:
        return MappingProxyType(dict(self._entries))


@dataclass(frozen=True)
class FixtureError:
    line: int
    text: str
    message: str


def load_action_lines(lines: Iterable[str], catalog: ActionCatalog | None = None) -> tuple[ActionCatalog, list[FixtureError]]:
    """Register one identifier per line; '#' comments and blanks are skipped.
    Malformed lines are reported with their line number and loading continues."""
    catalog = catalog if catalog is not None else ActionCatalog()
    errors: list[FixtureError] = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        try:
            catalog.register(make_descriptor(text))
        except ActionError as exc:
            errors.append(FixtureError(line=lineno, text=text, message=str(exc)))
    return catalog, errors


def load_action_fixture(path: str | Path, catalog: ActionCatalog | None = None) -> tuple[ActionCatalog, list[FixtureError]]:
    with open(path, encoding="utf-8") as fh:
        return load_action_lines(fh, catalog)


def load_default_catalog() -> ActionCatalog:
    """Load the shipped ~1000-identifier fixture modeling an IDE action list."""
    text = resources.files("idiolect.data").joinpath(_FIXTURE_RESOURCE).read_text("utf-8")
    catalog, errors = load_action_lines(text.splitlines())
    if errors:  # the shipped fixture is authored to be clean
        raise ActionError(f"shipped action fixture is malformed: {errors[:3]}")
    return catalog


@dataclass(frozen=True)
class DocEntry:
    id: str
    description: str
    phrases: tuple[str, ...]


def generate_docs(catalog: ActionCatalog, grammar=None) -> list[DocEntry]:
    """One entry per action, in catalog order, listing every grammar phrase bound
    to it. `grammar` is any object with a `patterns` sequence exposing `.action`
    and `.display()` (see idiolect.grammar); None means no phrases."""
    phrases: dict[str, list[str]] = {}
    if grammar is not None:
        for pattern in grammar.patterns:
            shown = pattern.display()
            bucket = phrases.setdefault(pattern.action, [])
            if shown not in bucket:
                bucket.append(shown)
    return [
        DocEntry(id=d.id, description=d.description, phrases=tuple(phrases.get(d.id, ())))
        for d in catalog.descriptors()
    ]


def docs_as_text(entries: list[DocEntry]) -> str:
    lines = []
    for e in entries:
        lines.append(f"{e.id} — {e.description}")
        for p in e.phrases:
            lines.append(f"    {p}")
    return "\n".join(lines) + ("\n" if lines else "")


def docs_as_json(entries: list[DocEntry]) -> str:
    return json.dumps(
        [{"id": e.id, "description": e.description, "phrases": list(e.phrases)} for e in entries],
        indent=2,
    )
