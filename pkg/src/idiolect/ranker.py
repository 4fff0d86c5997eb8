"""Recognizer of last resort: rank catalog actions against open-ended utterances.

The builtin backend is a deterministic offline stand-in for a language model:
cosine similarity between tf-idf vectors of the utterance and each action's
generated description (descriptions are the document collection). A small
synonym table canonicalizes common verb variants so "I want to edit foo.java"
lands on "open file" rather than "execute file".

An external backend can be configured instead; it receives the prompt
"Out of these actions: <id: description list>, which one most likely fulfills
the command <utterance>?" as JSON and must answer with a ranking. When it is
unreachable the recognizer simply passes, reporting a diagnostic.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional

import httpx

from .actions import ActionCatalog
from .grammar import tokenize

# verb variants mapped to the canonical token used by generated descriptions
SYNONYMS = {
    "edit": "open",
    "modify": "open",
    "show": "display",
    "view": "display",
    "remove": "delete",
    "erase": "delete",
    "exit": "close",
    "quit": "close",
    "launch": "run",
    "execute": "run",
    "locate": "find",
    "search": "find",
    "make": "create",
    "build": "compile",
}

DEFAULT_THRESHOLD = 0.4
DEFAULT_TOP_K = 3
DEFAULT_MARGIN = 0.1
DEFAULT_TIMEOUT_S = 2.0


@dataclass(frozen=True)
class RankedAction:
    action: str
    score: float


@dataclass(frozen=True)
class RankerConfig:
    threshold: float = DEFAULT_THRESHOLD
    top_k: int = DEFAULT_TOP_K
    margin: float = DEFAULT_MARGIN
    backend: str = "builtin"  # "builtin" | URL of an external ranking service
    timeout_s: float = DEFAULT_TIMEOUT_S

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must be in [0, 1]")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")


def _canonical(tokens: list[str]) -> list[str]:
    return [SYNONYMS.get(t, t) for t in tokens]


class DescriptionIndex:
    """tf-idf vectors over action descriptions, built once per catalog snapshot."""

    def __init__(self, catalog: ActionCatalog) -> None:
        self.actions: list[str] = []
        self._vectors: list[dict[str, float]] = []
        doc_tokens: list[list[str]] = []
        df: Counter[str] = Counter()
        for d in catalog.descriptors():
            toks = _canonical(tokenize(d.description))
            self.actions.append(d.id)
            doc_tokens.append(toks)
            df.update(set(toks))
        n_docs = max(len(doc_tokens), 1)
        self._idf = {t: math.log((1 + n_docs) / (1 + c)) + 1.0 for t, c in df.items()}
        for toks in doc_tokens:
            self._vectors.append(self._vectorize(toks))

    def _vectorize(self, tokens: list[str]) -> dict[str, float]:
        tf = Counter(tokens)
        vec = {t: count * self._idf.get(t, 0.0) for t, count in tf.items()}
        norm = math.sqrt(sum(w * w for w in vec.values()))
        if norm > 0:
            vec = {t: w / norm for t, w in vec.items()}
        return vec

    def rank(self, utterance_text: str) -> list[RankedAction]:
        tokens = _canonical(tokenize(utterance_text))
        if not tokens:
            return []
        query = self._vectorize(tokens)
        scored = []
        for action, vec in zip(self.actions, self._vectors):
            if len(query) < len(vec):
                small, big = query, vec
            else:
                small, big = vec, query
            score = sum(w * big.get(t, 0.0) for t, w in small.items())
            scored.append(RankedAction(action=action, score=round(score, 9)))
        scored.sort(key=lambda r: (-r.score, r.action))
        return scored


def rank(
    utterance_text: str,
    catalog: ActionCatalog,
    config: RankerConfig = RankerConfig(),
    index: DescriptionIndex | None = None,
) -> list[RankedAction]:
    """Rank every catalog action by closeness to the utterance, best first.
    Scores are cosine similarities in [0, 1]; ties order by action id."""
    if len(catalog) == 0:
        raise ValueError("rank requires a nonempty catalog")
    if config.backend != "builtin":
        return _rank_external(utterance_text, catalog, config)
    idx = index if index is not None else DescriptionIndex(catalog)
    return idx.rank(utterance_text)


def build_prompt_text(utterance_text: str, catalog: ActionCatalog) -> str:
    listing = ", ".join(f"{d.id}: {d.description}" for d in catalog.descriptors())
    return (
        f"Out of these actions: {listing}, "
        f"which one most likely fulfills the command {utterance_text}?"
    )


class ExternalBackendError(RuntimeError):
    pass


def _rank_external(
    utterance_text: str, catalog: ActionCatalog, config: RankerConfig
) -> list[RankedAction]:
    payload = {
        "prompt": build_prompt_text(utterance_text, catalog),
        "actions": [
            {"id": d.id, "description": d.description} for d in catalog.descriptors()
        ],
        "utterance": utterance_text,
    }
    try:
        response = httpx.post(config.backend, json=payload, timeout=config.timeout_s)
        response.raise_for_status()
        body = response.json()
    except Exception as exc:  # noqa: BLE001 - any transport failure means "pass"
        raise ExternalBackendError(str(exc)) from exc
    ranking = body.get("ranking", [])
    results = []
    for row in ranking:
        if row.get("action") in catalog:
            results.append(
                RankedAction(action=row["action"], score=float(row.get("score", 0.0)))
            )
    results.sort(key=lambda r: (-r.score, r.action))
    return results


@dataclass(frozen=True)
class FallbackDecision:
    """Outcome of the last-resort recognizer: a single accepted action, an
    ambiguity over the top candidates, a pass, or a pass with a diagnostic."""

    kind: str  # "accept" | "ambiguous" | "pass"
    action: Optional[str] = None
    options: tuple[RankedAction, ...] = ()
    diagnostic: Optional[str] = None


def fallback_recognize(
    utterance_text: str,
    catalog: ActionCatalog,
    config: RankerConfig = RankerConfig(),
    index: DescriptionIndex | None = None,
) -> FallbackDecision:
    """Accept the top action when it clears the threshold with a margin over
    the runner-up; prompt on near-ties; otherwise pass."""
    try:
        ranking = rank(utterance_text, catalog, config, index)
    except ExternalBackendError as exc:
        return FallbackDecision(kind="pass", diagnostic=f"fallback backend unreachable: {exc}")
    if not ranking:
        return FallbackDecision(kind="pass")
    top = ranking[0]
    second_score = ranking[1].score if len(ranking) > 1 else 0.0
    if top.score < config.threshold:
        return FallbackDecision(kind="pass")
    if top.score - second_score >= config.margin or len(ranking) == 1:
        return FallbackDecision(kind="accept", action=top.action)
    contenders = [r for r in ranking if r.score >= config.threshold]
    if len(contenders) >= 2 and top.score - second_score < config.margin:
        return FallbackDecision(kind="ambiguous", options=tuple(ranking[: config.top_k]))
    return FallbackDecision(kind="pass")


def resolve_description(
    description: str,
    catalog: ActionCatalog,
    config: RankerConfig = RankerConfig(),
    index: DescriptionIndex | None = None,
) -> FallbackDecision:
    """Resolve a spoken action description ("commit and push") to an action id,
    used by the phrase-binding meta-command. Same accept/ambiguous rules as
    fallback_recognize, except any nonzero top score can be prompted on."""
    decision = fallback_recognize(description, catalog, config, index)
    if decision.kind == "pass" and decision.diagnostic is None:
        ranking = rank(description, catalog, config, index)
        contenders = tuple(r for r in ranking[: config.top_k] if r.score > 0)
        if contenders:
            return FallbackDecision(kind="ambiguous", options=contenders)
    return decision
