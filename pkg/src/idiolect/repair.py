"""Near-miss recovery: bounded token-level language edit distance.

An utterance that is not in the command language gets aligned against every
pattern with a budget of `max_edits` token edits (insert / delete / substitute,
unit cost). Filler words ("uh", "um") are deleted for free and never count
toward the budget. Slot positions absorb utterance tokens at no cost; the
absorbed span is type-checked afterwards, so "open uh foo java" repairs to
"open file foo.java" with a single inserted literal.

For each pattern, the best in-language phrase is chosen by:

    1. minimal token edit distance to the (filler-stripped) utterance,
    2. most utterance tokens kept verbatim,
    3. smallest character-level distance (so "stop listenin" prefers
       "stop listening" over some other word the grammar knows),
    4. lexicographically smallest phrase.

The returned candidates are exactly the per-pattern winners that achieve the
global minimum distance, in pattern document order. The same selection rule is
applied by the brute-force oracle in the tests, which enumerates the whole
edit neighborhood and intersects it with the language.

Tokens inserted or substituted during the search are restricted to the
grammar's vocabulary: its literal tokens plus the word tables of any closed
slot types (ordinal, number, multiplier) the grammar uses. Inserting a token
the language never mentions cannot produce a member.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .grammar import (
    CLOSED_SLOT_TYPES,
    CommandPattern,
    GrammarDoc,
    Literal,
    Slot,
    _skeletons,
    candidate_display,
    closed_slot_table,
    convert_slot,
    language_membership,
    match_pattern_detailed,
    slot_span_limits,
    tokenize,
)

DEFAULT_FILLERS = frozenset({"uh", "um", "er", "please"})
DEFAULT_MAX_EDITS = 2
DEFAULT_RERANK_LAMBDA = 0.3


@dataclass(frozen=True)
class EditOp:
    kind: str  # insert | delete | substitute
    position: int  # index into the source sequence
    token: Optional[str]  # source token (delete/substitute) or inserted token
    replacement: Optional[str] = None
    filler: bool = False


def token_edit_distance(
    a: Sequence[str],
    b: Sequence[str],
    fillers: frozenset[str] = frozenset(),
) -> tuple[int, list[EditOp]]:
    """Minimal-cost edit script turning `a` into `b` at token granularity.

    Unit costs, except deleting a token in `fillers` is free. Among
    minimal-cost scripts, one with the most exact matches is returned.
    """
    n, m = len(a), len(b)
    # dp[i][j] = (cost, -matches) for a[:i] -> b[:j]
    dp = [[(0, 0)] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        prev = dp[i - 1][0]
        cost = 0 if a[i - 1] in fillers else 1
        dp[i][0] = (prev[0] + cost, prev[1])
    for j in range(1, m + 1):
        dp[0][j] = (j, 0)
    for i in range(1, n + 1):
        del_cost = 0 if a[i - 1] in fillers else 1
        for j in range(1, m + 1):
            down = dp[i - 1][j]
            left = dp[i][j - 1]
            diag = dp[i - 1][j - 1]
            if a[i - 1] == b[j - 1]:
                best = (diag[0], diag[1] - 1)
            else:
                best = (diag[0] + 1, diag[1])
            cand = (down[0] + del_cost, down[1])
            if cand < best:
                best = cand
            cand = (left[0] + 1, left[1])
            if cand < best:
                best = cand
            dp[i][j] = best

    ops: list[EditOp] = []
    i, j = n, m
    while i > 0 or j > 0:
        cur = dp[i][j]
        if i > 0 and j > 0:
            diag = dp[i - 1][j - 1]
            if a[i - 1] == b[j - 1] and cur == (diag[0], diag[1] - 1):
                i, j = i - 1, j - 1
                continue
            if a[i - 1] != b[j - 1] and cur == (diag[0] + 1, diag[1]):
                ops.append(EditOp("substitute", i - 1, a[i - 1], b[j - 1]))
                i, j = i - 1, j - 1
                continue
        if i > 0:
            del_cost = 0 if a[i - 1] in fillers else 1
            down = dp[i - 1][j]
            if cur == (down[0] + del_cost, down[1]):
                ops.append(EditOp("delete", i - 1, a[i - 1], filler=del_cost == 0))
                i -= 1
                continue
        ops.append(EditOp("insert", i, b[j - 1]))
        j -= 1
    ops.reverse()
    distance = dp[n][m][0]
    return distance, ops


def matched_token_count(a: Sequence[str], b: Sequence[str]) -> int:
    """Exact matches in a minimal-cost alignment (maximized over ties)."""
    _, ops = token_edit_distance(a, b)
    edited_positions = {op.position for op in ops if op.kind in ("delete", "substitute")}
    return len(a) - len(edited_positions)


def char_distance(a: str, b: str) -> int:
    """Plain character-level Levenshtein distance; repair tie-breaker."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def strip_fillers(tokens: Sequence[str], fillers: frozenset[str]) -> tuple[list[str], list[EditOp]]:
    kept: list[str] = []
    ops: list[EditOp] = []
    for i, tok in enumerate(tokens):
        if tok in fillers:
            ops.append(EditOp("delete", i, tok, filler=True))
        else:
            kept.append(tok)
    return kept, ops


def grammar_vocabulary(grammar: GrammarDoc) -> list[str]:
    """Insertion/substitution alphabet: literal tokens plus the word tables of
    closed slot types the grammar actually uses."""
    vocab = set(grammar.vocabulary())
    for stype in grammar.closed_types_present():
        for entry in closed_slot_table(stype):
            vocab.update(entry)
    return sorted(vocab)


@dataclass(frozen=True)
class RepairCandidate:
    phrase: tuple[str, ...]
    pattern_index: int
    pattern: CommandPattern
    bindings: dict
    distance: int
    kept: int
    display: str
    score: float = 0.0


# Sentinel marking a closed-slot token that was substituted toward the slot's
# word table; resolved against the table in _materialize.
_WILDCARD = "\x00*"


@dataclass
class _Alignment:
    cost: int
    parts: list  # ("lit", token) | ("slot", Slot, tuple of content tokens)


def _align_skeleton(items: tuple, tokens: list[str], budget: int) -> list[_Alignment]:
    """Enumerate alignments of `tokens` against one optional-expanded skeleton
    within the edit budget.

    Slots absorb contiguous runs of input tokens at no cost. Literal positions
    pay for mismatches and insertions, deletions of input tokens pay 1
    anywhere outside a slot run, and closed-type slot content may substitute
    an input token toward the slot's word table for 1. Open slots never invent
    tokens the utterance does not contain.
    """
    results: list[_Alignment] = []
    n = len(tokens)

    def walk(item_idx: int, tok_idx: int, cost: int, parts: list) -> None:
        if cost > budget:
            return
        if item_idx == len(items):
            total = cost + (n - tok_idx)  # trailing input tokens are deletions
            if total <= budget:
                results.append(_Alignment(total, list(parts)))
            return
        item = items[item_idx]
        if isinstance(item, Literal):
            if tok_idx < n:
                # delete the input token in front of this literal
                walk(item_idx, tok_idx + 1, cost + 1, parts)
                match = tokens[tok_idx] == item.text
                parts.append(("lit", item.text))
                # consume it (free on match, substitution otherwise)
                walk(item_idx + 1, tok_idx + 1, cost + (0 if match else 1), parts)
                parts.pop()
            # insert the literal without consuming input
            parts.append(("lit", item.text))
            walk(item_idx + 1, tok_idx, cost + 1, parts)
            parts.pop()
            return
        # Slot item: optionally delete input tokens in front of the run.
        if tok_idx < n:
            walk(item_idx, tok_idx + 1, cost + 1, parts)
        lo, hi = slot_span_limits(item.type)
        closed = item.type in CLOSED_SLOT_TYPES
        max_len = (n - tok_idx) if hi is None else min(hi, n - tok_idx)

        def slot_run(t_idx: int, content: list[str], c: int) -> None:
            if c > budget:
                return
            if lo <= len(content) <= max_len:
                parts.append(("slot", item, tuple(content)))
                walk(item_idx + 1, t_idx, c, parts)
                parts.pop()
            if len(content) >= max_len or t_idx >= n:
                return
            content.append(tokens[t_idx])
            slot_run(t_idx + 1, content, c)
            content.pop()
            if closed:
                content.append(_WILDCARD)
                slot_run(t_idx + 1, content, c + 1)
                content.pop()

        slot_run(tok_idx, [], cost)

    walk(0, 0, 0, [])
    return results


def _resolve_slot(slot: Slot, content: tuple[str, ...]) -> list[tuple[tuple[str, ...], object]]:
    """Type-check one slot span; closed-slot wildcards expand to every word
    table entry consistent with the non-substituted positions."""
    if _WILDCARD not in content:
        value = convert_slot(slot.type, list(content))
        return [(content, value)] if value is not None else []
    assert slot.type in CLOSED_SLOT_TYPES
    out = []
    for entry in closed_slot_table(slot.type):
        if len(entry) != len(content):
            continue
        if any(c != _WILDCARD and c != e for c, e in zip(content, entry)):
            continue
        value = convert_slot(slot.type, list(entry))
        if value is not None:
            out.append((entry, value))
    return out


def _materialize(
    alignment: _Alignment, stripped: list[str]
) -> list[tuple[tuple[str, ...], dict]]:
    """All concrete (phrase, bindings) readings of one alignment."""
    options: list[tuple[list[str], dict]] = [([], {})]
    for part in alignment.parts:
        if part[0] == "lit":
            for phrase, _ in options:
                phrase.append(part[1])
            continue
        _, slot, content = part
        resolutions = _resolve_slot(slot, content)
        if not resolutions:
            return []
        new_options = []
        for phrase, bindings in options:
            for tokens, value in resolutions:
                new_bindings = dict(bindings)
                new_bindings[slot.name] = value
                new_options.append((phrase + list(tokens), new_bindings))
        options = new_options
    return [(tuple(phrase), bindings) for phrase, bindings in options]


def repair(
    tokens: Sequence[str],
    grammar: GrammarDoc,
    max_edits: int = DEFAULT_MAX_EDITS,
    fillers: frozenset[str] = DEFAULT_FILLERS,
) -> list[RepairCandidate]:
    """Best in-language phrases within `max_edits` token edits of the utterance.

    Filler tokens are stripped first (free deletions). If the stripped
    utterance is already in the language it comes back as the single
    distance-0 candidate. Otherwise each pattern contributes its best
    alignment, and the candidates at the global minimum distance are returned
    in pattern document order (duplicate phrases collapse to the earliest
    pattern). Empty list means nothing is reachable within the budget.
    """
    stripped, _ = strip_fillers(list(tokens), fillers)
    if not stripped:
        return []
    member = language_membership(grammar, stripped)
    if member is not None:
        return [
            RepairCandidate(
                phrase=tuple(stripped),
                pattern_index=member.index,
                pattern=member.pattern,
                bindings=member.bindings,
                distance=0,
                kept=len(stripped),
                display=candidate_display(member.pattern, member.detail, stripped),
            )
        ]
    source = " ".join(stripped)
    per_pattern: list[RepairCandidate] = []
    for p_idx, pattern in enumerate(grammar.patterns):
        reachable = _pattern_reachable(pattern, stripped, max_edits)
        best: tuple | None = None  # ((d, -kept, char_d, phrase), d)
        for phrase, cost in reachable.items():
            kept = matched_token_count(stripped, phrase)
            key = (cost, -kept, char_distance(source, " ".join(phrase)), phrase)
            if best is None or key < best[0]:
                best = (key, cost)
        if best is not None:
            phrase = best[0][3]
            detail = match_pattern_detailed(pattern, list(phrase))
            if detail is None:
                continue  # materialized span failed this pattern's own match
            per_pattern.append(
                RepairCandidate(
                    phrase=phrase,
                    pattern_index=p_idx,
                    pattern=pattern,
                    bindings=detail.bindings,
                    distance=best[1],
                    kept=-best[0][1],
                    display=candidate_display(pattern, detail, list(phrase)),
                )
            )
    if not per_pattern:
        return []
    dmin = min(c.distance for c in per_pattern)
    chosen: list[RepairCandidate] = []
    used_phrases: set[tuple[str, ...]] = set()
    for cand in sorted(per_pattern, key=lambda c: c.pattern_index):
        if cand.distance != dmin or cand.phrase in used_phrases:
            continue
        used_phrases.add(cand.phrase)
        chosen.append(cand)
    return chosen


def _pattern_reachable(
    pattern: CommandPattern, stripped: list[str], max_edits: int
) -> dict[tuple[str, ...], int]:
    """Cheapest alignment cost per distinct phrase this pattern can reach."""
    reachable: dict[tuple[str, ...], int] = {}
    for skeleton in _skeletons(pattern):
        for alignment in _align_skeleton(skeleton, stripped, max_edits):
            for phrase, _bindings in _materialize(alignment, stripped):
                prev = reachable.get(phrase)
                if prev is None or alignment.cost < prev:
                    reachable[phrase] = alignment.cost
    return reachable


def minimal_repair_phrases(
    tokens: Sequence[str],
    grammar: GrammarDoc,
    max_edits: int = DEFAULT_MAX_EDITS,
    fillers: frozenset[str] = DEFAULT_FILLERS,
) -> tuple[Optional[int], set[tuple[str, ...]]]:
    """(minimum distance, every in-language phrase at that distance).

    Unlike repair(), phrases are not collapsed per pattern: a repair is only
    truly unambiguous when this set is a singleton.
    """
    stripped, _ = strip_fillers(list(tokens), fillers)
    if not stripped:
        return None, set()
    if language_membership(grammar, stripped) is not None:
        return 0, {tuple(stripped)}
    dmin: Optional[int] = None
    phrases: set[tuple[str, ...]] = set()
    for pattern in grammar.patterns:
        for phrase, cost in _pattern_reachable(pattern, stripped, max_edits).items():
            if dmin is None or cost < dmin:
                dmin = cost
                phrases = {phrase}
            elif cost == dmin:
                phrases.add(phrase)
    return dmin, phrases


def repair_distance(
    tokens: Sequence[str],
    grammar: GrammarDoc,
    max_edits: int = DEFAULT_MAX_EDITS,
    fillers: frozenset[str] = DEFAULT_FILLERS,
) -> tuple[Optional[int], list[RepairCandidate]]:
    """(min language edit distance, candidates); distance None when > max_edits."""
    candidates = repair(tokens, grammar, max_edits, fillers)
    if not candidates:
        return None, []
    return candidates[0].distance, candidates


@dataclass(frozen=True)
class RerankChoice:
    alternative_index: int
    distance: int
    candidates: list[RepairCandidate]
    score: float


def rerank_alternatives(
    alternatives: Sequence[tuple[str, float]],
    grammar: GrammarDoc,
    lam: float = DEFAULT_RERANK_LAMBDA,
    max_edits: int = DEFAULT_MAX_EDITS,
    fillers: frozenset[str] = DEFAULT_FILLERS,
) -> Optional[RerankChoice]:
    """Score each (text, confidence) alternative as confidence - lam * distance
    and return the best with a finite repair distance; ties go to the lower
    index. None when every alternative is beyond the edit budget."""
    best: Optional[RerankChoice] = None
    for idx, (text, confidence) in enumerate(alternatives):
        tokens = tokenize(text)
        distance, candidates = repair_distance(tokens, grammar, max_edits, fillers)
        if distance is None:
            continue
        score = round(confidence - lam * distance, 9)
        if best is None or score > best.score:
            best = RerankChoice(idx, distance, candidates, score)
    return best


@dataclass(frozen=True)
class PromptOption:
    label: str
    display: str
    candidate: Optional[RepairCandidate] = None
    action: Optional[str] = None  # used by the fallback ranker's prompts


@dataclass(frozen=True)
class DisambiguationPrompt:
    prompt_id: str
    text: str
    options: tuple[PromptOption, ...]
    source: str = "repair"

    def option_for(self, choice: str) -> Optional[PromptOption]:
        choice = choice.strip().lower()
        for opt in self.options:
            if choice == opt.label:
                return opt
        return None


SOMETHING_ELSE = "something else"

# prompts stay scannable: at most this many candidates are offered before
# "something else"
MAX_PROMPT_OPTIONS = 8


def _labels() -> list[str]:
    return [chr(ord("a") + i) for i in range(26)]


def build_prompt(
    options: list[PromptOption],
    prompt_id: str,
    source: str = "repair",
) -> DisambiguationPrompt:
    labels = _labels()
    options = options[:MAX_PROMPT_OPTIONS]
    labeled = [
        PromptOption(label=labels[i], display=o.display, candidate=o.candidate, action=o.action)
        for i, o in enumerate(options)
    ]
    labeled.append(PromptOption(label=labels[len(labeled)], display=SOMETHING_ELSE))
    if len(labeled) == 2:
        body = f"({labeled[0].label}) {labeled[0].display}, or ({labeled[1].label}) {SOMETHING_ELSE}"
    else:
        listed = ", ".join(f"({o.label}) {o.display}" for o in labeled[:-1])
        body = f"{listed}, or ({labeled[-1].label}) {SOMETHING_ELSE}"
    return DisambiguationPrompt(
        prompt_id=prompt_id,
        text=f"Did you mean {body}?",
        options=tuple(labeled),
        source=source,
    )


def make_prompt(
    candidates: list[RepairCandidate],
    prompt_id: str,
    auto_repair: bool = True,
) -> RepairCandidate | DisambiguationPrompt:
    """A single minimal candidate with auto-repair on is chosen outright;
    anything else becomes a labeled prompt ending in "something else"."""
    if not candidates:
        raise ValueError("make_prompt requires at least one candidate")
    if len(candidates) == 1 and auto_repair:
        return candidates[0]
    options = [
        PromptOption(label="", display=c.display, candidate=c)
        for c in candidates[:MAX_PROMPT_OPTIONS]
    ]
    return build_prompt(options, prompt_id, source="repair")
