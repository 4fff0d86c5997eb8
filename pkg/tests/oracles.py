"""Independent brute-force oracles the test suite checks the engine against.

These deliberately use different algorithms from the package: regex-based
identifier splitting, memoized recursion for edit distance, and an
enumerate-everything repair oracle (edit neighborhood x regex membership x
assignment-decomposed alignment costs).
"""

from __future__ import annotations

import re
from functools import lru_cache

from idiolect.grammar import (
    CARDINAL_WORDS,
    CLOSED_SLOT_TYPES,
    MULTIPLIER_WORDS,
    ORDINAL_WORDS,
    _ONES,
    _ONES_ORD,
    _TENS_ORD_VALUE,
    _TENS_VALUE,
    GrammarDoc,
    Literal,
    Optional_,
    Slot,
    closed_slot_table,
    convert_slot,
)
from idiolect.repair import (
    DEFAULT_FILLERS,
    char_distance,
    grammar_vocabulary,
    matched_token_count,
)

# --- CamelCase splitting oracle ---------------------------------------------

_SPLIT_RE = re.compile(
    r"\d+[a-z]*"              # digit run with trailing lowercase ("2nd")
    r"|[A-Z]+(?![a-z])"       # uppercase run not followed by lowercase (acronym at end)
    r"|[A-Z][a-z]*"           # capitalized word
    r"|[a-z]+"                # lowercase run
)


def oracle_camel_split(identifier: str) -> str:
    words = []
    for segment in identifier.split("."):
        for m in _SPLIT_RE.finditer(segment):
            words.append(m.group(0).lower())
    return " ".join(words)


# --- edit distance oracles ---------------------------------------------------


def oracle_edit_distance(a: tuple[str, ...], b: tuple[str, ...],
                         fillers: frozenset = frozenset()) -> int:
    """Memoized recursion, minimal cost only."""

    @lru_cache(maxsize=None)
    def rec(i: int, j: int) -> int:
        if i == len(a):
            return len(b) - j
        if j == len(b):
            return sum(0 if a[k] in fillers else 1 for k in range(i, len(a)))
        best = rec(i + 1, j + 1) + (0 if a[i] == b[j] else 1)
        best = min(best, rec(i + 1, j) + (0 if a[i] in fillers else 1))
        best = min(best, rec(i, j + 1) + 1)
        return best

    return rec(0, 0)


# --- repair oracle -----------------------------------------------------------

_TOKEN_RE = r"[a-z0-9./]+"


def _regex_for_slot(slot: Slot) -> str:
    if slot.type == "word":
        return _TOKEN_RE
    if slot.type in ("words", "filename", "path", "phrase"):
        return f"{_TOKEN_RE}(?: {_TOKEN_RE})*"
    if slot.type == "ordinal":
        singles = sorted(ORDINAL_WORDS) + sorted(_TENS_ORD_VALUE)
        compounds = [f"{t} {u}" for t in sorted(_TENS_VALUE) for u in _ONES_ORD]
        alts = [re.escape(w) for w in singles] + [re.escape(c) for c in compounds]
        alts.append(r"\d+(?:st|nd|rd|th)")
        return "(?:" + "|".join(alts) + ")"
    if slot.type == "number":
        singles = sorted(CARDINAL_WORDS) + sorted(_TENS_VALUE)
        compounds = [f"{t} {u}" for t in sorted(_TENS_VALUE) for u in _ONES]
        alts = [re.escape(w) for w in singles] + [re.escape(c) for c in compounds]
        alts.append(r"\d+")
        return "(?:" + "|".join(alts) + ")"
    if slot.type == "multiplier":
        return "(?:" + "|".join(sorted(MULTIPLIER_WORDS)) + ")"
    raise ValueError(slot.type)


def _oracle_skeletons(pattern) -> list[tuple]:
    """Expand optional groups (all on/off combos)."""
    skeletons = [[]]
    for el in pattern.elements:
        if isinstance(el, Optional_):
            skeletons = [s + list(el.elements) for s in skeletons] + skeletons
        else:
            skeletons = [s + [el] for s in skeletons]
    return [tuple(s) for s in skeletons]


def _skeleton_regex(skeleton: tuple) -> str:
    parts = []
    for item in skeleton:
        if isinstance(item, Literal):
            parts.append(re.escape(item.text))
        else:
            parts.append(_regex_for_slot(item))
    return " ".join(parts)


class OracleGrammar:
    """Per-pattern regexes for fast membership, plus skeletons for alignment."""

    def __init__(self, grammar: GrammarDoc) -> None:
        self.grammar = grammar
        self.skeletons = [_oracle_skeletons(p) for p in grammar.patterns]
        self.regexes = [
            re.compile("|".join(f"(?:{_skeleton_regex(s)})" for s in skels))
            for skels in self.skeletons
        ]

    def matching_patterns(self, phrase: tuple[str, ...]) -> list[int]:
        text = " ".join(phrase)
        return [i for i, rx in enumerate(self.regexes) if rx.fullmatch(text)]


def _assignments(skeleton: tuple, phrase: tuple[str, ...]):
    """All ways to carve the phrase into the skeleton's literals and slot
    spans: yields lists of (Slot | None, start, end)."""
    out = []

    def rec(item_idx: int, pos: int, acc: list) -> None:
        if item_idx == len(skeleton):
            if pos == len(phrase):
                out.append(list(acc))
            return
        item = skeleton[item_idx]
        if isinstance(item, Literal):
            if pos < len(phrase) and phrase[pos] == item.text:
                acc.append((None, pos, pos + 1))
                rec(item_idx + 1, pos + 1, acc)
                acc.pop()
            return
        for end in range(pos + 1, len(phrase) + 1):
            if convert_slot(item.type, list(phrase[pos:end])) is None:
                continue
            acc.append((item, pos, end))
            rec(item_idx + 1, end, acc)
            acc.pop()

    rec(0, 0, [])
    return out


def _segment_distance(seg_input: tuple[str, ...], seg_literals: tuple[str, ...]) -> int:
    return oracle_edit_distance(seg_input, seg_literals)


@lru_cache(maxsize=None)
def _table_set(slot_type: str) -> frozenset:
    return frozenset(closed_slot_table(slot_type))


def oracle_restricted_distance(
    source: tuple[str, ...], skeletons: list[tuple], phrase: tuple[str, ...], budget: int
):
    """Minimal slot-preserving alignment cost between source and phrase.

    Open slot spans must occur verbatim as contiguous runs of the source (in
    order, non-overlapping); closed spans align to same-length source runs,
    paying one per mismatched token; everything between aligns by plain edit
    distance against the skeleton's literal tokens. None when over budget.
    """
    best = None
    for skeleton in skeletons:
        for assignment in _assignments(skeleton, phrase):
            spans = [(item, phrase[s:e]) for item, s, e in assignment if item is not None]
            literal_segments: list[tuple[str, ...]] = []
            current: list[str] = []
            for item, s, e in assignment:
                if item is None:
                    current.extend(phrase[s:e])
                else:
                    literal_segments.append(tuple(current))
                    current = []
            literal_segments.append(tuple(current))

            def rec(span_idx: int, src_pos: int, acc: int):
                nonlocal best
                if best is not None and acc >= best:
                    return
                if span_idx == len(spans):
                    total = acc + _segment_distance(
                        source[src_pos:], literal_segments[span_idx]
                    )
                    if total <= budget and (best is None or total < best):
                        best = total
                    return
                slot, span = spans[span_idx]
                closed = slot.type in CLOSED_SLOT_TYPES
                # mismatched closed spans must be table entries (a substitution
                # toward the word table), never digit forms
                subbable = closed and span in _table_set(slot.type)
                length = len(span)
                for start in range(src_pos, len(source) - length + 1):
                    run = source[start:start + length]
                    mismatches = sum(a != b for a, b in zip(span, run))
                    if mismatches and not subbable:
                        continue
                    seg_cost = _segment_distance(
                        source[src_pos:start], literal_segments[span_idx]
                    )
                    rec(span_idx + 1, start + length,
                        acc + seg_cost + mismatches)

            rec(0, 0, 0)
    return best


def _neighbors(phrase: tuple[str, ...], vocab: list[str]):
    for i in range(len(phrase)):
        yield phrase[:i] + phrase[i + 1:]
    for i in range(len(phrase)):
        for v in vocab:
            if v != phrase[i]:
                yield phrase[:i] + (v,) + phrase[i + 1:]
    for i in range(len(phrase) + 1):
        for v in vocab:
            yield phrase[:i] + (v,) + phrase[i:]


def oracle_repair(
    tokens,
    grammar: GrammarDoc,
    max_edits: int = 2,
    fillers: frozenset = DEFAULT_FILLERS,
    oracle_grammar: OracleGrammar | None = None,
) -> list[tuple[int, tuple[str, ...], int]]:
    """Brute-force repair: enumerate the whole <= max_edits edit neighborhood
    (insertions and substitutions drawn from the grammar vocabulary), keep the
    in-language phrases reachable under the slot-preserving alignment rules,
    and reduce exactly like repair(): per pattern the best phrase by
    (distance, most kept tokens, char distance, lexical order), then the
    per-pattern winners at the global minimum distance, deduplicated by phrase.

    Returns (pattern_index, phrase, distance) triples in pattern order.
    """
    og = oracle_grammar if oracle_grammar is not None else OracleGrammar(grammar)
    stripped = tuple(t for t in tokens if t not in fillers)
    if not stripped:
        return []
    member_patterns = og.matching_patterns(stripped)
    if member_patterns:
        return [(member_patterns[0], stripped, 0)]
    vocab = grammar_vocabulary(grammar)

    seen = {stripped}
    layer = [stripped]
    all_phrases: list[tuple[str, ...]] = []
    for _ in range(max_edits):
        next_layer = []
        for ph in layer:
            for nb in _neighbors(ph, vocab):
                if nb not in seen:
                    seen.add(nb)
                    next_layer.append(nb)
        all_phrases.extend(next_layer)
        layer = next_layer

    source_text = " ".join(stripped)
    per_pattern: dict[int, tuple] = {}  # index -> (key, phrase, distance)
    for phrase in all_phrases:
        if not phrase:
            continue
        for p_idx in og.matching_patterns(phrase):
            distance = oracle_restricted_distance(
                stripped, og.skeletons[p_idx], phrase, max_edits
            )
            if distance is None:
                continue
            kept = matched_token_count(list(stripped), list(phrase))
            key = (distance, -kept, char_distance(source_text, " ".join(phrase)), phrase)
            prev = per_pattern.get(p_idx)
            if prev is None or key < prev[0]:
                per_pattern[p_idx] = (key, phrase, distance)
    if not per_pattern:
        return []
    dmin = min(entry[2] for entry in per_pattern.values())
    chosen = []
    used = set()
    for p_idx in sorted(per_pattern):
        key, phrase, distance = per_pattern[p_idx]
        if distance != dmin or phrase in used:
            continue
        used.add(phrase)
        chosen.append((p_idx, phrase, distance))
    return chosen
