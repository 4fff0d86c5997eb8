"""Command grammar: a DSL for slotted spoken-command patterns plus the matcher.

A grammar file holds one declaration per line:

    command "open the <f:filename> [in <p:words>]" -> OpenFile(file=f, project=p)

`<name:type>` is a typed slot, `[ ... ]` an optional group. The right-hand side
names the bound action; keyword arguments map slot names onto action argument
names (a non-slot integer value becomes a constant argument, which is how macros
like RepeatLast(count=3) get bound).

Matching is deterministic: optional groups are tried present-first and
multi-token slots match minimally (fewest tokens), ties resolved leftmost.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Union

SLOT_TYPES = frozenset(
    {"ordinal", "number", "multiplier", "word", "words", "filename", "path", "phrase"}
)

# Slot types whose values come from a closed word table.
CLOSED_SLOT_TYPES = frozenset({"ordinal", "number", "multiplier"})

KNOWN_EXTENSIONS = frozenset(
    {"java", "kt", "py", "rs", "go", "ts", "js", "txt", "md", "json", "xml", "yaml"}
)

_TOKEN_CLEAN = re.compile(r"[^a-z0-9./]+")
_TOKEN_VALID = re.compile(r"^[a-z0-9./]+$")


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, strip punctuation except '.' and '/'.

    A chunk like "foo.java" stays one token; chunks that are pure punctuation
    disappear. Empty input gives an empty list.
    """
    tokens = []
    for chunk in text.lower().split():
        cleaned = _TOKEN_CLEAN.sub("", chunk)
        if cleaned:
            tokens.append(cleaned)
    return tokens


def is_token(text: str) -> bool:
    return bool(_TOKEN_VALID.match(text))


# --- number / ordinal / multiplier tables ---------------------------------

_ONES = ["one", "two", "three", "four", "five", "six", "seven", "eight", "nine"]
_TEENS = ["ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen",
          "seventeen", "eighteen", "nineteen"]
_TENS = ["twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"]

_ONES_ORD = ["first", "second", "third", "fourth", "fifth", "sixth", "seventh",
             "eighth", "ninth"]
_TEENS_ORD = ["tenth", "eleventh", "twelfth", "thirteenth", "fourteenth", "fifteenth",
              "sixteenth", "seventeenth", "eighteenth", "nineteenth"]
_TENS_ORD = ["twentieth", "thirtieth", "fortieth", "fiftieth", "sixtieth",
             "seventieth", "eightieth", "ninetieth"]

CARDINAL_WORDS: dict[str, int] = {}
for _i, _w in enumerate(_ONES, start=1):
    CARDINAL_WORDS[_w] = _i
for _i, _w in enumerate(_TEENS, start=10):
    CARDINAL_WORDS[_w] = _i
_TENS_VALUE = {w: (i + 2) * 10 for i, w in enumerate(_TENS)}

ORDINAL_WORDS: dict[str, int] = {}
for _i, _w in enumerate(_ONES_ORD, start=1):
    ORDINAL_WORDS[_w] = _i
for _i, _w in enumerate(_TEENS_ORD, start=10):
    ORDINAL_WORDS[_w] = _i
_TENS_ORD_VALUE = {w: (i + 2) * 10 for i, w in enumerate(_TENS_ORD)}

MULTIPLIER_WORDS = {"once": 1, "twice": 2, "thrice": 3}

_DIGIT_ORDINAL = re.compile(r"^(\d+)(st|nd|rd|th)$")


def parse_ordinal(tokens: list[str]) -> Optional[int]:
    """Parse "third", "twentieth", "twenty first" or digit forms like "3rd".

    Word forms cover 1..99; unrecognized input returns None.
    """
    if len(tokens) == 1:
        tok = tokens[0]
        if tok in ORDINAL_WORDS:
            return ORDINAL_WORDS[tok]
        if tok in _TENS_ORD_VALUE:
            return _TENS_ORD_VALUE[tok]
        m = _DIGIT_ORDINAL.match(tok)
        if m:
            return int(m.group(1))
        return None
    if len(tokens) == 2:
        tens, unit = tokens
        if tens in _TENS_VALUE and unit in _ONES_ORD:
            return _TENS_VALUE[tens] + _ONES_ORD.index(unit) + 1
    return None


def render_ordinal(n: int) -> str:
    """Inverse of parse_ordinal on 1..99 (word forms)."""
    if not 1 <= n <= 99:
        raise ValueError(f"ordinal out of range: {n}")
    if n <= 9:
        return _ONES_ORD[n - 1]
    if n <= 19:
        return _TEENS_ORD[n - 10]
    tens, unit = divmod(n, 10)
    if unit == 0:
        return _TENS_ORD[tens - 2]
    return f"{_TENS[tens - 2]} {_ONES_ORD[unit - 1]}"


def parse_number(tokens: list[str]) -> Optional[int]:
    """Parse digit strings and cardinal words 1..99 ("three", "twenty one")."""
    if len(tokens) == 1:
        tok = tokens[0]
        if tok.isdigit():
            return int(tok)
        if tok in CARDINAL_WORDS:
            return CARDINAL_WORDS[tok]
        if tok in _TENS_VALUE:
            return _TENS_VALUE[tok]
        return None
    if len(tokens) == 2:
        tens, unit = tokens
        if tens in _TENS_VALUE and unit in _ONES:
            return _TENS_VALUE[tens] + _ONES.index(unit) + 1
    return None


def render_number(n: int) -> str:
    if not 1 <= n <= 99:
        raise ValueError(f"number out of range: {n}")
    if n <= 9:
        return _ONES[n - 1]
    if n <= 19:
        return _TEENS[n - 10]
    tens, unit = divmod(n, 10)
    if unit == 0:
        return _TENS[tens - 2]
    return f"{_TENS[tens - 2]} {_ONES[unit - 1]}"


def parse_multiplier(token: str) -> Optional[int]:
    return MULTIPLIER_WORDS.get(token)


def closed_slot_table(slot_type: str) -> list[tuple[str, ...]]:
    """Spoken word forms (as token tuples) that a closed slot type accepts."""
    if slot_type == "ordinal":
        table = [(w,) for w in ORDINAL_WORDS] + [(w,) for w in _TENS_ORD_VALUE]
        table += [(t, u) for t in _TENS_VALUE for u in _ONES_ORD]
        return table
    if slot_type == "number":
        table = [(w,) for w in CARDINAL_WORDS] + [(w,) for w in _TENS_VALUE]
        table += [(t, u) for t in _TENS_VALUE for u in _ONES]
        return table
    if slot_type == "multiplier":
        return [(w,) for w in MULTIPLIER_WORDS]
    raise ValueError(f"not a closed slot type: {slot_type}")


def filename_join(tokens: list[str]) -> str:
    """Join spoken filename tokens: a trailing known extension attaches with a
    dot ("foo java" -> "foo.java"); otherwise tokens concatenate bare. A single
    token passes through unchanged."""
    if not tokens:
        raise ValueError("empty filename")
    if len(tokens) >= 2 and tokens[-1] in KNOWN_EXTENSIONS:
        return "".join(tokens[:-1]) + "." + tokens[-1]
    return "".join(tokens)


def path_join(tokens: list[str]) -> str:
    if not tokens:
        raise ValueError("empty path")
    return "/".join(tokens)


def convert_slot(slot_type: str, tokens: list[str]):
    """Convert a matched token span to the slot's value; None when the span is
    not a valid instance of the type."""
    if not tokens:
        return None
    if slot_type == "ordinal":
        return parse_ordinal(tokens)
    if slot_type == "number":
        return parse_number(tokens)
    if slot_type == "multiplier":
        return parse_multiplier(tokens[0]) if len(tokens) == 1 else None
    if slot_type == "word":
        return tokens[0] if len(tokens) == 1 else None
    if slot_type == "words":
        return " ".join(tokens)
    if slot_type == "filename":
        return filename_join(tokens)
    if slot_type == "path":
        return path_join(tokens)
    if slot_type == "phrase":
        return " ".join(tokens)
    raise ValueError(f"unknown slot type {slot_type!r}")


def slot_span_limits(slot_type: str) -> tuple[int, int | None]:
    """(min, max) token-span lengths a slot type can cover; max None = unbounded."""
    if slot_type in ("word", "multiplier"):
        return 1, 1
    if slot_type in ("ordinal", "number"):
        return 1, 2
    return 1, None


# --- pattern structure -----------------------------------------------------


@dataclass(frozen=True)
class Literal:
    text: str


@dataclass(frozen=True)
class Slot:
    name: str
    type: str


@dataclass(frozen=True)
class Optional_:
    elements: tuple[Union[Literal, Slot], ...]


PatternElement = Union[Literal, Slot, Optional_]


@dataclass(frozen=True)
class CommandPattern:
    elements: tuple[PatternElement, ...]
    action: str
    arg_map: tuple[tuple[str, str], ...] = ()  # (slot name, action argument name)
    const_args: tuple[tuple[str, int], ...] = ()  # (action argument name, value)
    source: str = "default"

    def slots(self) -> list[Slot]:
        found: list[Slot] = []
        for el in self.elements:
            if isinstance(el, Slot):
                found.append(el)
            elif isinstance(el, Optional_):
                found.extend(e for e in el.elements if isinstance(e, Slot))
        return found

    def is_literal_only(self) -> bool:
        return not self.slots()

    def literal_tokens(self) -> list[str]:
        toks: list[str] = []
        for el in self.elements:
            if isinstance(el, Literal):
                toks.append(el.text)
            elif isinstance(el, Optional_):
                toks.extend(e.text for e in el.elements if isinstance(e, Literal))
        return toks

    def display(self) -> str:
        return " ".join(_display_element(el) for el in self.elements)

    def key(self) -> tuple:
        return (self.elements, self.action)


def _display_element(el: PatternElement) -> str:
    if isinstance(el, Literal):
        return el.text
    if isinstance(el, Slot):
        return f"<{el.name}:{el.type}>"
    inner = " ".join(_display_element(e) for e in el.elements)
    return f"[{inner}]"


def render_pattern_line(pattern: "CommandPattern") -> str:
    """Render a pattern back to its DSL declaration (used when persisting
    runtime bindings to the user grammar file)."""
    args = [f"{arg}={slot}" for slot, arg in pattern.arg_map]
    args += [f"{arg}={value}" for arg, value in pattern.const_args]
    call = pattern.action + (f"({', '.join(args)})" if args else "")
    return f'command "{pattern.display()}" -> {call}'


@dataclass(frozen=True)
class ParseIssue:
    line: int
    message: str


@dataclass(frozen=True)
class GrammarDoc:
    patterns: tuple[CommandPattern, ...]
    source: str = "default"
    errors: tuple[ParseIssue, ...] = ()

    def vocabulary(self) -> list[str]:
        seen = set()
        for p in self.patterns:
            seen.update(p.literal_tokens())
        return sorted(seen)

    def closed_types_present(self) -> list[str]:
        present = set()
        for p in self.patterns:
            for s in p.slots():
                if s.type in CLOSED_SLOT_TYPES:
                    present.add(s.type)
        return sorted(present)


def merge_grammars(docs: Iterable[GrammarDoc]) -> GrammarDoc:
    """Concatenate documents in load order into one document-ordered grammar."""
    patterns: list[CommandPattern] = []
    errors: list[ParseIssue] = []
    seen = set()
    for doc in docs:
        for p in doc.patterns:
            if p.key() in seen:
                continue
            seen.add(p.key())
            patterns.append(p)
        errors.extend(doc.errors)
    return GrammarDoc(patterns=tuple(patterns), source="default", errors=tuple(errors))


# --- DSL parsing -----------------------------------------------------------

_COMMAND_RE = re.compile(r'^command\s+"([^"]*)"\s*->\s*(.+)$')
_SLOT_RE = re.compile(r"^<([a-z][a-z0-9]*):([a-z]+)>$")
_ACTION_CALL_RE = re.compile(r"^([A-Za-z][A-Za-z0-9.]*)\s*(?:\((.*)\))?\s*$")


def _parse_elements(spec: str) -> tuple[PatternElement, ...]:
    """Parse the quoted pattern body. Raises ValueError with a message."""
    tokens = spec.split()
    if not tokens:
        raise ValueError("empty pattern")
    elements: list[PatternElement] = []
    optional_buf: list[Union[Literal, Slot]] | None = None
    slot_names: set[str] = set()

    def parse_atom(tok: str) -> Union[Literal, Slot]:
        m = _SLOT_RE.match(tok)
        if m:
            name, stype = m.groups()
            if stype not in SLOT_TYPES:
                raise ValueError(f"unknown slot type '{stype}'")
            if name in slot_names:
                raise ValueError(f"duplicate slot name '{name}'")
            slot_names.add(name)
            return Slot(name=name, type=stype)
        if tok.startswith("<") or tok.endswith(">"):
            raise ValueError(f"malformed slot {tok!r}")
        if not is_token(tok):
            raise ValueError(f"invalid literal token {tok!r}")
        return Literal(text=tok)

    for raw in tokens:
        tok = raw
        opened = closed = False
        if tok.startswith("["):
            opened = True
            tok = tok[1:]
        if tok.endswith("]"):
            closed = True
            tok = tok[:-1]
        if opened:
            if optional_buf is not None:
                raise ValueError("optional groups may not nest")
            optional_buf = []
        if not tok and not (opened or closed):
            continue
        if tok:
            atom = parse_atom(tok)
            if optional_buf is not None:
                optional_buf.append(atom)
            else:
                elements.append(atom)
        if closed:
            if optional_buf is None:
                raise ValueError("unbalanced brackets")
            if not optional_buf:
                raise ValueError("empty optional group")
            elements.append(Optional_(elements=tuple(optional_buf)))
            optional_buf = None
    if optional_buf is not None:
        raise ValueError("unbalanced brackets")
    if all(isinstance(el, Optional_) for el in elements):
        raise ValueError("pattern needs at least one non-optional element")
    return tuple(elements)


def _parse_action_call(text: str, slot_names: set[str]) -> tuple[str, tuple, tuple]:
    m = _ACTION_CALL_RE.match(text.strip())
    if not m:
        raise ValueError(f"malformed action reference {text.strip()!r}")
    action, arg_body = m.group(1), m.group(2)
    arg_map: list[tuple[str, str]] = []
    const_args: list[tuple[str, int]] = []
    if arg_body is not None and arg_body.strip():
        for piece in arg_body.split(","):
            piece = piece.strip()
            if "=" not in piece:
                raise ValueError(f"malformed argument {piece!r}")
            arg_name, value = (s.strip() for s in piece.split("=", 1))
            if not arg_name:
                raise ValueError(f"malformed argument {piece!r}")
            if value in slot_names:
                arg_map.append((value, arg_name))
            elif re.fullmatch(r"\d+", value):
                const_args.append((arg_name, int(value)))
            else:
                raise ValueError(f"argument {arg_name!r} references unknown slot {value!r}")
    return action, tuple(arg_map), tuple(const_args)


def parse_grammar(text: str, source: str = "default") -> GrammarDoc:
    """Parse a grammar document. Bad lines are reported in `errors` with their
    line number; good lines are kept."""
    patterns: list[CommandPattern] = []
    errors: list[ParseIssue] = []
    seen_keys = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _COMMAND_RE.match(line)
        if not m:
            if line.startswith("command") and "->" not in line:
                errors.append(ParseIssue(lineno, 'missing "->"'))
            else:
                errors.append(ParseIssue(lineno, "unrecognized declaration"))
            continue
        body, action_text = m.groups()
        try:
            elements = _parse_elements(body)
            slot_names = {s.name for s in _iter_slots(elements)}
            action, arg_map, const_args = _parse_action_call(action_text, slot_names)
            pattern = CommandPattern(
                elements=elements,
                action=action,
                arg_map=arg_map,
                const_args=const_args,
                source=source,
            )
        except ValueError as exc:
            errors.append(ParseIssue(lineno, str(exc)))
            continue
        if pattern.key() in seen_keys:
            errors.append(ParseIssue(lineno, "duplicate pattern"))
            continue
        seen_keys.add(pattern.key())
        patterns.append(pattern)
    return GrammarDoc(patterns=tuple(patterns), source=source, errors=tuple(errors))


def _iter_slots(elements: Iterable[PatternElement]):
    for el in elements:
        if isinstance(el, Slot):
            yield el
        elif isinstance(el, Optional_):
            yield from (e for e in el.elements if isinstance(e, Slot))


# --- matching --------------------------------------------------------------


@dataclass(frozen=True)
class MatchDetail:
    bindings: dict
    slot_spans: dict  # slot name -> (start, end) token indices
    skeleton: tuple  # flattened (Literal | Slot) items actually used


def _skeletons(pattern: CommandPattern):
    """Expand optional groups, present branches first."""
    def expand(idx: int, acc: list):
        if idx == len(pattern.elements):
            yield tuple(acc)
            return
        el = pattern.elements[idx]
        if isinstance(el, Optional_):
            yield from expand(idx + 1, acc + list(el.elements))
            yield from expand(idx + 1, acc)
        else:
            yield from expand(idx + 1, acc + [el])
    yield from expand(0, [])


def _match_skeleton(items: tuple, tokens: list[str], item_idx: int, tok_idx: int,
                    spans: list) -> Optional[list]:
    """Backtracking matcher; slot spans grow from minimal length (leftmost-minimal)."""
    if item_idx == len(items):
        return spans if tok_idx == len(tokens) else None
    item = items[item_idx]
    if isinstance(item, Literal):
        if tok_idx < len(tokens) and tokens[tok_idx] == item.text:
            return _match_skeleton(items, tokens, item_idx + 1, tok_idx + 1, spans)
        return None
    lo, hi = slot_span_limits(item.type)
    remaining = len(tokens) - tok_idx
    hi = remaining if hi is None else min(hi, remaining)
    for length in range(lo, hi + 1):
        span = tokens[tok_idx:tok_idx + length]
        if convert_slot(item.type, span) is None:
            continue
        result = _match_skeleton(
            items, tokens, item_idx + 1, tok_idx + length,
            spans + [(item, tok_idx, tok_idx + length)],
        )
        if result is not None:
            return result
    return None


def match_pattern_detailed(pattern: CommandPattern, tokens: list[str]) -> Optional[MatchDetail]:
    for skeleton in _skeletons(pattern):
        spans = _match_skeleton(skeleton, tokens, 0, 0, [])
        if spans is not None:
            bindings = {}
            slot_spans = {}
            for slot, start, end in spans:
                bindings[slot.name] = convert_slot(slot.type, tokens[start:end])
                slot_spans[slot.name] = (start, end)
            return MatchDetail(bindings=bindings, slot_spans=slot_spans, skeleton=skeleton)
    return None


def match_pattern(pattern: CommandPattern, tokens: list[str]) -> Optional[dict]:
    """Match tokens against one pattern; returns slot bindings or None."""
    detail = match_pattern_detailed(pattern, tokens)
    return detail.bindings if detail is not None else None


@dataclass(frozen=True)
class Membership:
    index: int
    pattern: CommandPattern
    bindings: dict
    detail: MatchDetail


def language_membership(grammar: GrammarDoc, tokens: list[str]) -> Optional[Membership]:
    """First pattern in document order that matches, or None."""
    if not tokens:
        return None
    for i, pattern in enumerate(grammar.patterns):
        detail = match_pattern_detailed(pattern, tokens)
        if detail is not None:
            return Membership(index=i, pattern=pattern, bindings=detail.bindings, detail=detail)
    return None


def candidate_display(pattern: CommandPattern, detail: MatchDetail, tokens: list[str]) -> str:
    """Render a matched phrase with slot values converted, e.g. the token
    sequence [open, file, foo, java] shows as "open file foo.java"."""
    parts = []
    for item in detail.skeleton:
        if isinstance(item, Literal):
            parts.append(item.text)
        else:
            start, end = detail.slot_spans[item.name]
            parts.append(str(convert_slot(item.type, tokens[start:end])))
    return " ".join(parts)
