"""Interactive shell: each line is dispatched as an utterance; ':' commands
inspect and reconfigure the session; single letters answer a pending prompt."""

from __future__ import annotations

import json
import re
import shlex
import sys
from typing import IO, Optional

from .client import SessionClient
from .config import QUICK_START, Config

_BIND_RE = re.compile(r'^:bind\s+"([^"]+)"\s*->\s*(\S+)\s*$')

HELP_TEXT = """\
Commands:
  <text>                 dispatch the line as an utterance
  {"alternatives": ...}  dispatch a JSON N-best utterance
  a / b / c ...          answer a pending disambiguation prompt
  :bind "phrase" -> ActionId    bind a new spoken phrase
  :load PATH             load an extra grammar file into the session
  :actions               list known actions
  :docs                  show generated command documentation
  :log [N]               show the last N execution records (default 10)
  :eval GRID.json [SEED] run the evaluation harness
  :help                  this text
  :quit                  leave
"""


def _render_outcome(outcome: dict, out: IO[str]) -> Optional[str]:
    """Print one dispatch outcome; returns a pending prompt id if any."""
    kind = outcome.get("kind")
    if kind == "executed":
        bindings = outcome.get("bindings") or {}
        rendered = " ".join(f"{k}={v}" for k, v in sorted(bindings.items()))
        status = outcome.get("outcome")
        detail = outcome.get("detail", "")
        edits = outcome.get("repair_edits") or 0
        suffix = f" (repaired, {edits} edit{'s' if edits != 1 else ''})" if edits else ""
        print(
            f"[{outcome.get('recognizer')}] {outcome.get('action')}"
            + (f" {{{rendered}}}" if rendered else "")
            + f" -> {status}: {detail}{suffix}",
            file=out,
        )
        return None
    if kind == "needs_disambiguation":
        prompt = outcome.get("prompt") or {}
        print(prompt.get("text", ""), file=out)
        return prompt.get("prompt_id")
    if kind == "bound":
        print("[bound]", file=out)
        return None
    print("[unrecognized]", file=out)
    return None


def repl_loop(
    config: Config,
    client: SessionClient,
    stdin: IO[str] = sys.stdin,
    stdout: IO[str] = sys.stdout,
) -> int:
    sid = client.create_session()
    if config.first_run:
        print(QUICK_START, file=stdout)
    for warning in config.warnings:
        print(f"[config] {warning}", file=stdout)
    pending_prompt: Optional[str] = None
    print("idiolect ready (:help for commands)", file=stdout)
    for raw in stdin:
        line = raw.strip()
        if not line:
            continue
        if line in (":quit", ":q", ":exit"):
            break
        if line == ":help":
            print(HELP_TEXT, file=stdout)
            continue
        if line == ":actions":
            docs = client.docs(sid)
            print(f"{len(docs)} actions", file=stdout)
            for entry in docs[:25]:
                print(f"  {entry['id']} — {entry['description']}", file=stdout)
            if len(docs) > 25:
                print(f"  ... and {len(docs) - 25} more (:docs for all)", file=stdout)
            continue
        if line == ":docs":
            for entry in client.docs(sid):
                print(f"{entry['id']} — {entry['description']}", file=stdout)
                for phrase in entry["phrases"]:
                    print(f"    {phrase}", file=stdout)
            continue
        if line.startswith(":log"):
            parts = line.split()
            count = int(parts[1]) if len(parts) > 1 and parts[1].isdigit() else 10
            events = client.events(sid, after=0)
            executed = [e for e in events if e["kind"] == "ActionExecuted"]
            for event in executed[-count:]:
                payload = event["payload"]
                print(
                    f"  #{payload['seq']} {payload['action']} "
                    f"{payload['outcome']['status']}: {payload['outcome']['detail']}",
                    file=stdout,
                )
            continue
        if line.startswith(":bind"):
            match = _BIND_RE.match(line)
            if not match:
                print('usage: :bind "phrase" -> ActionId', file=stdout)
                continue
            phrase, action = match.groups()
            response = client.send(sid, {"type": "bind", "phrase": phrase, "action": action})
            if response.get("type") == "error":
                print(f"[error] {response.get('code')}: {response.get('message', '')}", file=stdout)
            else:
                print(f"[bound] \"{phrase}\" -> {action}", file=stdout)
            continue
        if line.startswith(":load"):
            parts = shlex.split(line)
            if len(parts) != 2:
                print("usage: :load PATH", file=stdout)
                continue
            response = client.send(sid, {"type": "load", "path": parts[1]})
            if response.get("type") == "error":
                print(f"[error] {response.get('code')}: {response.get('message', '')}", file=stdout)
            else:
                print(f"[loaded] {response['outcome']['detail']}", file=stdout)
            continue
        if line.startswith(":eval"):
            parts = shlex.split(line)
            if len(parts) < 2:
                print("usage: :eval GRID.json [SEED]", file=stdout)
                continue
            seed = int(parts[2]) if len(parts) > 2 else 42
            from .cli import run_eval

            run_eval(config, parts[1], seed, stdout)
            continue
        if line.startswith(":"):
            print(f"unknown command {line.split()[0]} (:help)", file=stdout)
            continue
        # prompt answers: a single letter while a prompt is pending
        if pending_prompt and re.fullmatch(r"[a-z]", line):
            response = client.send(
                sid, {"type": "resolve", "prompt_id": pending_prompt, "choice": line}
            )
            if response.get("type") == "error":
                print(f"[error] {response.get('code')}", file=stdout)
                pending_prompt = None
                continue
            pending_prompt = _render_outcome(response.get("outcome", {}), stdout)
            continue
        # utterances: bare text or a JSON N-best object
        if line.startswith("{"):
            try:
                body = json.loads(line)
                alternatives = body["alternatives"]
            except (json.JSONDecodeError, KeyError) as exc:
                print(f"[input error] {exc}", file=stdout)
                continue
        else:
            alternatives = [{"text": line, "confidence": 1.0}]
        response = client.send(sid, {"type": "utterance", "alternatives": alternatives})
        if response.get("type") == "error":
            print(f"[error] {response.get('code')}: {response.get('message', '')}", file=stdout)
            continue
        heard = next(
            (e["payload"]["text"] for e in response.get("events", ())
             if e["kind"] == "Transcribed"),
            alternatives[0]["text"],
        )
        print(f"[heard] {heard}", file=stdout)
        pending_prompt = _render_outcome(response.get("outcome", {}), stdout)
    return 0
