"""Batch transcript processing: JSONL utterances in, JSONL outcomes out."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO

from .client import SessionClient


@dataclass
class BatchSummary:
    executed: int = 0
    needs_disambiguation: int = 0
    unrecognized: int = 0
    input_errors: int = 0

    @property
    def total(self) -> int:
        return self.executed + self.needs_disambiguation + self.unrecognized + self.input_errors

    def line(self) -> str:
        return (
            f"{self.total} utterances: {self.executed} executed, "
            f"{self.needs_disambiguation} need disambiguation, "
            f"{self.unrecognized} unrecognized, {self.input_errors} input errors"
        )


def _parse_line(line: str) -> list[dict]:
    body = json.loads(line)
    if "alternatives" in body:
        alts = [
            {"text": str(a["text"]), "confidence": float(a.get("confidence", 1.0))}
            for a in body["alternatives"]
        ]
    elif "text" in body:
        alts = [{"text": str(body["text"]), "confidence": 1.0}]
    else:
        raise ValueError("record needs 'alternatives' or 'text'")
    if not alts:
        raise ValueError("empty alternatives")
    return alts


def batch_mode(client: SessionClient, input_path: Path, output_path: Path,
               log: IO[str] | None = None) -> BatchSummary:
    """Dispatch every JSONL record through one session; one outcome per line."""
    sid = client.create_session()
    summary = BatchSummary()
    with open(input_path, encoding="utf-8") as infile, \
            open(output_path, "w", encoding="utf-8") as outfile:
        for lineno, raw in enumerate(infile, start=1):
            line = raw.strip()
            if not line:
                continue
            record_id = lineno
            try:
                body = json.loads(line)
                record_id = body.get("id", lineno)
                alternatives = _parse_line(line)
            except (json.JSONDecodeError, ValueError, TypeError, KeyError) as exc:
                summary.input_errors += 1
                outfile.write(json.dumps(
                    {"id": record_id, "kind": "input_error", "error": str(exc)}
                ) + "\n")
                continue
            response = client.send(sid, {"type": "utterance", "alternatives": alternatives})
            if response.get("type") == "error":
                summary.input_errors += 1
                outfile.write(json.dumps(
                    {"id": record_id, "kind": "input_error", "error": response.get("code")}
                ) + "\n")
                continue
            outcome = response.get("outcome", {})
            kind = outcome.get("kind", "unrecognized")
            row = {"id": record_id, "kind": kind}
            if kind == "executed":
                summary.executed += 1
                row.update({
                    "action": outcome.get("action"),
                    "bindings": outcome.get("bindings") or {},
                    "repair_edits": outcome.get("repair_edits") or 0,
                    "recognizer": outcome.get("recognizer"),
                    "outcome": outcome.get("outcome"),
                })
            elif kind == "needs_disambiguation":
                summary.needs_disambiguation += 1
                prompt = outcome.get("prompt") or {}
                row["prompt"] = prompt.get("text")
                row["options"] = [o.get("display") for o in prompt.get("options", [])]
            else:
                summary.unrecognized += 1
            outfile.write(json.dumps(row) + "\n")
    if log is not None:
        print(summary.line(), file=log)
    return summary
