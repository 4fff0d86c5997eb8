"""Pydantic models for the session-service JSON contract.

Message field names are part of the wire contract and must not change:
{type:"utterance", alternatives:[{text, confidence}]}, {type:"resolve",
prompt_id, choice}, {type:"bind", phrase, action}, {type:"subscribe"}.
Events are {seq, kind, payload} records.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field


class Alternative(BaseModel):
    text: str
    confidence: float = Field(ge=0.0, le=1.0, default=1.0)


class UtteranceMessage(BaseModel):
    type: Literal["utterance"]
    alternatives: list[Alternative]


class ResolveMessage(BaseModel):
    type: Literal["resolve"]
    prompt_id: str
    choice: str


class BindMessage(BaseModel):
    type: Literal["bind"]
    phrase: str
    action: str
    override: bool = False


class SubscribeMessage(BaseModel):
    type: Literal["subscribe"]
    after_seq: int = 0


class LoadGrammarMessage(BaseModel):
    type: Literal["load"]
    path: str


Message = Union[UtteranceMessage, ResolveMessage, BindMessage, SubscribeMessage, LoadGrammarMessage]

MESSAGE_TYPES = {"utterance", "resolve", "bind", "subscribe", "load"}


class EventModel(BaseModel):
    seq: int
    kind: str
    payload: dict


class PromptOptionModel(BaseModel):
    label: str
    display: str


class PromptModel(BaseModel):
    prompt_id: str
    text: str
    options: list[PromptOptionModel]
    source: str


class OutcomeModel(BaseModel):
    kind: str
    action: Optional[str] = None
    bindings: Optional[dict] = None
    outcome: Optional[str] = None
    detail: Optional[str] = None
    repair_edits: Optional[int] = None
    recognizer: Optional[str] = None
    prompt: Optional[PromptModel] = None


class MessageResponse(BaseModel):
    events: list[EventModel]
    outcome: Optional[OutcomeModel] = None


class ErrorResponse(BaseModel):
    type: Literal["error"] = "error"
    code: str
    message: Optional[str] = None


class SessionCreated(BaseModel):
    session_id: str


class SessionState(BaseModel):
    session_id: str
    listening: bool
    history_length: int
    pending_prompt: Optional[PromptModel] = None
    last_seq: int


class DocEntryModel(BaseModel):
    id: str
    description: str
    phrases: list[str]


class HealthResponse(BaseModel):
    status: str
    sessions: int
