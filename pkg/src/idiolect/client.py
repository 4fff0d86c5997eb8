"""Clients for the session service: the CLI is a thin client that speaks the
service's message protocol either in-process (LocalClient, wrapping the same
ServiceCore the HTTP layer uses) or over HTTP (RemoteClient)."""

from __future__ import annotations

from typing import Optional, Protocol

import httpx

from .service.core import ServiceCore, ServiceError


class SessionClient(Protocol):
    def create_session(self) -> str: ...

    def send(self, sid: str, message: dict) -> dict: ...

    def events(self, sid: str, after: int = 0) -> list[dict]: ...

    def state(self, sid: str) -> dict: ...

    def docs(self, sid: Optional[str] = None) -> list[dict]: ...


class LocalClient:
    def __init__(self, core: ServiceCore) -> None:
        self.core = core

    def create_session(self) -> str:
        return self.core.create_session()

    def send(self, sid: str, message: dict) -> dict:
        try:
            return self.core.handle_message(sid, message)
        except ServiceError as exc:
            return exc.body()

    def events(self, sid: str, after: int = 0) -> list[dict]:
        return self.send(sid, {"type": "subscribe", "after_seq": after}).get("events", [])

    def state(self, sid: str) -> dict:
        return self.core.session_state(sid)

    def docs(self, sid: Optional[str] = None) -> list[dict]:
        return self.core.docs(sid)


class RemoteClient:
    def __init__(self, base_url: str, timeout: float = 10.0) -> None:
        self.http = httpx.Client(base_url=base_url, timeout=timeout)

    def create_session(self) -> str:
        response = self.http.post("/sessions")
        response.raise_for_status()
        return response.json()["session_id"]

    def send(self, sid: str, message: dict) -> dict:
        response = self.http.post(f"/sessions/{sid}/messages", json=message)
        return response.json()

    def events(self, sid: str, after: int = 0) -> list[dict]:
        response = self.http.get(f"/sessions/{sid}/events", params={"after": after})
        response.raise_for_status()
        return response.json().get("events", [])

    def state(self, sid: str) -> dict:
        response = self.http.get(f"/sessions/{sid}")
        response.raise_for_status()
        return response.json()

    def docs(self, sid: Optional[str] = None) -> list[dict]:
        params = {"sid": sid} if sid else {}
        response = self.http.get("/actions/docs", params=params)
        response.raise_for_status()
        return response.json()
