"""Provider contracts for the three external services and the chat session."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np

from ..errors import EmptyTextError


@dataclass
class ChatSession:
    """An ordered user/assistant exchange bound to one judge provider.

    Messages must alternate starting with the user; the judge protocol sends
    exactly two user messages per sample within one session.
    """

    provider_id: str
    messages: list[tuple[str, str]] = field(default_factory=list)

    def add_user(self, content: str) -> None:
        if self.messages and self.messages[-1][0] == "user":
            raise ValueError("messages must alternate: expected an assistant reply next")
        self.messages.append(("user", content))

    def add_assistant(self, content: str) -> None:
        if not self.messages or self.messages[-1][0] != "user":
            raise ValueError("messages must alternate: expected a user message first")
        self.messages.append(("assistant", content))

    @property
    def user_turns(self) -> int:
        return sum(1 for role, _ in self.messages if role == "user")


@runtime_checkable
class Translator(Protocol):
    id: str

    def translate(self, text: str, source_lang: str, target_lang: str) -> str: ...


@runtime_checkable
class Judge(Protocol):
    id: str

    def reply(self, messages: list[tuple[str, str]]) -> str: ...


@runtime_checkable
class Embedder(Protocol):
    id: str

    def embed(self, text: str) -> np.ndarray: ...


def judge_exchange(session: ChatSession, user_message: str, judge: Judge) -> str:
    """Send one user message in the session and record the reply.

    Earlier messages are never mutated; the reply is conditioned on the full
    history (which is also what any caching layer keys on).
    """
    session.add_user(user_message)
    reply = judge.reply(list(session.messages))
    session.add_assistant(reply)
    return reply


def require_text(text: str) -> str:
    if not text or not text.strip():
        raise EmptyTextError("text must be non-empty")
    return text
