"""Context identities for word occurrences.

A dependency context is the triple (deprel of the token, surface of its head,
upos of its head). An n-gram context is the window of neighbouring surfaces
with the target slot blanked out.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from .corpus import Sentence
from .errors import UsageError

BOUNDARY = "<S>"
UNIT_SEP = "\x1f"


class Scheme(enum.Enum):
    DEP = "DEP"
    NGRAM = "NGRAM"


@dataclass(frozen=True)
class ContextKey:
    scheme: Scheme
    parts: tuple[str, ...]

    def serialize(self) -> str:
        return UNIT_SEP.join((self.scheme.value, *self.parts))

    @classmethod
    def deserialize(cls, text: str) -> "ContextKey":
        tag, *parts = text.split(UNIT_SEP)
        try:
            scheme = Scheme(tag)
        except ValueError:
            raise UsageError(f"unknown context scheme tag {tag!r}") from None
        return cls(scheme, tuple(parts))

    def __str__(self):
        if self.scheme is Scheme.NGRAM:
            half = len(self.parts) // 2
            return " ".join((*self.parts[:half], "...", *self.parts[half:]))
        return "[" + ", ".join(self.parts) + "]"


def _check_index(sentence, index):
    if not 0 <= index < len(sentence):
        raise UsageError(f"token index {index} out of range for sentence of length {len(sentence)}")


def dependency_context(sentence: Sentence, index: int) -> ContextKey | None:
    """Return [deprel, head surface, head upos] for a token, or None for the root."""
    _check_index(sentence, index)
    tok = sentence.tokens[index]
    if tok.head == index:
        return None
    head = sentence.tokens[tok.head]
    return ContextKey(Scheme.DEP, (tok.deprel, head.surface, head.upos))


def ngram_context(sentence: Sentence, index: int, window: int = 1) -> ContextKey:
    """Return the `window` surfaces left and right of a token, padded with <S>."""
    _check_index(sentence, index)
    if window < 1:
        raise UsageError("n-gram window must be at least 1")
    surfaces = sentence.surfaces
    left = [surfaces[i] if i >= 0 else BOUNDARY for i in range(index - window, index)]
    right = [surfaces[i] if i < len(surfaces) else BOUNDARY
             for i in range(index + 1, index + 1 + window)]
    return ContextKey(Scheme.NGRAM, (*left, *right))


def extract(sentence: Sentence, index: int, scheme: Scheme, window: int = 1) -> ContextKey | None:
    if scheme is Scheme.DEP:
        return dependency_context(sentence, index)
    return ngram_context(sentence, index, window)


class ContextTable:
    """Bijective ContextKey <-> dense id mapping, ids assigned on first sight."""

    def __init__(self, keys: Iterable[ContextKey] = ()):
        self.keys: list[ContextKey] = []
        self._ids: dict[ContextKey, int] = {}
        for k in keys:
            self.intern(k)

    def intern(self, key: ContextKey) -> int:
        cid = self._ids.get(key)
        if cid is None:
            cid = len(self.keys)
            self.keys.append(key)
            self._ids[key] = cid
        return cid

    def id(self, key: ContextKey) -> int:
        try:
            return self._ids[key]
        except KeyError:
            raise UsageError(f"unknown context: {key}") from None

    def get(self, key, default=None):
        return self._ids.get(key, default)

    def key(self, cid: int) -> ContextKey:
        return self.keys[cid]

    def __len__(self):
        return len(self.keys)

    def __contains__(self, key):
        return key in self._ids

    def __iter__(self):
        return iter(self.keys)
