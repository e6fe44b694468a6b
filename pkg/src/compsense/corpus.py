"""Reading corpora into dependency-annotated sentences.

Two input formats are supported: CoNLL-U (for dependency contexts) and plain
UTF-8 text (for n-gram contexts, where tokens carry placeholder annotations).
Multiword vocabulary terms ("home phone", "chain-smoker") are merged into
single tokens after reading.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import ParseError, StructuralError, UsageError

ROOT_DEPREL = "root"
PLACEHOLDER_UPOS = "X"
PLACEHOLDER_DEPREL = "dep"

_SEPARATORS = re.compile(r"[\s\-]+")
_SENTENCE_END = re.compile(r"(?<=[.!?])\s+")
_EDGE_PUNCT = ".,;:!?\"'()[]{}"


@dataclass(frozen=True)
class Token:
    surface: str
    upos: str
    head: int
    deprel: str


@dataclass
class Sentence:
    tokens: list[Token] = field(default_factory=list)

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    @property
    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def root_index(self) -> int:
        for i, tok in enumerate(self.tokens):
            if tok.head == i:
                return i
        raise StructuralError("sentence has no root")

    def validate(self):
        """Check head ranges, a single root, and acyclicity of head links."""
        n = len(self.tokens)
        roots = [i for i, t in enumerate(self.tokens) if t.head == i]
        for i, t in enumerate(self.tokens):
            if not 0 <= t.head < n:
                raise StructuralError(f"token {i} has head {t.head} outside sentence of length {n}")
            if t.head != i and not t.deprel:
                raise StructuralError(f"token {i} has an empty deprel")
        if n and len(roots) != 1:
            raise StructuralError(f"expected exactly one root, found {len(roots)}")
        for i in range(n):
            seen = set()
            j = i
            while self.tokens[j].head != j:
                if j in seen:
                    raise StructuralError(f"head links from token {i} form a cycle")
                seen.add(j)
                j = self.tokens[j].head


def _split_terms(term: str) -> tuple[str, ...]:
    return tuple(p for p in _SEPARATORS.split(term.lower()) if p)


class Vocabulary:
    """Bijective term <-> dense id mapping.

    Terms containing a space or hyphen are additionally recorded as multiword
    terms so that `merge_multiword` can join their pieces in a sentence.
    """

    def __init__(self, terms: Iterable[str] = ()):
        self.terms: list[str] = []
        self._ids: dict[str, int] = {}
        self.multiword: set[str] = set()
        # part tuple -> terms spelled with those parts, in insertion order
        self._by_parts: dict[tuple[str, ...], list[str]] = {}
        self.max_parts = 1
        for t in terms:
            self.add(t)

    def add(self, term: str) -> int:
        term = term.strip().lower()
        if not term:
            raise UsageError("vocabulary terms must be nonempty")
        if term in self._ids:
            return self._ids[term]
        wid = len(self.terms)
        self.terms.append(term)
        self._ids[term] = wid
        parts = _split_terms(term)
        if len(parts) > 1:
            self.multiword.add(term)
            self._by_parts.setdefault(parts, []).append(term)
            self.max_parts = max(self.max_parts, len(parts))
        return wid

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term):
        return term in self._ids

    def __iter__(self):
        return iter(self.terms)

    def id(self, term: str) -> int:
        try:
            return self._ids[term]
        except KeyError:
            raise UsageError(f"unknown term: {term!r}") from None

    def get(self, term: str, default=None):
        return self._ids.get(term, default)

    def term(self, wid: int) -> str:
        return self.terms[wid]

    def multiword_for(self, parts: tuple[str, ...], hyphenated: bool) -> str | None:
        """Return the multiword term spelled by `parts`, preferring the matching separator."""
        candidates = self._by_parts.get(parts)
        if not candidates:
            return None
        for term in candidates:
            if ("-" in term) == hyphenated:
                return term
        return candidates[0]

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "Vocabulary":
        return cls(line.strip() for line in lines if line.strip() and not line.startswith("#"))


# ---------------------------------------------------------------------------
# CoNLL-U
# ---------------------------------------------------------------------------

def _as_text_lines(stream) -> Iterator[str]:
    if isinstance(stream, (bytes, bytearray)):
        stream = io.BytesIO(stream)
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    for line in stream:
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        yield line.rstrip("\r\n")


def _finish_sentence(rows, start_line) -> Sentence:
    tokens = []
    n = len(rows)
    for lineno, form, upos, head, deprel in rows:
        if head < 0 or head > n:
            raise StructuralError(f"HEAD {head} out of range for sentence of {n} tokens", lineno)
        idx = len(tokens)
        head_idx = idx if head == 0 else head - 1
        tokens.append(Token(form.lower(), upos, head_idx, deprel))
    sent = Sentence(tokens)
    try:
        sent.validate()
    except StructuralError as exc:
        raise StructuralError(str(exc), start_line) from None
    return sent


def parse_conllu(stream) -> list[Sentence]:
    """Parse CoNLL-U from a byte/text stream, bytes, or str.

    Multiword token ranges ("3-4") and empty nodes ("3.1") are skipped.
    HEAD 0 becomes a self-link on the root token.
    """
    return list(iter_conllu(stream))


def iter_conllu(stream) -> Iterator[Sentence]:
    rows: list = []
    start = None
    lineno = 0
    for lineno, line in enumerate(_as_text_lines(stream), start=1):
        if not line.strip():
            if rows:
                yield _finish_sentence(rows, start)
            rows, start = [], None
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ParseError(f"expected 10 tab-separated columns, got {len(cols)}", lineno)
        tid = cols[0]
        if "-" in tid or "." in tid:
            continue
        if not tid.isdigit():
            raise ParseError(f"non-numeric ID {tid!r}", lineno)
        if int(tid) != len(rows) + 1:
            raise StructuralError(f"token ID {tid} out of sequence", lineno)
        try:
            head = int(cols[6])
        except ValueError:
            raise ParseError(f"non-numeric HEAD {cols[6]!r}", lineno) from None
        if start is None:
            start = lineno
        rows.append((lineno, cols[1], cols[3], head, cols[7]))
    if rows:
        yield _finish_sentence(rows, start)


def format_conllu(sentences: Iterable[Sentence]) -> str:
    """Serialize sentences to CoNLL-U; unused columns are written as '_'."""
    out = []
    for sent in sentences:
        for i, tok in enumerate(sent.tokens):
            head = 0 if tok.head == i else tok.head + 1
            deprel = tok.deprel or ROOT_DEPREL
            out.append(f"{i + 1}\t{tok.surface}\t_\t{tok.upos}\t_\t_\t{head}\t{deprel}\t_\t_")
        out.append("")
    return "\n".join(out) + ("\n" if out else "")


# ---------------------------------------------------------------------------
# Plain text
# ---------------------------------------------------------------------------

def tokenize_plain(text: str) -> list[Sentence]:
    """Split text into sentences and lowercase whitespace tokens.

    Leading/trailing punctuation is stripped from each token. Every token gets
    placeholder annotations; the first token is the root.
    """
    sentences = []
    for chunk in _SENTENCE_END.split(text.strip()):
        words = []
        for raw in chunk.split():
            w = raw.strip(_EDGE_PUNCT).lower()
            if w:
                words.append(w)
        if not words:
            continue
        tokens = [Token(w, PLACEHOLDER_UPOS, 0, ROOT_DEPREL if i == 0 else PLACEHOLDER_DEPREL)
                  for i, w in enumerate(words)]
        sentences.append(Sentence(tokens))
    return sentences


# ---------------------------------------------------------------------------
# Multiword merging
# ---------------------------------------------------------------------------

def _span_parts(tokens, i, j):
    parts = []
    for tok in tokens[i:j]:
        parts.extend(_split_terms(tok.surface))
    return tuple(parts)


def _match_at(sentence, i, vocabulary):
    tokens = sentence.tokens
    if tokens[i].surface == "-":
        return None
    # a merged span never grows beyond max_parts pieces plus the hyphens between them
    limit = min(len(tokens), i + 2 * vocabulary.max_parts)
    for j in range(limit, i + 1, -1):
        if tokens[j - 1].surface == "-":
            continue
        parts = _span_parts(tokens, i, j)
        if len(parts) > vocabulary.max_parts:
            continue
        hyphenated = any("-" in t.surface for t in tokens[i:j])
        term = vocabulary.multiword_for(parts, hyphenated)
        if term is not None:
            return j, term
    return None


def _span_head(tokens, i, j):
    # the token whose head falls outside the span; rightmost wins on ties
    best = j - 1
    for k in range(i, j):
        h = tokens[k].head
        if h == k or not i <= h < j:
            best = k
    return best


def merge_multiword(sentence: Sentence, vocabulary: Vocabulary) -> Sentence:
    """Merge contiguous tokens that spell a multiword vocabulary term.

    Matching is greedy leftmost-longest. The merged token inherits upos, deprel
    and head of the span's syntactic head; head links are re-indexed.
    """
    if not vocabulary.multiword or len(sentence) < 2:
        return sentence
    tokens = sentence.tokens
    spans = []  # (start, end, term)
    i = 0
    while i < len(tokens):
        m = _match_at(sentence, i, vocabulary)
        if m is None:
            i += 1
            continue
        end, term = m
        spans.append((i, end, term))
        i = end
    if not spans:
        return sentence

    new_index = [0] * len(tokens)
    keep = []  # (old index of representative token, surface)
    pos = 0
    for start, end, term in spans:
        while pos < start:
            new_index[pos] = len(keep)
            keep.append((pos, tokens[pos].surface))
            pos += 1
        for k in range(start, end):
            new_index[k] = len(keep)
        keep.append((_span_head(tokens, start, end), term))
        pos = end
    while pos < len(tokens):
        new_index[pos] = len(keep)
        keep.append((pos, tokens[pos].surface))
        pos += 1

    merged = []
    for old, surface in keep:
        tok = tokens[old]
        merged.append(Token(surface, tok.upos, new_index[tok.head], tok.deprel))
    return Sentence(merged)
