"""Ranking a compound constituent's synonyms by their fit to the compound."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable

from .errors import ParseError, PreconditionError
from .expansion import ExpansionParams, expand, restrict
from .index import ApmiIndex


class SynonymLexicon(dict):
    """term -> ordered, deduplicated list of synonyms (never the term itself)."""

    def add(self, head: str, synonyms: Iterable[str]):
        head = head.strip().lower()
        syns = self.setdefault(head, [])
        for s in synonyms:
            s = s.strip().lower()
            if s and s != head and s not in syns:
                syns.append(s)
        return syns


def load_synonyms(stream) -> SynonymLexicon:
    """Read ``headword<TAB>synonym(<TAB>synonym)*`` lines."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    lex = SynonymLexicon()
    for lineno, line in enumerate(stream, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        head, *syns = line.split("\t")
        if not head.strip() or not syns or not all(s.strip() for s in syns):
            raise ParseError("expected headword followed by one or more tab-separated synonyms", lineno)
        lex.add(head, syns)
    return lex


@dataclass(frozen=True)
class DisambiguationQuery:
    compound: str
    constituent: str
    include_constituent: bool = True


@dataclass
class DisambiguationAnswer:
    ranked_synonyms: list[tuple[str, float]] = field(default_factory=list)
    no_signal: bool = False

    @property
    def chosen(self) -> str:
        return self.ranked_synonyms[0][0]

    @property
    def score(self) -> float:
        return self.ranked_synonyms[0][1]


def rank_synonyms(index: ApmiIndex, query: DisambiguationQuery, synonyms: Iterable[str],
                  rho: float = 1.5) -> DisambiguationAnswer:
    """Expand {compound, constituent} restricted to `synonyms` and rank them.

    Raises PreconditionError when a term is missing from the index or fewer
    than two usable synonyms remain.
    """
    compound, constituent = query.compound.lower(), query.constituent.lower()
    syns = []
    for s in synonyms:
        s = s.lower()
        if s not in syns and s not in (compound, constituent):
            syns.append(s)
    if len(syns) < 2:
        raise PreconditionError(f"{constituent!r} needs at least 2 synonyms, got {len(syns)}")
    vocab = index.vocabulary
    for term in (compound, constituent, *syns):
        if term not in vocab:
            raise PreconditionError(f"term not in index vocabulary: {term!r}")

    seed = [vocab.id(compound)]
    if query.include_constituent:
        seed.append(vocab.id(constituent))
    focus = [vocab.id(s) for s in syns]
    sub = restrict(index, focus, seed)
    sv = sub.vocabulary
    result = expand(
        sub,
        [sv.id(vocab.term(w)) for w in seed],
        ExpansionParams(rho, frozenset(sv.id(s) for s in syns)),
    )
    ranked = list(result)
    return DisambiguationAnswer(ranked, no_signal=ranked[0][1] <= 0.0)


def disambiguate(index: ApmiIndex, query: DisambiguationQuery, lexicon: SynonymLexicon,
                 rho: float = 1.5) -> DisambiguationAnswer:
    syns = lexicon.get(query.constituent.lower())
    if syns is None:
        raise PreconditionError(f"no synonyms listed for {query.constituent!r}")
    return rank_synonyms(index, query, syns, rho)
