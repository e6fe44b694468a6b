"""Coherence-weighted set expansion over an APPMI index.

For an input set S the score of word w is

    E(w) = sum_c m_cv(w, c) * f(c)**rho * a(c)

where f(c) is the fraction of S with a positive entry in context c and a(c)
is the summed m_vc mass of S in c.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Collection, Iterable

import numpy as np

from .contexts import ContextTable
from .corpus import Vocabulary
from .errors import UsageError
from .index import ApmiIndex


@dataclass(frozen=True)
class ExpansionParams:
    rho: float = 1.5
    candidates: frozenset[int] | None = None

    def __post_init__(self):
        if not self.rho > 0:
            raise UsageError(f"rho must be > 0, got {self.rho}")


@dataclass
class ExpansionResult:
    ranked: list[tuple[int, float]] = field(default_factory=list)
    terms: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(zip(self.terms, (s for _, s in self.ranked)))

    def score_of(self, term: str) -> float:
        for t, (_, s) in zip(self.terms, self.ranked):
            if t == term:
                return s
        raise KeyError(term)

    def as_dict(self) -> dict[str, float]:
        return {t: s for t, (_, s) in zip(self.terms, self.ranked)}


def _check_set(index: ApmiIndex, words: Collection[int]) -> np.ndarray:
    ids = np.array(sorted(set(int(w) for w in words)), dtype=np.int64)
    if ids.size == 0:
        raise UsageError("input set must be nonempty")
    if ids[0] < 0 or ids[-1] >= index.n_words:
        bad = [int(w) for w in ids if not 0 <= w < index.n_words]
        raise UsageError(f"unknown word id(s) {bad}")
    return ids


def context_fraction(index: ApmiIndex, words: Collection[int], context: int) -> float:
    ids = _check_set(index, words)
    row = index.m_vc.getrow(context).toarray().ravel()
    return float(np.count_nonzero(row[ids] > 0)) / len(ids)


def context_mass(index: ApmiIndex, words: Collection[int], context: int) -> float:
    ids = _check_set(index, words)
    row = index.m_vc.getrow(context).toarray().ravel()
    return float(row[ids].sum())


def context_weights(index: ApmiIndex, words: Collection[int], rho: float) -> np.ndarray:
    """Per-context weight f(c)**rho * a(c) for the given input set."""
    ids = _check_set(index, words)
    sub = index.m_vc[:, ids]
    mass = np.asarray(sub.sum(axis=1)).ravel()
    hits = np.asarray((sub > 0).sum(axis=1)).ravel()
    frac = hits / len(ids)
    return frac ** rho * mass


def rank(scores: dict[int, float], vocabulary: Vocabulary) -> ExpansionResult:
    order = sorted(scores.items(), key=lambda kv: (-kv[1], vocabulary.term(kv[0])))
    return ExpansionResult(order, [vocabulary.term(w) for w, _ in order])


def expand(index: ApmiIndex, words: Collection[int], params: ExpansionParams | None = None) -> ExpansionResult:
    """Score vocabulary words for membership in the set `words`.

    Words with a zero score are kept in the ranking.
    """
    params = params or ExpansionParams()
    weights = context_weights(index, words, params.rho)
    if params.candidates is None:
        rows = np.arange(index.n_words)
    else:
        rows = _check_set(index, params.candidates)
    scores = index.m_cv[rows] @ weights
    return rank({int(w): float(s) for w, s in zip(rows, scores)}, index.vocabulary)


def restrict(index: ApmiIndex, focus: Iterable[int], input_set: Iterable[int] = ()) -> ApmiIndex:
    """Sub-index over the focus and input words and the contexts they occur in.

    Word order follows the parent index. A context is kept when any kept word
    has a positive entry for it in either matrix.
    """
    focus = list(focus)
    if not focus:
        raise UsageError("restrict needs at least one focus word")
    word_ids = _check_set(index, set(focus) | set(input_set))
    vc = index.m_vc[:, word_ids]
    cv = index.m_cv[word_ids]
    live = (np.asarray(vc.getnnz(axis=1)) > 0) | (np.asarray(cv.getnnz(axis=0)) > 0)
    ctx_ids = np.flatnonzero(live)
    m_vc = vc[ctx_ids].tocsr()
    m_cv = cv[:, ctx_ids].tocsr()
    for m in (m_vc, m_cv):
        m.sort_indices()
    vocab = Vocabulary(index.vocabulary.term(int(w)) for w in word_ids)
    table = ContextTable(index.contexts.key(int(c)) for c in ctx_ids)
    return ApmiIndex(vocab, table, m_vc, m_cv, index.config)


def expand_terms(index: ApmiIndex, terms: Iterable[str], rho: float = 1.5,
                 candidates: Iterable[str] | None = None) -> ExpansionResult:
    """Term-level convenience wrapper around `expand`."""
    ids = [index.word_id(t) for t in terms]
    cand = None if candidates is None else frozenset(index.word_id(t) for t in candidates)
    return expand(index, ids, ExpansionParams(rho, cand))
