"""Word/context co-occurrence counts and APPMI incidence matrices.

Two sparse matrices are built from the counts:

* ``m_vc`` (contexts x words) holds APPMI(w, c), whose frequency term divides
  the joint probability by P(w);
* ``m_cv`` (words x contexts) holds APPMI(c, w), which divides by P(c).

Only strictly positive values are stored.
"""

from __future__ import annotations

import enum
import io
import math
import os
import struct
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .contexts import ContextKey, ContextTable, Scheme, extract
from .corpus import Sentence, Vocabulary, merge_multiword
from .errors import IndexFormatError, UsageError


class Estimator(enum.IntEnum):
    JOINT = 0
    CONDITIONAL = 1


class LogBase(enum.IntEnum):
    NATURAL = 0
    BASE2 = 1
    BASE10 = 2

    @property
    def scale(self) -> float:
        """Divide a natural log by this to change base."""
        return {LogBase.NATURAL: 1.0, LogBase.BASE2: math.log(2), LogBase.BASE10: math.log(10)}[self]


@dataclass(frozen=True)
class ApmiConfig:
    k: float = 5.0
    estimator: Estimator = Estimator.CONDITIONAL
    log_base: LogBase = LogBase.NATURAL

    def __post_init__(self):
        if not self.k >= 0:
            raise UsageError(f"k must be >= 0, got {self.k}")


@dataclass
class CooccurrenceCounts:
    pair_count: Counter = field(default_factory=Counter)
    word_count: Counter = field(default_factory=Counter)
    context_count: Counter = field(default_factory=Counter)
    total_pairs: int = 0

    def merge(self, other: "CooccurrenceCounts") -> "CooccurrenceCounts":
        """Add another count table into this one (ids must share a namespace)."""
        self.pair_count.update(other.pair_count)
        self.word_count.update(other.word_count)
        self.context_count.update(other.context_count)
        self.total_pairs += other.total_pairs
        return self


def accumulate(counts: CooccurrenceCounts, word: int, context: int, n: int = 1) -> CooccurrenceCounts:
    counts.pair_count[word, context] += n
    counts.word_count[word] += n
    counts.context_count[context] += n
    counts.total_pairs += n
    return counts


def probability(counts: CooccurrenceCounts, estimator: Estimator, w: int, c: int):
    """Return (P(w), P(c), P(w,c)).

    Under CONDITIONAL the joint term is count(w,c) / count(c), the word's share
    of the context; under JOINT it is count(w,c) / N.
    """
    if counts.total_pairs <= 0:
        raise UsageError("probabilities are undefined for an empty count table")
    n = counts.total_pairs
    wc = counts.word_count.get(w, 0)
    cc = counts.context_count.get(c, 0)
    pair = counts.pair_count.get((w, c), 0)
    if estimator is Estimator.JOINT:
        joint = pair / n
    else:
        joint = pair / cc if cc else 0.0
    return wc / n, cc / n, joint


def _log(x: float, base: LogBase) -> float:
    return math.log(x) / base.scale


def pmi(counts: CooccurrenceCounts, config: ApmiConfig, w: int, c: int) -> float:
    """log P(w,c) / (P(w) P(c)); -inf when the pair never co-occurs."""
    p_w, p_c, p_wc = probability(counts, config.estimator, w, c)
    if p_w <= 0 or p_c <= 0:
        raise UsageError(f"PMI needs positive marginals (P(w)={p_w}, P(c)={p_c})")
    if p_wc == 0:
        return -math.inf
    return _log(p_wc / (p_w * p_c), config.log_base)


def appmi(counts: CooccurrenceCounts, config: ApmiConfig, w: int, c: int, reverse: bool = False) -> float:
    """APPMI(w, c), or APPMI(c, w) with ``reverse=True``.

    max(0, PMI + log(P(w,c) / P(w)) + k); the reverse direction divides the
    joint by P(c) instead.
    """
    p_w, p_c, p_wc = probability(counts, config.estimator, w, c)
    if p_w <= 0 or p_c <= 0:
        raise UsageError(f"APPMI needs positive marginals (P(w)={p_w}, P(c)={p_c})")
    if p_wc == 0:
        return 0.0
    freq = _log(p_wc / (p_c if reverse else p_w), config.log_base)
    return max(0.0, pmi(counts, config, w, c) + freq + config.k)


def appmi_arrays(pair, word, ctx, total, config: ApmiConfig):
    """Vectorized APPMI for arrays of raw counts.

    Returns (forward, reverse) arrays: APPMI(w,c) and APPMI(c,w).
    """
    pair = np.asarray(pair, dtype=np.float64)
    word = np.asarray(word, dtype=np.float64)
    ctx = np.asarray(ctx, dtype=np.float64)
    total = float(total)
    p_w = word / total
    p_c = ctx / total
    if config.estimator is Estimator.JOINT:
        p_wc = pair / total
    else:
        p_wc = pair / ctx
    scale = config.log_base.scale
    with np.errstate(divide="ignore", invalid="ignore"):
        log_pmi = np.log(p_wc / (p_w * p_c)) / scale
        fwd = log_pmi + np.log(p_wc / p_w) / scale + config.k
        rev = log_pmi + np.log(p_wc / p_c) / scale + config.k
    fwd = np.where(pair > 0, np.maximum(fwd, 0.0), 0.0)
    rev = np.where(pair > 0, np.maximum(rev, 0.0), 0.0)
    return fwd, rev


# ---------------------------------------------------------------------------
# The index
# ---------------------------------------------------------------------------

def _csr(data, rows, cols, shape) -> sp.csr_matrix:
    keep = data > 0
    m = sp.csr_matrix(
        (data[keep], (np.asarray(rows)[keep], np.asarray(cols)[keep])),
        shape=shape, dtype=np.float64,
    )
    m.sum_duplicates()
    m.sort_indices()
    m.eliminate_zeros()
    return m


@dataclass
class ApmiIndex:
    vocabulary: Vocabulary
    contexts: ContextTable
    m_vc: sp.csr_matrix  # contexts x words, APPMI(w, c)
    m_cv: sp.csr_matrix  # words x contexts, APPMI(c, w)
    config: ApmiConfig = field(default_factory=ApmiConfig)
    counts: CooccurrenceCounts | None = None  # present only on freshly built indexes

    def __post_init__(self):
        nc, nw = len(self.contexts), len(self.vocabulary)
        if self.m_vc.shape != (nc, nw) or self.m_cv.shape != (nw, nc):
            raise UsageError(
                f"matrix shapes {self.m_vc.shape}/{self.m_cv.shape} do not match "
                f"{nw} words and {nc} contexts"
            )

    @property
    def n_words(self):
        return len(self.vocabulary)

    @property
    def n_contexts(self):
        return len(self.contexts)

    @property
    def nnz(self):
        return self.m_vc.nnz + self.m_cv.nnz

    def word_id(self, term: str) -> int:
        return self.vocabulary.id(term)

    @classmethod
    def from_dense(cls, words: Sequence[str], contexts: Sequence[ContextKey], m_vc, m_cv=None,
                   config: ApmiConfig | None = None) -> "ApmiIndex":
        """Build an index from explicit dense matrices (contexts x words for m_vc).

        With ``m_cv`` omitted the transpose of ``m_vc`` is used.
        """
        m_vc = np.asarray(m_vc, dtype=np.float64)
        m_cv = m_vc.T if m_cv is None else np.asarray(m_cv, dtype=np.float64)
        if (m_vc < 0).any() or (m_cv < 0).any():
            raise UsageError("APPMI matrices must be nonnegative")
        a = sp.csr_matrix(m_vc)
        b = sp.csr_matrix(m_cv)
        for m in (a, b):
            m.eliminate_zeros()
            m.sort_indices()
        return cls(Vocabulary(words), ContextTable(contexts), a, b, config or ApmiConfig())


def index_from_counts(counts: CooccurrenceCounts, vocabulary: Vocabulary, contexts: ContextTable,
                      config: ApmiConfig) -> ApmiIndex:
    """Compute both APPMI matrices for a filled count table."""
    nw, nc = len(vocabulary), len(contexts)
    if counts.pair_count:
        keys = np.array(list(counts.pair_count.keys()), dtype=np.int64)
        w, c = keys[:, 0], keys[:, 1]
        pair = np.fromiter(counts.pair_count.values(), dtype=np.float64, count=len(keys))
        word_totals = np.zeros(nw)
        for wid, n in counts.word_count.items():
            word_totals[wid] = n
        ctx_totals = np.zeros(nc)
        for cid, n in counts.context_count.items():
            ctx_totals[cid] = n
        fwd, rev = appmi_arrays(pair, word_totals[w], ctx_totals[c], counts.total_pairs, config)
    else:
        w = c = np.zeros(0, dtype=np.int64)
        fwd = rev = np.zeros(0)
    m_vc = _csr(fwd, c, w, (nc, nw))
    m_cv = _csr(rev, w, c, (nw, nc))
    return ApmiIndex(vocabulary, contexts, m_vc, m_cv, config, counts)


def _count_terms(sentences, vocabulary, scheme, window):
    """Count (term, context key) events for one block of sentences, in first-seen order."""
    events: Counter = Counter()
    for sent in sentences:
        sent = merge_multiword(sent, vocabulary)
        for i, tok in enumerate(sent.tokens):
            if tok.surface not in vocabulary:
                continue
            key = extract(sent, i, scheme, window)
            if key is not None:
                events[tok.surface, key] += 1
    return events


def _count_block(args):
    return _count_terms(*args)


def count_cooccurrences(sentences: Iterable[Sentence], vocabulary: Vocabulary,
                        scheme: Scheme = Scheme.DEP, window: int = 1, workers: int = 1):
    """Count co-occurrences of vocabulary words with their contexts.

    Returns (counts, context table). Context ids follow first occurrence in the
    corpus regardless of `workers`, so output is deterministic.
    """
    sentences = list(sentences)
    if workers > 1 and len(sentences) >= 2 * workers:
        size = math.ceil(len(sentences) / workers)
        blocks = [sentences[i:i + size] for i in range(0, len(sentences), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_count_block, [(b, vocabulary, scheme, window) for b in blocks]))
    else:
        partials = [_count_terms(sentences, vocabulary, scheme, window)]

    table = ContextTable()
    counts = CooccurrenceCounts()
    for events in partials:
        for (term, key), n in events.items():
            accumulate(counts, vocabulary.id(term), table.intern(key), n)
    return counts, table


def build_index(sentences: Iterable[Sentence], vocabulary: Vocabulary | Iterable[str],
                scheme: Scheme = Scheme.DEP, config: ApmiConfig | None = None,
                window: int = 1, workers: int = 1) -> ApmiIndex:
    """Count contexts for every vocabulary occurrence and build both APPMI matrices."""
    if not isinstance(vocabulary, Vocabulary):
        vocabulary = Vocabulary(vocabulary)
    if len(vocabulary) == 0:
        raise UsageError("empty vocabulary")
    config = config or ApmiConfig()
    counts, table = count_cooccurrences(sentences, vocabulary, scheme, window, workers)
    return index_from_counts(counts, vocabulary, table, config)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

MAGIC = b"CBIX"
FORMAT_VERSION = 1


def _write_strings(out, strings):
    out.write(struct.pack("<I", len(strings)))
    for s in strings:
        b = s.encode("utf-8")
        out.write(struct.pack("<I", len(b)))
        out.write(b)


def _write_csr(out, m: sp.csr_matrix):
    rows, cols = m.shape
    out.write(struct.pack("<IIQ", rows, cols, m.nnz))
    out.write(np.asarray(m.indptr, dtype="<u8").tobytes())
    out.write(np.asarray(m.indices, dtype="<u4").tobytes())
    out.write(np.asarray(m.data, dtype="<f8").tobytes())


def dumps_index(index: ApmiIndex) -> bytes:
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(struct.pack("<I", FORMAT_VERSION))
    cfg = index.config
    out.write(struct.pack("<dBB", cfg.k, int(cfg.estimator), int(cfg.log_base)))
    _write_strings(out, index.vocabulary.terms)
    _write_strings(out, [k.serialize() for k in index.contexts.keys])
    _write_csr(out, index.m_vc)
    _write_csr(out, index.m_cv)
    return out.getvalue()


def save_index(index: ApmiIndex, sink) -> None:
    """Write an index to a path or a binary file object."""
    data = dumps_index(index)
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "wb") as f:
            f.write(data)
    else:
        sink.write(data)


class _Reader:
    def __init__(self, data: bytes):
        self.data = memoryview(data)
        self.pos = 0

    def take(self, n: int, what: str) -> memoryview:
        if self.pos + n > len(self.data):
            raise IndexFormatError(f"truncated index file while reading {what}")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str, what: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))

    def strings(self, what: str) -> list[str]:
        (n,) = self.unpack("<I", what)
        out = []
        for _ in range(n):
            (length,) = self.unpack("<I", what)
            try:
                out.append(bytes(self.take(length, what)).decode("utf-8"))
            except UnicodeDecodeError:
                raise IndexFormatError(f"invalid UTF-8 in {what}") from None
        return out

    def array(self, dtype: str, n: int, what: str):
        size = np.dtype(dtype).itemsize
        return np.frombuffer(self.take(n * size, what), dtype=dtype).copy()

    def csr(self, what: str) -> sp.csr_matrix:
        rows, cols, nnz = self.unpack("<IIQ", what)
        indptr = self.array("<u8", rows + 1, what)
        indices = self.array("<u4", nnz, what)
        data = self.array("<f8", nnz, what)
        if indptr[0] != 0 or indptr[-1] != nnz or (np.diff(indptr.astype(np.int64)) < 0).any():
            raise IndexFormatError(f"corrupt row pointers in {what}")
        if nnz and indices.max() >= cols:
            raise IndexFormatError(f"column index out of range in {what}")
        return sp.csr_matrix((data.astype(np.float64), indices.astype(np.int32), indptr.astype(np.int64)),
                             shape=(rows, cols))


def loads_index(data: bytes) -> ApmiIndex:
    r = _Reader(data)
    if bytes(r.take(4, "magic")) != MAGIC:
        raise IndexFormatError("bad magic: not an index file")
    (version,) = r.unpack("<I", "version")
    if version != FORMAT_VERSION:
        raise IndexFormatError(f"unsupported index format version {version} (expected {FORMAT_VERSION})")
    k, est, base = r.unpack("<dBB", "config")
    try:
        config = ApmiConfig(k, Estimator(est), LogBase(base))
    except (ValueError, UsageError) as exc:
        raise IndexFormatError(f"bad config block: {exc}") from None
    terms = r.strings("vocabulary")
    try:
        keys = [ContextKey.deserialize(s) for s in r.strings("contexts")]
    except UsageError as exc:
        raise IndexFormatError(str(exc)) from None
    m_vc = r.csr("context-word matrix")
    m_cv = r.csr("word-context matrix")
    if r.pos != len(r.data):
        raise IndexFormatError(f"{len(r.data) - r.pos} trailing bytes after index payload")
    vocab = Vocabulary()
    for t in terms:
        vocab.add(t)
    if vocab.terms != terms:
        raise IndexFormatError("vocabulary table contains duplicate or non-normalized terms")
    try:
        return ApmiIndex(vocab, ContextTable(keys), m_vc, m_cv, config)
    except UsageError as exc:
        raise IndexFormatError(str(exc)) from None


def load_index(source) -> ApmiIndex:
    """Read an index from a path or a binary file object."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as f:
            data = f.read()
    else:
        data = source.read()
    return loads_index(data)
