"""Accuracy, rho sweeps and annotator agreement over annotated test items."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from .disambiguation import DisambiguationQuery, rank_synonyms
from .errors import ParseError, PreconditionError, UsageError
from .index import ApmiIndex
from .wup import Taxonomy, baseline_disambiguate

DEFAULT_RHOS = (1.0, 1.5, 2.5, 3.0, 3.5, 4.0, 5.0)


@dataclass(frozen=True)
class TestItem:
    __test__ = False  # not a pytest class

    compound: str
    constituent: str
    synonyms: tuple[str, ...]
    applicable: frozenset[str]

    def validate(self):
        if len(set(self.synonyms)) < 2:
            raise UsageError("item must list at least 2 distinct synonyms")
        if not self.applicable:
            raise UsageError("item must mark at least one applicable synonym")
        extra = self.applicable - set(self.synonyms)
        if extra:
            raise UsageError(f"applicable synonyms not among synonyms: {sorted(extra)}")

    @property
    def label(self):
        return f"{self.compound}/{self.constituent}"


def load_test_items(stream) -> list[TestItem]:
    """Read JSON-lines test items (compound, constituent, synonyms, applicable)."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    items = []
    for lineno, line in enumerate(stream, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            item = TestItem(
                compound=rec["compound"].lower(),
                constituent=rec["constituent"].lower(),
                synonyms=tuple(s.lower() for s in rec["synonyms"]),
                applicable=frozenset(s.lower() for s in rec["applicable"]),
            )
        except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as exc:
            raise ParseError(f"bad test item record: {exc}", lineno) from None
        try:
            item.validate()
        except UsageError as exc:
            raise ParseError(f"item {item.label}: {exc}", lineno) from None
        items.append(item)
    return items


def dump_test_items(items: Iterable[TestItem]) -> str:
    return "".join(
        json.dumps({"compound": it.compound, "constituent": it.constituent,
                    "synonyms": list(it.synonyms), "applicable": sorted(it.applicable)}) + "\n"
        for it in items
    )


# ---------------------------------------------------------------------------
# Fleiss' kappa
# ---------------------------------------------------------------------------

def fleiss_kappa(subjects: Sequence[Sequence[int]], raters: int) -> float:
    """Fleiss' kappa for rows of per-category rating counts.

    Every row must sum to `raters`. When all ratings fall into one category the
    chance agreement is 1; kappa is then 1 for perfect agreement and undefined
    otherwise.
    """
    if raters < 2:
        raise UsageError("Fleiss' kappa needs at least 2 raters per subject")
    if len(subjects) == 0:
        raise UsageError("Fleiss' kappa needs at least one subject")
    ncat = len(subjects[0])
    totals = [0] * ncat
    agree = 0.0
    for i, row in enumerate(subjects):
        if len(row) != ncat:
            raise UsageError(f"subject {i} has {len(row)} categories, expected {ncat}")
        if sum(row) != raters or any(x < 0 for x in row):
            raise UsageError(f"subject {i} ratings {list(row)} do not sum to {raters}")
        agree += (sum(x * x for x in row) - raters) / (raters * (raters - 1))
        for j, x in enumerate(row):
            totals[j] += x
    n_sub = len(subjects)
    p_bar = agree / n_sub
    p_e = sum((t / (n_sub * raters)) ** 2 for t in totals)
    if p_e == 1.0:
        if p_bar == 1.0:
            return 1.0
        raise UsageError("degenerate marginals")
    return (p_bar - p_e) / (1.0 - p_e)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class ItemRecord:
    compound: str
    constituent: str
    chosen: str
    score: float
    correct: bool
    no_signal: bool = False


@dataclass
class SkippedItem:
    compound: str
    constituent: str
    reason: str


@dataclass
class EvaluationReport:
    method: str
    records: list[ItemRecord] = field(default_factory=list)
    skipped: list[SkippedItem] = field(default_factory=list)
    accuracy: float = 0.0
    kappa: float | None = None
    rho: float | None = None
    include_constituent: bool = True

    @property
    def evaluated(self):
        return len(self.records)

    @property
    def correct(self):
        return sum(r.correct for r in self.records)

    @property
    def no_signal(self):
        return sum(r.no_signal for r in self.records)

    def to_dict(self):
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d) -> "EvaluationReport":
        d = dict(d)
        d["records"] = [ItemRecord(**r) for r in d.get("records", [])]
        d["skipped"] = [SkippedItem(**s) for s in d.get("skipped", [])]
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "EvaluationReport":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        rows = [("compound", "constituent", "chosen", "score", "correct", "no-signal")]
        for r in self.records:
            rows.append((r.compound, r.constituent, r.chosen, f"{r.score:.4f}",
                         "yes" if r.correct else "no", "yes" if r.no_signal else ""))
        widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
        for s in self.skipped:
            lines.append(f"skipped {s.compound}/{s.constituent}: {s.reason}")
        kappa = "n/a" if self.kappa is None else f"{self.kappa:.4f}"
        lines.append(
            f"method={self.method} evaluated={self.evaluated} skipped={len(self.skipped)} "
            f"correct={self.correct} no_signal={self.no_signal} "
            f"accuracy={self.accuracy:.4f} kappa={kappa}"
        )
        return "\n".join(lines) + "\n"


def agreement_subjects(items: Sequence[TestItem], chosen: Sequence[str]) -> list[list[int]]:
    """One subject per (item, synonym): counts of [positive, negative] votes.

    The annotator votes positive for applicable synonyms, the algorithm for the
    synonym it chose.
    """
    rows = []
    for item, pick in zip(items, chosen):
        for syn in dict.fromkeys(item.synonyms):
            pos = (syn in item.applicable) + (syn == pick)
            rows.append([pos, 2 - pos])
    return rows


def _finish(report: EvaluationReport, evaluated_items, chosen) -> EvaluationReport:
    if report.records:
        report.accuracy = report.correct / len(report.records)
        try:
            report.kappa = fleiss_kappa(agreement_subjects(evaluated_items, chosen), 2)
        except UsageError:
            report.kappa = None
    return report


def _map(fn, items, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(it) for it in items]


def evaluate(index: ApmiIndex, items: Sequence[TestItem], rho: float = 1.5,
             include_constituent: bool = True, threads: int = 1) -> EvaluationReport:
    """Disambiguate each item with its own synonym list and score the top choice.

    Items with terms missing from the index are skipped and listed.
    """
    def run(item):
        query = DisambiguationQuery(item.compound, item.constituent, include_constituent)
        try:
            return rank_synonyms(index, query, item.synonyms, rho)
        except PreconditionError as exc:
            return exc

    report = EvaluationReport("category-builder", rho=rho, include_constituent=include_constituent)
    done, chosen = [], []
    for item, ans in zip(items, _map(run, items, threads)):
        if isinstance(ans, Exception):
            report.skipped.append(SkippedItem(item.compound, item.constituent, str(ans)))
            continue
        report.records.append(ItemRecord(item.compound, item.constituent, ans.chosen, ans.score,
                                         ans.chosen in item.applicable, ans.no_signal))
        done.append(item)
        chosen.append(ans.chosen)
    return _finish(report, done, chosen)


def rho_sweep(index: ApmiIndex, items: Sequence[TestItem], rhos: Iterable[float] = DEFAULT_RHOS,
              include_constituent: bool = True, threads: int = 1) -> list[tuple[float, float]]:
    return [(float(r), evaluate(index, items, r, include_constituent, threads).accuracy) for r in rhos]


def sweep_csv(rows: Iterable[tuple[float, float]]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["rho", "accuracy"])
    for rho, acc in rows:
        w.writerow([repr(rho), repr(acc)])
    return out.getvalue()


def evaluate_baseline(taxonomy: Taxonomy, items: Sequence[TestItem]) -> EvaluationReport:
    report = EvaluationReport("wu-palmer")
    done, chosen = [], []
    for item in items:
        try:
            pick, score = baseline_disambiguate(taxonomy, item.compound, item.synonyms)
        except PreconditionError as exc:
            report.skipped.append(SkippedItem(item.compound, item.constituent, str(exc)))
            continue
        report.records.append(ItemRecord(item.compound, item.constituent, pick, score,
                                         pick in item.applicable))
        done.append(item)
        chosen.append(pick)
    return _finish(report, done, chosen)
