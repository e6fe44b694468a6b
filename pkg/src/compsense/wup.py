"""Wu-Palmer similarity over a hypernym taxonomy, and the baseline built on it."""

from __future__ import annotations

import io
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .errors import ParseError, PreconditionError, StructuralError, UsageError


@dataclass
class Taxonomy:
    nodes: set[str] = field(default_factory=set)
    parents: dict[str, set[str]] = field(default_factory=dict)
    lexicon: dict[str, set[str]] = field(default_factory=dict)

    def add_edge(self, child: str, parent: str):
        self.__dict__.pop("_depths", None)
        self.nodes.update((child, parent))
        self.parents.setdefault(child, set()).add(parent)
        self.parents.setdefault(parent, set())

    def add_node(self, node: str):
        self.__dict__.pop("_depths", None)
        self.nodes.add(node)
        self.parents.setdefault(node, set())

    def add_sense(self, term: str, sense: str):
        self.add_node(sense)
        self.lexicon.setdefault(term.lower(), set()).add(sense)

    def _check(self, node):
        if node not in self.nodes:
            raise UsageError(f"unknown taxonomy node: {node!r}")

    def validate(self):
        """Raise StructuralError if the parent graph has a cycle."""
        state = {}
        for start in self.nodes:
            if start in state:
                continue
            stack = [(start, iter(self.parents.get(start, ())))]
            state[start] = 1
            while stack:
                node, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    state[node] = 2
                    stack.pop()
                elif state.get(nxt) == 1:
                    raise StructuralError(f"cycle in taxonomy through {nxt!r}")
                elif nxt not in state:
                    state[nxt] = 1
                    stack.append((nxt, iter(self.parents.get(nxt, ()))))

    @cached_property
    def _depths(self) -> dict[str, int]:
        # multi-source BFS downward from every root gives shortest root distance
        children: dict[str, list[str]] = {n: [] for n in self.nodes}
        for child, ps in self.parents.items():
            for p in ps:
                children[p].append(child)
        depth = {n: 1 for n in self.nodes if not self.parents.get(n)}
        queue = deque(depth)
        while queue:
            n = queue.popleft()
            for ch in children[n]:
                if ch not in depth:
                    depth[ch] = depth[n] + 1
                    queue.append(ch)
        return depth

    def ancestors(self, node: str) -> set[str]:
        """All nodes reachable through parent links, including `node`."""
        self._check(node)
        seen = {node}
        stack = [node]
        while stack:
            for p in self.parents.get(stack.pop(), ()):
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return seen

    def senses(self, term: str) -> set[str]:
        try:
            return self.lexicon[term.lower()]
        except KeyError:
            raise PreconditionError(f"term not in taxonomy lexicon: {term!r}") from None


def depth(taxonomy: Taxonomy, node: str) -> int:
    """1 + shortest number of parent links from `node` to a root."""
    taxonomy._check(node)
    return taxonomy._depths[node]


def lowest_common_subsumer(taxonomy: Taxonomy, a: str, b: str) -> str | None:
    common = taxonomy.ancestors(a) & taxonomy.ancestors(b)
    if not common:
        return None
    # deepest; node name breaks ties so the result is reproducible
    return max(common, key=lambda n: (depth(taxonomy, n), n))


def wup_similarity(taxonomy: Taxonomy, a: str, b: str) -> float:
    """2 * depth(lcs) / (depth(a) + depth(b)), capped at 1.

    With multiple inheritance the deepest common ancestor can lie deeper than
    the shortest root path of `a` or `b`; the cap keeps the value a similarity.
    """
    lcs = lowest_common_subsumer(taxonomy, a, b)
    if lcs is None:
        return 0.0
    return min(1.0, 2 * depth(taxonomy, lcs) / (depth(taxonomy, a) + depth(taxonomy, b)))


def word_similarity(taxonomy: Taxonomy, t1: str, t2: str) -> float:
    """Maximum sense-pair Wu-Palmer similarity between two terms."""
    return max(wup_similarity(taxonomy, x, y)
               for x in sorted(taxonomy.senses(t1)) for y in sorted(taxonomy.senses(t2)))


def baseline_disambiguate(taxonomy: Taxonomy, compound: str, synonyms: Iterable[str]) -> tuple[str, float]:
    """Pick the synonym most Wu-Palmer-similar to the compound; ties go to the first term."""
    synonyms = sorted(set(s.lower() for s in synonyms))
    if len(synonyms) < 2:
        raise PreconditionError(f"need at least 2 synonyms, got {len(synonyms)}")
    taxonomy.senses(compound)
    for s in synonyms:
        taxonomy.senses(s)
    scored = [(s, word_similarity(taxonomy, compound, s)) for s in synonyms]
    return min(scored, key=lambda x: (-x[1], x[0]))


def load_taxonomy(stream) -> Taxonomy:
    """Read ``N<TAB>child<TAB>parent`` and ``L<TAB>term<TAB>sense`` lines."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    tax = Taxonomy()
    for lineno, line in enumerate(stream, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 3 or cols[0] not in ("N", "L") or not cols[1] or not cols[2]:
            raise ParseError("expected 'N<TAB>child<TAB>parent' or 'L<TAB>term<TAB>sense'", lineno)
        if cols[0] == "N":
            tax.add_edge(cols[1], cols[2])
        else:
            tax.add_sense(cols[1], cols[2])
    tax.validate()
    return tax
