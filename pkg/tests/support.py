"""Fixtures data and independent oracles shared by the test modules.

The oracles here deliberately avoid the package's own numeric code paths:
APPMI is recomputed with `math` from raw counts, expansion with dense numpy
products, Wu-Palmer from memoized recursive definitions.
"""

import math
import random

import numpy as np

from compsense import (ApmiConfig, ApmiIndex, ContextKey, ContextTable, CooccurrenceCounts,
                       Estimator, LogBase, Scheme, Taxonomy, Vocabulary, accumulate,
                       index_from_counts)

CORPUS_C = [
    "She put all her money in the safe.",
    "She hid her money in her sock.",
    "She should spend money on her loan in lieu of snacks.",
    "She put all her money in her bank in Dallas.",
    "The bank was closed.",
    "The bank was open.",
    "The loan was enough to pay off the house.",
    "The money was gone.",
]
CORPUS_C_TEXT = "\n".join(CORPUS_C) + "\n"
V_C = ["money", "bank", "loan"]

TOY_WORDS = ["running", "swim", "hard", "painting", "tree", "smiling"]
TOY_CONTEXTS = ["noun", "adjective", "verb", "adverb"]
TOY_MATRIX = [
    [2, 3, 0, 3, 4.5, 0],
    [2, 0, 3, 0, 0, 5],
    [2, 3, 0, 3, 0, 4],
    [0, 0, 3, 0, 0, 0],
]
TOY_E_RHO1 = {"swim": 30.0, "painting": 30.0, "smiling": 25.0, "tree": 22.5, "running": 22.0, "hard": 3.0}
TOY_E_RHO3 = {"swim": 30.0, "painting": 30.0, "tree": 22.5, "smiling": 21.25, "running": 20.5, "hard": 0.75}

NORBURY_CONLLU = """\
# text = Norbury is a civil parish in Cheshire East, England
1\tNorbury\tNorbury\tPROPN\t_\t_\t2\tnsubj\t_\t_
2\tis\tbe\tAUX\t_\t_\t0\tROOT\t_\t_
3\ta\ta\tDET\t_\t_\t5\tdet\t_\t_
4\tcivil\tcivil\tADJ\t_\t_\t5\tamod\t_\t_
5\tparish\tparish\tNOUN\t_\t_\t2\tattr\t_\t_
6\tin\tin\tADP\t_\t_\t5\tprep\t_\t_
7\tCheshire\tCheshire\tPROPN\t_\t_\t8\tcompound\t_\t_
8\tEast\tEast\tPROPN\t_\t_\t6\tpobj\t_\t_
9\t,\t,\tPUNCT\t_\t_\t8\tpunct\t_\t_
10\tEngland\tEngland\tPROPN\t_\t_\t8\tappos\t_\t_

"""


def toy_key(name):
    return ContextKey(Scheme.DEP, ("pos", name, "TOY"))


def toy_index():
    return ApmiIndex.from_dense(TOY_WORDS, [toy_key(c) for c in TOY_CONTEXTS], TOY_MATRIX)


# ---------------------------------------------------------------------------
# APPMI oracle
# ---------------------------------------------------------------------------

def oracle_appmi(pair, word, ctx, total, k=5.0, conditional=True, base=math.e, reverse=False):
    """APPMI straight from the formula, in plain floating point."""
    if pair == 0:
        return 0.0
    p_w = word / total
    p_c = ctx / total
    p_wc = pair / ctx if conditional else pair / total
    log = lambda x: math.log(x) / math.log(base)  # noqa: E731
    pmi = log(p_wc / (p_w * p_c))
    freq = log(p_wc / (p_c if reverse else p_w))
    return max(0.0, pmi + freq + k)


def random_counts(rng, max_words=50, max_contexts=200, density=0.1, max_count=20):
    nw = rng.randint(1, max_words)
    nc = rng.randint(1, max_contexts)
    counts = CooccurrenceCounts()
    for w in range(nw):
        for c in range(nc):
            if rng.random() < density:
                accumulate(counts, w, c, rng.randint(1, max_count))
    if counts.total_pairs == 0:
        accumulate(counts, 0, 0, 1)
    return counts, nw, nc


def random_index(rng, config=None, **kw):
    counts, nw, nc = random_counts(rng, **kw)
    vocab = Vocabulary(f"w{i}" for i in range(nw))
    table = ContextTable(ContextKey(Scheme.DEP, ("rel", f"h{i}", "X")) for i in range(nc))
    if config is None:
        config = ApmiConfig(
            k=rng.choice([0.0, 1.0, 5.0]),
            estimator=rng.choice(list(Estimator)),
            log_base=rng.choice(list(LogBase)),
        )
    return index_from_counts(counts, vocab, table, config)


# ---------------------------------------------------------------------------
# Expansion oracle
# ---------------------------------------------------------------------------

def dense_expand(m_vc, m_cv, seed, rho):
    """E = M_cv . diag(f**rho) . M_vc . S with dense matrices."""
    m_vc = np.asarray(m_vc, dtype=float)
    m_cv = np.asarray(m_cv, dtype=float)
    s = np.zeros(m_vc.shape[1])
    s[list(seed)] = 1.0
    f = (m_vc > 0).astype(float) @ s / s.sum()
    return m_cv @ np.diag(f ** rho) @ (m_vc @ s)


# ---------------------------------------------------------------------------
# Wu-Palmer oracle
# ---------------------------------------------------------------------------

def random_taxonomy(rng, max_nodes=30, n_terms=6):
    n = rng.randint(2, max_nodes)
    tax = Taxonomy()
    for i in range(n):
        tax.add_node(f"n{i}")
        if i and rng.random() < 0.85:
            for p in rng.sample(range(i), min(i, rng.choice([1, 1, 2, 3]))):
                tax.add_edge(f"n{i}", f"n{p}")
    for t in range(n_terms):
        for s in rng.sample(range(n), rng.randint(1, min(3, n))):
            tax.add_sense(f"t{t}", f"n{s}")
    return tax


def oracle_wup(tax, a, b):
    """Recursive definitions: depth(n) = 1 + min parent depth; ancestors by union."""
    depth_memo, anc_memo = {}, {}

    def depth(n):
        if n not in depth_memo:
            ps = tax.parents.get(n, ())
            depth_memo[n] = 1 + min((depth(p) for p in ps), default=0)
        return depth_memo[n]

    def ancestors(n):
        if n not in anc_memo:
            out = {n}
            for p in tax.parents.get(n, ()):
                out |= ancestors(p)
            anc_memo[n] = out
        return anc_memo[n]

    common = ancestors(a) & ancestors(b)
    if not common:
        return 0.0
    lcs_depth = max(depth(x) for x in common)
    return min(1.0, 2 * lcs_depth / (depth(a) + depth(b)))


def oracle_baseline(tax, compound, synonyms):
    best = None
    for syn in sorted(set(synonyms)):
        score = max(oracle_wup(tax, x, y) for x in tax.lexicon[compound] for y in tax.lexicon[syn])
        if best is None or score > best[1]:
            best = (syn, score)
    return best


# ---------------------------------------------------------------------------
# Synthetic dependency corpora
# ---------------------------------------------------------------------------

def dep_sentence(word, deprel, head, upos="NOUN", head_upos="VERB"):
    """A two-token CoNLL-U sentence: `word` attached to the root `head`."""
    return (f"1\t{word}\t_\t{upos}\t_\t_\t2\t{deprel}\t_\t_\n"
            f"2\t{head}\t_\t{head_upos}\t_\t_\t0\troot\t_\t_\n\n")


def conllu_from(spec):
    """spec: iterable of (word, deprel, head, repeat)."""
    return "".join(dep_sentence(w, rel, h) * n for w, rel, h, n in spec)


BIRD_CONTEXTS = [("nsubj", "pecked"), ("dobj", "sharpened"), ("nsubj", "curved"), ("poss", "feathers")]
MONEY_CONTEXTS = [("dobj", "paid"), ("nsubj", "bounced"), ("dobj", "printed"), ("dobj", "counted")]

HORNBILL_VOCAB = ["hornbill", "bill", "beak", "banknote"]
HORNBILL_LEXICON = "bill\tbeak\tbanknote\n"


def hornbill_corpus():
    """hornbill, bill and beak share bird contexts; bill and banknote share money contexts."""
    spec = []
    for rel, head in BIRD_CONTEXTS:
        spec += [("hornbill", rel, head, 3), ("bill", rel, head, 2), ("beak", rel, head, 3)]
    for rel, head in MONEY_CONTEXTS:
        spec += [("bill", rel, head, 2), ("banknote", rel, head, 3)]
    return conllu_from(spec)


def ablation_corpus():
    """The beak signal lives on the constituent only.

    bill shares all bird contexts with beak; hornbill appears only in one
    context that it shares with banknote.
    """
    spec = [("hornbill", "dobj", "printed", 2), ("banknote", "dobj", "printed", 3),
            ("banknote", "dobj", "paid", 3)]
    for rel, head in BIRD_CONTEXTS:
        spec += [("bill", rel, head, 3), ("beak", rel, head, 3)]
    return conllu_from(spec)


def rng_for(seed):
    return random.Random(seed)
