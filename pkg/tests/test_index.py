import io
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compsense import (ApmiConfig, ContextKey, CooccurrenceCounts, Estimator, IndexFormatError,
                       LogBase, Scheme, UsageError, accumulate, appmi, build_index,
                       index_from_counts, load_index, pmi, probability, save_index,
                       tokenize_plain)
from compsense.index import FORMAT_VERSION, dumps_index, loads_index

from support import CORPUS_C_TEXT, V_C, oracle_appmi, random_counts, random_index

HER_IN = ContextKey(Scheme.NGRAM, ("her", "in"))


@pytest.fixture
def corpus_c_index():
    return build_index(tokenize_plain(CORPUS_C_TEXT), V_C, Scheme.NGRAM, ApmiConfig(k=5))


def _ids(index, word, key=HER_IN):
    return index.vocabulary.id(word), index.contexts.id(key)


class TestCounts:
    def test_single_event(self):
        c = accumulate(CooccurrenceCounts(), 0, 0)
        assert c.total_pairs == 1
        assert c.pair_count[0, 0] == c.word_count[0] == c.context_count[0] == 1

    def test_corpus_c(self, corpus_c_index):
        counts = corpus_c_index.counts
        money, her_in = _ids(corpus_c_index, "money")
        assert counts.word_count[money] == 5
        assert counts.total_pairs == 10
        assert counts.pair_count[money, her_in] == 3
        assert counts.context_count[her_in] == 5

    def test_corpus_c_word_counts(self, corpus_c_index):
        counts, vocab = corpus_c_index.counts, corpus_c_index.vocabulary
        assert {t: counts.word_count[vocab.id(t)] for t in V_C} == {"money": 5, "bank": 3, "loan": 2}

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 7)), max_size=60), st.integers(0, 60))
    def test_merge_equals_sequential(self, events, cut):
        seq = CooccurrenceCounts()
        left, right = CooccurrenceCounts(), CooccurrenceCounts()
        for i, (w, c) in enumerate(events):
            accumulate(seq, w, c)
            accumulate(left if i < cut else right, w, c)
        merged = left.merge(right)
        assert merged == seq
        assert sum(seq.pair_count.values()) == seq.total_pairs
        for w, n in seq.word_count.items():
            assert n == sum(v for (ww, _), v in seq.pair_count.items() if ww == w)
        for c, n in seq.context_count.items():
            assert n == sum(v for (_, cc), v in seq.pair_count.items() if cc == c)


class TestProbability:
    def test_conditional(self, corpus_c_index):
        w, c = _ids(corpus_c_index, "money")
        p = probability(corpus_c_index.counts, Estimator.CONDITIONAL, w, c)
        assert p == pytest.approx((0.5, 0.5, 0.6), abs=1e-15)

    def test_joint(self, corpus_c_index):
        w, c = _ids(corpus_c_index, "money")
        p = probability(corpus_c_index.counts, Estimator.JOINT, w, c)
        assert p == pytest.approx((0.5, 0.5, 0.3), abs=1e-15)

    def test_zero_pair(self, corpus_c_index):
        w, c = _ids(corpus_c_index, "bank", ContextKey(Scheme.NGRAM, ("spend", "on")))
        for est in Estimator:
            assert probability(corpus_c_index.counts, est, w, c)[2] == 0

    def test_empty_counts(self):
        with pytest.raises(UsageError):
            probability(CooccurrenceCounts(), Estimator.JOINT, 0, 0)


class TestPmi:
    def test_independent_pair_is_zero(self):
        counts = CooccurrenceCounts()
        for w in (0, 1):
            for c in (0, 1):
                accumulate(counts, w, c)
        assert pmi(counts, ApmiConfig(estimator=Estimator.JOINT), 0, 0) == pytest.approx(0.0, abs=1e-15)

    def test_corpus_c_conditional(self, corpus_c_index):
        w, c = _ids(corpus_c_index, "money")
        assert pmi(corpus_c_index.counts, ApmiConfig(), w, c) == pytest.approx(0.8754687373538999, abs=1e-12)

    def test_corpus_c_joint(self, corpus_c_index):
        w, c = _ids(corpus_c_index, "money")
        cfg = ApmiConfig(estimator=Estimator.JOINT)
        assert pmi(corpus_c_index.counts, cfg, w, c) == pytest.approx(0.1823215567939546, abs=1e-12)

    def test_zero_joint_is_minus_infinity(self, corpus_c_index):
        w, c = _ids(corpus_c_index, "bank", ContextKey(Scheme.NGRAM, ("spend", "on")))
        assert pmi(corpus_c_index.counts, ApmiConfig(), w, c) == -math.inf

    def test_zero_marginal(self, corpus_c_index):
        with pytest.raises(UsageError):
            pmi(corpus_c_index.counts, ApmiConfig(), 99, 0)

    @pytest.mark.parametrize("base, scale", [(LogBase.BASE2, math.log(2)), (LogBase.BASE10, math.log(10))])
    def test_log_bases(self, corpus_c_index, base, scale):
        w, c = _ids(corpus_c_index, "money")
        got = pmi(corpus_c_index.counts, ApmiConfig(log_base=base), w, c)
        assert got == pytest.approx(0.8754687373538999 / scale, abs=1e-12)


class TestAppmi:
    def test_zero_pair(self, corpus_c_index):
        w, c = _ids(corpus_c_index, "bank", ContextKey(Scheme.NGRAM, ("spend", "on")))
        assert appmi(corpus_c_index.counts, ApmiConfig(), w, c) == 0.0

    def test_money_her_in(self, corpus_c_index):
        # ln(0.6/0.25) + ln(0.6/0.5) + 5
        w, c = _ids(corpus_c_index, "money")
        assert appmi(corpus_c_index.counts, ApmiConfig(k=5), w, c) == pytest.approx(6.057790294147854, abs=1e-12)

    def test_clip(self):
        counts = CooccurrenceCounts()
        accumulate(counts, 0, 0, 1)
        accumulate(counts, 0, 1, 50)
        accumulate(counts, 1, 0, 50)
        cfg = ApmiConfig(k=0, estimator=Estimator.JOINT)
        assert pmi(counts, cfg, 0, 0) < 0
        assert appmi(counts, cfg, 0, 0) == 0.0

    def test_reverse_divides_by_context_probability(self, corpus_c_index):
        w, c = _ids(corpus_c_index, "loan", ContextKey(Scheme.NGRAM, ("the", "was")))
        counts = corpus_c_index.counts
        p_w, p_c, p_wc = probability(counts, Estimator.CONDITIONAL, w, c)
        expected = math.log(p_wc / (p_w * p_c)) + math.log(p_wc / p_c) + 5
        assert appmi(counts, ApmiConfig(), w, c, reverse=True) == pytest.approx(expected, abs=1e-12)

    def test_negative_k_rejected(self):
        with pytest.raises(UsageError):
            ApmiConfig(k=-1)


class TestBuild:
    def test_corpus_c_structure(self, corpus_c_index):
        idx = corpus_c_index
        assert idx.vocabulary.terms == V_C
        assert [str(k) for k in idx.contexts] == ["her ... in", "spend ... on", "the ... was"]
        assert idx.m_vc.shape == (3, 3) and idx.m_cv.shape == (3, 3)

    def test_corpus_c_values_match_oracle(self, corpus_c_index):
        idx, counts = corpus_c_index, corpus_c_index.counts
        vc, cv = idx.m_vc.toarray(), idx.m_cv.toarray()
        for w in range(3):
            for c in range(3):
                args = (counts.pair_count[w, c], counts.word_count[w], counts.context_count[c], counts.total_pairs)
                assert vc[c, w] == oracle_appmi(*args)
                assert cv[w, c] == oracle_appmi(*args, reverse=True)

    def test_single_sentence(self):
        idx = build_index(tokenize_plain("the bank was open"), ["bank"], Scheme.NGRAM)
        assert idx.m_vc.nnz >= 1

    def test_empty_vocabulary(self):
        with pytest.raises(UsageError, match="empty vocabulary"):
            build_index(tokenize_plain("a b"), [], Scheme.NGRAM)

    def test_only_positive_values_stored(self):
        rng = random.Random(3)
        for _ in range(20):
            idx = random_index(rng, ApmiConfig(k=0.0))
            assert (idx.m_vc.data > 0).all() and (idx.m_cv.data > 0).all()

    def test_random_corpus_matches_oracle(self):
        rng = random.Random(11)
        words = [f"v{i}" for i in range(8)]
        filler = ["the", "a", "of", "in", "x", "y"]
        text = ". ".join(" ".join(rng.choice(words + filler) for _ in range(rng.randint(2, 10)))
                         for _ in range(50)) + "."
        for cfg in (ApmiConfig(), ApmiConfig(k=0, estimator=Estimator.JOINT, log_base=LogBase.BASE2)):
            idx = build_index(tokenize_plain(text), words, Scheme.NGRAM, cfg)
            counts = idx.counts
            vc, cv = idx.m_vc.toarray(), idx.m_cv.toarray()
            base = {LogBase.NATURAL: math.e, LogBase.BASE2: 2, LogBase.BASE10: 10}[cfg.log_base]
            for w in range(idx.n_words):
                for c in range(idx.n_contexts):
                    args = (counts.pair_count[w, c], counts.word_count[w], counts.context_count[c],
                            counts.total_pairs, cfg.k, cfg.estimator is Estimator.CONDITIONAL, base)
                    assert vc[c, w] == pytest.approx(oracle_appmi(*args), rel=1e-12, abs=1e-12)
                    assert cv[w, c] == pytest.approx(oracle_appmi(*args, reverse=True), rel=1e-12, abs=1e-12)

    def test_parallel_counting_is_deterministic(self):
        sents = tokenize_plain(CORPUS_C_TEXT * 5)
        one = build_index(sents, V_C, Scheme.NGRAM, workers=1)
        many = build_index(sents, V_C, Scheme.NGRAM, workers=3)
        assert dumps_index(one) == dumps_index(many)

    def test_dependency_scheme_skips_root(self):
        from support import NORBURY_CONLLU
        from compsense import parse_conllu
        idx = build_index(parse_conllu(NORBURY_CONLLU), ["is", "parish"], Scheme.DEP)
        assert [k.parts for k in idx.contexts] == [("attr", "is", "AUX")]


class TestPersistence:
    def test_round_trip_bytes(self, corpus_c_index):
        data = dumps_index(corpus_c_index)
        again = loads_index(data)
        assert dumps_index(again) == data
        for a, b in ((again.m_vc, corpus_c_index.m_vc), (again.m_cv, corpus_c_index.m_cv)):
            assert np.array_equal(a.indptr, b.indptr)
            assert np.array_equal(a.indices, b.indices)
            assert a.data.tobytes() == b.data.tobytes()

    def test_file_round_trip(self, corpus_c_index, tmp_path):
        path = tmp_path / "c.cbix"
        save_index(corpus_c_index, path)
        loaded = load_index(path)
        assert loaded.vocabulary.terms == V_C
        assert loaded.contexts.keys == corpus_c_index.contexts.keys

    def test_config_preserved(self):
        idx = build_index(tokenize_plain(CORPUS_C_TEXT), V_C, Scheme.NGRAM,
                          ApmiConfig(k=5, estimator=Estimator.JOINT, log_base=LogBase.BASE10))
        buf = io.BytesIO()
        save_index(idx, buf)
        buf.seek(0)
        cfg = load_index(buf).config
        assert (cfg.k, cfg.estimator, cfg.log_base) == (5.0, Estimator.JOINT, LogBase.BASE10)

    def test_header_layout(self, corpus_c_index):
        data = dumps_index(corpus_c_index)
        assert data[:4] == b"CBIX"
        assert int.from_bytes(data[4:8], "little") == FORMAT_VERSION

    def test_truncated(self, corpus_c_index):
        data = dumps_index(corpus_c_index)
        for cut in (2, 6, 15, len(data) // 2, len(data) - 1):
            with pytest.raises(IndexFormatError):
                loads_index(data[:cut])

    def test_bad_magic(self, corpus_c_index):
        data = dumps_index(corpus_c_index)
        with pytest.raises(IndexFormatError, match="magic"):
            loads_index(b"XXXX" + data[4:])

    def test_version_mismatch(self, corpus_c_index):
        data = dumps_index(corpus_c_index)
        with pytest.raises(IndexFormatError, match="version"):
            loads_index(data[:4] + (FORMAT_VERSION + 1).to_bytes(4, "little") + data[8:])

    def test_trailing_bytes(self, corpus_c_index):
        with pytest.raises(IndexFormatError, match="trailing"):
            loads_index(dumps_index(corpus_c_index) + b"\0")


def test_random_count_tables_fill_both_matrices():
    rng = random.Random(5)
    counts, nw, nc = random_counts(rng, max_words=10, max_contexts=10, density=0.5)
    from compsense import ContextTable, Vocabulary
    idx = index_from_counts(counts, Vocabulary(f"w{i}" for i in range(nw)),
                            ContextTable(ContextKey(Scheme.NGRAM, (str(i), "")) for i in range(nc)),
                            ApmiConfig(k=5))
    assert set(zip(*idx.m_vc.nonzero())) == {(c, w) for (w, c) in counts.pair_count}
