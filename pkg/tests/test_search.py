"""Knowledge search: TF-IDF ranking, inverted-index equivalence, Q&A intents."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twinplat import errors
from twinplat.platform import build_platform
from twinplat.search import (InvertedIndex, KnowledgeDocument,
                             QuestionAnswerer, evaluate, tokenize)


def doc(doc_id, body, title=""):
    return KnowledgeDocument(doc_id=doc_id, title=title, body=body)


class TestTokenize:
    def test_lowercase_alphanumeric(self):
        assert tokenize("Replace the SAFETY-switch, then restart (x2).") == \
            ["replace", "the", "safety", "switch", "then", "restart", "x2"]

    def test_empty(self):
        assert tokenize("  --- ") == []


class TestRanking:
    def test_hand_computed_tfidf_oracle(self):
        """Two docs, one-token query, worked by hand.

        idf(a) = idf(b) = 1 + ln(2/2) = 1.
        d1 = "a b":   score(a->d1) = 1,        norm = sqrt(2)
        d2 = "a a b": score(a->d2) = 1+ln(2),  norm = sqrt((1+ln 2)^2 + 1)
        """
        idx = InvertedIndex()
        idx.index_document(doc("d1", "a b"))
        idx.index_document(doc("d2", "a a b"))
        ranked = dict(idx.search("a"))
        w = 1.0 + math.log(2.0)
        assert ranked["d1"] == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-12)
        assert ranked["d2"] == pytest.approx(w / math.sqrt(w * w + 1.0), abs=1e-12)
        assert idx.search("a")[0][0] == "d2"

    def test_rare_token_outranks_common(self):
        idx = InvertedIndex()
        idx.index_document(doc("common1", "press line press line"))
        idx.index_document(doc("common2", "press line spindle"))
        idx.index_document(doc("rare", "spindle bearing"))
        assert idx.search("spindle bearing")[0][0] == "rare"

    def test_ties_break_by_doc_id(self):
        idx = InvertedIndex()
        for d in ("b-doc", "a-doc", "c-doc"):
            idx.index_document(doc(d, "identical text"))
        assert [d for d, _ in idx.search("identical")] == ["a-doc", "b-doc", "c-doc"]

    def test_unknown_token_scores_nothing(self):
        idx = InvertedIndex()
        idx.index_document(doc("d1", "a b"))
        assert idx.search("zzz") == []

    def test_top_k_truncation(self):
        idx = InvertedIndex()
        for i in range(30):
            idx.index_document(doc(f"d{i:02d}", "press"))
        assert len(idx.search("press", k=7)) == 7
        with pytest.raises(ValueError):
            idx.search("press", k=0)


class TestIndexLifecycle:
    def test_duplicate_rejected(self):
        idx = InvertedIndex()
        idx.index_document(doc("d1", "a"))
        with pytest.raises(errors.DuplicateDoc):
            idx.index_document(doc("d1", "b"))

    def test_remove_then_reindex(self):
        idx = InvertedIndex()
        idx.index_document(doc("d1", "alpha beta"))
        idx.remove_document("d1")
        assert idx.search("alpha") == []
        with pytest.raises(errors.UnknownDoc):
            idx.remove_document("d1")
        idx.index_document(doc("d1", "gamma"))
        assert idx.search("gamma")[0][0] == "d1"


words = st.lists(st.sampled_from(
    ["press", "line", "spindle", "bearing", "lube", "guard", "switch", "qr",
     "waste", "setup", "cycle", "alarm"]), min_size=1, max_size=12)


class TestBruteForceEquivalence:
    @staticmethod
    def brute_force(docs, query):
        """Reference scorer: plain dictionaries, no inverted index."""
        n = len(docs)
        df = {}
        counts = {}
        for d in docs:
            c = {}
            for tok in tokenize(d.title + " " + d.body):
                c[tok] = c.get(tok, 0) + 1
            counts[d.doc_id] = c
            for tok in c:
                df[tok] = df.get(tok, 0) + 1
        idf = {tok: 1.0 + math.log(n / v) for tok, v in df.items()}
        out = []
        for d in docs:
            c = counts[d.doc_id]
            norm = math.sqrt(sum(((1 + math.log(tf)) * idf[t]) ** 2
                                 for t, tf in c.items())) or 1.0
            s = sum((1 + math.log(c[t])) * idf[t]
                    for t in set(tokenize(query)) if t in c)
            if s > 0:
                out.append((d.doc_id, s / norm))
        out.sort(key=lambda p: (-p[1], p[0]))
        return out

    @settings(max_examples=60, deadline=None)
    @given(st.lists(words, min_size=1, max_size=25), words)
    def test_random_corpora(self, bodies, query_words):
        docs = [doc(f"d{i:03d}", " ".join(b)) for i, b in enumerate(bodies)]
        idx = InvertedIndex()
        for d in docs:
            idx.index_document(d)
        got = idx.search(" ".join(query_words), k=len(docs))
        want = self.brute_force(docs, " ".join(query_words))
        assert [d for d, _ in got] == [d for d, _ in want]
        for (_, s1), (_, s2) in zip(got, want):
            assert s1 == pytest.approx(s2, rel=1e-12)

    def test_200_doc_corpus(self):
        docs = [doc(f"d{i:03d}", f"press line unit{i % 17} spindle" * (i % 3 + 1))
                for i in range(200)]
        idx = InvertedIndex()
        for d in docs:
            idx.index_document(d)
        got = idx.search("spindle unit3", k=200)
        want = self.brute_force(docs, "spindle unit3")
        assert got == pytest.approx(want)

    @settings(max_examples=30, deadline=None)
    @given(st.permutations(list(range(8))))
    def test_scores_invariant_under_insertion_order(self, order):
        bodies = ["press line", "spindle bearing", "press press", "lube guard",
                  "qr code howto", "waste rates", "setup cycle", "alarm playbook"]
        idx = InvertedIndex()
        for i in order:
            idx.index_document(doc(f"d{i}", bodies[i]))
        baseline = InvertedIndex()
        for i in range(8):
            baseline.index_document(doc(f"d{i}", bodies[i]))
        assert idx.search("press spindle qr") == pytest.approx(
            baseline.search("press spindle qr"))


@pytest.fixture(scope="module")
def platform():
    return build_platform(seed=0)


class TestQuestionAnswering:
    def test_status_intent(self, platform):
        ans = platform.qa.ask("What is the status of machine 000X?")
        assert ans.kind == "direct"
        assert "health is" in ans.text
        assert ans.confidence == pytest.approx(0.95)

    def test_most_worn_intent(self, platform):
        platform.tick(10_000.0)
        ans = platform.qa.ask("Which is the most worn element of machine 000X?")
        assert ans.kind == "direct"
        assert "safety_switch" in ans.text

    def test_default_item_fallback(self, platform):
        ans = platform.qa.ask("most worn component?")
        assert ans.kind == "direct" and "000X" in ans.text

    def test_document_fallback(self, platform):
        ans = platform.qa.ask("how do I scan the qr code on a machine?")
        assert ans.kind == "document"
        assert ans.source == "qr-howto"

    def test_gibberish_gets_low_confidence(self, platform):
        ans = platform.qa.ask("zzz qqq xxyzzy")
        assert ans.confidence <= 0.5

    def test_eval_corpus_scores(self, platform):
        from twinplat.platform import data_path
        from twinplat.search import load_eval_corpus
        pairs = load_eval_corpus(data_path("questions.tsv"))
        assert len(pairs) == 40
        report = evaluate(platform.qa, pairs)
        assert report["correct"] >= 38
        assert report["mean_latency"] < 2.0
