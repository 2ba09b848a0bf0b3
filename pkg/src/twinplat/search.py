"""Inverted-index full text retrieval and the text question-answering front.

Tokenization is lowercase split on non-alphanumerics, no stemming. Scores are
TF-IDF with log-scaled term frequency, smoothed idf = 1 + ln(N/df), and
cosine-style document length normalization. Questions hit an intent table
first (status / most worn element / next maintenance); anything unmatched
degrades to document search.
"""

from __future__ import annotations

import math
import re
import threading
import time
from bisect import bisect_left, insort
from dataclasses import dataclass, field

from . import errors

_TOKEN_RE = re.compile(r"[0-9a-z]+")


def tokenize(text: str) -> list:
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class KnowledgeDocument:
    doc_id: str
    title: str
    body: str
    item_id: str | None = None
    media_refs: tuple = ()

    def __post_init__(self):
        if not self.body:
            raise ValueError("document body must be non-empty")


@dataclass(frozen=True)
class Answer:
    kind: str                      # "direct" | "document"
    text: str
    confidence: float
    latency: float                 # seconds, measured
    hits: tuple = ()               # (doc_id, score) for document answers
    source: str = ""

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must lie in [0, 1]")


class InvertedIndex:
    """token -> postings sorted by doc_id; searches are safe under concurrency."""

    def __init__(self):
        self._postings: dict[str, list] = {}   # token -> [(doc_id, tf), ...]
        self._docs: dict[str, KnowledgeDocument] = {}
        self._lengths: dict[str, int] = {}
        self._write_lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._docs)

    def document(self, doc_id: str) -> KnowledgeDocument:
        try:
            return self._docs[doc_id]
        except KeyError:
            raise errors.UnknownDoc(doc_id) from None

    def index_document(self, doc: KnowledgeDocument):
        with self._write_lock:
            if doc.doc_id in self._docs:
                raise errors.DuplicateDoc(doc.doc_id)
            tokens = tokenize(doc.title + " " + doc.body)
            counts: dict[str, int] = {}
            for tok in tokens:
                counts[tok] = counts.get(tok, 0) + 1
            for tok, tf in counts.items():
                postings = self._postings.setdefault(tok, [])
                insort(postings, (doc.doc_id, tf))
            self._docs[doc.doc_id] = doc
            self._lengths[doc.doc_id] = len(tokens)

    def remove_document(self, doc_id: str):
        with self._write_lock:
            doc = self._docs.pop(doc_id, None)
            if doc is None:
                raise errors.UnknownDoc(doc_id)
            del self._lengths[doc_id]
            for tok in set(tokenize(doc.title + " " + doc.body)):
                postings = self._postings.get(tok, [])
                i = bisect_left(postings, (doc_id,))
                if i < len(postings) and postings[i][0] == doc_id:
                    postings.pop(i)
                if not postings:
                    self._postings.pop(tok, None)

    def _idf(self, token: str) -> float:
        df = len(self._postings.get(token, ()))
        if df == 0:
            return 0.0
        return 1.0 + math.log(len(self._docs) / df)

    def _doc_norm(self, doc_id: str) -> float:
        acc = 0.0
        doc = self._docs[doc_id]
        counts: dict[str, int] = {}
        for tok in tokenize(doc.title + " " + doc.body):
            counts[tok] = counts.get(tok, 0) + 1
        for tok, tf in counts.items():
            w = (1.0 + math.log(tf)) * self._idf(tok)
            acc += w * w
        return math.sqrt(acc) or 1.0

    def search(self, query: str, k: int = 10) -> list:
        """Top-k (doc_id, score), TF-IDF descending, ties by doc_id ascending."""
        if k < 1:
            raise ValueError("k must be >= 1")
        scores: dict[str, float] = {}
        for tok in set(tokenize(query)):
            idf = self._idf(tok)
            for doc_id, tf in self._postings.get(tok, ()):
                scores[doc_id] = scores.get(doc_id, 0.0) + (1.0 + math.log(tf)) * idf
        ranked = [(doc_id, s / self._doc_norm(doc_id)) for doc_id, s in scores.items()]
        ranked.sort(key=lambda pair: (-pair[1], pair[0]))
        return ranked[:k]

    def containing(self, token: str) -> set:
        return {doc_id for doc_id, _ in self._postings.get(token.lower(), ())}


# ---------------------------------------------------------------------------
# Question answering

_ITEM_REF = r"(?:machine|item)?\s*(?P<item>[0-9a-zA-Z_-]+)\s*\??$"

_INTENTS = [
    ("status", re.compile(r"(?:what\s+is\s+the\s+)?status\s+of\s+" + _ITEM_REF, re.I)),
    ("most_worn", re.compile(r"(?:which\s+is\s+the\s+)?most\s+worn\s+(?:element|component|part)"
                             r"(?:\s+of\s+" + _ITEM_REF + r")?", re.I)),
    ("next_maintenance", re.compile(r"next\s+maintenance\s+of\s+" + _ITEM_REF, re.I)),
]


class QuestionAnswerer:
    """Intent matcher over the twin services, document search fallback."""

    def __init__(self, index: InvertedIndex, services=None,
                 default_item: str | None = None):
        self.index = index
        self.services = services
        self.default_item = default_item

    def ask(self, question: str) -> Answer:
        t0 = time.perf_counter()
        for intent, pattern in _INTENTS:
            m = pattern.search(question.strip())
            if not m:
                continue
            try:
                text = self._dispatch(intent, m.groupdict().get("item"))
            except errors.TwinError:
                break  # unknown item etc: fall through to document search
            return Answer(kind="direct", text=text, confidence=0.95,
                          latency=time.perf_counter() - t0, source=intent)
        hits = self.index.search(question, k=3)
        if not hits:
            return Answer(kind="document", text="no matching knowledge found",
                          confidence=0.0, latency=time.perf_counter() - t0)
        best = self.index.document(hits[0][0])
        confidence = self._overlap(question, best)
        snippet = best.body[:240]
        return Answer(kind="document", text=f"{best.title}: {snippet}",
                      confidence=confidence, latency=time.perf_counter() - t0,
                      hits=tuple(hits), source=best.doc_id)

    def _dispatch(self, intent: str, item_id: str | None) -> str:
        if self.services is None:
            raise errors.UnknownResource("no services wired")
        item_id = item_id or self.default_item
        if intent == "status":
            report = self.services.get_status(item_id)
            return (f"machine {item_id} health is {report.health}; "
                    f"last update at t={report.snapshot.timestamp}")
        if intent == "most_worn":
            worn = self.services.most_worn(item_id)
            return (f"most worn element of {item_id} is {worn.name} "
                    f"(wear {worn.wear:.3f})")
        if intent == "next_maintenance":
            plan = self.services.approved_plans.get(item_id)
            if not plan or not plan.entries:
                return f"no maintenance scheduled for {item_id}"
            nxt = min(plan.entries, key=lambda e: e.window[0])
            return (f"next maintenance of {item_id}: {nxt.op_id} "
                    f"({nxt.category}) at t={nxt.window[0]:.0f}")
        raise errors.UnknownResource(intent)

    @staticmethod
    def _overlap(question: str, doc: KnowledgeDocument) -> float:
        """Token-overlap ranking of the question against the document."""
        q = set(tokenize(question))
        d = set(tokenize(doc.title + " " + doc.body))
        if not q:
            return 0.0
        return len(q & d) / len(q)


# ---------------------------------------------------------------------------
# Corpus loading: one text file per document plus a manifest line
# `doc_id<TAB>item_id<TAB>title<TAB>filename`; eval file `question<TAB>key`.

def load_corpus(manifest_path, corpus_dir) -> list:
    import os
    docs = []
    with open(manifest_path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            doc_id, item_id, title, filename = line.split("\t")
            with open(os.path.join(corpus_dir, filename)) as body_fh:
                body = body_fh.read()
            docs.append(KnowledgeDocument(doc_id=doc_id, title=title, body=body,
                                          item_id=item_id or None))
    return docs


def load_eval_corpus(path) -> list:
    pairs = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            question, key = line.split("\t")
            pairs.append((question, key))
    return pairs


def evaluate(qa: QuestionAnswerer, pairs) -> dict:
    """Score ask() on (question, expected-key) pairs: key must appear in the
    answer text or be the winning doc id."""
    correct, latencies = 0, []
    for question, key in pairs:
        answer = qa.ask(question)
        latencies.append(answer.latency)
        if key.lower() in answer.text.lower() or key == answer.source:
            correct += 1
    return {"total": len(pairs), "correct": correct,
            "mean_latency": sum(latencies) / len(latencies) if latencies else 0.0}
