import random
import threading

import pytest

from conftest import TOY10, toy_schema
from oracle import as_documents, random_corpus
from skg import (
    Document,
    DocumentError,
    DuplicateIdError,
    FieldKind,
    FieldSchema,
    IndexWriter,
    Schema,
    SchemaError,
    analyze_text,
    build_snapshot,
)

TEXT = FieldSchema("keywords", FieldKind.ANALYZED_TEXT)
EXACT = FieldSchema("title", FieldKind.EXACT_STRING)


class TestAnalyzer:
    def test_text_tokens_and_positions(self):
        assert analyze_text("senior java engineer", TEXT) == [
            ("senior", 0), ("java", 1), ("engineer", 2)]

    def test_empty(self):
        assert analyze_text("", TEXT) == []
        assert analyze_text("", EXACT) == []

    def test_exact_is_one_lowercased_term(self):
        assert analyze_text("Data Scientist", EXACT) == [("data scientist", 0)]

    def test_splits_on_punctuation(self):
        assert [t for t, _ in analyze_text("C++/Java, senior-level", TEXT)] == [
            "c", "java", "senior", "level"]


class TestWriter:
    def test_first_insert_gets_id_zero(self, schema):
        w = IndexWriter(schema)
        assert w.add_document(TOY10[0]) == 0
        assert w.add_document(TOY10[1]) == 1

    def test_duplicate_id(self, schema):
        w = IndexWriter(schema)
        w.add_document(TOY10[0])
        with pytest.raises(DuplicateIdError):
            w.add_document(TOY10[0])
        w.commit()
        with pytest.raises(DuplicateIdError):
            w.add_document(TOY10[0])

    def test_unknown_field_in_closed_schema(self, schema):
        with pytest.raises(SchemaError):
            IndexWriter(schema).add_document({"id": "x", "salary": "lots"})

    def test_open_schema_infers_kinds(self):
        w = IndexWriter(Schema(closed=False))
        w.add_document({"id": "x", "skills": ["Machine Learning"], "keywords": "spark and ML"})
        snap = w.commit()
        assert snap.schema.get("skills").kind is FieldKind.EXACT_STRING
        assert snap.schema.get("keywords").kind is FieldKind.ANALYZED_TEXT
        assert snap.term_docset("skills", "machine learning").ids.tolist() == [0]

    def test_kind_is_immutable(self, schema):
        with pytest.raises(SchemaError):
            schema.add(FieldSchema("title", FieldKind.ANALYZED_TEXT))

    def test_document_validation(self):
        with pytest.raises(DocumentError):
            Document("", {"a": "b"})
        with pytest.raises(DocumentError):
            Document("x", {})
        with pytest.raises(DocumentError):
            Document.from_json({"id": "x", "a": {"nested": 1}})

    def test_batch_is_atomic(self, schema):
        w = IndexWriter(schema)
        with pytest.raises(DuplicateIdError):
            w.add_documents([TOY10[0], TOY10[1], TOY10[0]])
        assert w.pending_count == 0

    def test_staged_docs_invisible_until_commit(self, schema):
        w = IndexWriter(schema)
        w.add_documents(TOY10)
        assert w.snapshot.doc_count == 0
        assert w.commit().doc_count == 10

    def test_empty_commit_keeps_content(self, schema):
        w = IndexWriter(schema)
        w.add_documents(TOY10)
        first = w.commit()
        second = w.commit()
        assert second.same_content(first)

    def test_later_commit_supersedes_earlier(self, schema):
        w = IndexWriter(schema)
        w.add_documents(TOY10[:5])
        old = w.commit()
        w.add_documents(TOY10[5:])
        new = w.commit()
        assert w.snapshot is new
        assert old.doc_count == 5 and new.doc_count == 10
        assert old.term_docset("skills", "java").ids.tolist() == [0, 1, 2, 3]
        assert len(new.term_docset("skills", "nursing")) == 2
        assert len(old.term_docset("skills", "nursing")) == 0

    def test_incremental_equals_single_batch(self, schema):
        w = IndexWriter(schema)
        for i in range(0, 10, 3):
            w.add_documents(TOY10[i:i + 3])
            w.commit()
        assert w.snapshot.same_content(build_snapshot(TOY10, toy_schema()))

    def test_from_snapshot_continues(self, schema):
        w = IndexWriter(schema)
        w.add_documents(TOY10[:6])
        w2 = IndexWriter.from_snapshot(w.commit())
        w2.add_documents(TOY10[6:])
        assert w2.commit().same_content(build_snapshot(TOY10, toy_schema()))


class TestToyLookups:
    def test_doc_count(self, toy):
        assert toy.doc_count == 10

    def test_java_doc_frequency(self, toy):
        assert toy.postings("skills", "java").doc_frequency == 4

    def test_term_docsets(self, toy, ext):
        assert ext(toy.term_docset("skills", "java")) == {"d1", "d2", "d3", "d4"}
        assert ext(toy.term_docset("skills", "cobol")) == set()
        assert ext(toy.term_docset("title", "nurse")) == {"d6", "d7", "d8"}

    def test_unknown_field(self, toy):
        with pytest.raises(SchemaError):
            toy.term_docset("salary", "x")
        with pytest.raises(SchemaError):
            toy.enumerate_field_terms("salary", toy.all_docs())

    def test_phrases(self, toy, ext):
        assert ext(toy.phrase_docset("keywords", ["java", "engineer"])) == {"d1"}
        assert ext(toy.phrase_docset("keywords", ["java"])) == {"d1", "d2"}
        assert ext(toy.phrase_docset("keywords", ["engineer", "java"])) == set()
        with pytest.raises(ValueError):
            toy.phrase_docset("keywords", [])

    def test_phrase_needs_positions(self, toy):
        with pytest.raises(SchemaError):
            toy.phrase_docset("title", ["engineer"])

    def test_positions_recorded(self, toy):
        pl = toy.postings("keywords", "engineer")
        assert pl.entries == [(0, (2,)), (1, (2,))]

    def test_enumerate_field_terms(self, toy):
        java = toy.term_docset("skills", "java")
        assert toy.enumerate_field_terms("title", java) == [("engineer", 3), ("analyst", 1)]
        assert toy.enumerate_field_terms("title", toy.empty()) == []
        d6 = toy.docset_from_external(["d6"])
        assert toy.enumerate_field_terms("skills", d6) == [("nursing", 1)]

    def test_forward_rows(self, toy):
        assert toy.forward("skills", toy.internal_id("d2")) == ["hadoop", "java", "spark"]
        assert toy.forward("keywords", toy.internal_id("d3")) == []


def test_multi_valued_text_has_position_gap():
    snap = build_snapshot(
        [{"id": "a", "notes": ["big data", "science fair"]}],
        Schema([FieldSchema("notes", FieldKind.ANALYZED_TEXT)]))
    assert len(snap.phrase_docset("notes", ["big", "data"])) == 1
    assert len(snap.phrase_docset("notes", ["data", "science"])) == 0


@pytest.mark.parametrize("seed", range(8))
def test_structural_invariants_on_random_corpora(seed):
    rng = random.Random(seed)
    corpus = random_corpus(rng, rng.randint(1, 40), n_terms=8)
    texts = [" ".join(rng.choice("abcde") for _ in range(rng.randint(0, 6))) for _ in corpus]
    docs = as_documents(corpus)
    for d, t in zip(docs, texts):
        d["text"] = t
    schema = Schema([FieldSchema("a"), FieldSchema("b"),
                     FieldSchema("text", FieldKind.ANALYZED_TEXT)])
    snap = build_snapshot(docs, schema)
    for field in ("a", "b", "text"):
        terms = snap.field_terms(field)
        for term in terms:
            pl = snap.postings(field, term)
            doc_ids = [d for d, _ in pl.entries]
            assert doc_ids == sorted(set(doc_ids))
            assert pl.doc_frequency == len(doc_ids)
            for _, pos in pl.entries:
                assert list(pos) == sorted(set(pos))
        # forward / inverted duality
        for d in range(snap.doc_count):
            fwd = set(snap.forward(field, d))
            assert fwd == {t for t in terms if d in snap.term_docset(field, t)}
        # enumeration equals the non-empty intersections
        subset = snap.docset(rng.sample(range(snap.doc_count), rng.randint(0, snap.doc_count)))
        expected = {t: len(snap.term_docset(field, t) & subset) for t in terms}
        got = dict(snap.enumerate_field_terms(field, subset))
        assert got == {t: c for t, c in expected.items() if c}
    # phrases are contained in the intersection of their terms
    words = list("abcde")
    for _ in range(20):
        phrase = [rng.choice(words) for _ in range(rng.randint(1, 3))]
        ph = snap.phrase_docset("text", phrase)
        inter = snap.all_docs()
        for w in phrase:
            inter = inter & snap.term_docset("text", w)
        assert set(ph) <= set(inter)
        brute = {i for i, t in enumerate(texts)
                 if any(t.split()[k:k + len(phrase)] == phrase for k in range(len(t.split())))}
        assert set(ph) == brute


def test_snapshot_reads_stable_during_ingestion(schema):
    w = IndexWriter(schema)
    w.add_documents(TOY10)
    snap = w.commit()
    before = [snap.enumerate_field_terms("title", snap.term_docset("skills", s))
              for s in ("java", "spark", "nursing")]
    stop = threading.Event()

    def writer():
        i = 0
        while not stop.is_set():
            w.add_document({"id": f"extra{i}", "skills": ["java"], "title": "nurse"})
            w.commit()
            i += 1

    t = threading.Thread(target=writer)
    t.start()
    try:
        for _ in range(50):
            now = [snap.enumerate_field_terms("title", snap.term_docset("skills", s))
                   for s in ("java", "spark", "nursing")]
            assert now == before
    finally:
        stop.set()
        t.join()
    assert w.snapshot.doc_count > 10
