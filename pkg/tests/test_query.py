import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle import as_documents, random_corpus
from skg import (
    All,
    And,
    FieldSchema,
    Not,
    Or,
    Phrase,
    QuerySyntaxError,
    Schema,
    SchemaError,
    Term,
    build_snapshot,
    materialize,
    parse_query,
    print_query,
)
from skg.query import combine_starting_node, evaluate


class TestParse:
    def test_phrase(self):
        assert parse_query('keywords:"data science"') == Phrase("keywords", ["data", "science"])

    def test_and(self):
        assert parse_query("skills:java AND skills:spark") == And(
            Term("skills", "java"), Term("skills", "spark"))

    def test_unclosed_group(self):
        with pytest.raises(QuerySyntaxError) as err:
            parse_query("skills:(java OR")
        assert err.value.position == len("skills:(java OR")

    def test_precedence(self):
        q = parse_query("a:x OR a:y AND NOT a:z")
        assert q == Or(Term("a", "x"), And(Term("a", "y"), Not(Term("a", "z"))))

    def test_field_group(self):
        assert parse_query('skills:(java OR "big data")') == Or(
            Term("skills", "java"), Phrase("skills", ["big", "data"]))

    def test_all(self):
        assert parse_query("*:*") == All()
        assert parse_query("NOT *:*") == Not(All())

    @pytest.mark.parametrize("text,pos", [
        ("java", 0),
        ("skills:java AND", 15),
        ("skills:java spark", 12),
        ("(skills:java", 12),
        ('skills:"java', 7),
        ("", 0),
        ("skills:", 7),
        ("skills:java )", 12),
    ])
    def test_syntax_errors_carry_position(self, text, pos):
        with pytest.raises(QuerySyntaxError) as err:
            parse_query(text)
        assert err.value.position == pos

    def test_starting_node_list_is_conjunction(self):
        assert combine_starting_node(["a:x", "b:y"]) == And(Term("a", "x"), Term("b", "y"))
        assert combine_starting_node(["a:x"]) == Term("a", "x")


class TestMaterialize:
    def test_term(self, toy, ext):
        assert ext(materialize(Term("skills", "java"), toy).docs) == {"d1", "d2", "d3", "d4"}

    def test_and(self, toy, ext):
        node = materialize("skills:java AND skills:spark", toy)
        assert ext(node.docs) == {"d2", "d3"}
        assert node.label == "skills:java AND skills:spark"

    def test_not_all(self, toy):
        assert len(materialize(Not(All()), toy).docs) == 0

    def test_query_terms_are_analyzed(self, toy, ext):
        assert ext(materialize("skills:Java", toy).docs) == {"d1", "d2", "d3", "d4"}
        assert ext(materialize('keywords:"Java Engineer"', toy).docs) == {"d1"}
        assert ext(materialize("keywords:SENIOR", toy).docs) == {"d1"}

    def test_exact_field_phrase_is_whole_value(self):
        snap = build_snapshot([{"id": "j", "title": "Data Scientist"}], Schema([FieldSchema("title")]))
        assert len(materialize('title:"data scientist"', snap).docs) == 1
        assert len(materialize("title:data", snap).docs) == 0

    def test_unknown_field(self, toy):
        with pytest.raises(SchemaError):
            materialize("salary:high", toy)


# ------------------------------------------------------------ properties

FIELDS = ("a", "b")
TERMS = [f"{f}{i}" for f in FIELDS for i in range(6)]


def exprs(max_leaves=8):
    leaf = st.one_of(
        st.sampled_from(TERMS).map(lambda t: Term(t[0], t)),
        st.just(All()),
    )

    def extend(children):
        lists = st.lists(children, min_size=2, max_size=3)
        return st.one_of(lists.map(And), lists.map(Or), children.map(Not))

    return st.recursive(leaf, extend, max_leaves=max_leaves)


def brute(expr, doc):
    if isinstance(expr, All):
        return True
    if isinstance(expr, Term):
        return expr.term in doc[expr.field]
    if isinstance(expr, And):
        return all(brute(c, doc) for c in expr.children)
    if isinstance(expr, Or):
        return any(brute(c, doc) for c in expr.children)
    return not brute(expr.child, doc)


_SCHEMA = Schema([FieldSchema(f) for f in FIELDS])
_CORPORA = []
for _seed in range(6):
    _rng = random.Random(_seed)
    _c = random_corpus(_rng, _rng.randint(1, 50), fields=FIELDS, n_terms=6)
    _CORPORA.append((_c, build_snapshot(as_documents(_c), _SCHEMA)))


@given(expr=exprs(), which=st.integers(0, len(_CORPORA) - 1))
@settings(max_examples=200, deadline=None)
def test_materialize_matches_per_document_predicate(expr, which):
    corpus, snap = _CORPORA[which]
    expected = {i for i, d in enumerate(corpus) if brute(expr, d)}
    assert set(evaluate(expr, snap)) == expected


@given(a=exprs(4), b=exprs(4), which=st.integers(0, len(_CORPORA) - 1))
@settings(max_examples=100, deadline=None)
def test_distribution_and_de_morgan(a, b, which):
    _, snap = _CORPORA[which]
    da, db = evaluate(a, snap), evaluate(b, snap)
    full = snap.all_docs()
    assert evaluate(And(a, b), snap) == da & db
    assert evaluate(Or(a, b), snap) == da | db
    assert evaluate(Not(a), snap) == full - da
    assert evaluate(Not(And(a, b)), snap) == evaluate(Or(Not(a), Not(b)), snap)
    assert evaluate(Not(Or(a, b)), snap) == evaluate(And(Not(a), Not(b)), snap)


words = st.text(alphabet="abcxyz09", min_size=1, max_size=6).filter(
    lambda w: w not in ("AND", "OR", "NOT"))
fields = st.sampled_from(["skills", "title", "job_title_1"])


def canonical():
    leaf = st.one_of(
        st.builds(Term, fields, words),
        st.builds(Phrase, fields, st.lists(words, min_size=1, max_size=3)),
        st.just(All()),
    )

    def extend(children):
        lists = st.lists(children, min_size=2, max_size=3)
        return st.one_of(lists.map(And), lists.map(Or), children.map(Not))

    return st.recursive(leaf, extend, max_leaves=10)


@given(expr=canonical())
@settings(max_examples=300, deadline=None)
def test_print_then_parse_is_identity(expr):
    assert parse_query(print_query(expr)) == expr


def test_print_quotes_awkward_terms():
    assert print_query(Term("title", "data scientist")) == 'title:"data scientist"'
    assert print_query(Phrase("k", ['say "hi"'])) == r'k:"say \"hi\""'
    assert parse_query(r'k:"say \"hi\""') == Phrase("k", ["say", '"hi"'])
