"""Query expressions, their text syntax, and materialization into DocSets.

Syntax::

    skills:java                   term
    keywords:"data science"       phrase
    skills:(java OR spark)        field group; bare words inherit the field
    a AND b, a OR b, NOT a        NOT binds tightest, then AND, then OR
    ( ... )                       grouping
    *:*                           every document

Every leaf must be fielded. Operators are upper case.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .analysis import FieldKind, analyze_text
from .docset import DocSet
from .errors import QuerySyntaxError
from .index import IndexSnapshot


@dataclass(frozen=True)
class Term:
    field: str
    term: str


@dataclass(frozen=True, init=False)
class Phrase:
    field: str
    terms: tuple[str, ...]

    def __init__(self, field: str, terms: Sequence[str]):
        if not terms:
            raise ValueError("phrase needs at least one term")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "terms", tuple(terms))


def _children(args) -> tuple:
    if len(args) == 1 and isinstance(args[0], (list, tuple)):
        args = args[0]
    if not args:
        raise ValueError("boolean node needs at least one child")
    return tuple(args)


@dataclass(frozen=True, init=False)
class And:
    children: tuple

    def __init__(self, *children):
        object.__setattr__(self, "children", _children(children))


@dataclass(frozen=True, init=False)
class Or:
    children: tuple

    def __init__(self, *children):
        object.__setattr__(self, "children", _children(children))


@dataclass(frozen=True)
class Not:
    child: QueryExpr


@dataclass(frozen=True)
class All:
    pass


QueryExpr = Union[Term, Phrase, And, Or, Not, All]

_OPERATORS = {"AND", "OR", "NOT"}
_SPECIAL = set('()"\\')


# ---------------------------------------------------------------- lexing

@dataclass
class _Tok:
    kind: str  # WORD | QUOTED | LPAREN | RPAREN | END
    text: str
    pos: int


def _lex(text: str) -> list[_Tok]:
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c == "(":
            toks.append(_Tok("LPAREN", c, i))
            i += 1
        elif c == ")":
            toks.append(_Tok("RPAREN", c, i))
            i += 1
        elif c == '"':
            start = i
            i += 1
            buf = []
            while i < n and text[i] != '"':
                if text[i] == "\\" and i + 1 < n:
                    i += 1
                buf.append(text[i])
                i += 1
            if i >= n:
                raise QuerySyntaxError("unterminated quote", start)
            i += 1
            toks.append(_Tok("QUOTED", "".join(buf), start))
        else:
            start = i
            while i < n and not text[i].isspace() and text[i] not in _SPECIAL:
                i += 1
            if i == start:
                raise QuerySyntaxError(f"unexpected character {c!r}", i)
            toks.append(_Tok("WORD", text[start:i], start))
    toks.append(_Tok("END", "", n))
    return toks


# ---------------------------------------------------------------- parsing

class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def is_op(self, name: str) -> bool:
        t = self.peek()
        return t.kind == "WORD" and t.text == name

    def parse(self) -> QueryExpr:
        if self.peek().kind == "END":
            raise QuerySyntaxError("empty query", 0)
        expr = self.or_expr(None)
        tok = self.peek()
        if tok.kind != "END":
            raise QuerySyntaxError(f"unexpected {tok.text!r}", tok.pos)
        return expr

    def or_expr(self, field):
        parts = [self.and_expr(field)]
        while self.is_op("OR"):
            self.take()
            parts.append(self.and_expr(field))
        return parts[0] if len(parts) == 1 else Or(parts)

    def and_expr(self, field):
        parts = [self.not_expr(field)]
        while self.is_op("AND"):
            self.take()
            parts.append(self.not_expr(field))
        return parts[0] if len(parts) == 1 else And(parts)

    def not_expr(self, field):
        if self.is_op("NOT"):
            self.take()
            return Not(self.not_expr(field))
        return self.primary(field)

    def group(self, field):
        open_tok = self.take()
        if self.peek().kind == "RPAREN":
            raise QuerySyntaxError("empty group", self.peek().pos)
        expr = self.or_expr(field)
        tok = self.peek()
        if tok.kind != "RPAREN":
            raise QuerySyntaxError(f"expected ')' to close group opened at {open_tok.pos}", tok.pos)
        self.take()
        return expr

    def primary(self, field):
        tok = self.peek()
        if tok.kind == "LPAREN":
            return self.group(field)
        if tok.kind == "QUOTED":
            if field is None:
                raise QuerySyntaxError("unfielded phrase", tok.pos)
            self.take()
            return _phrase(field, tok)
        if tok.kind == "WORD" and tok.text not in _OPERATORS:
            self.take()
            if tok.text == "*:*":
                return All()
            name, sep, value = tok.text.partition(":")
            if not sep:
                if field is None:
                    raise QuerySyntaxError(f"unfielded term {tok.text!r}", tok.pos)
                return Term(field, tok.text)
            if not name:
                raise QuerySyntaxError("missing field name", tok.pos)
            if value:
                return Term(name, value)
            nxt = self.peek()
            if nxt.kind == "QUOTED" and nxt.pos == tok.pos + len(tok.text):
                self.take()
                return _phrase(name, nxt)
            if nxt.kind == "LPAREN" and nxt.pos == tok.pos + len(tok.text):
                return self.group(name)
            raise QuerySyntaxError(f"missing value for field {name!r}", nxt.pos)
        if tok.kind == "END":
            raise QuerySyntaxError("unexpected end of query", tok.pos)
        raise QuerySyntaxError(f"unexpected {tok.text!r}", tok.pos)


def _phrase(field: str, tok: _Tok) -> Phrase:
    words = tok.text.split()
    if not words:
        raise QuerySyntaxError("empty phrase", tok.pos)
    return Phrase(field, words)


def parse_query(text: str) -> QueryExpr:
    """Parse the query mini-language; raises QuerySyntaxError with a position."""
    return _Parser(text).parse()


# ---------------------------------------------------------------- printing

def _plain(word: str) -> bool:
    return (bool(word) and word not in _OPERATORS and word != "*:*"
            and not any(c.isspace() or c in _SPECIAL for c in word))


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def print_query(expr: QueryExpr) -> str:
    """Canonical text form; ``parse_query(print_query(e)) == e`` for canonical ``e``."""
    if isinstance(expr, All):
        return "*:*"
    if isinstance(expr, Term):
        return f"{expr.field}:{expr.term if _plain(expr.term) else _quote(expr.term)}"
    if isinstance(expr, Phrase):
        return f"{expr.field}:{_quote(' '.join(expr.terms))}"
    if isinstance(expr, Not):
        return "NOT " + _wrap(expr.child)
    if isinstance(expr, (And, Or)):
        if len(expr.children) == 1:
            return print_query(expr.children[0])
        op = " AND " if isinstance(expr, And) else " OR "
        return op.join(_wrap(c) for c in expr.children)
    raise TypeError(f"not a query expression: {expr!r}")


def _wrap(expr) -> str:
    s = print_query(expr)
    if isinstance(expr, (And, Or)) and len(expr.children) > 1:
        return f"({s})"
    return s


# ---------------------------------------------------------------- evaluation

@dataclass(frozen=True)
class MaterializedNode:
    expr: QueryExpr
    docs: DocSet
    label: str


def _leaf_docs(snapshot: IndexSnapshot, field: str, words: Sequence[str]) -> DocSet:
    fi = snapshot.field(field)
    if fi.schema.kind is FieldKind.EXACT_STRING:
        value = " ".join(words)
        terms = [t for t, _ in analyze_text(value, fi.schema)]
        return snapshot.term_docset(field, terms[0]) if terms else snapshot.empty()
    terms = [t for w in words for t, _ in analyze_text(w, fi.schema)]
    if not terms:
        return snapshot.empty()
    if len(terms) == 1:
        return snapshot.term_docset(field, terms[0])
    return snapshot.phrase_docset(field, terms)


def evaluate(expr: QueryExpr, snapshot: IndexSnapshot) -> DocSet:
    """DocSet matched by ``expr``. NOT complements against the whole snapshot."""
    if isinstance(expr, All):
        return snapshot.all_docs()
    if isinstance(expr, Term):
        return _leaf_docs(snapshot, expr.field, [expr.term])
    if isinstance(expr, Phrase):
        return _leaf_docs(snapshot, expr.field, expr.terms)
    if isinstance(expr, And):
        return DocSet.intersect_all(evaluate(c, snapshot) for c in expr.children)
    if isinstance(expr, Or):
        acc = snapshot.empty()
        for c in expr.children:
            acc = acc | evaluate(c, snapshot)
        return acc
    if isinstance(expr, Not):
        return evaluate(expr.child, snapshot).complement()
    raise TypeError(f"not a query expression: {expr!r}")


def materialize(expr: QueryExpr | str, snapshot: IndexSnapshot) -> MaterializedNode:
    if isinstance(expr, str):
        expr = parse_query(expr)
    return MaterializedNode(expr, evaluate(expr, snapshot), print_query(expr))


def combine_starting_node(queries: Sequence[str | QueryExpr]) -> QueryExpr:
    """A list of starting-node queries means their conjunction."""
    exprs = [parse_query(q) if isinstance(q, str) else q for q in queries]
    if not exprs:
        raise ValueError("starting node needs at least one query")
    return exprs[0] if len(exprs) == 1 else And(exprs)
