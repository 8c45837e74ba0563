"""Hand-written lexer and recursive-descent parser for the rule language.

Grammar (keywords case-insensitive)::

    script    := statement+
    statement := match_st | merge_st | create_st | return_st
    match_st  := MATCH pattern ("," pattern)* [WHERE expr] [WITH ident ("," ident)*]
    pattern   := [ident "="] node (rel node)*
    node      := "(" [ident] [":" ident] [props] ")"
    rel       := "-[" inner "]->" | "<-[" inner "]-" | "-[" inner "]-"
    inner     := [ident] [":" ident] ["*" [int] [".." [int]]]
    props     := "{" ident ":" expr ("," ident ":" expr)* "}"
    merge_st  := MERGE node
    create_st := CREATE pattern
    return_st := RETURN expr ("," expr)*
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from ..exceptions import ParseError
from .ast import (
    Binary,
    Call,
    Create,
    Index,
    ListLit,
    Literal,
    Match,
    Merge,
    NodePat,
    Pattern,
    Prop,
    RelPat,
    Return,
    Script,
    Unary,
    Var,
)

KEYWORDS = {"MATCH", "WHERE", "WITH", "MERGE", "CREATE", "RETURN", "AND", "OR", "NOT", "TRUE", "FALSE", "NULL"}
STATEMENT_KEYWORDS = ("MATCH", "MERGE", "CREATE", "RETURN")

FUNCTION_ARITY = {"abs": 1, "size": 1, "list_intersection": 2}
FUNCTION_ALIASES = {"apoc.coll.intersection": "list_intersection"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<float>\d+\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>'(?:[^'\\\n]|\\.)*'|"(?:[^"\\\n]|\\.)*")
  | (?P<op><=|>=|<>|\.\.|[()\[\]{},:.*+\-/<>=])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", "'": "'", '"': '"'}


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT INT FLOAT STRING OP EOF
    text: str
    line: int
    col: int

    @property
    def upper(self) -> str:
        return self.text.upper()


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("ws", "comment"):
            pass
        else:
            tokens.append(Token(kind.upper() if kind != "op" else "OP", s, line, col))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


def _unescape(s: str) -> str:
    body = s[1:-1]
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\" and i + 1 < len(body):
            out.append(_ESCAPES.get(body[i + 1], body[i + 1]))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers --------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, expected, tok: Optional[Token] = None):
        tok = tok or self.tok
        what = "end of input" if tok.kind == "EOF" else repr(tok.text)
        raise ParseError(f"unexpected {what}", tok.line, tok.col, frozenset(expected))

    def is_op(self, text: str, tok: Optional[Token] = None) -> bool:
        tok = tok or self.tok
        return tok.kind == "OP" and tok.text == text

    def is_kw(self, kw: str, tok: Optional[Token] = None) -> bool:
        tok = tok or self.tok
        return tok.kind == "IDENT" and tok.upper == kw

    def expect_op(self, text: str) -> Token:
        if not self.is_op(text):
            self.error({f"'{text}'"})
        t = self.tok
        self.i += 1
        return t

    def expect_kw(self, kw: str) -> Token:
        if not self.is_kw(kw):
            self.error({kw})
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        if self.tok.kind != "IDENT" or self.tok.upper in KEYWORDS:
            self.error({"identifier"})
        t = self.tok
        self.i += 1
        return t.text

    def int_lit(self) -> int:
        if self.tok.kind != "INT":
            self.error({"integer"})
        t = self.tok
        self.i += 1
        return int(t.text)

    # -- statements -------------------------------------------------------------

    def script(self) -> Script:
        stmts = []
        while self.tok.kind != "EOF":
            stmts.append(self.statement())
        if not stmts:
            self.error(set(STATEMENT_KEYWORDS))
        return Script(tuple(stmts))

    def statement(self):
        if self.is_kw("MATCH"):
            return self.match_st()
        if self.is_kw("MERGE"):
            self.i += 1
            return Merge(self.node())
        if self.is_kw("CREATE"):
            self.i += 1
            return Create(self.pattern())
        if self.is_kw("RETURN"):
            self.i += 1
            items = [self.expr()]
            while self.is_op(","):
                self.i += 1
                items.append(self.expr())
            return Return(tuple(items))
        self.error(set(STATEMENT_KEYWORDS))

    def match_st(self) -> Match:
        self.expect_kw("MATCH")
        patterns = [self.pattern()]
        while self.is_op(","):
            self.i += 1
            patterns.append(self.pattern())
        where = None
        with_vars = None
        if self.is_kw("WHERE"):
            self.i += 1
            where = self.expr()
        if self.is_kw("WITH"):
            self.i += 1
            names = [self.ident()]
            while self.is_op(","):
                self.i += 1
                names.append(self.ident())
            with_vars = tuple(names)
        return Match(tuple(patterns), where, with_vars)

    def pattern(self) -> Pattern:
        path_var = None
        if self.tok.kind == "IDENT" and self.is_op("=", self.peek()):
            path_var = self.ident()
            self.i += 1
        nodes = [self.node()]
        rels = []
        while self.is_op("-") or (self.is_op("<") and self.is_op("-", self.peek())):
            rels.append(self.rel())
            nodes.append(self.node())
        return Pattern(tuple(nodes), tuple(rels), path_var)

    def node(self) -> NodePat:
        self.expect_op("(")
        var = label = props = None
        if self.tok.kind == "IDENT" and self.tok.upper not in KEYWORDS:
            var = self.ident()
        if self.is_op(":"):
            self.i += 1
            label = self.ident()
        if self.is_op("{"):
            props = self.props()
        if not self.is_op(")"):
            expected = {"')'"}
            if props is None:
                expected.add("'{'")
                if label is None:
                    expected.add("':'")
            self.error(expected)
        self.i += 1
        return NodePat(var, label, props)

    def props(self):
        self.expect_op("{")
        items = []
        while True:
            key = self.ident()
            self.expect_op(":")
            items.append((key, self.expr()))
            if self.is_op(","):
                self.i += 1
                continue
            break
        self.expect_op("}")
        return tuple(items)

    def rel(self) -> RelPat:
        left_arrow = False
        if self.is_op("<"):
            self.i += 1
            left_arrow = True
        self.expect_op("-")
        self.expect_op("[")
        var = etype = None
        varlen, lo, hi = False, 1, 1
        if self.tok.kind == "IDENT" and self.tok.upper not in KEYWORDS:
            var = self.ident()
        if self.is_op(":"):
            self.i += 1
            etype = self.ident()
        if self.is_op("*"):
            self.i += 1
            varlen, lo, hi = True, 1, None
            if self.tok.kind == "INT":
                lo = self.int_lit()
                hi = lo
            if self.is_op(".."):
                self.i += 1
                hi = self.int_lit() if self.tok.kind == "INT" else None
        if not self.is_op("]"):
            self.error({"']'", "'*'"} if not varlen else {"']'", "'..'"})
        self.i += 1
        self.expect_op("-")
        right_arrow = False
        if self.is_op(">"):
            self.i += 1
            right_arrow = True
        if left_arrow and right_arrow:
            self.error({"'-'"}, self.toks[self.i - 1])
        direction = "out" if right_arrow else ("in" if left_arrow else "both")
        if varlen and hi is not None and hi < lo:
            self.error({"upper hop bound >= lower"}, self.toks[self.i - 1])
        return RelPat(var, etype, direction, varlen, lo, hi)

    # -- expressions --------------------------------------------------------------

    def expr(self):
        return self.or_expr()

    def or_expr(self):
        left = self.and_expr()
        while self.is_kw("OR"):
            self.i += 1
            left = Binary("OR", left, self.and_expr())
        return left

    def and_expr(self):
        left = self.not_expr()
        while self.is_kw("AND"):
            self.i += 1
            left = Binary("AND", left, self.not_expr())
        return left

    def not_expr(self):
        if self.is_kw("NOT"):
            self.i += 1
            return Unary("NOT", self.not_expr())
        return self.comparison()

    def comparison(self):
        left = self.additive()
        while self.tok.kind == "OP" and self.tok.text in ("=", "<>", "<", "<=", ">", ">="):
            op = self.tok.text
            self.i += 1
            left = Binary(op, left, self.additive())
        return left

    def additive(self):
        left = self.multiplicative()
        while self.tok.kind == "OP" and self.tok.text in ("+", "-"):
            op = self.tok.text
            self.i += 1
            left = Binary(op, left, self.multiplicative())
        return left

    def multiplicative(self):
        left = self.unary()
        while self.tok.kind == "OP" and self.tok.text in ("*", "/"):
            op = self.tok.text
            self.i += 1
            left = Binary(op, left, self.unary())
        return left

    def unary(self):
        if self.is_op("-"):
            self.i += 1
            return Unary("-", self.unary())
        return self.postfix()

    def postfix(self):
        e = self.primary()
        while True:
            if self.is_op("."):
                self.i += 1
                e = Prop(e, self.ident())
            elif self.is_op("["):
                self.i += 1
                idx = self.expr()
                self.expect_op("]")
                e = Index(e, idx)
            else:
                return e

    def primary(self):
        t = self.tok
        if t.kind == "INT":
            self.i += 1
            return Literal(int(t.text), "int")
        if t.kind == "FLOAT":
            self.i += 1
            return Literal(float(t.text), "float")
        if t.kind == "STRING":
            self.i += 1
            return Literal(_unescape(t.text), "string")
        if self.is_op("("):
            self.i += 1
            e = self.expr()
            self.expect_op(")")
            return e
        if self.is_op("["):
            self.i += 1
            items = []
            if not self.is_op("]"):
                items.append(self.expr())
                while self.is_op(","):
                    self.i += 1
                    items.append(self.expr())
            self.expect_op("]")
            return ListLit(tuple(items))
        if t.kind == "IDENT":
            up = t.upper
            if up == "TRUE" or up == "FALSE":
                self.i += 1
                return Literal(up == "TRUE", "bool")
            if up == "NULL":
                self.i += 1
                return Literal(None, "null")
            if up in KEYWORDS:
                self.error({"expression"})
            return self.name_or_call()
        self.error({"expression"})

    def name_or_call(self):
        # a dotted chain followed by "(" is a function name, otherwise property access
        j = self.i
        parts = [self.toks[j].text]
        while self.is_op(".", self.toks[j + 1]) and self.toks[j + 2].kind == "IDENT":
            parts.append(self.toks[j + 2].text)
            j += 2
        if self.is_op("(", self.toks[j + 1]):
            start = self.tok
            self.i = j + 2
            name = ".".join(parts).lower()
            name = FUNCTION_ALIASES.get(name, name)
            if name not in FUNCTION_ARITY:
                raise ParseError(f"unknown function {'.'.join(parts)!r}", start.line, start.col,
                                 frozenset(FUNCTION_ARITY))
            args = []
            if not self.is_op(")"):
                args.append(self.expr())
                while self.is_op(","):
                    self.i += 1
                    args.append(self.expr())
            close = self.expect_op(")")
            if len(args) != FUNCTION_ARITY[name]:
                raise ParseError(
                    f"{name}() takes {FUNCTION_ARITY[name]} argument(s), got {len(args)}", close.line, close.col
                )
            return Call(name, tuple(args))
        self.i += 1
        return Var(parts[0])


def parse(text: str) -> Script:
    """Parse a rule script into a :class:`Script`; raises :class:`ParseError`."""
    return _Parser(text).script()


@lru_cache(maxsize=64)
def parse_cached(text: str) -> Script:
    return parse(text)


def parse_expr(text: str):
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "EOF":
        p.error({"end of input"})
    return e
