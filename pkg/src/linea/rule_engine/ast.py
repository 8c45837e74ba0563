"""AST node types for the supported openCypher subset."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional, Tuple, Union


@dataclass(frozen=True)
class Literal:
    value: Any
    kind: str  # "int" | "float" | "string" | "bool" | "null"


@dataclass(frozen=True)
class ListLit:
    items: Tuple["Expr", ...]


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Prop:
    target: "Expr"
    key: str


@dataclass(frozen=True)
class Index:
    target: "Expr"
    index: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Expr", ...]


@dataclass(frozen=True)
class Unary:
    op: str  # "-" | "NOT"
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Literal, ListLit, Var, Prop, Index, Call, Unary, Binary]


@dataclass(frozen=True)
class NodePat:
    var: Optional[str] = None
    label: Optional[str] = None
    props: Optional[Tuple[Tuple[str, Expr], ...]] = None


@dataclass(frozen=True)
class RelPat:
    var: Optional[str] = None
    etype: Optional[str] = None
    direction: str = "out"  # "out" | "in" | "both"
    varlen: bool = False
    min_hops: int = 1
    max_hops: Optional[int] = 1


@dataclass(frozen=True)
class Pattern:
    nodes: Tuple[NodePat, ...]
    rels: Tuple[RelPat, ...] = ()
    path_var: Optional[str] = None


@dataclass(frozen=True)
class Match:
    patterns: Tuple[Pattern, ...]
    where: Optional[Expr] = None
    with_vars: Optional[Tuple[str, ...]] = None


@dataclass(frozen=True)
class Merge:
    node: NodePat


@dataclass(frozen=True)
class Create:
    pattern: Pattern


@dataclass(frozen=True)
class Return:
    items: Tuple[Expr, ...]


Statement = Union[Match, Merge, Create, Return]


@dataclass(frozen=True)
class Script:
    statements: Tuple[Statement, ...]

    def chains(self) -> list[list[Statement]]:
        """Split into clause chains; a chain closes after a mutation or RETURN
        once the next MATCH begins."""
        out: list[list[Statement]] = []
        cur: list[Statement] = []
        closed = False
        for st in self.statements:
            if isinstance(st, Match) and closed:
                out.append(cur)
                cur, closed = [], False
            cur.append(st)
            if isinstance(st, (Merge, Create, Return)):
                closed = True
        if cur:
            out.append(cur)
        return out


def expr_vars(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Literal):
        return set()
    if isinstance(e, ListLit):
        return set().union(*(expr_vars(x) for x in e.items)) if e.items else set()
    if isinstance(e, Prop):
        return expr_vars(e.target)
    if isinstance(e, Index):
        return expr_vars(e.target) | expr_vars(e.index)
    if isinstance(e, Call):
        return set().union(*(expr_vars(x) for x in e.args)) if e.args else set()
    if isinstance(e, Unary):
        return expr_vars(e.operand)
    if isinstance(e, Binary):
        return expr_vars(e.left) | expr_vars(e.right)
    raise TypeError(f"not an expression: {e!r}")


def pattern_vars(p: Pattern) -> list[str]:
    names = []
    if p.path_var:
        names.append(p.path_var)
    for n in p.nodes:
        if n.var:
            names.append(n.var)
    for r in p.rels:
        if r.var:
            names.append(r.var)
    return names
