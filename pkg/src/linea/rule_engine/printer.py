"""Canonical pretty-printer; ``parse(to_text(s)) == s`` for every parsed script."""

from __future__ import annotations

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


def expr_text(e) -> str:
    if isinstance(e, Literal):
        if e.kind == "string":
            body = e.value.replace("\\", "\\\\").replace("'", "\\'").replace("\n", "\\n").replace("\t", "\\t")
            return f"'{body}'"
        if e.kind == "bool":
            return "true" if e.value else "false"
        if e.kind == "null":
            return "null"
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, ListLit):
        return "[" + ", ".join(expr_text(x) for x in e.items) + "]"
    if isinstance(e, Prop):
        return f"{_atom(e.target)}.{e.key}"
    if isinstance(e, Index):
        return f"{_atom(e.target)}[{expr_text(e.index)}]"
    if isinstance(e, Call):
        return f"{e.name}(" + ", ".join(expr_text(a) for a in e.args) + ")"
    if isinstance(e, Unary):
        sep = " " if e.op == "NOT" else ""
        return f"({e.op}{sep}{expr_text(e.operand)})"
    if isinstance(e, Binary):
        return f"({expr_text(e.left)} {e.op} {expr_text(e.right)})"
    raise TypeError(f"cannot print {e!r}")


def _atom(e) -> str:
    text = expr_text(e)
    if isinstance(e, Literal) and e.kind in ("int", "float"):
        # 1.x would lex as a float
        return f"({text})"
    return text


def node_text(n: NodePat) -> str:
    s = n.var or ""
    if n.label:
        s += f":{n.label}"
    if n.props is not None:
        s += " {" + ", ".join(f"{k}: {expr_text(v)}" for k, v in n.props) + "}"
    return f"({s})"


def rel_text(r: RelPat) -> str:
    inner = r.var or ""
    if r.etype:
        inner += f":{r.etype}"
    if r.varlen:
        inner += "*"
        if r.min_hops == r.max_hops:
            inner += str(r.min_hops)
        else:
            inner += f"{r.min_hops}.."
            if r.max_hops is not None:
                inner += str(r.max_hops)
    if r.direction == "out":
        return f"-[{inner}]->"
    if r.direction == "in":
        return f"<-[{inner}]-"
    return f"-[{inner}]-"


def pattern_text(p: Pattern) -> str:
    s = node_text(p.nodes[0])
    for r, n in zip(p.rels, p.nodes[1:]):
        s += rel_text(r) + node_text(n)
    if p.path_var:
        s = f"{p.path_var} = {s}"
    return s


def statement_text(st) -> str:
    if isinstance(st, Match):
        s = "MATCH " + ", ".join(pattern_text(p) for p in st.patterns)
        if st.where is not None:
            s += "\nWHERE " + expr_text(st.where)
        if st.with_vars is not None:
            s += "\nWITH " + ", ".join(st.with_vars)
        return s
    if isinstance(st, Merge):
        return "MERGE " + node_text(st.node)
    if isinstance(st, Create):
        return "CREATE " + pattern_text(st.pattern)
    if isinstance(st, Return):
        return "RETURN " + ", ".join(expr_text(e) for e in st.items)
    raise TypeError(f"cannot print {st!r}")


def to_text(script: Script) -> str:
    return "\n".join(statement_text(st) for st in script.statements) + "\n"
