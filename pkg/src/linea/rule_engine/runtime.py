"""Interpreter for parsed rule scripts against a :class:`PropertyGraph`.

Expressions are compiled once per statement into Python closures over a
binding row (``dict`` of variable name to value). MATCH evaluates each WHERE
conjunct as soon as every variable it mentions is bound, and joins a
single-node pattern through an inverted list index when a conjunct has the
form ``size(list_intersection(a.p, b.q)) >= k``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from ..exceptions import EvalError, MissingProperty, MutationInRead, TypeMismatch, UnboundVariable
from ..graph import Edge, Node, NodeSpec, PathPattern, PropertyGraph, RelSpec, freeze_value
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
    Return,
    Script,
    Unary,
    Var,
    expr_vars,
    pattern_vars,
)
from .printer import expr_text

Row = dict
Compiled = Callable[[Row], Any]


@dataclass(frozen=True)
class Path:
    """A matched path. Variable-length segments contribute only their endpoints."""

    nodes: tuple
    edges: tuple

    @property
    def start(self) -> Node:
        return self.nodes[0]

    @property
    def end(self) -> Node:
        return self.nodes[-1]


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[tuple]

    def canonical_rows(self) -> list[tuple]:
        return sorted(self.rows, key=lambda r: tuple(_sort_key(v) for v in r))


@dataclass
class ExecutionResult:
    tables: list[ResultTable] = field(default_factory=list)
    nodes_created: int = 0
    edges_created: int = 0

    @property
    def table(self) -> ResultTable:
        return self.tables[-1] if self.tables else ResultTable([], [])


def _sort_key(v):
    if isinstance(v, Node):
        return (0, v.id)
    if isinstance(v, Edge):
        return (1, v.id)
    if isinstance(v, Path):
        return (2, tuple(n.id for n in v.nodes))
    return (3, repr(v))


# -- value semantics -----------------------------------------------------------


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _kind(v) -> str:
    return type(v).__name__


def values_equal(a, b) -> bool:
    if isinstance(a, (Node, Edge)) or isinstance(b, (Node, Edge)):
        return a is b
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(values_equal(x, y) for x, y in zip(a, b))
    return a == b


def _order(op: str, a, b) -> bool:
    if not ((_is_num(a) and _is_num(b)) or (isinstance(a, str) and isinstance(b, str))):
        raise TypeMismatch(f"cannot compare {_kind(a)} {op} {_kind(b)}")
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    return a >= b


def _divide(a, b):
    if b == 0:
        if a == 0 or (isinstance(a, float) and math.isnan(a)):
            return math.nan
        return math.copysign(math.inf, a) * math.copysign(1.0, b)
    return a / b


def _arith(op: str, a, b):
    if op == "+":
        if _is_num(a) and _is_num(b):
            return a + b
        if isinstance(a, str) and isinstance(b, str):
            return a + b
        if isinstance(a, list) and isinstance(b, list):
            return a + b
        raise TypeMismatch(f"cannot add {_kind(a)} and {_kind(b)}")
    if not (_is_num(a) and _is_num(b)):
        raise TypeMismatch(f"operator {op} needs numbers, got {_kind(a)} and {_kind(b)}")
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    return _divide(a, b)


def list_intersection(a, b) -> list:
    """Elements of ``a`` also in ``b``, first-list order, duplicates dropped."""
    if not isinstance(a, list) or not isinstance(b, list):
        raise TypeMismatch(f"list_intersection needs two lists, got {_kind(a)} and {_kind(b)}")
    if all(type(x) is int for x in a) and all(type(x) is int for x in b):
        other = set(b)
        return [x for x in dict.fromkeys(a) if x in other]
    other = {freeze_value(x) for x in b}
    seen = set()
    out = []
    for x in a:
        k = freeze_value(x)
        if k in other and k not in seen:
            seen.add(k)
            out.append(x)
    return out


def _fn_abs(v):
    if not _is_num(v):
        raise TypeMismatch(f"abs() needs a number, got {_kind(v)}")
    return abs(v)


def _fn_size(v):
    if isinstance(v, (list, str)):
        return len(v)
    raise TypeMismatch(f"size() needs a list or string, got {_kind(v)}")


FUNCTIONS: dict[str, Callable] = {"abs": _fn_abs, "size": _fn_size, "list_intersection": list_intersection}


def _get_prop(target, key: str):
    if isinstance(target, (Node, Edge)):
        try:
            return target.props[key]
        except KeyError:
            raise MissingProperty(key) from None
    raise TypeMismatch(f"property access .{key} on {_kind(target)}")


# -- expression compilation ----------------------------------------------------


def compile_expr(e) -> Compiled:
    if isinstance(e, Literal):
        v = e.value
        return lambda row: v
    if isinstance(e, Var):
        name = e.name

        def var(row):
            try:
                return row[name]
            except KeyError:
                raise UnboundVariable(name) from None

        return var
    if isinstance(e, ListLit):
        items = [compile_expr(x) for x in e.items]
        return lambda row: [f(row) for f in items]
    if isinstance(e, Prop):
        key = e.key
        if isinstance(e.target, Var):
            name = e.target.name

            def prop_of_var(row):
                try:
                    target = row[name]
                except KeyError:
                    raise UnboundVariable(name) from None
                try:
                    return target.props[key]
                except KeyError:
                    raise MissingProperty(key) from None
                except AttributeError:
                    return _get_prop(target, key)

            return prop_of_var
        tf = compile_expr(e.target)
        return lambda row: _get_prop(tf(row), key)
    if isinstance(e, Index):
        tf, xf = compile_expr(e.target), compile_expr(e.index)

        def index(row):
            seq, i = tf(row), xf(row)
            if not isinstance(seq, list):
                raise TypeMismatch(f"cannot index {_kind(seq)}")
            if not isinstance(i, int) or isinstance(i, bool):
                raise TypeMismatch(f"list index must be an integer, got {_kind(i)}")
            if -len(seq) <= i < len(seq):
                return seq[i]
            raise MissingProperty(f"[{i}]")

        return index
    if isinstance(e, Call):
        fn = FUNCTIONS[e.name]
        args = [compile_expr(a) for a in e.args]
        if len(args) == 1:
            a0 = args[0]
            return lambda row: fn(a0(row))
        a0, a1 = args
        return lambda row: fn(a0(row), a1(row))
    if isinstance(e, Unary):
        of = compile_expr(e.operand)
        if e.op == "-":

            def neg(row):
                v = of(row)
                if not _is_num(v):
                    raise TypeMismatch(f"cannot negate {_kind(v)}")
                return -v

            return neg

        def not_(row):
            v = of(row)
            if not isinstance(v, bool):
                raise TypeMismatch(f"NOT needs a boolean, got {_kind(v)}")
            return not v

        return not_
    if isinstance(e, Binary):
        lf, rf = compile_expr(e.left), compile_expr(e.right)
        op = e.op
        if op in ("AND", "OR"):
            is_and = op == "AND"

            def logic(row):
                a = lf(row)
                if not isinstance(a, bool):
                    raise TypeMismatch(f"{op} needs booleans, got {_kind(a)}")
                if a is not is_and:
                    return a
                b = rf(row)
                if not isinstance(b, bool):
                    raise TypeMismatch(f"{op} needs booleans, got {_kind(b)}")
                return b

            return logic
        if op in ("=", "<>"):
            negate = op == "<>"

            def eq(row):
                try:
                    a, b = lf(row), rf(row)
                except MissingProperty:
                    return False
                return values_equal(a, b) is not negate

            return eq
        if op in ("<", "<=", ">", ">="):

            def cmp(row):
                try:
                    a, b = lf(row), rf(row)
                except MissingProperty:
                    return False
                if type(a) is float or type(a) is int:
                    if type(b) is float or type(b) is int:
                        if op == "<=":
                            return a <= b
                        if op == ">=":
                            return a >= b
                        if op == "<":
                            return a < b
                        return a > b
                return _order(op, a, b)

            return cmp

        def arith(row):
            a, b = lf(row), rf(row)
            if op == "-" and (type(a) is float or type(a) is int) and (type(b) is float or type(b) is int):
                return a - b
            return _arith(op, a, b)

        return arith
    raise TypeError(f"cannot compile {e!r}")


def eval_expr(e, bindings: Row, graph: Optional[PropertyGraph] = None):
    """Evaluate one expression against a binding row."""
    return compile_expr(e)(bindings)


# -- MATCH -------------------------------------------------------------------------


def _conjuncts(e) -> list:
    if e is None:
        return []
    if isinstance(e, Binary) and e.op == "AND":
        return _conjuncts(e.left) + _conjuncts(e.right)
    return [e]


@dataclass
class _Conjunct:
    fn: Compiled
    vars: frozenset
    expr: Any


@dataclass
class _OverlapJoin:
    """``size(list_intersection(bound.p, new.q)) >= need`` usable as an index join."""

    bound_var: str
    bound_prop: str
    new_prop: str
    need: int


def _overlap_join(expr, new_var: str) -> Optional[_OverlapJoin]:
    if not (isinstance(expr, Binary) and expr.op in (">=", ">")):
        return None
    lhs, rhs = expr.left, expr.right
    if not (isinstance(rhs, Literal) and rhs.kind == "int"):
        return None
    need = rhs.value if expr.op == ">=" else rhs.value + 1
    if need < 1:
        return None
    if not (isinstance(lhs, Call) and lhs.name == "size" and isinstance(lhs.args[0], Call)):
        return None
    inner = lhs.args[0]
    if inner.name != "list_intersection":
        return None
    a, b = inner.args
    if not all(isinstance(x, Prop) and isinstance(x.target, Var) for x in (a, b)):
        return None
    if b.target.name == new_var and a.target.name != new_var:
        return _OverlapJoin(a.target.name, a.key, b.key, need)
    if a.target.name == new_var and b.target.name != new_var:
        return _OverlapJoin(b.target.name, b.key, a.key, need)
    return None


class _CompiledPattern:
    def __init__(self, p: Pattern):
        self.p = p
        self.node_vars = [n.var for n in p.nodes]
        self.rel_vars = [r.var for r in p.rels]
        self.node_props = [
            None if n.props is None else [(k, compile_expr(v)) for k, v in n.props] for n in p.nodes
        ]
        self.static_nodes = tuple(NodeSpec(n.label, None) for n in p.nodes)
        self.rels = tuple(
            RelSpec(r.etype, r.direction, r.varlen, r.min_hops, r.max_hops) for r in p.rels
        )
        self.has_props = any(x is not None for x in self.node_props)
        self.static_pattern = PathPattern(self.static_nodes, self.rels)
        # positions of a variable repeated inside this pattern
        self.repeats: list[tuple[int, int]] = []
        first: dict[str, int] = {}
        for pos, v in enumerate(self.node_vars):
            if v is None:
                continue
            if v in first:
                self.repeats.append((first[v], pos))
            else:
                first[v] = pos
        self.single = len(p.nodes) == 1
        self.has_varlen = any(r.varlen for r in p.rels)
        self.node_slots = [(pos, v) for pos, v in enumerate(self.node_vars) if v is not None]
        self.rel_slots = [(pos, v) for pos, v in enumerate(self.rel_vars) if v is not None]

    def spec_for(self, row: Row) -> PathPattern:
        if not self.has_props:
            return self.static_pattern
        nodes = []
        for n, props in zip(self.p.nodes, self.node_props):
            if props is None:
                nodes.append(NodeSpec(n.label, None))
            else:
                nodes.append(NodeSpec(n.label, {k: f(row) for k, f in props}))
        return PathPattern(tuple(nodes), self.rels)


class Executor:
    def __init__(self, graph: PropertyGraph, create_reverse: bool = False):
        self.g = graph
        self.create_reverse = create_reverse

    def run(self, script: Script) -> ExecutionResult:
        _check_bindings(script)
        result = ExecutionResult()
        rows: list[Row] = [{}]
        state = "start"
        for st in script.statements:
            if isinstance(st, Match):
                if state in ("updated", "returned"):
                    rows = [{}]
                rows = self._match(st, rows)
                state = "read"
            elif isinstance(st, Merge):
                if state == "returned":
                    raise MutationInRead("MERGE after RETURN")
                rows = self._merge(st, rows, result)
                state = "updated"
            elif isinstance(st, Create):
                if state == "returned":
                    raise MutationInRead("CREATE after RETURN")
                rows = self._create(st, rows, result)
                state = "updated"
            elif isinstance(st, Return):
                fns = [compile_expr(e) for e in st.items]
                table = ResultTable([expr_text(e) for e in st.items], [tuple(f(r) for f in fns) for r in rows])
                result.tables.append(table)
                state = "returned"
        return result

    # MATCH ---------------------------------------------------------------

    def _match(self, st: Match, rows: list[Row]) -> list[Row]:
        conj = [_Conjunct(compile_expr(c), frozenset(expr_vars(c)), c) for c in _conjuncts(st.where)]
        pending = list(conj)
        bound_now: set[str] = set(rows[0]) if rows else set()
        current = [(r, ()) for r in rows]
        ready = [c for c in pending if c.vars <= bound_now]
        pending = [c for c in pending if c not in ready]
        current = [(r, u) for r, u in current if all(c.fn(r) is True for c in ready)]
        for p in st.patterns:
            cp = _CompiledPattern(p)
            new_vars = set(pattern_vars(p)) - bound_now
            bound_now |= set(pattern_vars(p))
            ready = [c for c in pending if c.vars <= bound_now]
            pending = [c for c in pending if c not in ready]
            join = None
            if cp.single and p.nodes[0].var and p.nodes[0].var in new_vars:
                for c in ready:
                    join = _overlap_join(c.expr, p.nodes[0].var)
                    if join is not None and join.bound_var in bound_now - new_vars:
                        break
                    join = None
            index = self._overlap_index(p.nodes[0].label, join.new_prop) if join else None
            nxt = []
            for row, used in current:
                if join is not None:
                    matches = self._match_overlap(cp, row, join, index)
                else:
                    matches = self._match_pattern(cp, row, used)
                checks = [c.fn for c in ready]
                for add, edges in matches:
                    if row:
                        new_row = dict(row)
                        new_row.update(add)
                    else:
                        new_row = add
                    for fn in checks:
                        if fn(new_row) is not True:
                            break
                    else:
                        nxt.append((new_row, used + edges if edges else used))
            current = nxt
        if pending:
            names = sorted(set().union(*(c.vars for c in pending)) - bound_now)
            raise UnboundVariable(", ".join(names))
        out = [r for r, _ in current]
        if st.with_vars is not None:
            keep = st.with_vars
            out = [{k: r[k] for k in keep} for r in out]
        return out

    def _match_pattern(self, cp: _CompiledPattern, row: Row, used: tuple):
        p = cp.p
        bound = {}
        for pos, v in enumerate(cp.node_vars):
            if v is not None and v in row:
                val = row[v]
                if not isinstance(val, Node):
                    raise TypeMismatch(f"variable {v} is bound to {_kind(val)}, not a node")
                bound[pos] = val.id
        spec = cp.spec_for(row)
        repeats, node_slots, rel_slots = cp.repeats, cp.node_slots, cp.rel_slots
        rel_bound = [(pos, v) for pos, v in rel_slots if v in row]
        path_var = p.path_var
        for nodes, edges in self.g.match_path(spec, bound, used):
            if repeats and any(nodes[a] is not nodes[b] for a, b in repeats):
                continue
            if rel_bound and any(row[v] is not edges[pos] for pos, v in rel_bound):
                continue
            add = {v: nodes[pos] for pos, v in node_slots}
            for pos, v in rel_slots:
                add[v] = edges[pos]
            if path_var:
                add[path_var] = Path(tuple(nodes), tuple(edges))
            if cp.has_varlen:
                yield add, tuple(e for e in edges if e is not None)
            else:
                yield add, edges

    def _overlap_index(self, label: Optional[str], prop: str) -> dict:
        index: dict[Any, list[int]] = {}
        ids = self.g.nodes_by_label(label) if label is not None else list(self.g.nodes)
        for nid in ids:
            val = self.g.nodes[nid].props.get(prop)
            if not isinstance(val, list):
                continue
            for k in {freeze_value(x) for x in val}:
                index.setdefault(k, []).append(nid)
        return index

    def _match_overlap(self, cp: _CompiledPattern, row: Row, join: _OverlapJoin, index: dict):
        src = row[join.bound_var]
        vals = src.props.get(join.bound_prop) if isinstance(src, (Node, Edge)) else None
        if not isinstance(vals, list):
            return
        counts: Counter = Counter()
        for k in {freeze_value(x) for x in vals}:
            for nid in index.get(k, ()):
                counts[nid] += 1
        spec = cp.spec_for(row).nodes[0]
        var = cp.node_vars[0]
        for nid in sorted(n for n, c in counts.items() if c >= join.need):
            node = self.g.nodes[nid]
            if spec.label is not None and spec.label not in node.labels:
                continue
            if spec.props and any(
                k not in node.props or not values_equal(node.props[k], v) for k, v in spec.props.items()
            ):
                continue
            add = {var: node}
            if cp.p.path_var:
                add[cp.p.path_var] = Path((node,), ())
            yield add, ()

    # MERGE / CREATE --------------------------------------------------------

    def _merge(self, st: Merge, rows: list[Row], result: ExecutionResult) -> list[Row]:
        n = st.node
        props = [(k, compile_expr(v)) for k, v in (n.props or ())]
        labels = [n.label] if n.label else []
        out = []
        for row in rows:
            before = self.g.node_count
            nid = self.g.merge_node(labels, {k: f(row) for k, f in props})
            result.nodes_created += self.g.node_count - before
            new_row = dict(row)
            if n.var:
                new_row[n.var] = self.g.nodes[nid]
            out.append(new_row)
        return out

    def _create(self, st: Create, rows: list[Row], result: ExecutionResult) -> list[Row]:
        p = st.pattern
        node_props = [[(k, compile_expr(v)) for k, v in (n.props or ())] for n in p.nodes]
        for r in p.rels:
            if r.direction == "both":
                raise EvalError("CREATE needs a directed relationship")
            if r.varlen or not r.etype:
                raise EvalError("CREATE needs a single typed relationship")
        out = []
        for row in rows:
            new_row = dict(row)
            nodes: list[Node] = []
            for n, props in zip(p.nodes, node_props):
                if n.var and n.var in new_row:
                    val = new_row[n.var]
                    if not isinstance(val, Node):
                        raise TypeMismatch(f"variable {n.var} is bound to {_kind(val)}, not a node")
                    nodes.append(val)
                    continue
                nid = self.g.add_node([n.label] if n.label else [], {k: f(new_row) for k, f in props})
                result.nodes_created += 1
                node = self.g.nodes[nid]
                if n.var:
                    new_row[n.var] = node
                nodes.append(node)
            for r, a, b in zip(p.rels, nodes, nodes[1:]):
                src, dst = (a, b) if r.direction == "out" else (b, a)
                eid = self.g.add_edge(src.id, dst.id, r.etype)
                result.edges_created += 1
                if self.create_reverse:
                    self.g.add_edge(dst.id, src.id, r.etype)
                    result.edges_created += 1
                if r.var:
                    new_row[r.var] = self.g.edges[eid]
            out.append(new_row)
        return out


def _check_bindings(script: Script) -> None:
    """Static check that every referenced variable is bound earlier in its chain."""
    bound: set[str] = set()
    state = "start"
    for st in script.statements:
        if isinstance(st, Match):
            if state in ("updated", "returned"):
                bound = set()
            for p in st.patterns:
                for n in p.nodes:
                    for _, v in n.props or ():
                        _require(expr_vars(v), bound | set(pattern_vars(p)))
                bound |= set(pattern_vars(p))
            if st.where is not None:
                _require(expr_vars(st.where), bound)
            if st.with_vars is not None:
                _require(set(st.with_vars), bound)
                bound = set(st.with_vars)
            state = "read"
        elif isinstance(st, Merge):
            for _, v in st.node.props or ():
                _require(expr_vars(v), bound)
            if st.node.var:
                bound.add(st.node.var)
            state = "updated"
        elif isinstance(st, Create):
            for n in st.pattern.nodes:
                for _, v in n.props or ():
                    _require(expr_vars(v), bound)
            bound |= set(pattern_vars(st.pattern))
            state = "updated"
        elif isinstance(st, Return):
            for e in st.items:
                _require(expr_vars(e), bound)
            state = "returned"


def _require(names: set[str], bound: set[str]) -> None:
    missing = sorted(set(names) - bound)
    if missing:
        raise UnboundVariable(", ".join(missing))


def execute(script: Script, graph: PropertyGraph, create_reverse: bool = False) -> ExecutionResult:
    """Run ``script`` against ``graph``, mutating it for MERGE/CREATE."""
    return Executor(graph, create_reverse).run(script)
