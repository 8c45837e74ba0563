"""In-memory property graph: labeled nodes, typed directed edges, indexes.

Nodes and edges are addressed by dense engine-assigned integers. The store
keeps a label index, an edge-type index and per-node out/in adjacency split
by edge type, so pattern matching starts from an index instead of scanning.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping, Optional, Sequence

from .exceptions import UnknownNode

DIRECTIONS = ("out", "in", "both")


class Node:
    __slots__ = ("id", "labels", "props")

    def __init__(self, id: int, labels: frozenset, props: dict):
        self.id = id
        self.labels = labels
        self.props = props

    def __repr__(self) -> str:
        return f"Node({self.id}, {sorted(self.labels)}, {self.props})"


class Edge:
    __slots__ = ("id", "src", "dst", "type", "props")

    def __init__(self, id: int, src: int, dst: int, type: str, props: dict):
        self.id = id
        self.src = src
        self.dst = dst
        self.type = type
        self.props = props

    def __repr__(self) -> str:
        return f"Edge({self.id}, {self.src}-[:{self.type}]->{self.dst}, {self.props})"


def freeze_value(v: Any) -> Any:
    """Hashable structural key for a property value (lists stay ordered)."""
    t = type(v)
    if t is int or t is float or t is str:
        return v
    if isinstance(v, bool):
        return ("bool", v)
    if isinstance(v, (list, tuple)):
        return ("list", tuple(freeze_value(x) for x in v))
    return v


def _merge_key(labels: frozenset, props: Mapping[str, Any]) -> tuple:
    return (labels, frozenset((k, freeze_value(v)) for k, v in props.items()))


@dataclass(frozen=True)
class NodeSpec:
    label: Optional[str] = None
    props: Optional[Mapping[str, Any]] = None


@dataclass(frozen=True)
class RelSpec:
    etype: Optional[str] = None
    direction: str = "out"
    varlen: bool = False
    min_hops: int = 1
    max_hops: Optional[int] = 1
    props: Optional[Mapping[str, Any]] = None

    def __post_init__(self) -> None:
        if self.direction not in DIRECTIONS:
            raise ValueError(f"bad direction {self.direction!r}")


@dataclass(frozen=True)
class PathPattern:
    """Alternating chain ``node (rel node)*``."""

    nodes: tuple[NodeSpec, ...]
    rels: tuple[RelSpec, ...] = field(default=())

    def __post_init__(self) -> None:
        if len(self.nodes) != len(self.rels) + 1:
            raise ValueError("a path needs exactly one more node than relationships")


class PropertyGraph:
    def __init__(self) -> None:
        self.nodes: dict[int, Node] = {}
        self.edges: dict[int, Edge] = {}
        self._next_node = 0
        self._next_edge = 0
        # dicts used as insertion-ordered sets
        self._label_index: dict[str, dict[int, None]] = {}
        self._type_index: dict[str, dict[int, None]] = {}
        self._out: dict[int, dict[str, list[Edge]]] = {}
        self._in: dict[int, dict[str, list[Edge]]] = {}
        self._merge_index: dict[tuple, dict[int, None]] = {}

    # -- mutation ---------------------------------------------------------

    def add_node(self, labels: Iterable[str] = (), props: Optional[Mapping[str, Any]] = None) -> int:
        nid = self._next_node
        self._next_node += 1
        node = Node(nid, frozenset(labels), dict(props or {}))
        self.nodes[nid] = node
        for lab in node.labels:
            self._label_index.setdefault(lab, {})[nid] = None
        self._out[nid] = {}
        self._in[nid] = {}
        self._merge_index.setdefault(_merge_key(node.labels, node.props), {})[nid] = None
        return nid

    def add_edge(self, src: int, dst: int, etype: str, props: Optional[Mapping[str, Any]] = None) -> int:
        if src not in self.nodes:
            raise UnknownNode(src)
        if dst not in self.nodes:
            raise UnknownNode(dst)
        if not isinstance(etype, str) or not etype:
            raise ValueError("an edge needs exactly one non-empty type")
        eid = self._next_edge
        self._next_edge += 1
        edge = Edge(eid, src, dst, etype, dict(props or {}))
        self.edges[eid] = edge
        self._type_index.setdefault(etype, {})[eid] = None
        self._out[src].setdefault(etype, []).append(edge)
        self._in[dst].setdefault(etype, []).append(edge)
        return eid

    def set_prop(self, node_id: int, key: str, value: Any) -> None:
        node = self._node(node_id)
        old = _merge_key(node.labels, node.props)
        bucket = self._merge_index[old]
        del bucket[node_id]
        if not bucket:
            del self._merge_index[old]
        node.props[key] = value
        self._merge_index.setdefault(_merge_key(node.labels, node.props), {})[node_id] = None

    def merge_node(self, labels: Iterable[str], props: Optional[Mapping[str, Any]] = None) -> int:
        """Return the node with exactly these labels and equal props, creating it if absent."""
        labels = frozenset(labels)
        props = dict(props or {})
        key = _merge_key(labels, props)
        bucket = self._merge_index.get(key)
        if bucket:
            return min(bucket)
        return self.add_node(labels, props)

    # -- reads ------------------------------------------------------------

    def _node(self, node_id: int) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None

    def node(self, node_id: int) -> Node:
        return self._node(node_id)

    def get_prop(self, node_id: int, key: str, default: Any = None) -> Any:
        return self._node(node_id).props.get(key, default)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def nodes_by_label(self, label: str) -> list[int]:
        return list(self._label_index.get(label, ()))

    def edges_by_type(self, etype: str) -> list[int]:
        return list(self._type_index.get(etype, ()))

    def label_size(self, label: str) -> int:
        return len(self._label_index.get(label, ()))

    def type_size(self, etype: str) -> int:
        return len(self._type_index.get(etype, ()))

    def incident(self, node_id: int, etype: Optional[str], direction: str = "out") -> list[Edge]:
        """Edges leaving (``out``), entering (``in``) or touching (``both``) a node."""
        self._node(node_id)
        out: list[Edge] = []
        if direction in ("out", "both"):
            out.extend(_by_type(self._out[node_id], etype))
        if direction in ("in", "both"):
            for e in _by_type(self._in[node_id], etype):
                if direction == "both" and e.src == e.dst:
                    continue
                out.append(e)
        return out

    def neighbors(self, node_id: int, etype: Optional[str] = None, direction: str = "out") -> list[int]:
        self._node(node_id)
        return list(self._step(node_id, etype, direction))

    def reach_varlen(
        self,
        start: int,
        etype: Optional[str],
        min_hops: int = 1,
        max_hops: Optional[int] = None,
        direction: str = "out",
    ) -> set[int]:
        """Nodes reachable from ``start`` by a walk of ``min_hops..max_hops`` edges.

        Breadth-first over ``(node, min(depth, min_hops))`` states, so cycles
        terminate even when ``max_hops`` is unbounded.
        """
        self._node(start)
        if min_hops < 0 or (max_hops is not None and max_hops < min_hops):
            return set()
        result: set[int] = set()
        if min_hops == 0:
            result.add(start)
        seen = {(start, 0)}
        frontier = deque([(start, 0)])
        while frontier:
            nid, depth = frontier.popleft()
            if max_hops is not None and depth >= max_hops:
                continue
            nd = depth + 1
            key_depth = nd if max_hops is not None else min(nd, min_hops)
            for other in self._step(nid, etype, direction):
                if nd >= min_hops:
                    result.add(other)
                state = (other, key_depth)
                if state not in seen:
                    seen.add(state)
                    frontier.append(state)
        return result

    def _step(self, nid: int, etype: Optional[str], direction: str) -> Iterator[int]:
        if direction in ("out", "both"):
            for e in _by_type(self._out[nid], etype):
                yield e.dst
        if direction in ("in", "both"):
            for e in _by_type(self._in[nid], etype):
                yield e.src

    # -- pattern matching ---------------------------------------------------

    def match_path(
        self,
        pattern: PathPattern,
        bound: Optional[Mapping[int, int]] = None,
        exclude_edges: Sequence[Edge] = (),
    ) -> Iterator[tuple[tuple[Node, ...], tuple[Optional[Edge], ...]]]:
        """Yield every ``(nodes, edges)`` assignment matching ``pattern``.

        ``bound`` pins node positions to node ids. Enumeration starts from
        whichever constrained element has the smallest candidate set (a bound
        node, a label index or an edge-type index). Within one path distinct
        relationship positions bind distinct edges; ``exclude_edges`` extends
        that to edges already used elsewhere. Variable-length positions yield
        ``None`` in the edge tuple.
        """
        bound = dict(bound or {})
        for pos, nid in bound.items():
            if nid not in self.nodes:
                return
        n = len(pattern.nodes)
        best_size, kind, anchor = None, "node", 0
        for pos, spec in enumerate(pattern.nodes):
            if pos in bound:
                size = 1
            elif spec.label is not None:
                size = self.label_size(spec.label)
            else:
                size = len(self.nodes)
            if best_size is None or size < best_size:
                best_size, kind, anchor = size, "node", pos
        for r, rel in enumerate(pattern.rels):
            if rel.varlen or rel.etype is None:
                continue
            size = self.type_size(rel.etype)
            if size < best_size:
                best_size, kind, anchor = size, "rel", r

        nodes: list[Optional[Node]] = [None] * n
        edges: list[Optional[Edge]] = [None] * (n - 1)
        excluded = {e.id for e in exclude_edges}

        if kind == "node":
            steps = [(r, r, r + 1, True) for r in range(anchor, n - 1)]
            steps += [(r, r + 1, r, False) for r in range(anchor - 1, -1, -1)]
            if anchor in bound:
                seeds: Iterable[int] = (bound[anchor],)
            elif pattern.nodes[anchor].label is not None:
                seeds = self.nodes_by_label(pattern.nodes[anchor].label)
            else:
                seeds = list(self.nodes)
            for nid in seeds:
                node = self.nodes[nid]
                if not _node_ok(node, pattern.nodes[anchor]):
                    continue
                nodes[anchor] = node
                out: list = []
                self._expand(pattern, steps, 0, nodes, edges, bound, excluded, out)
                yield from out
            return

        r = anchor
        rel = pattern.rels[r]
        steps = [(q, q, q + 1, True) for q in range(r + 1, n - 1)]
        steps += [(q, q + 1, q, False) for q in range(r - 1, -1, -1)]
        for eid in self.edges_by_type(rel.etype):
            edge = self.edges[eid]
            if eid in excluded or not _props_ok(edge.props, rel.props):
                continue
            orients = []
            if rel.direction in ("out", "both"):
                orients.append((edge.src, edge.dst))
            if rel.direction in ("in", "both") and not (rel.direction == "both" and edge.src == edge.dst):
                orients.append((edge.dst, edge.src))
            for left, right in orients:
                if bound.get(r, left) != left or bound.get(r + 1, right) != right:
                    continue
                ln, rn = self.nodes[left], self.nodes[right]
                if not (_node_ok(ln, pattern.nodes[r]) and _node_ok(rn, pattern.nodes[r + 1])):
                    continue
                nodes[r], nodes[r + 1], edges[r] = ln, rn, edge
                out = []
                self._expand(pattern, steps, 0, nodes, edges, bound, excluded, out)
                yield from out
            edges[r] = None

    def _expand(self, pattern, steps, si, nodes, edges, bound, excluded, out):
        """Append every completion of the partial assignment to ``out``."""
        if si == len(steps):
            out.append((tuple(nodes), tuple(edges)))
            return
        r, frm, to, forward = steps[si]
        rel = pattern.rels[r]
        spec = pattern.nodes[to]
        cur = nodes[frm]
        want = bound.get(to)
        if rel.varlen:
            direction = rel.direction
            if direction != "both" and not forward:
                direction = "in" if direction == "out" else "out"
            reach = self.reach_varlen(cur.id, rel.etype, rel.min_hops, rel.max_hops, direction)
            for nid in sorted(reach):
                if want is not None and nid != want:
                    continue
                node = self.nodes[nid]
                if not _node_ok(node, spec):
                    continue
                nodes[to] = node
                self._expand(pattern, steps, si + 1, nodes, edges, bound, excluded, out)
            nodes[to] = None
            return
        follow_out = rel.direction == "both" or ((rel.direction == "out") == forward)
        follow_in = rel.direction == "both" or ((rel.direction == "in") == forward)
        cands: list[tuple[Edge, int]] = []
        if follow_out:
            cands.extend((e, e.dst) for e in _by_type(self._out[cur.id], rel.etype))
        if follow_in:
            for e in _by_type(self._in[cur.id], rel.etype):
                if rel.direction == "both" and e.src == e.dst:
                    continue
                cands.append((e, e.src))
        for edge, other in cands:
            if want is not None and other != want:
                continue
            if edge.id in excluded:
                continue
            for x in edges:
                if x is edge:
                    break
            else:
                x = None
            if x is not None:
                continue
            if not _props_ok(edge.props, rel.props):
                continue
            node = self.nodes[other]
            if not _node_ok(node, spec):
                continue
            nodes[to], edges[r] = node, edge
            self._expand(pattern, steps, si + 1, nodes, edges, bound, excluded, out)
        nodes[to], edges[r] = None, None

    # -- maintenance --------------------------------------------------------

    def copy(self) -> "PropertyGraph":
        g = PropertyGraph()
        for node in self.nodes.values():
            nid = g.add_node(node.labels, _deep_copy(node.props))
            assert nid == node.id
        for edge in self.edges.values():
            eid = g.add_edge(edge.src, edge.dst, edge.type, _deep_copy(edge.props))
            assert eid == edge.id
        return g

    def index_snapshot(self) -> dict[str, Any]:
        return {
            "labels": {k: sorted(v) for k, v in self._label_index.items() if v},
            "types": {k: sorted(v) for k, v in self._type_index.items() if v},
            "out": {n: {t: sorted(e.id for e in es) for t, es in d.items() if es} for n, d in self._out.items()},
            "in": {n: {t: sorted(e.id for e in es) for t, es in d.items() if es} for n, d in self._in.items()},
        }

    def rebuilt_index_snapshot(self) -> dict[str, Any]:
        """Indexes recomputed from the raw node/edge tables, for coherence checks."""
        labels: dict[str, list[int]] = {}
        types: dict[str, list[int]] = {}
        out: dict[int, dict[str, list[int]]] = {n: {} for n in self.nodes}
        inn: dict[int, dict[str, list[int]]] = {n: {} for n in self.nodes}
        for node in self.nodes.values():
            for lab in node.labels:
                labels.setdefault(lab, []).append(node.id)
        for e in self.edges.values():
            types.setdefault(e.type, []).append(e.id)
            out[e.src].setdefault(e.type, []).append(e.id)
            inn[e.dst].setdefault(e.type, []).append(e.id)
        return {
            "labels": {k: sorted(v) for k, v in labels.items()},
            "types": {k: sorted(v) for k, v in types.items()},
            "out": {n: {t: sorted(v) for t, v in d.items()} for n, d in out.items()},
            "in": {n: {t: sorted(v) for t, v in d.items()} for n, d in inn.items()},
        }

    def iter_jsonl(self) -> Iterator[str]:
        """Debug dump: one JSON object per node, then per edge, stable key order."""
        for node in self.nodes.values():
            yield json.dumps(
                {"kind": "node", "id": node.id, "labels": sorted(node.labels), "props": _sorted_props(node.props)}
            )
        for e in self.edges.values():
            yield json.dumps(
                {"kind": "edge", "id": e.id, "src": e.src, "dst": e.dst, "type": e.type, "props": _sorted_props(e.props)}
            )

    def dump_jsonl(self, fp) -> None:
        for line in self.iter_jsonl():
            fp.write(line + "\n")


def _by_type(adj: dict[str, list[Edge]], etype: Optional[str]) -> Iterable[Edge]:
    if etype is not None:
        return adj.get(etype, ())
    return [e for es in adj.values() for e in es]


def _props_ok(props: dict, want: Optional[Mapping[str, Any]]) -> bool:
    if not want:
        return True
    for k, v in want.items():
        if k not in props or freeze_value(props[k]) != freeze_value(v):
            return False
    return True


def _node_ok(node: Node, spec: NodeSpec) -> bool:
    if spec.label is not None and spec.label not in node.labels:
        return False
    return _props_ok(node.props, spec.props)


def _deep_copy(props: dict) -> dict:
    return {k: (list(v) if isinstance(v, list) else v) for k, v in props.items()}


def _sorted_props(props: Mapping[str, Any]) -> dict:
    return {k: props[k] for k in sorted(props)}
