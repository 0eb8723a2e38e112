"""Directed capacitated networks with node provenance.

Infinite capacities are stored as ``math.inf``; undirected edges are two
opposing arcs of equal capacity.

Text format::

    n <index> orig:<vertex> | aux:<edge>:<k> | source | sink
    a <tail> <head> <capacity|inf>
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import ParseError

INF = math.inf


@dataclass(frozen=True)
class Node:
    kind: str  # "orig" | "aux" | "source" | "sink"
    vertex: Optional[int] = None
    edge: Optional[str] = None
    index: Optional[int] = None

    def label(self, names: Optional[Sequence[str]] = None) -> str:
        if self.kind == "orig":
            return f"orig:{names[self.vertex] if names is not None else self.vertex}"
        if self.kind == "aux":
            return f"aux:{self.edge}:{self.index}"
        return self.kind


@dataclass(frozen=True)
class EdgeReduction:
    """How one hyperedge was turned into gadgets."""

    edge_id: str
    gadget: str
    terms: int
    note: str = ""


@dataclass(frozen=True)
class FlowNetwork:
    nodes: tuple[Node, ...]
    tails: tuple[int, ...]
    heads: tuple[int, ...]
    caps: tuple[float, ...]
    strategies: tuple[EdgeReduction, ...] = ()
    vertex_names: Optional[tuple[str, ...]] = None
    _orig: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        orig = {}
        for i, node in enumerate(self.nodes):
            if node.kind == "orig":
                if node.vertex in orig:
                    raise ValueError(f"vertex {node.vertex} has two original nodes")
                orig[node.vertex] = i
        object.__setattr__(self, "_orig", orig)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_arcs(self) -> int:
        return len(self.caps)

    @property
    def n_aux(self) -> int:
        return sum(1 for node in self.nodes if node.kind == "aux")

    def original(self, vertex: int) -> int:
        return self._orig[vertex]

    def originals(self) -> dict:
        return dict(self._orig)

    def arcs(self):
        return zip(self.tails, self.heads, self.caps)

    def cut_value(self, source_side: Iterable[int]) -> float:
        """Total capacity of arcs leaving ``source_side``."""
        side = set(source_side)
        total = 0.0
        for u, v, c in self.arcs():
            if u in side and v not in side:
                total += c
        return total


class NetworkBuilder:
    def __init__(self, vertex_names=None):
        self.nodes: list[Node] = []
        self.tails: list[int] = []
        self.heads: list[int] = []
        self.caps: list[float] = []
        self._orig: dict[int, int] = {}
        self._aux_count: dict[str, int] = {}
        self.vertex_names = vertex_names

    def original(self, vertex: int) -> int:
        idx = self._orig.get(vertex)
        if idx is None:
            idx = self._orig[vertex] = len(self.nodes)
            self.nodes.append(Node("orig", vertex=vertex))
        return idx

    def aux(self, edge_id: str) -> int:
        k = self._aux_count.get(edge_id, 0)
        self._aux_count[edge_id] = k + 1
        self.nodes.append(Node("aux", edge=edge_id, index=k))
        return len(self.nodes) - 1

    def terminal(self, kind: str) -> int:
        self.nodes.append(Node(kind))
        return len(self.nodes) - 1

    def arc(self, u: int, v: int, cap: float):
        if u == v:
            raise ValueError("self-loops are not allowed")
        if not cap >= 0:
            raise ValueError(f"negative capacity {cap}")
        self.tails.append(u)
        self.heads.append(v)
        self.caps.append(float(cap))

    def edge(self, u: int, v: int, cap: float):
        self.arc(u, v, cap)
        self.arc(v, u, cap)

    def build(self, strategies=()) -> FlowNetwork:
        names = tuple(self.vertex_names) if self.vertex_names is not None else None
        return FlowNetwork(tuple(self.nodes), tuple(self.tails), tuple(self.heads),
                           tuple(self.caps), tuple(strategies), names)


def _fmt(c: float) -> str:
    return "inf" if c == INF else f"{c:.17g}"


def format_network(G: FlowNetwork) -> str:
    lines = [f"n {i} {node.label(G.vertex_names)}" for i, node in enumerate(G.nodes)]
    lines += [f"a {u} {v} {_fmt(c)}" for u, v, c in G.arcs()]
    return "\n".join(lines) + "\n"


def parse_network(text: str, vertex_index=None) -> FlowNetwork:
    """Read the flow-graph format.

    Original-node vertices are resolved through ``vertex_index`` when given,
    otherwise labels are interned in order of appearance.
    """
    nodes: list[Node] = []
    tails, heads, caps = [], [], []
    names: dict[str, int] = {} if vertex_index is None else dict(vertex_index)
    intern = vertex_index is None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "n":
                if len(tok) != 3 or int(tok[1]) != len(nodes):
                    raise ValueError("node records must be 'n <index> <provenance>' in order")
                prov = tok[2]
                if prov in ("source", "sink"):
                    nodes.append(Node(prov))
                elif prov.startswith("orig:"):
                    name = prov[5:]
                    if name not in names:
                        if not intern:
                            raise ValueError(f"unknown vertex {name!r}")
                        names[name] = len(names)
                    nodes.append(Node("orig", vertex=names[name]))
                elif prov.startswith("aux:"):
                    edge, _, k = prov[4:].rpartition(":")
                    nodes.append(Node("aux", edge=edge, index=int(k)))
                else:
                    raise ValueError(f"bad provenance {prov!r}")
            elif tok[0] == "a":
                if len(tok) != 4:
                    raise ValueError("arc records must be 'a <tail> <head> <capacity>'")
                u, v = int(tok[1]), int(tok[2])
                c = INF if tok[3] == "inf" else float(tok[3])
                if not (0 <= u < len(nodes) and 0 <= v < len(nodes)) or u == v or not c >= 0:
                    raise ValueError("arc endpoints must be distinct declared nodes, capacity >= 0")
                tails.append(u)
                heads.append(v)
                caps.append(c)
            else:
                raise ValueError(f"unknown record type {tok[0]!r}")
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    vertex_names = None
    if names:
        vertex_names = [None] * (max(names.values()) + 1)
        for name, i in names.items():
            vertex_names[i] = name
        if any(n is None for n in vertex_names):
            vertex_names = None
    return FlowNetwork(tuple(nodes), tuple(tails), tuple(heads), tuple(caps), (),
                       tuple(vertex_names) if vertex_names else None)
