"""Hypergraphs with edge-dependent vertex weights (EDVWs).

A hyperedge ``e`` carries a positive weight ``kappa`` and a positive weight
``gamma[v]`` for every member ``v``; the same vertex may have different
weights in different hyperedges.  Vertices are interned to dense integer
ids; their external names are kept for I/O.

Text format (one record per line, ``#`` starts a comment)::

    v <name>
    e <id> <kappa> <name>:<gamma> <name>:<gamma> ...
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    DuplicateDeclaration,
    DuplicateMember,
    NonPositiveWeight,
    ParseError,
    UnknownVertex,
    VertexNotInEdge,
)


@dataclass(frozen=True)
class Hyperedge:
    id: str
    members: tuple[int, ...]
    gamma: tuple[float, ...]
    kappa: float = 1.0
    _pos: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_pos", {v: i for i, v in enumerate(self.members)})

    def __len__(self):
        return len(self.members)

    def __contains__(self, v):
        return v in self._pos

    @property
    def total(self) -> float:
        """gamma_e(e), the sum of all vertex weights of the hyperedge."""
        return math.fsum(self.gamma)

    def weight(self, v: int) -> float:
        try:
            return self.gamma[self._pos[v]]
        except KeyError:
            raise VertexNotInEdge(f"vertex {v} is not a member of hyperedge {self.id!r}") from None

    def member_mask(self, subset) -> int:
        """Bitmask (bit i <-> members[i]) of ``subset``."""
        mask = 0
        for v in subset:
            try:
                mask |= 1 << self._pos[v]
            except KeyError:
                raise VertexNotInEdge(
                    f"vertex {v} is not a member of hyperedge {self.id!r}"
                ) from None
        return mask

    def subset_of_mask(self, mask: int) -> frozenset:
        return frozenset(v for i, v in enumerate(self.members) if mask >> i & 1)


def gamma_sum(e: Hyperedge, subset) -> float:
    """Sum of ``e``'s vertex weights over ``subset``.

    Accumulates in member order so that repeated calls on equal sets are
    bit-identical regardless of how ``subset`` is ordered.
    """
    subset = set(subset)
    stray = subset.difference(e.members)
    if stray:
        raise VertexNotInEdge(
            f"vertices {sorted(stray)} are not members of hyperedge {e.id!r}"
        )
    total = 0.0
    for v, w in zip(e.members, e.gamma):
        if v in subset:
            total += w
    return total


def subset_sums(e: Hyperedge):
    """Array of gamma_e(S) for every bitmask S over ``e.members``.

    Built by doubling, which performs the additions in member order, so
    entry ``mask`` is bit-identical to :func:`gamma_sum` of that subset.
    """
    import numpy as np

    sums = np.zeros(1, dtype=float)
    for w in e.gamma:
        sums = np.concatenate([sums, sums + w])
    return sums


@dataclass(frozen=True)
class Hypergraph:
    vertices: tuple[str, ...]
    hyperedges: tuple[Hyperedge, ...]
    vertex_index: Mapping[str, int]

    @property
    def n(self) -> int:
        return len(self.vertices)

    def __len__(self):
        return len(self.hyperedges)

    def edge(self, edge_id: str) -> Hyperedge:
        for e in self.hyperedges:
            if e.id == edge_id:
                return e
        raise KeyError(edge_id)

    def vid(self, v) -> int:
        """Resolve a vertex name or id to its integer id."""
        if isinstance(v, str):
            try:
                return self.vertex_index[v]
            except KeyError:
                raise UnknownVertex(f"unknown vertex {v!r}") from None
        v = int(v)
        if not 0 <= v < len(self.vertices):
            raise UnknownVertex(f"unknown vertex id {v}")
        return v

    def vids(self, vs: Iterable) -> frozenset:
        return frozenset(self.vid(v) for v in vs)

    def names(self, ids: Iterable[int]) -> list[str]:
        return [self.vertices[i] for i in sorted(ids)]


def build_hypergraph(vertex_names: Sequence[str], edges: Iterable) -> Hypergraph:
    """Validate and intern a hypergraph.

    ``edges`` yields ``(edge_id, kappa, members)`` where ``members`` is either
    a mapping name -> gamma or a sequence of ``(name, gamma)`` pairs (the
    latter lets duplicate members be detected).
    """
    index: dict[str, int] = {}
    for name in vertex_names:
        name = str(name)
        if name in index:
            raise DuplicateDeclaration(f"vertex {name!r} declared twice")
        index[name] = len(index)

    seen_ids = set()
    hyperedges = []
    for edge_id, kappa, members in edges:
        edge_id = str(edge_id)
        if edge_id in seen_ids:
            raise DuplicateDeclaration(f"hyperedge {edge_id!r} declared twice")
        seen_ids.add(edge_id)
        kappa = float(kappa)
        if not kappa > 0 or not math.isfinite(kappa):
            raise NonPositiveWeight(f"hyperedge {edge_id!r} has non-positive weight {kappa}")
        pairs = members.items() if isinstance(members, Mapping) else members
        ids, gammas = [], []
        for name, w in pairs:
            try:
                v = index[str(name)]
            except KeyError:
                raise UnknownVertex(
                    f"hyperedge {edge_id!r} references undeclared vertex {name!r}"
                ) from None
            if v in ids:
                raise DuplicateMember(f"vertex {name!r} appears twice in hyperedge {edge_id!r}")
            w = float(w)
            if not w > 0 or not math.isfinite(w):
                raise NonPositiveWeight(
                    f"vertex {name!r} has non-positive weight {w} in hyperedge {edge_id!r}"
                )
            ids.append(v)
            gammas.append(w)
        if not ids:
            raise ParseError(f"hyperedge {edge_id!r} has no members")
        hyperedges.append(Hyperedge(edge_id, tuple(ids), tuple(gammas), kappa))

    return Hypergraph(tuple(index), tuple(hyperedges), dict(index))


def parse_hypergraph(text: str) -> Hypergraph:
    names: list[str] = []
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "v":
                if len(tok) != 2:
                    raise ValueError("expected 'v <name>'")
                names.append(tok[1])
            elif tok[0] == "e":
                if len(tok) < 4:
                    raise ValueError("expected 'e <id> <kappa> <name>:<gamma> ...'")
                members = []
                for item in tok[3:]:
                    name, sep, w = item.rpartition(":")
                    if not sep or not name:
                        raise ValueError(f"bad member {item!r}")
                    members.append((name, float(w)))
                edges.append((tok[1], float(tok[2]), members))
            else:
                raise ValueError(f"unknown record type {tok[0]!r}")
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    return build_hypergraph(names, edges)


def read_hypergraph(path) -> Hypergraph:
    with open(path) as fh:
        return parse_hypergraph(fh.read())


def format_hypergraph(H: Hypergraph) -> str:
    lines = [f"v {name}" for name in H.vertices]
    for e in H.hyperedges:
        members = " ".join(f"{H.vertices[v]}:{w:.17g}" for v, w in zip(e.members, e.gamma))
        lines.append(f"e {e.id} {e.kappa:.17g} {members}")
    return "\n".join(lines) + "\n"
