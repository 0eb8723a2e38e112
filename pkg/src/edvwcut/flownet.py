"""Max-flow / min-cut on reduced graphs and projection back to hypergraphs.

The solver is a highest-label push-relabel with the gap heuristic and
periodic global relabelling.  Infinite arcs are never saturated: the set of
nodes joined to the source by infinite paths is contracted into the source
first, after which every arc leaving the source is finite and the total
flow is bounded.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import (
    EmptySeeds,
    GraphTooLarge,
    InfeasibleSeeds,
    OverlappingSeeds,
    SameTerminal,
)
from .hypergraph import Hypergraph
from .network import INF, FlowNetwork, NetworkBuilder
from .reduction import reduce_hypergraph
from .splitting import hypergraph_cut

BRUTE_FORCE_MAX_NODES = 22


@dataclass(frozen=True)
class CutResult:
    source_side: frozenset
    value: float
    flow_value: float

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


@dataclass(frozen=True)
class ProjectedCut:
    S: frozenset  # hypergraph vertex ids on the source side
    value: float  # cut value in the reduced graph
    hypergraph_value: float  # cut_H(S) under the requested splitting functions

    def names(self, H: Hypergraph) -> list[str]:
        return H.names(self.S)


def _inf_closure(G: FlowNetwork, s: int) -> set:
    out: dict[int, list[int]] = {}
    for u, v, c in G.arcs():
        if c == INF:
            out.setdefault(u, []).append(v)
    seen = {s}
    stack = [s]
    while stack:
        u = stack.pop()
        for v in out.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


class _Residual:
    """Arc-list residual graph; arc 2k is forward, 2k+1 its reverse."""

    def __init__(self, n, tails, heads, caps):
        self.n = n
        self.head = []
        self.res = []
        self.adj = [[] for _ in range(n)]
        for u, v, c in zip(tails, heads, caps):
            k = len(self.head)
            self.head += [v, u]
            self.res += [c, 0]
            self.adj[u].append(k)
            self.adj[v].append(k + 1)

    def reachable_from(self, s):
        seen = [False] * self.n
        seen[s] = True
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for a in self.adj[u]:
                v = self.head[a]
                if not seen[v] and self.res[a] > 0:
                    seen[v] = True
                    queue.append(v)
        return seen


def _push_relabel(R: _Residual, s: int, t: int):
    """Full push-relabel; leaves a maximum flow in ``R``, returns its value."""
    n = R.n
    head, res, adj = R.head, R.res, R.adj
    height = [0] * n
    excess = [0] * n
    current = [0] * n
    height[s] = n
    top = 2 * n
    buckets: list[list[int]] = [[] for _ in range(top + 1)]
    count = [0] * (top + 1)  # nodes per label below n, for the gap heuristic

    def global_relabel():
        new = [top] * n
        new[s] = n
        new[t] = 0
        for root, base in ((t, 0), (s, n)):
            queue = deque([root])
            while queue:
                v = queue.popleft()
                for a in adj[v]:
                    u = head[a]
                    # arc u -> v is a ^ 1
                    if new[u] == top and u != s and res[a ^ 1] > 0:
                        new[u] = new[v] + 1 if v != root or base == 0 else base + 1
                        queue.append(u)
        for lvl in range(top + 1):
            buckets[lvl].clear()
            count[lvl] = 0
        for v in range(n):
            height[v] = new[v]
            current[v] = 0
            if v not in (s, t):
                count[height[v]] += 1
                if excess[v] > 0 and height[v] < top:
                    buckets[height[v]].append(v)

    # saturate source arcs
    for a in adj[s]:
        c = res[a]
        if c > 0:
            v = head[a]
            res[a] = 0
            res[a ^ 1] += c
            excess[v] += c
            excess[s] -= c
    global_relabel()
    hi = top
    relabel_since = 0
    while True:
        while hi >= 0 and not buckets[hi]:
            hi -= 1
        if hi < 0:
            break
        u = buckets[hi].pop()
        if height[u] != hi or excess[u] <= 0:
            continue
        while excess[u] > 0:
            arcs = adj[u]
            i = current[u]
            if i < len(arcs):
                a = arcs[i]
                v = head[a]
                if res[a] > 0 and height[u] == height[v] + 1:
                    delta = excess[u] if excess[u] < res[a] else res[a]
                    res[a] -= delta
                    res[a ^ 1] += delta
                    excess[u] -= delta
                    was_idle = excess[v] <= 0
                    excess[v] += delta
                    if was_idle and v != s and v != t:
                        buckets[height[v]].append(v)
                        if height[v] > hi:
                            hi = height[v]
                else:
                    current[u] = i + 1
                continue
            # relabel
            old = height[u]
            new = top
            for a in arcs:
                if res[a] > 0:
                    h = height[head[a]] + 1
                    if h < new:
                        new = h
            current[u] = 0
            count[old] -= 1
            relabel_since += 1
            if old < n and count[old] == 0:
                # gap: nodes labelled between old and n can no longer reach t
                for v in range(n):
                    if v != s and v != t and old < height[v] < n:
                        count[height[v]] -= 1
                        height[v] = n + 1
                        count[n + 1] += 1
                        current[v] = 0
                        if excess[v] > 0:
                            buckets[n + 1].append(v)
                            hi = max(hi, n + 1)
                new = max(new, n + 1)
            height[u] = new
            count[new] += 1
            if new >= top:
                break  # cut off from both terminals
            if relabel_since >= n:
                relabel_since = 0
                global_relabel()
                hi = top
                break
        if excess[u] > 0 and height[u] < top:
            buckets[height[u]].append(u)
            hi = max(hi, height[u])
    return excess[t]


def _scaled(caps, digits):
    if digits is None:
        return list(caps)
    if not 0 <= digits <= 9:
        raise ValueError("scale_digits must be in [0, 9]")
    f = 10 ** digits
    return [c if c == INF else int(round(c * f)) for c in caps]


def max_flow_min_cut(G: FlowNetwork, s: int, t: int,
                     scale_digits: Optional[int] = None) -> CutResult:
    """Maximum s-t flow and the minimal (source-reachable) minimum cut.

    With ``scale_digits=k`` capacities are multiplied by ``10**k`` and
    rounded to integers so the flow is computed in exact arithmetic; the
    reported values are divided back.
    """
    if s == t:
        raise SameTerminal("source and sink must differ")
    n = G.n_nodes
    if not (0 <= s < n and 0 <= t < n):
        raise IndexError("terminal out of range")
    closure = _inf_closure(G, s)
    if t in closure:
        return CutResult(frozenset(closure), INF, INF)
    rep = list(range(n))
    for v in closure:
        rep[v] = s
    caps = _scaled(G.caps, scale_digits)
    tails, heads, keep = [], [], []
    for u, v, c in zip(G.tails, G.heads, caps):
        ru, rv = rep[u], rep[v]
        if ru != rv and c != 0 and rv != s and ru != t:
            tails.append(ru)
            heads.append(rv)
            keep.append(c)
    R = _Residual(n, tails, heads, keep)
    flow = _push_relabel(R, s, t)
    reach = R.reachable_from(s)
    side = frozenset(v for v in range(n) if reach[rep[v]])
    value = 0
    for u, v, c in zip(G.tails, G.heads, caps):
        if u in side and v not in side:
            value += c
    if scale_digits is not None:
        f = 10 ** scale_digits
        return CutResult(side, value / f, flow / f)
    return CutResult(side, float(value), float(flow))


def brute_force_min_cut(G: FlowNetwork, s: int, t: int) -> CutResult:
    """Exhaustive minimum over all bipartitions with s and t separated."""
    if s == t:
        raise SameTerminal("source and sink must differ")
    n = G.n_nodes
    if n > BRUTE_FORCE_MAX_NODES:
        raise GraphTooLarge(f"{n} nodes exceed the brute-force limit {BRUTE_FORCE_MAX_NODES}")
    free = [v for v in range(n) if v not in (s, t)]
    masks = np.arange(1 << len(free))
    side = {s: np.ones(masks.size, bool), t: np.zeros(masks.size, bool)}
    for i, v in enumerate(free):
        side[v] = ((masks >> i) & 1).astype(bool)
    total = np.zeros(masks.size)
    for u, v, c in G.arcs():
        cross = side[u] & ~side[v]
        total += np.where(cross, c, 0.0) if c == INF else cross * c
    best = float(total.min())
    # among optimal cuts report the one with the fewest nodes on the source side
    sizes = np.zeros(masks.size, dtype=int)
    for v in free:
        sizes += side[v]
    cand = np.flatnonzero(total == best)
    m = int(cand[np.argmin(sizes[cand])])
    src = frozenset([s] + [v for i, v in enumerate(free) if m >> i & 1])
    return CutResult(src, best, best)


def attach_terminals(G: FlowNetwork, sources: Iterable[int], sinks: Iterable[int]):
    """Add a super-source and super-sink tied to seed nodes by infinite arcs.

    Returns ``(G', s, t)``.
    """
    sources, sinks = list(dict.fromkeys(sources)), list(dict.fromkeys(sinks))
    if not sources or not sinks:
        raise EmptySeeds("both seed sets must be nonempty")
    both = set(sources) & set(sinks)
    if both:
        raise OverlappingSeeds(f"nodes {sorted(both)} are both sources and sinks")
    b = NetworkBuilder(G.vertex_names)
    b.nodes = list(G.nodes)
    b.tails, b.heads, b.caps = list(G.tails), list(G.heads), list(G.caps)
    s = b.terminal("source")
    t = b.terminal("sink")
    for v in sources:
        b.arc(s, v, INF)
    for v in sinks:
        b.arc(v, t, INF)
    return b.build(G.strategies), s, t


def network_min_st_cut(H: Hypergraph, G: FlowNetwork, specs, sources, sinks,
                       scale_digits: Optional[int] = None) -> ProjectedCut:
    """Seeded minimum cut on an already reduced network of ``H``."""
    src = H.vids(sources)
    snk = H.vids(sinks)
    if not src or not snk:
        raise EmptySeeds("both seed sets must be nonempty")
    both = src & snk
    if both:
        raise OverlappingSeeds(f"vertices {H.names(both)} are both sources and sinks")
    Gt, s, t = attach_terminals(G, [G.original(v) for v in sorted(src)],
                                [G.original(v) for v in sorted(snk)])
    cut = max_flow_min_cut(Gt, s, t, scale_digits)
    if not cut.finite:
        raise InfeasibleSeeds("every cut separating the seeds has infinite weight")
    S = frozenset(v for v, node in G.originals().items() if node in cut.source_side)
    return ProjectedCut(S, cut.value, hypergraph_cut(H, specs, S))


def hypergraph_min_st_cut(H: Hypergraph, specs, sources, sinks, mode: str = "exact",
                          epsilon: float = 0.1, scale_digits: Optional[int] = None,
                          **reduce_kwargs) -> ProjectedCut:
    """Minimum hypergraph cut with ``sources`` inside S and ``sinks`` outside.

    Seeds may be given as vertex names or ids.  In exact mode the value is
    the true optimum; in sparse mode it lies within ``[OPT, (1+eps) OPT]``.
    """
    G = reduce_hypergraph(H, specs, mode=mode, epsilon=epsilon, **reduce_kwargs)
    return network_min_st_cut(H, G, specs, sources, sinks, scale_digits)


def brute_force_hypergraph_cut(H: Hypergraph, specs, sources, sinks):
    """Minimum of cut_H(S) over all seed-respecting S, by enumeration."""
    src, snk = H.vids(sources), H.vids(sinks)
    free = [v for v in range(H.n) if v not in src and v not in snk]
    if len(free) > 20:
        raise GraphTooLarge(f"{len(free)} free vertices exceed the enumeration limit")
    best, best_S = INF, None
    for m in range(1 << len(free)):
        S = set(src) | {v for i, v in enumerate(free) if m >> i & 1}
        val = hypergraph_cut(H, specs, S)
        if val < best:
            best, best_S = val, frozenset(S)
    return best_S, best
