"""Hyperedge-to-graph reductions.

Single gadgets (clique, star, symmetric, asymmetric, Lawler), the
brute-force gadget splitting function used as a verification oracle, the
breakpoint sets Q_s / Q_a, the exact decomposition of a concave generator
into a non-negative combination of gadgets, and the whole-hypergraph
reducer.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (
    AsymmetricGenerator,
    EdgeTooLarge,
    EdgeTooSmall,
    EdvwError,
    FamilyError,
    InfiniteInitialSlope,
    NegativeCoefficient,
    TooManyAuxiliaries,
)
from .hypergraph import Hyperedge, Hypergraph, subset_sums
from .network import INF, EdgeReduction, FlowNetwork, NetworkBuilder
from .splitting import Family, SplittingSpec, generator, resolve_specs
from .sparsify import (
    PiecewiseLinear,
    envelope_to_asym_params,
    pwl_to_gadget_params,
    sparsify_continuous,
    sparsify_discrete,
)

log = logging.getLogger(__name__)

MAX_EDGE_SIZE = 20
MAX_TERMS = 4096
MAX_AUX_PER_COMPONENT = 20
MERGE_RTOL = 1e-9
COEF_TOL = 1e-9


# -- single gadgets ----------------------------------------------------------

def _members(builder: NetworkBuilder, e: Hyperedge):
    return [builder.original(v) for v in e.members]


def _new_builder(e: Hyperedge) -> NetworkBuilder:
    b = NetworkBuilder()
    _members(b, e)
    return b


def add_clique(builder, e: Hyperedge, scale: float = 1.0):
    nodes = _members(builder, e)
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            builder.edge(nodes[i], nodes[j], scale * e.gamma[i] * e.gamma[j])


def add_star(builder, e: Hyperedge, scale: float = 1.0):
    nodes = _members(builder, e)
    hub = builder.aux(e.id)
    for node, w in zip(nodes, e.gamma):
        builder.edge(node, hub, scale * w)


def add_sym(builder, e: Hyperedge, b: float, scale: float = 1.0):
    nodes = _members(builder, e)
    e1, e2 = builder.aux(e.id), builder.aux(e.id)
    for node, w in zip(nodes, e.gamma):
        builder.arc(node, e1, scale * w)
        builder.arc(e2, node, scale * w)
    builder.arc(e1, e2, scale * b)


def add_asym(builder, e: Hyperedge, a: float, b: float):
    nodes = _members(builder, e)
    hub = builder.aux(e.id)
    for node, w in zip(nodes, e.gamma):
        builder.arc(node, hub, a * w)
        builder.arc(hub, node, b * w)


def add_lawler(builder, e: Hyperedge, kappa: Optional[float] = None):
    nodes = _members(builder, e)
    e1, e2 = builder.aux(e.id), builder.aux(e.id)
    for node in nodes:
        builder.arc(node, e1, INF)
        builder.arc(e2, node, INF)
    builder.arc(e1, e2, e.kappa if kappa is None else kappa)


def expand_clique(e: Hyperedge, scale: float = 1.0) -> FlowNetwork:
    """Undirected clique with edge weights gamma(u) * gamma(v)."""
    if len(e) < 2:
        raise EdgeTooSmall(f"hyperedge {e.id!r} needs at least two members for a clique")
    b = _new_builder(e)
    add_clique(b, e, scale)
    return b.build()


def expand_star(e: Hyperedge, scale: float = 1.0) -> FlowNetwork:
    """Undirected star around one auxiliary hub, spoke weights gamma(v)."""
    b = _new_builder(e)
    add_star(b, e, scale)
    return b.build()


def expand_sym(e: Hyperedge, b: float, scale: float = 1.0) -> FlowNetwork:
    """Symmetric gadget: v -> e' and e'' -> v at gamma(v), e' -> e'' at b."""
    if not b > 0 or scale < 0:
        raise ValueError("need b > 0 and scale >= 0")
    bl = _new_builder(e)
    add_sym(bl, e, b, scale)
    return bl.build()


def expand_asym(e: Hyperedge, a: float, b: float) -> FlowNetwork:
    """Asymmetric gadget: v -> v_e at a*gamma(v), v_e -> v at b*gamma(v)."""
    if not (a > 0 and b > 0):
        raise ValueError("need a > 0 and b > 0")
    bl = _new_builder(e)
    add_asym(bl, e, a, b)
    return bl.build()


def expand_lawler(e: Hyperedge, kappa: Optional[float] = None) -> FlowNetwork:
    """Lawler gadget realising the all-or-nothing penalty kappa."""
    kappa = e.kappa if kappa is None else kappa
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    bl = _new_builder(e)
    add_lawler(bl, e, kappa)
    return bl.build()


# -- gadget-cut oracle -------------------------------------------------------

def _aux_components(G: FlowNetwork):
    aux = [i for i, node in enumerate(G.nodes) if node.kind == "aux"]
    parent = {i: i for i in aux}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for u, v, _ in G.arcs():
        if u in parent and v in parent:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
    groups: dict[int, list[int]] = {}
    for i in aux:
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _crossing(side_u, side_v, cap):
    cross = side_u & ~side_v
    if cap == INF:
        return np.where(cross, INF, 0.0)
    return cross * cap


def gadget_split_values(G: FlowNetwork, e: Hyperedge) -> np.ndarray:
    """Gadget splitting function of ``G`` for every bitmask subset of e.

    For each S the auxiliary nodes are placed on whichever sides minimise
    the directed cut, by exhaustive enumeration.  Auxiliary nodes that are
    not linked to each other are placed independently, so combinations of
    many small gadgets stay tractable.
    """
    n = len(e)
    masks = np.arange(1 << n)
    orig = G.originals()
    for v in orig:
        if v not in e:
            raise ValueError(f"network has an original node for non-member vertex {v}")
    # side of each original node, per subset mask
    pos = {orig[v]: i for i, v in enumerate(e.members) if v in orig}
    orig_side = {node: ((masks >> i) & 1).astype(bool) for node, i in pos.items()}
    comps = _aux_components(G)
    comp_of = {}
    for c, nodes in enumerate(comps):
        if len(nodes) > MAX_AUX_PER_COMPONENT:
            raise TooManyAuxiliaries(
                f"{len(nodes)} linked auxiliary nodes exceed {MAX_AUX_PER_COMPONENT}"
            )
        for k, node in enumerate(nodes):
            comp_of[node] = (c, k)

    total = np.zeros(1 << n)
    comp_arcs: list[list] = [[] for _ in comps]
    for u, v, c in G.arcs():
        if u in orig_side and v in orig_side:
            total += _crossing(orig_side[u], orig_side[v], c)
        else:
            comp_arcs[comp_of[u if u in comp_of else v][0]].append((u, v, c))

    for c, nodes in enumerate(comps):
        k = len(nodes)
        place = (np.arange(1 << k)[:, None] >> np.arange(k)) & 1
        place = place.astype(bool)
        cost = np.zeros((1 << n, 1 << k))

        def side(node):
            if node in orig_side:
                return orig_side[node][:, None]
            return place[:, comp_of[node][1]][None, :]

        for u, v, cap in comp_arcs[c]:
            cost = cost + _crossing(side(u), side(v), cap)
        total += cost.min(axis=1)
    return total


def gadget_split_value(G: FlowNetwork, e: Hyperedge, subset) -> float:
    """Minimum cut of ``G`` over auxiliary placements consistent with S."""
    return float(gadget_split_values(G, e)[e.member_mask(subset)])


# -- breakpoint sets ---------------------------------------------------------

def _merge_sorted(values: np.ndarray, tol: float) -> np.ndarray:
    """Sorted distinct values; runs closer than ``tol`` keep their smallest."""
    if values.size == 0:
        return values
    values = np.sort(values)
    keep = np.concatenate([[True], np.diff(values) > tol])
    return values[keep]


def enumerate_Qa(e: Hyperedge, max_size: int = MAX_EDGE_SIZE) -> np.ndarray:
    """Distinct gamma_e(S) over proper nonempty subsets, ascending."""
    if len(e) > max_size:
        raise EdgeTooLarge(f"hyperedge {e.id!r} has {len(e)} members (limit {max_size})")
    if len(e) < 2:
        return np.zeros(0)
    sums = subset_sums(e)[1:-1]
    return _merge_sorted(sums, MERGE_RTOL * e.total)


def enumerate_Qs(e: Hyperedge, max_size: int = MAX_EDGE_SIZE) -> np.ndarray:
    """The elements of Q_a not exceeding gamma_e(e) / 2."""
    qa = enumerate_Qa(e, max_size)
    total = e.total
    return qa[qa <= total / 2 + MERGE_RTOL * total]


# -- exact gadget combinations -------------------------------------------------

@dataclass(frozen=True)
class GadgetCombination:
    """Non-negative combination of symmetric or asymmetric gadgets."""

    edge_id: str
    mode: str  # "symmetric" | "asymmetric"
    terms: tuple[tuple[float, float], ...]  # (a_i, b_i), b_i strictly increasing
    total: float
    raw: tuple[float, ...] = ()  # coefficients before clamping/pruning

    def __len__(self):
        return len(self.terms)

    def value(self, x: float) -> float:
        """Continuous extension of the combined splitting function."""
        T = self.total
        if self.mode == "symmetric":
            return sum(a * min(x, T - x, b) for a, b in self.terms)
        return sum(a * min((T - b) * x, b * (T - x)) for a, b in self.terms)

    def add_to(self, builder: NetworkBuilder, e: Hyperedge):
        for a, b in self.terms:
            if self.mode == "symmetric":
                add_sym(builder, e, b, a)
            else:
                add_asym(builder, e, a * (self.total - b), a * b)

    def expand(self, e: Hyperedge) -> FlowNetwork:
        bl = _new_builder(e)
        self.add_to(bl, e)
        return bl.build()


def _as_generator(e: Hyperedge, g) -> Callable[[float], float]:
    if isinstance(g, SplittingSpec):
        return generator(g, e)[0]
    return g


def slope_drops(b: np.ndarray, w: np.ndarray, end_slope: float) -> np.ndarray:
    """Coefficients of the tridiagonal inverse, row by row.

    With ``b_0 = 0, w_0 = 0`` and chord slopes ``s_i = (w_i - w_{i-1}) /
    (b_i - b_{i-1})``, row i of the inverse evaluates to ``s_i - s_{i+1}``
    where ``s_{r+1}`` is ``end_slope``.
    """
    bb = np.concatenate([[0.0], b])
    ww = np.concatenate([[0.0], w])
    s = np.diff(ww) / np.diff(bb)
    return s - np.concatenate([s[1:], [end_slope]])


def _finalise(edge_id, mode, b, raw, total, scale):
    tol = COEF_TOL * max(1.0, scale)
    if raw.size and raw.min() < -tol:
        i = int(raw.argmin())
        raise NegativeCoefficient(
            f"hyperedge {edge_id!r}: coefficient {raw[i]:.3g} at breakpoint {b[i]:.6g} "
            "is negative; the generator is not concave",
            edge_id,
        )
    terms = tuple((float(a), float(bi)) for a, bi in zip(raw, b) if a > 0)
    return GadgetCombination(edge_id, mode, terms, total, tuple(float(a) for a in raw))


def reduce_symmetric(e: Hyperedge, g, max_size: int = MAX_EDGE_SIZE) -> GadgetCombination:
    """Exact combination of at most |Q_s| symmetric gadgets.

    ``g`` is a :class:`SplittingSpec` or a callable on ``[0, total]``; it must
    be concave and symmetric about ``total / 2``.
    """
    total = e.total
    gen = _as_generator(e, g)
    b = enumerate_Qs(e, max_size)
    w = np.array([gen(x) for x in b])
    mirror = np.array([gen(total - x) for x in b])
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    if w.size and np.any(np.abs(w - mirror) > 1e-9 * scale):
        i = int(np.argmax(np.abs(w - mirror)))
        raise AsymmetricGenerator(
            f"hyperedge {e.id!r}: g({b[i]:.6g})={w[i]:.6g} but g({total - b[i]:.6g})="
            f"{mirror[i]:.6g}; use the asymmetric reduction",
            e.id,
        )
    raw = slope_drops(b, w, 0.0) if b.size else np.zeros(0)
    slope_scale = float(np.max(np.abs(w / b))) if b.size else 1.0
    return _finalise(e.id, "symmetric", b, raw, total, slope_scale)


def reduce_asymmetric(e: Hyperedge, g, max_size: int = MAX_EDGE_SIZE) -> GadgetCombination:
    """Exact combination of at most |Q_a| asymmetric gadgets.

    Term i contributes ``a_i * min((total - b_i) * gamma(S), b_i * gamma(e\\S))``.
    """
    total = e.total
    gen = _as_generator(e, g)
    b = enumerate_Qa(e, max_size)
    w = np.array([gen(x) for x in b])
    if b.size:
        end_slope = -w[-1] / (total - b[-1])
        raw = slope_drops(b, w, end_slope) / total
        slope_scale = float(np.max(np.abs(np.diff(np.concatenate([[0.0], w, [0.0]]))
                                          / np.diff(np.concatenate([[0.0], b, [total]])))))
        slope_scale /= total
    else:
        raw, slope_scale = np.zeros(0), 1.0
    return _finalise(e.id, "asymmetric", b, raw, total, slope_scale)


# -- sparsified combinations ---------------------------------------------------

def _mirror_lines(lines, total):
    return [(-m, d + m * total) for m, d in lines]


def sym_envelope(e: Hyperedge, spec: SplittingSpec, epsilon: float, method: str = "auto",
                 max_size: int = MAX_EDGE_SIZE) -> PiecewiseLinear:
    """(1+eps) envelope of g on [0, total/2] (discrete on Q_s or continuous)."""
    g, slope, total = generator(spec, e)
    if method == "auto":
        method = "discrete" if len(e) <= max_size else "continuous"
    if method == "continuous":
        try:
            if not spec.has_slope:
                raise FamilyError("no derivative evaluator")
            return sparsify_continuous(g, slope, total / 2, epsilon)
        except (InfiniteInitialSlope, FamilyError) as exc:
            log.info("hyperedge %s: continuous sparsifier unavailable (%s); using Q_s", e.id, exc)
    qs = enumerate_Qs(e, max_size)
    return sparsify_discrete([(q, g(q)) for q in qs], epsilon)


def _argmax_concave(g, slope, total):
    lo, hi = 0.0, total
    for _ in range(200):
        if hi - lo <= 1e-13 * total:
            break
        mid = 0.5 * (lo + hi)
        if slope(mid) > 0:
            lo = mid
        else:
            hi = mid
    return hi


def asym_envelope(e: Hyperedge, spec: SplittingSpec, epsilon: float, method: str = "auto",
                  max_size: int = MAX_EDGE_SIZE) -> PiecewiseLinear:
    """(1+eps) concave envelope of g on [0, total] vanishing at both ends.

    The rising and falling sides are sparsified separately (the falling side
    mirrored) and share the horizontal piece through the maximum.
    """
    g, slope, total = generator(spec, e)
    if method == "auto":
        method = "discrete" if len(e) <= max_size else "continuous"
    if method == "continuous" and spec.has_slope:
        try:
            peak = _argmax_concave(g, slope, total)
            left = sparsify_continuous(g, slope, peak, epsilon) if peak > 0 else None
            right = (sparsify_continuous(lambda y: g(total - y),
                                         lambda y: -slope(total - y, left=True),
                                         total - peak, epsilon)
                     if peak < total else None)
            lines = []
            if left is not None:
                lines += left.pieces
            if right is not None:
                lines += _mirror_lines(right.pieces, total)
            return PiecewiseLinear.lower_envelope(lines, total)
        except InfiniteInitialSlope as exc:
            log.info("hyperedge %s: continuous sparsifier unavailable (%s); using Q_a", e.id, exc)
    qa = enumerate_Qa(e, max_size)
    if qa.size == 0:
        return PiecewiseLinear(((0.0, 0.0),), total)
    vals = np.array([g(q) for q in qa])
    k = int(np.argmax(vals))
    left = sparsify_discrete([(q, v) for q, v in zip(qa[: k + 1], vals[: k + 1])], epsilon)
    right_pts = [(total - q, v) for q, v in zip(qa[k:][::-1], vals[k:][::-1])]
    right = sparsify_discrete(right_pts, epsilon)
    lines = list(left.pieces) + _mirror_lines(right.pieces, total)
    return PiecewiseLinear.lower_envelope(lines, total)


def sparse_combination(e: Hyperedge, spec: SplittingSpec, epsilon: float, method: str = "auto",
                       symmetric: Optional[bool] = None,
                       max_size: int = MAX_EDGE_SIZE) -> GadgetCombination:
    total = e.total
    if symmetric is None:
        symmetric = spec.is_symmetric(total)
    if symmetric:
        env = sym_envelope(e, spec, epsilon, method, max_size)
        params = pwl_to_gadget_params(env) if env.end > 0 else []
        mode = "symmetric"
    else:
        env = asym_envelope(e, spec, epsilon, method, max_size)
        params = envelope_to_asym_params(env, total) if len(env) > 1 else []
        mode = "asymmetric"
    params = tuple(sorted(((a, b) for a, b in params if a > 0), key=lambda t: t[1]))
    return GadgetCombination(e.id, mode, params, total, tuple(a for a, _ in params))


# -- whole hypergraph ------------------------------------------------------------

def _direct(builder, e: Hyperedge, spec: SplittingSpec) -> Optional[str]:
    k = e.kappa if spec.scale_by_kappa else 1.0
    fam = spec.family
    if fam is Family.PRODUCT:
        add_clique(builder, e, k)
        return "clique"
    if fam is Family.MINHALF:
        add_star(builder, e, k)
        return "star"
    if fam is Family.THRESHOLDED_MIN:
        add_sym(builder, e, spec.threshold(e.total), k)
        return "sym"
    if fam is Family.WEIGHTED_MIN:
        add_asym(builder, e, k * spec.a, k * spec.b)
        return "asym"
    return None


def _reduce_edge(builder, e, spec, mode, epsilon, strategy, sparse_method, max_size, max_terms):
    if spec.family is Family.ALL_OR_NOTHING:
        add_lawler(builder, e)
        return EdgeReduction(e.id, "lawler", 1)
    if len(e) < 2:
        return EdgeReduction(e.id, "none", 0, "single-member hyperedge")
    if mode == "sparse":
        comb = sparse_combination(e, spec, epsilon, sparse_method, max_size=max_size)
        comb.add_to(builder, e)
        return EdgeReduction(e.id, f"{comb.mode}-sparse", len(comb))
    if strategy == "direct" or (strategy == "auto" and len(e) > max_size):
        gadget = _direct(builder, e, spec)
        if gadget is not None:
            return EdgeReduction(e.id, gadget, 1)
        if strategy == "direct":
            log.debug("hyperedge %s: no direct gadget for %s", e.id, spec)
    if len(e) > max_size:
        raise EdgeTooLarge(
            f"hyperedge {e.id!r} has {len(e)} members; exact reduction is limited to "
            f"{max_size}, use the sparsified mode"
        )
    total = e.total
    if spec.is_symmetric(total):
        comb = reduce_symmetric(e, spec, max_size)
    else:
        comb = reduce_asymmetric(e, spec, max_size)
    if len(comb) > max_terms:
        raise EdgeTooLarge(
            f"hyperedge {e.id!r} needs {len(comb)} gadgets (limit {max_terms}); "
            "use the sparsified mode"
        )
    comb.add_to(builder, e)
    return EdgeReduction(e.id, comb.mode, len(comb))


def reduce_hypergraph(
    H: Hypergraph,
    specs,
    mode: str = "exact",
    epsilon: float = 0.1,
    strategy: str = "auto",
    sparse_method: str = "auto",
    max_edge_size: int = MAX_EDGE_SIZE,
    max_terms: int = MAX_TERMS,
) -> FlowNetwork:
    """Reduce ``H`` to a single flow network sharing the original vertices.

    ``mode`` is ``"exact"`` or ``"sparse"`` (within a factor ``1+epsilon``).
    In exact mode ``strategy`` picks between the gadget combination built
    from Q_s / Q_a (``"combination"``), the single closed-form gadget of a
    built-in family (``"direct"``), or the combination with a fallback to
    the direct gadget for hyperedges above ``max_edge_size`` (``"auto"``).
    """
    if mode not in ("exact", "sparse"):
        raise ValueError(f"unknown mode {mode!r}")
    if strategy not in ("auto", "combination", "direct"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if mode == "sparse" and not epsilon >= 0:
        raise ValueError("epsilon must be >= 0")
    per_edge = resolve_specs(H, specs)
    builder = NetworkBuilder(H.vertices)
    for v in range(H.n):
        builder.original(v)
    stats = []
    for e, spec in zip(H.hyperedges, per_edge):
        try:
            stats.append(_reduce_edge(builder, e, spec, mode, epsilon, strategy,
                                      sparse_method, max_edge_size, max_terms))
        except EdvwError as exc:
            if getattr(exc, "edge_id", None) is None:
                exc.edge_id = e.id
            if e.id not in str(exc):
                exc.args = (f"hyperedge {e.id!r}: {exc}",) + exc.args[1:]
            raise
    return builder.build(stats)
