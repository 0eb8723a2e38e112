"""Independent reference computations used by the tests.

Everything here is written with plain loops or third-party solvers and
shares no code path with the library beyond its public data types.
"""

import itertools
import math

import numpy as np

INF = math.inf


def subsets(members):
    for r in range(len(members) + 1):
        for combo in itertools.combinations(members, r):
            yield frozenset(combo)


def directed_cut(arcs, side):
    total = 0.0
    for u, v, c in arcs:
        if u in side and v not in side:
            total += c
    return total


def gadget_value_loops(G, S):
    """min over auxiliary placements of the directed cut, by plain loops.

    ``S`` is a set of hypergraph vertex ids.
    """
    orig = G.originals()
    base = {orig[v] for v in S}
    aux = [i for i, node in enumerate(G.nodes) if node.kind == "aux"]
    arcs = list(G.arcs())
    best = INF
    for r in range(len(aux) + 1):
        for T in itertools.combinations(aux, r):
            best = min(best, directed_cut(arcs, base | set(T)))
    return best


def closed_form_value(family, gammas, S_idx, beta=None, b=None, a=None):
    """Closed-form splitting values written out per family."""
    total = sum(gammas)
    x = sum(gammas[i] for i in S_idx)
    rest = total - x
    if len(S_idx) in (0, len(gammas)):
        return 0.0
    if family == "product":
        return x * rest
    if family == "minhalf":
        return min(x, rest)
    if family == "thresh":
        thr = beta * total if beta is not None else b
        return min(x, rest, thr)
    if family == "wmin":
        return min(a * x, b * rest)
    raise ValueError(family)


def solve_symmetric_coefficients(bs, ws, total):
    """a with sum_i a_i min(q, total - q, b_i) = w(q) at q in bs, via a dense solve."""
    B = np.array([[min(q, total - q, bi) for bi in bs] for q in bs])
    return np.linalg.solve(B, np.asarray(ws, dtype=float))


def solve_asymmetric_coefficients(bs, ws, total):
    """a with sum_i a_i min((T-b_i) q, b_i (T-q)) = w(q) at q in bs, dense solve."""
    B = np.array([[min((total - bi) * q, bi * (total - q)) for bi in bs] for q in bs])
    return np.linalg.solve(B, np.asarray(ws, dtype=float))


def networkx_max_flow(G, s, t):
    """Max-flow value computed by networkx (parallel arcs merged)."""
    import networkx as nx

    D = nx.DiGraph()
    D.add_nodes_from(range(G.n_nodes))
    for u, v, c in G.arcs():
        if D.has_edge(u, v):
            D[u][v]["capacity"] += c
        else:
            D.add_edge(u, v, capacity=c)
    for u, v, data in D.edges(data=True):
        if math.isinf(data["capacity"]):
            del data["capacity"]  # networkx treats a missing capacity as infinite
    try:
        return nx.maximum_flow_value(D, s, t)
    except nx.NetworkXUnbounded:
        return INF


def min_pieces_bruteforce(points, eps):
    """Fewest lines whose lower envelope f obeys g <= f <= (1+eps) g on the points.

    One line must pass through the origin and one must be horizontal, as
    required for a gadget realisation.  Every line covers a run of
    consecutive points (the band condition is an interval for concave g), so
    the minimum is searched over all compositions of the points into runs,
    each checked for a feasible line by linear programming.
    """
    from scipy.optimize import linprog

    q = np.array([p[0] for p in points], float)
    y = np.array([p[1] for p in points], float)
    n = len(q)
    slack = 1e-9 * max(1.0, y.max())

    def feasible(i, j, origin, flat):
        # variables (m, d); line >= g everywhere, <= (1+eps) g on run i..j
        A, rhs = [], []
        for k in range(n):
            A.append([-q[k], -1.0])
            rhs.append(-y[k] + slack)
        for k in range(i, j + 1):
            A.append([q[k], 1.0])
            rhs.append((1 + eps) * y[k] + slack)
        bounds = [(0, 0) if flat else (0, None), (0, 0) if origin else (0, None)]
        res = linprog([0, 0], A_ub=A, b_ub=rhs, bounds=bounds, method="highs")
        return res.status == 0

    best = math.inf
    for cuts in range(1 << (n - 1)):
        runs, start = [], 0
        for k in range(n - 1):
            if cuts >> k & 1:
                runs.append((start, k))
                start = k + 1
        runs.append((start, n - 1))
        if not all(feasible(i, j, False, False) for i, j in runs):
            continue
        count = len(runs)
        if len(runs) == 1:
            # the run's line may double as the origin line or the flat line
            i, j = runs[0]
            count = 2 if feasible(i, j, True, False) or feasible(i, j, False, True) else 3
        else:
            count += 0 if feasible(*runs[0], True, False) else 1
            count += 0 if feasible(*runs[-1], False, True) else 1
        best = min(best, count)
    return best


def quadratic_envelope(c2, c1, half, eps):
    """Continuous envelope of g(x) = c2 x^2 + c1 x (c2 < 0) by closed-form roots.

    Returns (lines, crossovers, tangents).  Each crossover solves a quadratic
    for the point where the current line reaches (1+eps) g, and each tangent
    point solves a quadratic for the tangent through (z, (1+eps) g(z)).
    """
    top = 1 + eps
    g = lambda x: c2 * x * x + c1 * x  # noqa: E731
    lines, crossovers, tangents = [(c1, 0.0)], [], [0.0]
    touch = 0.0
    while True:
        m, d = lines[-1]
        roots = np.roots([top * c2, top * c1 - m, -d])
        roots = sorted(r.real for r in roots if abs(r.imag) < 1e-12 and touch < r.real <= half)
        if not roots:
            break
        z = roots[0]
        crossovers.append(z)
        py = top * g(z)
        if g(half) <= py:
            break
        roots = np.roots([-c2, 2 * c2 * z, c1 * z - py])
        t = max(r.real for r in roots)
        t = min(t, half)
        slope = (g(t) - py) / (t - z)
        lines.append((slope, py - slope * z))
        tangents.append(t)
        touch = t
    lines.append((0.0, g(half)))
    return lines, crossovers, tangents


def hypergraph_cut_loops(H, family, S, **params):
    """Sum of closed-form splitting values over the hyperedges of ``H``."""
    total = 0.0
    for e in H.hyperedges:
        idx = [i for i, v in enumerate(e.members) if v in S]
        if family == "aon":
            total += 0.0 if len(idx) in (0, len(e)) else e.kappa
        else:
            total += closed_form_value(family, list(e.gamma), idx, **params)
    return total


def seeded_min_cut_loops(H, family, sources, sinks, **params):
    """Minimum of hypergraph_cut_loops over every S with sources in S and sinks out."""
    free = [v for v in range(H.n) if v not in sources and v not in sinks]
    best = INF
    for r in range(len(free) + 1):
        for extra in itertools.combinations(free, r):
            best = min(best, hypergraph_cut_loops(H, family, set(sources) | set(extra), **params))
    return best
