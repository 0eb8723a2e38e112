"""EDVWs-based splitting functions ``w_e(S) = g_e(gamma_e(S))``.

The generator ``g_e`` is described by a :class:`SplittingSpec`.  Built-in
families (``total`` is gamma_e(e)):

===============  ==================================================
product          ``x * (total - x)``
minhalf          ``min(x, total - x)``
thresh           ``min(x, total - x, b)``, ``b = beta * total`` or absolute
wmin             ``min(a * x, b * (total - x))``
aon              all-or-nothing: ``kappa`` on every proper split
custom           user callable ``g(x, total)``
===============  ==================================================

String grammar (CLI/config): ``product``, ``minhalf``, ``thresh:<beta>``,
``threshabs:<b>``, ``wmin:<a>,<b>``, ``aon``, ``custom:<expr in x, G>``;
a ``*kappa`` suffix multiplies by the hyperedge weight.
"""

from __future__ import annotations

import ast
import itertools
import math
import operator
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import DomainError, EdgeTooLarge, FamilyError, ParseError, VertexNotInEdge
from .hypergraph import Hyperedge, Hypergraph, gamma_sum, subset_sums

SUBMODULAR_MAX_EDGE = 12
SYMMETRIC_MAX_EDGE = 20
TOL = 1e-9


class Family(str, Enum):
    PRODUCT = "product"
    MINHALF = "minhalf"
    THRESHOLDED_MIN = "thresh"
    WEIGHTED_MIN = "wmin"
    ALL_OR_NOTHING = "aon"
    CUSTOM = "custom"


@dataclass(frozen=True)
class SplittingSpec:
    family: Family
    beta: Optional[float] = None
    b: Optional[float] = None
    a: Optional[float] = None
    func: Optional[Callable[[float, float], float]] = None
    slope_func: Optional[Callable[[float, float], float]] = None
    symmetric_hint: Optional[bool] = None
    scale_by_kappa: bool = False
    label: Optional[str] = None

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        if fam is Family.THRESHOLDED_MIN:
            if (self.beta is None) == (self.b is None):
                raise FamilyError("thresholded min needs exactly one of beta or b")
            if self.beta is not None and not 0 < self.beta <= 1:
                raise FamilyError(f"beta must lie in (0, 1], got {self.beta}")
            if self.b is not None and not self.b > 0:
                raise FamilyError(f"b must be positive, got {self.b}")
        elif fam is Family.WEIGHTED_MIN:
            if self.a is None or self.b is None or not (self.a > 0 and self.b > 0):
                raise FamilyError("weighted min needs a > 0 and b > 0")
        elif fam is Family.CUSTOM and self.func is None:
            raise FamilyError("custom family needs a callable g(x, total)")

    # -- constructors -----------------------------------------------------
    @classmethod
    def product(cls, scale_by_kappa=False):
        return cls(Family.PRODUCT, scale_by_kappa=scale_by_kappa)

    @classmethod
    def minhalf(cls, scale_by_kappa=False):
        return cls(Family.MINHALF, scale_by_kappa=scale_by_kappa)

    @classmethod
    def thresholded(cls, beta=None, b=None, scale_by_kappa=False):
        return cls(Family.THRESHOLDED_MIN, beta=beta, b=b, scale_by_kappa=scale_by_kappa)

    @classmethod
    def weighted_min(cls, a, b, scale_by_kappa=False):
        return cls(Family.WEIGHTED_MIN, a=a, b=b, scale_by_kappa=scale_by_kappa)

    @classmethod
    def all_or_nothing(cls):
        return cls(Family.ALL_OR_NOTHING)

    @classmethod
    def custom(cls, g, slope=None, symmetric=None, scale_by_kappa=False, label=None):
        return cls(
            Family.CUSTOM,
            func=g,
            slope_func=slope,
            symmetric_hint=symmetric,
            scale_by_kappa=scale_by_kappa,
            label=label,
        )

    # -- properties -------------------------------------------------------
    @property
    def continuous(self) -> bool:
        return self.family is not Family.ALL_OR_NOTHING

    @property
    def has_slope(self) -> bool:
        return self.family is not Family.CUSTOM or self.slope_func is not None

    def threshold(self, total: float) -> float:
        return self.beta * total if self.beta is not None else self.b

    def is_symmetric(self, total: float) -> bool:
        """Whether g is symmetric about total / 2."""
        fam = self.family
        if fam in (Family.PRODUCT, Family.MINHALF, Family.THRESHOLDED_MIN, Family.ALL_OR_NOTHING):
            return True
        if fam is Family.WEIGHTED_MIN:
            return self.a == self.b
        if self.symmetric_hint is not None:
            return self.symmetric_hint
        xs = np.linspace(0.0, total / 2, 65)
        lo = np.array([self.func(x, total) for x in xs])
        hi = np.array([self.func(total - x, total) for x in xs])
        scale = max(1.0, float(np.max(np.abs(lo))))
        return bool(np.all(np.abs(lo - hi) <= TOL * scale))

    def __str__(self):
        fam = self.family
        if fam is Family.THRESHOLDED_MIN:
            s = f"thresh:{self.beta:g}" if self.beta is not None else f"threshabs:{self.b:g}"
        elif fam is Family.WEIGHTED_MIN:
            s = f"wmin:{self.a:g},{self.b:g}"
        elif fam is Family.CUSTOM:
            s = f"custom:{self.label}" if self.label else "custom"
        else:
            s = fam.value
        return s + ("*kappa" if self.scale_by_kappa else "")

    # -- raw generator ----------------------------------------------------
    def g(self, x: float, total: float) -> float:
        fam = self.family
        if fam is Family.PRODUCT:
            return x * (total - x)
        if fam is Family.MINHALF:
            return min(x, total - x)
        if fam is Family.THRESHOLDED_MIN:
            return min(x, total - x, self.threshold(total))
        if fam is Family.WEIGHTED_MIN:
            return min(self.a * x, self.b * (total - x))
        if fam is Family.CUSTOM:
            return float(self.func(x, total))
        raise FamilyError("all-or-nothing has no continuous generator")

    def slope(self, x: float, total: float, left: bool = False) -> float:
        """One-sided derivative of g at x (right by default)."""
        fam = self.family
        if fam is Family.PRODUCT:
            return total - 2.0 * x
        if fam is Family.MINHALF:
            half = total / 2
            return 1.0 if (x < half or (left and x <= half)) else -1.0
        if fam is Family.THRESHOLDED_MIN:
            b = self.threshold(total)
            knot_lo, knot_hi = min(b, total / 2), max(total - b, total / 2)
            if x < knot_lo or (left and x <= knot_lo):
                return 1.0
            if x < knot_hi or (left and x <= knot_hi):
                return 0.0
            return -1.0
        if fam is Family.WEIGHTED_MIN:
            knot = self.b * total / (self.a + self.b)
            return self.a if (x < knot or (left and x <= knot)) else -self.b
        if fam is Family.CUSTOM:
            if self.slope_func is None:
                raise FamilyError("custom generator has no derivative evaluator")
            return float(self.slope_func(x, total))
        raise FamilyError("all-or-nothing has no continuous generator")


def _check_domain(x, total):
    slack = 1e-12 * max(1.0, abs(total))
    if x < -slack or x > total + slack:
        raise DomainError(f"x={x} outside [0, {total}]")
    return min(max(x, 0.0), total)


def eval_g(spec: SplittingSpec, e: Hyperedge, x: float) -> float:
    """g_e(x) for a continuous family; exactly 0 at both endpoints."""
    if not spec.continuous:
        raise FamilyError("all-or-nothing has no continuous generator")
    total = e.total
    x = _check_domain(float(x), total)
    if x == 0.0 or x == total:
        return 0.0
    return spec.g(x, total)


def generator(spec: SplittingSpec, e: Hyperedge):
    """``(g, slope, total)`` for ``e`` with the kappa factor folded in."""
    total = e.total
    k = e.kappa if spec.scale_by_kappa else 1.0

    def g(x):
        x = _check_domain(x, total)
        if x == 0.0 or x == total:
            return 0.0
        return k * spec.g(x, total)

    def slope(x, left=False):
        return k * spec.slope(x, total, left=left)

    return g, slope, total


def eval_split(spec: SplittingSpec, e: Hyperedge, subset) -> float:
    """w_e(S) for S a subset of e's members."""
    x = gamma_sum(e, subset)
    if spec.family is Family.ALL_OR_NOTHING:
        n = len(set(subset))
        return e.kappa if 0 < n < len(e) else 0.0
    if x == 0.0 or len(set(subset)) == len(e):
        return 0.0
    val = eval_g(spec, e, x)
    return e.kappa * val if spec.scale_by_kappa else val


def split_table(spec: SplittingSpec, e: Hyperedge) -> np.ndarray:
    """w_e over every bitmask subset of ``e.members`` (index = mask)."""
    n = len(e)
    if n > SYMMETRIC_MAX_EDGE:
        raise EdgeTooLarge(f"hyperedge {e.id!r} has {n} members; table needs <= {SYMMETRIC_MAX_EDGE}")
    full = (1 << n) - 1
    if spec.family is Family.ALL_OR_NOTHING:
        out = np.full(full + 1, e.kappa)
        out[0] = out[full] = 0.0
        return out
    g, _, _ = generator(spec, e)
    sums = subset_sums(e)
    out = np.array([g(x) for x in sums])
    out[0] = out[full] = 0.0
    return out


def split_function(spec: SplittingSpec, e: Hyperedge) -> Callable:
    """Callable ``S -> w_e(S)``."""
    return lambda subset: eval_split(spec, e, subset)


def _resolve_spec(specs, e: Hyperedge, i: int) -> SplittingSpec:
    if isinstance(specs, SplittingSpec):
        return specs
    if isinstance(specs, Mapping):
        return specs[e.id]
    return specs[i]


def hypergraph_cut(H: Hypergraph, specs, subset) -> float:
    """Sum over hyperedges of w_e(S ∩ e)."""
    S = H.vids(subset)
    total = 0.0
    for i, e in enumerate(H.hyperedges):
        part = S.intersection(e.members)
        if part and len(part) < len(e):
            total += eval_split(_resolve_spec(specs, e, i), e, part)
    return total


def _as_table(e: Hyperedge, w, max_size: int) -> np.ndarray:
    n = len(e)
    if n > max_size:
        raise EdgeTooLarge(f"hyperedge {e.id!r} has {n} members (limit {max_size})")
    if isinstance(w, SplittingSpec):
        return split_table(w, e)
    if isinstance(w, np.ndarray):
        return w
    return np.array([float(w(e.subset_of_mask(m))) for m in range(1 << n)])


def submodularity_violation(e: Hyperedge, w, max_size: int = SUBMODULAR_MAX_EDGE):
    """First ``(S1, S2, v, gap)`` violating diminishing returns, or None.

    Checks w(S1+v) - w(S1) >= w(S2+v) - w(S2) for every S1 ⊆ S2 ⊂ e and
    v ∉ S2.  The inner minimum over all S1 ⊆ S2 is computed with a
    subset-minimum transform, which covers every triple without looping
    over them one by one.
    """
    F = _as_table(e, w, max_size)
    n = len(e)
    size = 1 << n
    tol = TOL * max(1.0, float(np.max(np.abs(F))))
    masks = np.arange(size)
    for vi in range(n):
        bit = 1 << vi
        free = masks[(masks & bit) == 0]
        gain = np.full(size, np.inf)
        gain[free] = F[free | bit] - F[free]
        best = gain.copy()  # best[S2] = min over S1 ⊆ S2 of gain[S1]
        for j in range(n):
            if j == vi:
                continue
            has = (masks >> j) & 1 == 1
            best[has] = np.minimum(best[has], best[masks[has] ^ (1 << j)])
        bad = free[best[free] < gain[free] - tol]
        if bad.size:
            s2 = int(bad[0])
            sub = s2
            while True:  # locate the witness S1 by submask enumeration
                if gain[sub] == best[s2]:
                    break
                sub = (sub - 1) & s2
            gap = float(gain[s2] - best[s2])
            return e.subset_of_mask(sub), e.subset_of_mask(s2), e.members[vi], gap
    return None


def is_submodular_bruteforce(e: Hyperedge, w, max_size: int = SUBMODULAR_MAX_EDGE) -> bool:
    """Exhaustive diminishing-returns check of a splitting function on e.

    ``w`` may be a :class:`SplittingSpec`, a callable on vertex sets, or a
    precomputed bitmask table.
    """
    return submodularity_violation(e, w, max_size) is None


def is_symmetric_bruteforce(e: Hyperedge, w, max_size: int = SYMMETRIC_MAX_EDGE) -> bool:
    F = _as_table(e, w, max_size)
    full = (1 << len(e)) - 1
    comp = F[full ^ np.arange(full + 1)]
    scale = np.maximum(np.maximum(np.abs(F), np.abs(comp)), 1e-300)
    return bool(np.all(np.abs(F - comp) <= TOL * scale + 1e-300))


def concavity_probe(spec: SplittingSpec, e: Hyperedge, n_samples: int = 25) -> bool:
    """Chord inequality of g on every triple of an even grid over [0, total]."""
    if not spec.continuous:
        raise FamilyError("all-or-nothing has no continuous generator")
    if n_samples < 3:
        raise ValueError("n_samples must be >= 3")
    total = e.total
    xs = np.linspace(0.0, total, n_samples)
    ys = np.array([eval_g(spec, e, x) for x in xs])
    i, j, k = (np.array(t) for t in zip(*itertools.combinations(range(n_samples), 3)))
    b1, b2, b3 = xs[i], xs[j], xs[k]
    chord = (b3 - b2) / (b3 - b1) * ys[i] + (b2 - b1) / (b3 - b1) * ys[k]
    tol = TOL * max(1.0, float(np.max(np.abs(ys))))
    return bool(np.all(ys[j] >= chord - tol))


# -- spec string grammar ---------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_FUNCS = {name: getattr(math, name) for name in ("sqrt", "log", "log1p", "exp", "sin", "cos")}
_FUNCS.update(min=min, max=max, abs=abs)


def compile_expression(expr: str) -> Callable[[float, float], float]:
    """Compile an arithmetic expression in ``x`` and ``G`` (= total).

    Only numbers, the two variables, + - * / **, unary minus and a few
    math functions are accepted.
    """
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"bad expression {expr!r}: {exc.msg}") from None

    def check(node):
        if isinstance(node, ast.Expression):
            return check(node.body)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return check(node.left) and check(node.right)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            return check(node.operand)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return True
        if isinstance(node, ast.Name) and node.id in ("x", "G"):
            return True
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and not node.keywords):
            return all(check(a) for a in node.args)
        raise ParseError(f"unsupported syntax in expression {expr!r}")

    check(tree)
    code = compile(tree, "<spec>", "eval")

    def g(x, total):
        return eval(code, {"__builtins__": {}}, {**_FUNCS, "x": x, "G": total})

    return g


def parse_spec(text: str) -> SplittingSpec:
    s = text.strip()
    scale = False
    if s.endswith("*kappa"):
        scale, s = True, s[: -len("*kappa")]
    name, _, arg = s.partition(":")
    try:
        if name == "product" and not arg:
            return SplittingSpec.product(scale)
        if name == "minhalf" and not arg:
            return SplittingSpec.minhalf(scale)
        if name == "aon" and not arg:
            return SplittingSpec.all_or_nothing()
        if name == "thresh":
            return SplittingSpec.thresholded(beta=float(arg), scale_by_kappa=scale)
        if name == "threshabs":
            return SplittingSpec.thresholded(b=float(arg), scale_by_kappa=scale)
        if name == "wmin":
            a, b = arg.split(",")
            return SplittingSpec.weighted_min(float(a), float(b), scale)
        if name == "custom" and arg:
            return SplittingSpec.custom(compile_expression(arg), scale_by_kappa=scale, label=arg)
    except (ValueError, FamilyError) as exc:
        raise ParseError(f"bad splitting spec {text!r}: {exc}") from None
    raise ParseError(f"bad splitting spec {text!r}")


def resolve_specs(H: Hypergraph, specs) -> list[SplittingSpec]:
    """One spec per hyperedge, in hyperedge order."""
    if isinstance(specs, str):
        specs = parse_spec(specs)
    return [_resolve_spec(specs, e, i) for i, e in enumerate(H.hyperedges)]


__all__ = [
    "Family",
    "SplittingSpec",
    "eval_g",
    "eval_split",
    "generator",
    "split_table",
    "split_function",
    "hypergraph_cut",
    "is_submodular_bruteforce",
    "submodularity_violation",
    "is_symmetric_bruteforce",
    "concavity_probe",
    "parse_spec",
    "compile_expression",
    "resolve_specs",
    "VertexNotInEdge",
]
