"""(1+eps)-approximate piecewise-linear replacement of concave generators.

An approximation ``ghat`` is the lower envelope of lines ``m_i x + d_i``
with decreasing slopes.  On ``[0, total/2]`` with slopes ending at 0 it is
the continuous extension of ``sum_i a_i * min(x, b_i)``, i.e. a combination
of symmetric gadgets with ``a_i = m_i - m_{i+1}`` and
``b_i = (d_{i+1} - d_i) / a_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DomainError,
    InfiniteInitialSlope,
    MalformedEnvelope,
    NoTangentFound,
    NonConcavePoints,
)

COVER_RTOL = 1e-12
BISECT_XTOL = 1e-13
MAX_PIECES = 100_000


@dataclass(frozen=True)
class PiecewiseLinear:
    """Lower envelope of ``(slope, intercept)`` pieces on ``[0, end]``."""

    pieces: tuple[tuple[float, float], ...]
    end: float
    crossovers: tuple[float, ...] = field(default=(), compare=False)
    tangents: tuple[float, ...] = field(default=(), compare=False)

    def __len__(self):
        return len(self.pieces)

    @property
    def slopes(self):
        return tuple(m for m, _ in self.pieces)

    @property
    def intercepts(self):
        return tuple(d for _, d in self.pieces)

    def __call__(self, x):
        m = np.array(self.slopes)
        d = np.array(self.intercepts)
        x = np.asarray(x, dtype=float)
        return np.min(np.multiply.outer(x, m) + d, axis=-1)

    def breakpoints(self) -> list[float]:
        """x-coordinates where consecutive pieces meet."""
        return [
            (d2 - d1) / (m1 - m2)
            for (m1, d1), (m2, d2) in zip(self.pieces, self.pieces[1:])
        ]

    @classmethod
    def lower_envelope(cls, lines, end: float, **meta) -> "PiecewiseLinear":
        """Keep only the lines that attain the minimum on part of [0, end]."""
        lines = sorted(((float(m), float(d)) for m, d in lines), key=lambda t: (-t[0], t[1]))
        hull: list[tuple[float, float]] = []
        for m, d in lines:
            if hull and hull[-1][0] == m:
                continue  # same slope, larger intercept
            while len(hull) >= 2:
                (m1, d1), (m2, d2) = hull[-2], hull[-1]
                # drop the middle line if the new one undercuts it where it starts
                if (d - d1) * (m1 - m2) <= (d2 - d1) * (m1 - m):
                    hull.pop()
                else:
                    break
            hull.append((m, d))
        tol = 1e-12 * max(1.0, abs(end))
        # clip to [0, end]
        while len(hull) >= 2:
            (m1, d1), (m2, d2) = hull[0], hull[1]
            if (d2 - d1) / (m1 - m2) <= tol:
                hull.pop(0)
            else:
                break
        while len(hull) >= 2:
            (m1, d1), (m2, d2) = hull[-2], hull[-1]
            if (d2 - d1) / (m1 - m2) > end + tol:
                hull.pop()
            else:
                break
        return cls(tuple(hull), float(end), **meta)


@dataclass(frozen=True)
class ApproxReport:
    piece_count: int
    max_ratio: float
    epsilon: float
    ok: bool
    worst_x: float = math.nan


def eval_pwl(p: PiecewiseLinear, x: float) -> float:
    if x < 0 or x > p.end * (1 + 1e-12) + 1e-300:
        raise DomainError(f"x={x} outside [0, {p.end}]")
    return min(m * x + d for m, d in p.pieces)


def _covered(val, y, eps):
    return val <= (1 + eps) * y * (1 + COVER_RTOL) + 1e-300


def check_concave_points(q, y, tol=1e-9):
    """Raise unless (0,0),(q1,y1),... is concave and nondecreasing."""
    qq = np.concatenate([[0.0], q])
    yy = np.concatenate([[0.0], y])
    if np.any(np.diff(qq) <= 0):
        raise NonConcavePoints("abscissae must be positive and strictly increasing")
    slopes = np.diff(yy) / np.diff(qq)
    scale = tol * max(1.0, float(np.max(np.abs(slopes))))
    if np.any(slopes < -scale):
        raise NonConcavePoints("values must be nondecreasing")
    if np.any(np.diff(slopes) > scale):
        i = int(np.argmax(np.diff(slopes)))
        raise NonConcavePoints(f"chord slopes increase after x={qq[i + 1]:g}")


def sparsify_discrete(points: Sequence[tuple[float, float]], epsilon: float) -> PiecewiseLinear:
    """Fewest-piece envelope within a factor (1+eps) at the given points.

    ``points`` are ``(q_j, g(q_j))`` sorted by ``q``; together with the origin
    they must be concave and nondecreasing.  Greedy: start with the chord to
    the first point and a horizontal line through the last; whenever some
    point is left uncovered, add the line joining ``(q_l, (1+eps) g(q_l))``
    to the first later point whose chord would overshoot there.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if not points:
        return PiecewiseLinear(((0.0, 0.0),), 0.0)
    q = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    check_concave_points(q, y)
    n = len(q)
    top = 1 + epsilon
    lines = [(y[0] / q[0], 0.0)]

    def first_uncovered(start):
        m = np.array([ln[0] for ln in lines])
        d = np.array([ln[1] for ln in lines])
        for i in range(start, n):
            if not _covered(float(np.min(m * q[i] + d)), y[i], epsilon):
                return i
        return None

    ell = first_uncovered(0)
    while ell is not None and ell < n - 1 and y[-1] > top * y[ell]:
        target = top * y[ell]
        istar = n - 1
        for i in range(ell + 1, n - 1):
            h = y[i] + (y[i + 1] - y[i]) / (q[i + 1] - q[i]) * (q[ell] - q[i])
            if h > target:
                istar = i
                break
        m = (y[istar] - target) / (q[istar] - q[ell])
        d = max(target - m * q[ell], 0.0)
        lines.append((m, d))
        ell = first_uncovered(ell + 1)
    lines.append((0.0, float(y[-1])))
    return PiecewiseLinear.lower_envelope(lines, float(q[-1]))


def _bisect(f, lo, hi, xtol):
    """Smallest x in [lo, hi] with f(x) >= 0, assuming f(lo) < 0 <= f(hi)."""
    for _ in range(200):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return hi


def sparsify_continuous(
    g: Callable[[float], float],
    g_slope: Callable[[float], float],
    half: float,
    epsilon: float,
) -> PiecewiseLinear:
    """Envelope within a factor (1+eps) of ``g`` everywhere on ``[0, half]``.

    ``g`` must be concave and nondecreasing on the interval with ``g(0) = 0``;
    ``g_slope`` returns right-derivatives.  The first piece is the tangent at
    the origin; each further piece passes through the point where the
    previous one stops being accurate, ``(z, (1+eps) g(z))``, and touches
    ``g`` beyond ``z``.  The last piece is horizontal at ``g(half)``.
    """
    if not epsilon > 0:
        raise ValueError("continuous sparsification needs epsilon > 0")
    if not half > 0:
        raise ValueError("half must be positive")
    top = 1 + epsilon
    g_end = g(half)
    m0 = g_slope(0.0)
    if not math.isfinite(m0) or m0 > 1e12 * max(1.0, g_end / half):
        raise InfiniteInitialSlope(f"slope at the origin is {m0}")
    xtol = BISECT_XTOL * half
    lines = [(m0, 0.0)]
    crossovers: list[float] = []
    tangents = [0.0]
    touch = 0.0
    for _ in range(MAX_PIECES):
        m, d = lines[-1]

        def excess(x, m=m, d=d):
            return m * x + d - top * g(x)

        if excess(half) <= COVER_RTOL * top * g_end:
            break
        z = _bisect(lambda x: excess(x), touch, half, xtol)
        crossovers.append(z)
        py = top * g(z)
        if g_end <= py:
            break

        def gap(t):
            return g(t) + g_slope(t) * (z - t) - py

        if gap(half) < 0:
            touch = half  # tangent lies past the interval: aim at the end point
        else:
            touch = _bisect(gap, z, half, xtol)
        if touch <= z:
            raise NoTangentFound(f"no tangent beyond z={z}")
        m = (g(touch) - py) / (touch - z)
        if not math.isfinite(m) or m < 0:
            raise NoTangentFound(f"tangent slope {m} through z={z}")
        lines.append((m, py - m * z))
        tangents.append(touch)
    else:
        raise NoTangentFound("piece limit reached")
    lines.append((0.0, g_end))
    return PiecewiseLinear.lower_envelope(
        lines, half, crossovers=tuple(crossovers), tangents=tuple(tangents)
    )


def pwl_to_gadget_params(p: PiecewiseLinear) -> list[tuple[float, float]]:
    """``(a_i, b_i)`` of the symmetric gadget combination realising ``p``."""
    m = p.slopes
    d = p.intercepts
    if not p.pieces or d[0] != 0.0 or m[-1] != 0.0:
        raise MalformedEnvelope("envelope must start at the origin and end horizontal")
    out = []
    for i in range(len(m) - 1):
        a = m[i] - m[i + 1]
        if not a > 0 or not d[i + 1] > d[i]:
            raise MalformedEnvelope(f"pieces {i} and {i + 1} are not strictly ordered")
        out.append((a, (d[i + 1] - d[i]) / a))
    return out


def gadget_params_to_pwl(params, end: float) -> PiecewiseLinear:
    """Inverse of :func:`pwl_to_gadget_params`."""
    params = sorted(params, key=lambda t: t[1])
    pieces = []
    slope = sum(a for a, _ in params)
    intercept = 0.0
    for a, b in params:
        pieces.append((slope, intercept))
        slope -= a
        intercept += a * b
    pieces.append((0.0, intercept))
    return PiecewiseLinear(tuple(pieces), end)


def envelope_to_asym_params(p: PiecewiseLinear, total: float) -> list[tuple[float, float]]:
    """``(a_i, b_i)`` of the asymmetric gadget combination realising ``p``.

    ``p`` must be a concave envelope on ``[0, total]`` vanishing at both
    ends; each knot ``b_i`` with slope drop ``c_i`` becomes a term with
    ``a_i = c_i / total``, i.e. ``a_i * min((total-b_i) x, b_i (total-x))``.
    """
    if not p.pieces or p.pieces[0][1] != 0.0:
        raise MalformedEnvelope("envelope must start at the origin")
    end_val = float(p(total))
    if abs(end_val) > 1e-9 * max(1.0, max(abs(d) for _, d in p.pieces)):
        raise MalformedEnvelope(f"envelope is {end_val} at the far end, expected 0")
    out = []
    for i, knot in enumerate(p.breakpoints()):
        drop = p.pieces[i][0] - p.pieces[i + 1][0]
        if not drop > 0:
            raise MalformedEnvelope("slopes must strictly decrease")
        out.append((drop / total, knot))
    return out


def verify_approximation(p, g: Callable[[float], float], points, epsilon: float) -> ApproxReport:
    """Check ``g <= p <= (1+eps) g`` at ``points``."""
    xs = np.asarray(list(points), dtype=float)
    gv = np.array([g(x) for x in xs])
    pv = np.asarray(p(xs), dtype=float)
    lower_ok = bool(np.all(pv >= gv - 1e-12 * np.maximum(1.0, np.abs(gv))))
    pos = gv > 0
    ratios = np.where(pos, pv / np.where(pos, gv, 1.0), 1.0)
    if ratios.size:
        i = int(np.argmax(ratios))
        max_ratio, worst = float(ratios[i]), float(xs[i])
    else:
        max_ratio, worst = 1.0, math.nan
    zero_ok = bool(np.all(np.abs(pv[~pos]) <= 1e-12)) if (~pos).any() else True
    ok = lower_ok and zero_ok and max_ratio <= (1 + epsilon) * (1 + 1e-9)
    return ApproxReport(len(p), max_ratio, epsilon, ok, worst)
