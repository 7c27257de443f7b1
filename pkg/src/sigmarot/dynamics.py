"""Orbits, rotation-number bounds, the invariant part ``T_R`` and the split of ``X_F``.

``T_R`` is the closure of the forward orbit of the line.  On the sigma
covering it meets every branch copy in the same initial piece ``[0, h]``, so it
is described by the single height ``h`` (the *reach*).  The remainder
``X_F`` is the top piece ``[h, 1]`` of branch copy 0, and its bottom point is
the only point it shares with ``T_R``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .pamap import FloatMap, PAMap, edge_coord, edge_of, evaluate, iterate, segment_pieces
from .space import Branch, BranchSegment, Line, Point, branch_point, height, reduce, retract

__all__ = [
    "RhoBounds",
    "XF",
    "Partition",
    "Itinerary",
    "displacement",
    "rho_bounds",
    "rho_bounds_batch",
    "compute_TR_reach",
    "compute_XF",
    "sigma_like_check",
    "xf_copy",
    "in_TR",
    "retract_X",
    "partition_XF",
    "locate",
    "itinerary",
    "rho_from_itinerary",
]

DEFAULT_REACH_CAP = 64
DEFAULT_PERIOD_CAP = 128


@dataclass(frozen=True)
class RhoBounds:
    """Bounds on the displacement rate of one orbit.

    With ``exact`` set the orbit was seen to be eventually periodic (mod 1)
    and ``lower == upper`` is the rotation number as a Fraction.
    """

    lower: object
    upper: object
    iterations: int
    exact: bool = False
    period: Optional[int] = None

    @property
    def value(self):
        return self.lower if self.exact else None

    def __contains__(self, x):
        return self.lower <= x <= self.upper


def displacement(m: PAMap, p: Point, n: int) -> Fraction:
    return retract(iterate(m, p, n), m.c) - retract(p, m.c)


def _window_start(N: int) -> int:
    return max(1, math.ceil(N / 2))


def rho_bounds(m: PAMap, p: Point, N: int, period_cap: int = DEFAULT_PERIOD_CAP) -> RhoBounds:
    """Rotation bounds of the orbit of ``p`` over ``N`` iterations.

    The first ``period_cap`` steps are iterated exactly; an orbit point that
    repeats modulo 1 gives the exact rotation number.  Otherwise the orbit
    is continued in floating point and the extreme values of
    ``displacement / n`` over the tail window ``n in [N/2, N]`` are returned.
    """
    return rho_bounds_batch(m, [p], N, period_cap)[0]


def _exact_phase(m: PAMap, p: Point, N: int, steps: int):
    c = m.c
    r0 = retract(p, c)
    q, k = reduce(p, c)
    seen = {q: (0, k)}
    start = _window_start(N)
    ratios = []
    x = p
    for n in range(1, steps + 1):
        x = evaluate(m, x)
        q, k = reduce(x, c)
        if q in seen:
            j, kj = seen[q]
            rho = Fraction(k - kj, n - j)
            return RhoBounds(rho, rho, n, exact=True, period=n - j), x, ratios
        seen[q] = (n, k)
        if n >= start:
            ratios.append((retract(x, c) - r0) / n)
    return None, x, ratios


def rho_bounds_batch(m: PAMap, points: Sequence[Point], N: int,
                     period_cap: int = DEFAULT_PERIOD_CAP):
    if N < 1:
        raise ValueError("N must be >= 1")
    c = m.c
    steps = min(N, period_cap)
    results: list = [None] * len(points)
    pending = []
    for idx, p in enumerate(points):
        res, x, ratios = _exact_phase(m, p, N, steps)
        if res is not None:
            results[idx] = res
            continue
        lo = min(ratios) if ratios else None
        hi = max(ratios) if ratios else None
        pending.append((idx, x, retract(p, c), lo, hi))
    if not pending:
        return results
    if steps == N:
        for idx, _, _, lo, hi in pending:
            results[idx] = RhoBounds(float(lo), float(hi), N)
        return results

    fm = FloatMap(m)
    kind, a, s = FloatMap.encode([x for _, x, _, _, _ in pending])
    r0 = np.array([float(r) for _, _, r, _, _ in pending])
    lo = np.array([np.inf if v is None else float(v) for *_, v, _ in pending])
    hi = np.array([-np.inf if v is None else float(v) for *_, v in pending])
    start = _window_start(N)
    for n in range(steps + 1, N + 1):
        kind, a, s = fm(kind, a, s)
        if n >= start:
            ratio = (fm.retract(kind, a) - r0) / n
            np.minimum(lo, ratio, out=lo)
            np.maximum(hi, ratio, out=hi)
    for j, (idx, *_rest) in enumerate(pending):
        results[idx] = RhoBounds(float(lo[j]), float(hi[j]), N)
    return results


# --- T_R and X_F -------------------------------------------------------------------


def compute_TR_reach(m: PAMap, cap: int = DEFAULT_REACH_CAP):
    """Height ``h`` reached by ``T_R`` on each branch, and whether it is exact.

    The images of the line and of ``[0, h_k]`` are unions of geodesic arcs, and
    on such an arc the height peaks at an endpoint, so each round only needs
    images of breakpoints and of ``h_k`` itself.
    """
    line_top = max(height(p) for _, p in m.line_breaks)
    h = Fraction(0)
    for _ in range(cap):
        new = max(line_top, h)
        if h > 0:
            new = max(new, height(evaluate(m, Branch(0, h))))
            new = max([new] + [height(p) for s, p in m.branch_breaks if s <= h])
        if new == h:
            return h, True
        h = new
    return h, False


@dataclass(frozen=True)
class XF:
    """``X_F = [h, 1]`` on branch copy 0 (``segment`` is ``None`` when empty)."""

    h: Fraction
    exact: bool
    segment: Optional[BranchSegment]

    @property
    def empty(self) -> bool:
        return self.segment is None


def compute_XF(m: PAMap, cap: int = DEFAULT_REACH_CAP) -> XF:
    h, exact = compute_TR_reach(m, cap)
    seg = None if h == 1 else BranchSegment(0, h, Fraction(1))
    return XF(h, exact, seg)


def xf_copy(p: Point, h: Fraction, c: Fraction):
    """Integer ``k`` with ``p`` in ``X_F + k``, or ``None``."""
    if h >= 1:
        return None
    if isinstance(p, Branch):
        return p.n if p.s >= h else None
    if h == 0:
        k = p.x - c
        if k.denominator == 1:
            return int(k)
    return None


def in_TR(p: Point, h: Fraction) -> bool:
    return isinstance(p, Line) or p.s <= h


def retract_X(p: Point, h: Fraction, shift: int = 0) -> Fraction:
    """Height of ``r_X(p - shift)``: the retraction of ``T`` onto ``X_F``."""
    if isinstance(p, Branch) and p.n == shift and p.s >= h:
        return p.s
    return h


def sigma_like_check(m: PAMap, xf: Optional[XF] = None) -> bool:
    """Consistency of the sigma-like structure.

    On the sigma covering ``X_F`` is empty or a single interval, so this only
    asserts that its bottom point sits in ``T_R`` and is mapped back into it.
    """
    xf = xf or compute_XF(m)
    if xf.empty:
        return True
    bottom = branch_point(0, xf.h, m.c)
    return in_TR(bottom, xf.h) and in_TR(evaluate(m, bottom), xf.h)


# --- partition of X_F --------------------------------------------------------------


@dataclass(frozen=True)
class Partition:
    segments: tuple
    displacements: tuple
    reach: Fraction
    exact: bool

    @property
    def N(self) -> int:
        return len(self.segments)

    def index_of(self, s: Fraction):
        """1-based index of the segment holding height ``s``, or ``None``."""
        for i, seg in enumerate(self.segments, start=1):
            if seg.lo <= s <= seg.hi:
                return i
        return None

    def check(self, m: PAMap) -> list:
        """Exact checks of the five defining properties; returns violations."""
        problems = []
        h, c = self.reach, m.c
        segs, ps = self.segments, self.displacements
        for a, b in zip(segs, segs[1:]):
            if not a.hi < b.lo:
                problems.append(f"segments {a} and {b} are not ordered and disjoint")
        for p, q in zip(ps, ps[1:]):
            if p == q:
                problems.append(f"consecutive displacements repeat ({p})")
        for seg, p in zip(segs, ps):
            if evaluate(m, branch_point(0, seg.lo, c)) != branch_point(p, h, c):
                problems.append(f"F(min {seg}) != min X_F + {p}")
            for _, _, q0, q1 in segment_pieces(m, seg):
                for q in (q0, q1):
                    k = xf_copy(q, h, c)
                    if k is not None and k != p and not in_TR(q, h):
                        problems.append(f"F({seg}) leaves X_F + {p} outside T_R")
        gaps = _gaps(segs, h)
        for lo, hi in gaps:
            if lo == hi:
                continue
            for iv in _hits(m, BranchSegment(0, lo, hi), h):
                if iv[0] < hi and iv[1] > lo:
                    problems.append(f"dustbin part [{lo}, {hi}] maps into X_F + Z")
                    break
        return problems


def _gaps(segs, h):
    out = []
    cur = h
    for seg in segs:
        out.append((cur, seg.lo))
        cur = seg.hi
    out.append((cur, Fraction(1)))
    return out


def _hits(m: PAMap, dom: BranchSegment, h: Fraction):
    """Closed height intervals of ``dom`` mapped into ``X_F + k``.

    Returns ``(lo, hi, k, strong)``; ``strong`` means the image climbs above
    the bottom of ``X_F`` somewhere on the interval.
    """
    c = m.c
    out = []
    for t0, t1, q0, q1 in segment_pieces(m, dom):
        e = edge_of(q0, q1)
        if q0 == q1:
            k = xf_copy(q0, h, c)
            if k is not None:
                out.append((t0, t1, k, height(q0) > h))
            continue
        if e is None:
            if h == 0:
                x0, x1 = q0.x, q1.x
                for k in range(math.ceil(min(x0, x1) - c), math.floor(max(x0, x1) - c) + 1):
                    t = t0 + (k + c - x0) / (x1 - x0) * (t1 - t0)
                    out.append((t, t, k, False))
            continue
        v0, v1 = edge_coord(q0, e, c), edge_coord(q1, e, c)
        if max(v0, v1) < h:
            continue
        if min(v0, v1) >= h:
            lo, hi = t0, t1
        else:
            tc = t0 + (h - v0) / (v1 - v0) * (t1 - t0)
            lo, hi = (tc, t1) if v1 > v0 else (t0, tc)
        out.append((lo, hi, e, max(v0, v1) > h))
    out.sort(key=lambda r: (r[0], r[1]))
    merged = []
    for lo, hi, k, strong in out:
        if merged and merged[-1][2] == k and lo <= merged[-1][1]:
            plo, phi, _, pstrong = merged[-1]
            merged[-1] = (plo, max(phi, hi), k, pstrong or strong)
        else:
            merged.append((lo, hi, k, strong))
    return merged


def partition_XF(m: PAMap, xf: Optional[XF] = None) -> Partition:
    """Split ``X_F`` into ``X_1 < ... < X_N`` with their displacements ``p_i``.

    Scans ``X_F`` from the bottom: ``X_i`` starts at the first point mapped
    into some ``X_F + p_i`` and extends as long as the image stays in
    ``(X_F + p_i) U T_R``.  Everything left over (the dustbin) is mapped into
    ``T_R``.
    """
    xf = xf or compute_XF(m)
    if xf.empty:
        return Partition((), (), xf.h, xf.exact)
    items = _hits(m, xf.segment, xf.h)
    segs, ps = [], []
    i = 0
    while i < len(items):
        a, b, p, _ = items[i]
        j = i + 1
        while j < len(items):
            lo, hi, k, strong = items[j]
            if k == p:
                b = max(b, hi)
            elif strong:
                break
            j += 1
        segs.append(BranchSegment(0, a, b))
        ps.append(p)
        i += 1
        while i < len(items) and items[i][0] <= b:
            i += 1
    return Partition(tuple(segs), tuple(ps), xf.h, xf.exact)


# --- itineraries --------------------------------------------------------------------


def locate(p: Point, part: Partition, c: Fraction):
    """``(i, k)`` with ``p`` in ``X_i + k`` or ``None`` (dustbin or ``T_R``)."""
    k = xf_copy(p, part.reach, c)
    if k is None:
        return None
    i = part.index_of(height(p))
    return None if i is None else (i, k)


@dataclass(frozen=True)
class Itinerary:
    symbols: tuple
    displacements: tuple
    escape: Optional[int] = None
    period: Optional[int] = None
    preperiod: Optional[int] = None

    @property
    def escaped(self) -> bool:
        return self.escape is not None


def itinerary(m: PAMap, p: Point, part: Partition, n: int) -> Itinerary:
    """Symbols of the orbit of ``p`` for ``n`` steps.

    The orbit is stopped at the first point falling outside ``U (X_i + Z)``;
    that step is reported as ``escape``.  When the orbit repeats modulo 1 the
    period is recorded so the rotation number can be read off exactly.
    """
    c = m.c
    symbols, acc = [], []
    seen = {}
    x = p
    loc = locate(x, part, c)
    if loc is None:
        return Itinerary((), (), escape=0)
    k0 = loc[1]
    period = preperiod = None
    for step in range(n + 1):
        key = reduce(x, c)[0]
        if period is None and key in seen:
            preperiod = seen[key]
            period = step - preperiod
        seen.setdefault(key, step)
        if step == n:
            break
        symbols.append(loc[0])
        x = evaluate(m, x)
        loc = locate(x, part, c)
        if loc is None:
            return Itinerary(tuple(symbols), tuple(acc), escape=step + 1)
        # equals the running sum of p_i except where the orbit touches T_R
        acc.append(loc[1] - k0)
    return Itinerary(tuple(symbols), tuple(acc), period=period, preperiod=preperiod)


def rho_from_itinerary(it: Itinerary, part: Partition) -> RhoBounds:
    """Rotation bounds read from the accumulated displacements of an itinerary."""
    if not it.symbols:
        raise ValueError("empty itinerary")
    if it.period is not None:
        j, L = it.preperiod, it.period
        d = list((0,) + it.displacements)
        rho = Fraction(d[j + L] - d[j], L)
        return RhoBounds(rho, rho, len(it.symbols), exact=True, period=L)
    N = len(it.displacements)
    ratios = [Fraction(d, n) for n, d in enumerate(it.displacements, start=1)
              if n >= _window_start(N)]
    return RhoBounds(float(min(ratios)), float(max(ratios)), N)
