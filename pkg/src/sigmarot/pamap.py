"""Piecewise-affine continuous maps of degree 1 on the sigma covering.

A map is given on the fundamental domain, the line segment ``[c, c+1]`` plus
branch copy 0.  Between two consecutive breakpoints it runs along the geodesic
joining the two image points at constant speed, and the rest of ``T`` is
handled by ``F(x + k) = F(x) + k``.

The workhorse is :func:`pieces`, which splits an iterate ``F^n`` restricted to
a segment into pieces that are affine onto a segment of a single edge.  Almost
every exact computation in the package (coverings, preimages, fixed points,
Markov graphs) is a scan over those pieces.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .space import (
    Branch,
    BranchSegment,
    Line,
    Point,
    as_fraction,
    branch_point,
    format_point,
    height,
    legs,
    path_length,
    reduce,
    retract,
    translate,
)

__all__ = [
    "PAMap",
    "Piece",
    "Preimage",
    "validate",
    "evaluate",
    "iterate",
    "pieces",
    "segment_pieces",
    "image_of_segment",
    "preimages_in_segment",
    "fixed_points",
    "power",
    "shift",
    "edge_of",
    "edge_coord",
    "FloatMap",
]


@dataclass(frozen=True)
class PAMap:
    """Piecewise-affine degree-1 map.

    ``line_breaks`` holds ``(x, F(x))`` pairs with ``x`` running from ``c`` to
    ``c + 1``; ``branch_breaks`` holds ``(s, F(branch_point(0, s)))`` with
    ``s`` running from 0 to 1.
    """

    line_breaks: tuple
    branch_breaks: tuple
    c: Fraction = Fraction(0)
    _line_xs: tuple = field(init=False, repr=False, compare=False)
    _branch_ss: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lb = tuple((as_fraction(x), p) for x, p in self.line_breaks)
        bb = tuple((as_fraction(s), p) for s, p in self.branch_breaks)
        object.__setattr__(self, "line_breaks", lb)
        object.__setattr__(self, "branch_breaks", bb)
        object.__setattr__(self, "c", as_fraction(self.c))
        object.__setattr__(self, "_line_xs", tuple(x for x, _ in lb))
        object.__setattr__(self, "_branch_ss", tuple(s for s, _ in bb))

    def __call__(self, p: Point) -> Point:
        return evaluate(self, p)

    def check(self) -> "PAMap":
        problems = validate(self)
        if problems:
            raise ValueError("invalid map: " + "; ".join(problems))
        return self


class Piece(NamedTuple):
    """``F^n`` maps parameters ``[t0, t1]`` affinely onto the segment ``q0 -> q1``."""

    t0: Fraction
    t1: Fraction
    q0: Point
    q1: Point


class Preimage(NamedTuple):
    point: Point
    flat: bool


def validate(m: PAMap) -> list:
    """Return the list of violated invariants; empty means the map is usable."""
    problems = []
    c = m.c
    if not 0 <= c < 1:
        problems.append(f"attachment offset {c} outside [0, 1)")
    for name, breaks, first, last in (
        ("line", m.line_breaks, c, c + 1),
        ("branch", m.branch_breaks, Fraction(0), Fraction(1)),
    ):
        if len(breaks) < 2:
            problems.append(f"{name} block needs at least two breakpoints")
            continue
        coords = [x for x, _ in breaks]
        if any(b <= a for a, b in zip(coords, coords[1:])):
            problems.append(f"{name} breakpoints are not strictly increasing")
        if coords[0] != first or coords[-1] != last:
            problems.append(f"{name} breakpoints must run from {first} to {last}")
    if len(m.line_breaks) >= 2:
        lo, hi = m.line_breaks[0][1], m.line_breaks[-1][1]
        if translate(lo, 1) != hi:
            problems.append(
                f"seam: image of {c + 1} is {format_point(hi)}, "
                f"expected {format_point(translate(lo, 1))}"
            )
    if m.line_breaks and m.branch_breaks:
        if m.branch_breaks[0][1] != m.line_breaks[0][1]:
            problems.append(
                "attachment: image of branch height 0 differs from image of line point c"
            )
    return problems


def _bracket(coords: Sequence[Fraction], u: Fraction) -> int:
    i = bisect.bisect_right(coords, u) - 1
    return min(max(i, 0), len(coords) - 2)


def _eval_fundamental(m: PAMap, breaks, coords, u: Fraction) -> Point:
    i = _bracket(coords, u)
    u0, p0 = breaks[i]
    u1, p1 = breaks[i + 1]
    if u == u0:
        return p0
    if u == u1:
        return p1
    return _geodesic_at(p0, p1, (u - u0) / (u1 - u0), m.c)


def _geodesic_at(p: Point, q: Point, t: Fraction, c: Fraction) -> Point:
    # inlined geodesic_eval without the argument checks
    total = path_length(p, q, c)
    target = t * total
    for a, b in legs(p, q, c):
        ell = path_length(a, b, c)
        if target <= ell:
            f = target / ell
            if isinstance(a, Line) and isinstance(b, Line):
                return Line(a.x + f * (b.x - a.x))
            n = a.n if isinstance(a, Branch) else b.n
            sa, sb = height(a), height(b)
            return branch_point(n, sa + f * (sb - sa), c)
        target -= ell
    return q


def evaluate(m: PAMap, p: Point) -> Point:
    if isinstance(p, Line):
        q, k = reduce(p, m.c)
        return translate(_eval_fundamental(m, m.line_breaks, m._line_xs, q.x), k)
    return translate(_eval_fundamental(m, m.branch_breaks, m._branch_ss, p.s), p.n)


def iterate(m: PAMap, p: Point, n: int) -> Point:
    for _ in range(n):
        p = evaluate(m, p)
    return p


# --- edges and coordinates -----------------------------------------------------


def edge_of(a: Point, b: Point):
    """Edge holding the segment ``a -> b``: ``None`` for the line, else the copy index."""
    if isinstance(a, Branch):
        return a.n
    if isinstance(b, Branch):
        return b.n
    return None


def edge_coord(p: Point, edge, c: Fraction):
    """Coordinate of ``p`` on ``edge`` (line coordinate or height), ``None`` if off it."""
    if edge is None:
        return p.x if isinstance(p, Line) else None
    if isinstance(p, Branch):
        return p.s if p.n == edge else None
    return Fraction(0) if p.x == edge + c else None


def _point_on_edge(edge, u: Fraction, c: Fraction) -> Point:
    return Line(u) if edge is None else branch_point(edge, u, c)


def _edge_breaks(m: PAMap, edge, lo: Fraction, hi: Fraction):
    """Breakpoint coordinates of ``F`` strictly inside ``(lo, hi)`` on ``edge``."""
    if edge is not None:
        return [s for s in m._branch_ss if lo < s < hi]
    c = m.c
    out = []
    for k in range(math.floor(lo - c) - 1, math.floor(hi - c) + 2):
        for x in m._line_xs[:-1]:
            u = x + k
            if lo < u < hi:
                out.append(u)
    return sorted(out)


def _pieces_once(m: PAMap, a: Point, b: Point):
    """Pieces of ``F`` on the single-edge segment ``a -> b``, parameter in [0, 1]."""
    if a == b:
        fa = evaluate(m, a)
        return [Piece(Fraction(0), Fraction(1), fa, fa)]
    c = m.c
    edge = edge_of(a, b)
    ua, ub = edge_coord(a, edge, c), edge_coord(b, edge, c)
    lo, hi = min(ua, ub), max(ua, ub)
    cuts = _edge_breaks(m, edge, lo, hi)
    if ub < ua:
        cuts.reverse()
    us = [ua] + cuts + [ub]
    span = ub - ua
    out = []
    for u0, u1 in zip(us, us[1:]):
        t0, t1 = (u0 - ua) / span, (u1 - ua) / span
        f0 = evaluate(m, _point_on_edge(edge, u0, c))
        f1 = evaluate(m, _point_on_edge(edge, u1, c))
        if f0 == f1:
            out.append(Piece(t0, t1, f0, f1))
            continue
        total = path_length(f0, f1, c)
        acc = Fraction(0)
        for q0, q1 in legs(f0, f1, c):
            ell = path_length(q0, q1, c)
            s0, s1 = acc / total, (acc + ell) / total
            out.append(Piece(t0 + s0 * (t1 - t0), t0 + s1 * (t1 - t0), q0, q1))
            acc += ell
    return out


def pieces(m: PAMap, a: Point, b: Point, n: int = 1, max_pieces: int = 200_000):
    """Pieces of ``F^n`` on the segment ``a -> b`` (both ends on one edge).

    Each returned :class:`Piece` says that, for parameters ``t`` in
    ``[t0, t1]`` (``t`` measured as a fraction of the segment from ``a``),
    ``F^n`` moves affinely from ``q0`` to ``q1`` and ``q0``, ``q1`` share an
    edge.  Constant pieces have ``q0 == q1``.
    """
    current = [Piece(Fraction(0), Fraction(1), a, b)]
    for _ in range(n):
        nxt = []
        for t0, t1, q0, q1 in current:
            if q0 == q1:
                fq = evaluate(m, q0)
                nxt.append(Piece(t0, t1, fq, fq))
                continue
            width = t1 - t0
            for s0, s1, r0, r1 in _pieces_once(m, q0, q1):
                nxt.append(Piece(t0 + s0 * width, t0 + s1 * width, r0, r1))
        if len(nxt) > max_pieces:
            raise RuntimeError(f"piece count {len(nxt)} exceeds the cap {max_pieces}")
        current = nxt
    return current


def segment_pieces(m: PAMap, seg: BranchSegment, n: int = 1):
    """Pieces of ``F^n`` on a branch segment, with parameters given as heights."""
    a = branch_point(seg.n, seg.lo, m.c)
    b = branch_point(seg.n, seg.hi, m.c)
    span = seg.hi - seg.lo
    return [
        Piece(seg.lo + t0 * span, seg.lo + t1 * span, q0, q1)
        for t0, t1, q0, q1 in pieces(m, a, b, n)
    ]


def image_of_segment(m: PAMap, seg: BranchSegment, n: int = 1):
    """``F^n(seg)`` as a list of single-edge geodesic arcs ``(start, end)``."""
    arcs = []
    for _, _, q0, q1 in segment_pieces(m, seg, n):
        if arcs and arcs[-1][1] == q0 and q0 != q1 and edge_of(*arcs[-1]) == edge_of(q0, q1) \
                and arcs[-1][0] != arcs[-1][1]:
            # merge collinear continuation on the same edge in the same direction
            e = edge_of(q0, q1)
            a0 = edge_coord(arcs[-1][0], e, m.c)
            a1 = edge_coord(q0, e, m.c)
            b1 = edge_coord(q1, e, m.c)
            if (a1 - a0) * (b1 - a1) > 0:
                arcs[-1] = (arcs[-1][0], q1)
                continue
        if q0 == q1 and arcs and q0 in arcs[-1]:
            continue
        arcs.append((q0, q1))
    return arcs


def _solve_on_piece(piece: Piece, target: Point, c: Fraction):
    """Parameters in the piece where the affine image hits ``target``."""
    t0, t1, q0, q1 = piece
    if q0 == q1:
        return (t0, t1, True) if q0 == target else None
    edge = edge_of(q0, q1)
    v = edge_coord(target, edge, c)
    if v is None:
        return None
    v0, v1 = edge_coord(q0, edge, c), edge_coord(q1, edge, c)
    if not min(v0, v1) <= v <= max(v0, v1):
        return None
    t = t0 + (v - v0) / (v1 - v0) * (t1 - t0)
    return (t, t, False)


def preimages_in_segment(m: PAMap, target: Point, dom: BranchSegment, n: int = 1):
    """All ``x`` in ``dom`` with ``F^n(x) == target``, sorted by height.

    Where ``F^n`` is constant at ``target`` on a whole subsegment the two ends
    of that subsegment are returned with ``flat=True``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    found = {}
    for piece in segment_pieces(m, dom, n):
        hit = _solve_on_piece(piece, target, m.c)
        if hit is None:
            continue
        lo, hi, flat = hit
        for s in {lo, hi}:
            found[s] = found.get(s, False) or flat
    return [Preimage(branch_point(dom.n, s, m.c), flat) for s, flat in sorted(found.items())]


def fixed_points(m: PAMap, a: Point, b: Point, n: int = 1, shift: int = 0):
    """Points ``x`` of the segment ``a -> b`` with ``F^n(x) == x + shift``.

    Solved exactly piece by piece.  A piece on which ``F^n - shift`` is the
    identity contributes its two ends.  Results are sorted along ``a -> b``.
    """
    c = m.c
    edge = edge_of(a, b)
    ua, ub = edge_coord(a, edge, c), edge_coord(b, edge, c)
    ts = set()
    for t0, t1, q0, q1 in pieces(m, a, b, n):
        q0, q1 = translate(q0, -shift), translate(q1, -shift)
        x0 = ua + t0 * (ub - ua)
        x1 = ua + t1 * (ub - ua)
        if q0 == q1:
            # constant piece: fixed only where the domain meets the value
            v = edge_coord(q0, edge, c)
            if v is not None and min(x0, x1) <= v <= max(x0, x1):
                ts.add(t0 if x1 == x0 else t0 + (v - x0) / (x1 - x0) * (t1 - t0))
            continue
        e = edge_of(q0, q1)
        if e != edge:
            # the image may still touch the domain edge at the attachment point
            for q, t in ((q0, t0), (q1, t1)):
                v = edge_coord(q, edge, c)
                x = ua + t * (ub - ua)
                if v is not None and v == x:
                    ts.add(t)
            continue
        v0, v1 = edge_coord(q0, e, c), edge_coord(q1, e, c)
        # solve v0 + s (v1 - v0) == x0 + s (x1 - x0) for s in [0, 1]
        dv, dx = v1 - v0, x1 - x0
        if dv == dx:
            if v0 == x0:
                ts.update((t0, t1))
            continue
        s = (x0 - v0) / (dv - dx)
        if 0 <= s <= 1:
            ts.add(t0 + s * (t1 - t0))
    return [_point_on_edge(edge, ua + t * (ub - ua), c) for t in sorted(ts)]


def shift(m: PAMap, k: int) -> PAMap:
    """The map ``F + k``."""
    return PAMap(
        tuple((x, translate(p, k)) for x, p in m.line_breaks),
        tuple((s, translate(p, k)) for s, p in m.branch_breaks),
        m.c,
    )


def _breaks_from_pieces(ps, lo, hi):
    out = []
    for t0, t1, q0, q1 in ps:
        u0, u1 = lo + t0 * (hi - lo), lo + t1 * (hi - lo)
        if not out:
            out.append((u0, q0))
        elif out[-1][1] != q0:
            raise AssertionError("pieces are not continuous")
        if u1 > out[-1][0]:
            out.append((u1, q1))
    return tuple(out)


def power(m: PAMap, n: int, k: int = 0) -> PAMap:
    """The map ``F^n + k`` as a new :class:`PAMap` (``n >= 1``)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    c = m.c
    lp = pieces(m, Line(c), Line(c + 1), n)
    bp = pieces(m, Line(c), Branch(0, Fraction(1)), n)
    out = PAMap(_breaks_from_pieces(lp, c, c + 1), _breaks_from_pieces(bp, Fraction(0), Fraction(1)), c)
    return shift(out, k) if k else out


# --- float evaluation --------------------------------------------------------------


class FloatMap:
    """Vectorised float64 evaluation of a :class:`PAMap`.

    Points are held in three arrays: ``kind`` (0 line, 1 branch), ``a`` (line
    coordinate or branch copy) and ``s`` (height, 0 on the line).  Used for
    long orbit sweeps where exact arithmetic would grow without bound.
    """

    def __init__(self, m: PAMap):
        self.c = float(m.c)
        self._line = self._compile(m, m.line_breaks)
        self._branch = self._compile(m, m.branch_breaks)

    @staticmethod
    def _compile(m, breaks):
        c = m.c
        coords = np.array([float(u) for u, _ in breaks])
        npieces = len(breaks) - 1
        tend = np.full((npieces, 3), np.inf)
        tstart = np.zeros((npieces, 3))
        kind = np.zeros((npieces, 3), dtype=np.int64)
        copy = np.zeros((npieces, 3))
        v0 = np.zeros((npieces, 3))
        v1 = np.zeros((npieces, 3))
        nlegs = np.ones(npieces, dtype=np.int64)
        for i in range(npieces):
            p, q = breaks[i][1], breaks[i + 1][1]
            lg = legs(p, q, c) or [(p, p)]
            total = path_length(p, q, c) or Fraction(1)
            acc = Fraction(0)
            nlegs[i] = len(lg)
            for j, (a, b) in enumerate(lg):
                e = edge_of(a, b)
                ell = path_length(a, b, c)
                tstart[i, j] = float(acc / total)
                tend[i, j] = float((acc + ell) / total)
                acc += ell
                kind[i, j] = 0 if e is None else 1
                copy[i, j] = 0 if e is None else e
                v0[i, j] = float(edge_coord(a, e, c))
                v1[i, j] = float(edge_coord(b, e, c))
            tend[i, len(lg) - 1] = np.inf
        return coords, tstart, tend, kind, copy, v0, v1, nlegs

    def __call__(self, kind, a, s):
        kind = np.asarray(kind)
        a = np.asarray(a, dtype=float)
        s = np.asarray(s, dtype=float)
        out_kind = np.empty_like(kind)
        out_a = np.empty_like(a)
        out_s = np.empty_like(s)
        is_line = kind == 0
        for mask, table in ((is_line, self._line), (~is_line, self._branch)):
            if not mask.any():
                continue
            if table is self._line:
                k = np.floor(a[mask] - self.c)
                u = a[mask] - k
            else:
                k = a[mask]
                u = np.clip(s[mask], 0.0, 1.0)
            ok, oa, os_ = self._eval(table, u, k)
            out_kind[mask], out_a[mask], out_s[mask] = ok, oa, os_
        return out_kind, out_a, out_s

    def _eval(self, table, u, k):
        coords, tstart, tend, kind, copy, v0, v1, nlegs = table
        idx = np.clip(np.searchsorted(coords, u, side="right") - 1, 0, len(coords) - 2)
        width = coords[idx + 1] - coords[idx]
        t = np.clip((u - coords[idx]) / width, 0.0, 1.0)
        j = (t > tend[idx, 0]).astype(np.int64) + (t > tend[idx, 1]).astype(np.int64)
        j = np.minimum(j, nlegs[idx] - 1)
        ts, te = tstart[idx, j], tend[idx, j]
        span = np.where(np.isfinite(te), te - ts, 1.0 - ts)
        span = np.where(span > 0, span, 1.0)
        f = np.clip((t - ts) / span, 0.0, 1.0)
        val = v0[idx, j] + f * (v1[idx, j] - v0[idx, j])
        kd = kind[idx, j]
        branch = kd == 1
        out_a = np.where(branch, copy[idx, j] + k, val + k)
        out_s = np.where(branch, np.clip(val, 0.0, 1.0), 0.0)
        # height 0 on a branch is the attachment point on the line
        collapse = branch & (out_s <= 0.0)
        out_a = np.where(collapse, out_a + self.c, out_a)
        kd = np.where(collapse, 0, kd)
        return kd, out_a, out_s

    def retract(self, kind, a):
        return np.where(np.asarray(kind) == 0, a, np.asarray(a) + self.c)

    @staticmethod
    def encode(points: Sequence[Point]):
        kind = np.array([0 if isinstance(p, Line) else 1 for p in points], dtype=np.int64)
        a = np.array([float(p.x) if isinstance(p, Line) else float(p.n) for p in points])
        s = np.array([0.0 if isinstance(p, Line) else float(p.s) for p in points])
        return kind, a, s
