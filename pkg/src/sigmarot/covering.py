"""Positive coverings, chains of coverings and the periodic points they force.

All intervals live on branch copy 0 inside ``X_F`` and are described by
:class:`~sigmarot.space.BranchSegment`.  ``I`` positively ``F^n``-covers
``J + p`` when there are ``x <= y`` in ``I`` with ``r(F^n(x)) <= min J`` and
``r(F^n(y)) >= max J``, where ``r`` is the retraction of ``T - p`` onto
``X_F``.  Because that retraction is continuous, a positive covering forces
a subinterval of ``I`` mapped onto ``J + p`` with the orientation preserved,
and a closed chain of them forces a periodic point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .cycles import closed_walk_with_mean
from .dynamics import XF, Partition, compute_XF, partition_XF
from .markov import NotMarkov, markov_vertices, tr_graph, walk_point, xf_graph
from .pamap import (PAMap, edge_coord, edge_of, fixed_points, image_of_segment, iterate,
                    preimages_in_segment, segment_pieces)
from .space import BranchSegment, Line, Point, branch_point, height, on_branch, retract, translate

__all__ = [
    "CoverStep",
    "Chain",
    "NoCovering",
    "height_profile",
    "positively_covers",
    "chain_from_steps",
    "chain_concat",
    "chain_power",
    "chain_translate",
    "chain_fixed_point",
    "follows_chain",
    "horseshoe_chain",
    "leftmost_anchor",
    "PeriodicPoint",
    "PeriodicNotFound",
    "find_periodic_mod1",
]


class NoCovering(ValueError):
    """A covering needed by a construction does not hold."""


@dataclass(frozen=True)
class CoverStep:
    """``source => target + p`` under ``F^n`` with witnesses ``x <= y`` (heights)."""

    source: BranchSegment
    target: BranchSegment
    p: int
    n: int = 1
    x: Optional[Fraction] = None
    y: Optional[Fraction] = None

    def arrow(self) -> str:
        power = "" if self.n == 1 else f"^{self.n}"
        sign = "+" if self.p >= 0 else "-"
        return f"{self.source} =F{power}=> {self.target} {sign} {abs(self.p)}"


@dataclass(frozen=True)
class Chain:
    """Sequence of coverings ``I_0 => I_1 + p_1 => I_2 + p_2 => ...``.

    ``steps[j].p`` is the displacement of that single step, so the absolute
    copy of ``I_j`` is ``offset + p_1 + ... + p_j``.
    """

    steps: tuple
    offset: int = 0

    @property
    def L(self) -> int:
        return sum(s.n for s in self.steps)

    @property
    def W(self) -> int:
        return sum(s.p for s in self.steps)

    @property
    def closed(self) -> bool:
        return bool(self.steps) and self.steps[-1].target == self.steps[0].source

    @property
    def rotation(self) -> Fraction:
        return Fraction(self.W, self.L)

    def __len__(self):
        return len(self.steps)

    def __str__(self):
        if not self.steps:
            return "(empty chain)"
        parts = [f"{self.steps[0].source}" + (f" + {self.offset}" if self.offset else "")]
        acc = self.offset
        for s in self.steps:
            acc += s.p
            power = "" if s.n == 1 else f"^{s.n}"
            parts.append(f"=F{power}=> {s.target} + {acc}")
        return " ".join(parts)


# --- height profiles --------------------------------------------------------------


def height_profile(m: PAMap, seg: BranchSegment, p: int, n: int, h: Fraction):
    """Pieces ``(t0, t1, g0, g1)`` of ``t -> r_X(F^n(t) - p)`` over ``seg``.

    ``t`` and ``g`` are heights; on each piece ``g`` is affine.  Pieces are
    split where the image crosses the bottom ``h`` of ``X_F`` so that the
    clamp ``max(h, .)`` stays affine.
    """
    c = m.c
    out = []
    for t0, t1, q0, q1 in segment_pieces(m, seg, n):
        q0, q1 = translate(q0, -p), translate(q1, -p)
        if q0 == q1:
            s = on_branch(q0, 0, c)
            g = max(h, s) if s is not None else h
            out.append((t0, t1, g, g))
            continue
        if edge_of(q0, q1) != 0:
            out.append((t0, t1, h, h))
            continue
        v0, v1 = edge_coord(q0, 0, c), edge_coord(q1, 0, c)
        if min(v0, v1) >= h:
            out.append((t0, t1, v0, v1))
        elif max(v0, v1) <= h:
            out.append((t0, t1, h, h))
        else:
            tc = t0 + (h - v0) / (v1 - v0) * (t1 - t0)
            out.append((t0, tc, max(h, v0), h))
            out.append((tc, t1, h, max(h, v1)))
    return out


def _at(t0, t1, g0, g1, t):
    if t1 == t0:
        return g0
    return g0 + (g1 - g0) * (t - t0) / (t1 - t0)


def _cross(t0, t1, g0, g1, level):
    return t0 + (level - g0) * (t1 - t0) / (g1 - g0)


def _first(profile, test, level, start=None):
    """Least ``t >= start`` with ``test(g(t), level)`` (test is ``<=`` or ``>=``)."""
    for t0, t1, g0, g1 in profile:
        if start is not None:
            if t1 < start:
                continue
            if t0 < start:
                g0, t0 = _at(t0, t1, g0, g1, start), start
        if test(g0, level):
            return t0
        if test(g1, level):
            return _cross(t0, t1, g0, g1, level)
    return None


def _last(profile, test, level, end=None):
    """Greatest ``t <= end`` with ``test(g(t), level)``."""
    for t0, t1, g0, g1 in reversed(profile):
        if end is not None:
            if t0 > end:
                continue
            if t1 > end:
                g1, t1 = _at(t0, t1, g0, g1, end), end
        if test(g1, level):
            return t1
        if test(g0, level):
            return _cross(t0, t1, g0, g1, level)
    return None


def _le(a, b):
    return a <= b


def _ge(a, b):
    return a >= b


def positively_covers(m: PAMap, I: BranchSegment, J: BranchSegment, p: int, n: int = 1,
                      xf: Optional[XF] = None) -> Optional[CoverStep]:
    """The step ``I => J + p`` under ``F^n`` if it holds, else ``None``."""
    xf = xf or compute_XF(m)
    if xf.empty:
        return None
    prof = height_profile(m, I, p, n, xf.h)
    x = _first(prof, _le, J.lo)
    y = _last(prof, _ge, J.hi)
    if x is None or y is None or x > y:
        return None
    return CoverStep(I, J, int(p), int(n), x, y)


# --- chain algebra ----------------------------------------------------------------


def chain_from_steps(steps: Sequence[CoverStep], offset: int = 0) -> Chain:
    steps = tuple(steps)
    for a, b in zip(steps, steps[1:]):
        if a.target != b.source:
            raise ValueError(f"steps do not connect: {a.target} vs {b.source}")
    return Chain(steps, offset)


def chain_concat(a: Chain, b: Chain) -> Chain:
    """``a`` followed by ``b``; ``b`` is moved to continue where ``a`` ends."""
    if a.steps and b.steps and a.steps[-1].target != b.steps[0].source:
        raise ValueError("chains do not connect")
    return chain_from_steps(a.steps + b.steps, a.offset)


def chain_power(a: Chain, k: int) -> Chain:
    if k < 0:
        raise ValueError("power must be >= 0")
    if k > 1 and not a.closed:
        raise ValueError("only closed chains can be repeated")
    return Chain(a.steps * k, a.offset)


def chain_translate(a: Chain, k: int) -> Chain:
    return Chain(a.steps, a.offset + k)


# --- periodic points from closed chains ------------------------------------------


def follows_chain(m: PAMap, x: Point, chain: Chain) -> bool:
    """Whether ``F^(n_1+...+n_j)(x)`` lies in ``I_j + p_1 + ... + p_j`` for every ``j``."""
    c = m.c
    first = chain.steps[0].source
    s = on_branch(x, chain.offset, c)
    if s is None or not first.lo <= s <= first.hi:
        return False
    copy = chain.offset
    for step in chain.steps:
        x = iterate(m, x, step.n)
        copy += step.p
        s = on_branch(x, copy, c)
        if s is None or not step.target.lo <= s <= step.target.hi:
            return False
    return True


def _pull_back(m, chain, h):
    """Nested interval ``K_0`` of ``I_0`` whose points follow the whole chain."""
    K = chain.steps[-1].target
    for step in reversed(chain.steps):
        prof = height_profile(m, step.source, step.p, step.n, h)
        u, v = K.lo, K.hi
        x1 = _first(prof, _le, u)
        y1 = _last(prof, _ge, v)
        if x1 is None or y1 is None or x1 > y1:
            raise NoCovering(f"{step.source} does not cover [{u}, {v}] + {step.p}")
        y = _first(prof, _ge, v, start=x1)
        x = _last(prof, _le, u, end=y)
        K = BranchSegment(0, x, y)
    return K


def chain_fixed_point(m: PAMap, chain: Chain, xf: Optional[XF] = None) -> Point:
    """A point ``x`` of ``I_0`` following the closed chain with ``F^L(x) = x + W``.

    The chain is pulled back to a subinterval ``K_0`` mapped onto ``I_0 + W``
    by ``F^L`` with orientation preserved; ``F^L - W`` then has a fixed point
    in ``K_0``, found exactly by solving on each affine piece and checked by
    iterating the orbit.
    """
    if not chain.closed:
        raise ValueError("chain is not closed")
    xf = xf or compute_XF(m)
    K = _pull_back(m, chain, xf.h)
    c, L, W = m.c, chain.L, chain.W
    a = branch_point(chain.offset, K.lo, c)
    b = branch_point(chain.offset, K.hi, c)
    if a == b:
        cands = [a]
    else:
        cands = fixed_points(m, a, b, L, W)
    for x in cands:
        if iterate(m, x, L) == translate(x, W) and follows_chain(m, x, chain):
            return x
    raise AssertionError(f"no verified fixed point of F^{L} - {W} in {K}")


# --- horseshoes -------------------------------------------------------------------


def _step(m, src, dst, p, n, xf):
    s = positively_covers(m, src, dst, p, n, xf)
    if s is None:
        raise NoCovering(f"{src} does not cover {dst} + {p} under F^{n}")
    return s


def horseshoe_chain(m: PAMap, I: BranchSegment, J: BranchSegment, m1: int, m2: int,
                    p: int, q: int, n: int = 1, xf: Optional[XF] = None) -> Chain:
    """Closed chain through ``I`` and ``J`` with ``W / L = n * p / (n * q)``.

    Needs ``I => I + m1``, ``I => J + m1``, ``J => I + m2``, ``J => J + m2``
    under ``F^n`` and ``m1 <= p/q <= m2``.  The chain is made of
    ``L_G = (m2 - m1) q`` steps of ``G = F^n - m1`` between ``I`` and ``J``, each
    contributing 0 or ``m2 - m1``, and then translated back to ``F^n``.
    """
    r = Fraction(p, q)
    p, q = r.numerator, r.denominator
    if not m1 <= r <= m2:
        raise ValueError(f"{r} is not in [{m1}, {m2}]")
    xf = xf or compute_XF(m)
    if r == m2:
        return chain_from_steps([_step(m, J, J, m2, n, xf)])
    if r == m1:
        return chain_from_steps([_step(m, I, I, m1, n, xf)])
    II = _step(m, I, I, m1, n, xf)
    IJ = _step(m, I, J, m1, n, xf)
    JJ = _step(m, J, J, m2, n, xf)
    JI = _step(m, J, I, m2, n, xf)
    pp = p - m1 * q
    d = m2 - m1
    steps = [II] * (d * q - 1 - pp) + [IJ] + [JJ] * (pp - 1) + [JI]
    return chain_from_steps(steps)


# --- leftmost anchors -------------------------------------------------------------


def leftmost_anchor(m: PAMap, Y: BranchSegment, q1: int, xf: Optional[XF] = None,
                    cap: int = 1000) -> Point:
    """Least point ``a`` of ``Y`` with ``F(a) = a + q1``, given ``Y => Y + q1``.

    The sequence ``a_0 = min Y``, ``a_(i+1)`` = least point of ``[a_i, y]``
    sent to ``a_i + q1`` increases towards that point (``y`` is a periodic
    point forced by the loop).  It is followed until it stops or enters the
    affine piece holding the limit, which is then returned exactly.
    """
    xf = xf or compute_XF(m)
    c = m.c
    loop = chain_from_steps([_step(m, Y, Y, q1, 1, xf)])
    y = height(chain_fixed_point(m, loop, xf))
    lo = Y.lo
    roots = fixed_points(m, branch_point(0, lo, c), branch_point(0, y, c), 1, q1)
    limit = height(roots[0])
    a = lo
    for _ in range(cap):
        if a == limit:
            break
        pre = preimages_in_segment(m, branch_point(q1, a, c), BranchSegment(0, a, y), 1)
        if not pre:
            raise AssertionError(f"no preimage of {a} + {q1} in [{a}, {y}]")
        nxt = height(pre[0].point)
        if nxt == a:
            return branch_point(0, a, c)
        if len(segment_pieces(m, BranchSegment(0, nxt, limit))) == 1:
            break
        a = nxt
    return branch_point(0, limit, c)


# --- periodic (mod 1) points with a prescribed rotation number --------------------


class PeriodicNotFound(LookupError):
    """No certificate for the requested rotation number within the search caps."""


@dataclass(frozen=True)
class PeriodicPoint:
    """``F^period(point) = point + displacement`` with ``displacement / period = rho``."""

    point: Point
    period: int
    displacement: int
    method: str
    chain: Optional[Chain] = None
    walk: Optional[tuple] = None

    @property
    def rho(self) -> Fraction:
        return Fraction(self.displacement, self.period)

    def verify(self, m: PAMap) -> bool:
        return iterate(m, self.point, self.period) == translate(self.point, self.displacement)


def _copies_touched(m, seg, h):
    lo = hi = None
    for q0, q1 in image_of_segment(m, seg):
        for q in (q0, q1):
            k = math.floor(retract(q, m.c) - m.c)
            lo = k if lo is None else min(lo, k)
            hi = k if hi is None else max(hi, k)
    return range(lo - 1, hi + 2)


def _candidate_segments(m, part, region, cap):
    try:
        segs = [V.segment for V in markov_vertices(m, part, cap)]
    except NotMarkov:
        segs = list(part.segments)
    if region is not None:
        segs = [s for s in segs if region.lo <= s.lo and s.hi <= region.hi]
    return [s for s in segs if s.lo < s.hi]


def _horseshoe_search(m, r, segs, xf):
    cache = {}

    def covers(a, b, k):
        key = (a, b, k)
        if key not in cache:
            cache[key] = positively_covers(m, segs[a], segs[b], k, 1, xf) is not None
        return cache[key]

    touched = [_copies_touched(m, s, xf.h) for s in segs]
    for a in range(len(segs)):
        own = [k for k in touched[a] if covers(a, a, k)]
        if r.denominator == 1 and int(r) in own:
            yield segs[a], segs[a], int(r), int(r)
        for b in range(len(segs)):
            if a == b:
                continue
            low = [k for k in own if k <= r and covers(a, b, k)]
            if not low:
                continue
            high = [k for k in touched[b] if k >= r and covers(b, b, k) and covers(b, a, k)]
            for m1 in sorted(low, reverse=True):
                for m2 in sorted(high):
                    yield segs[a], segs[b], m1, m2


def _realize_chain(m, chain, xf):
    x = chain_fixed_point(m, chain, xf)
    return PeriodicPoint(x, chain.L, chain.W, "horseshoe", chain=chain)


def find_periodic_mod1(m: PAMap, p: int, q: int, region: Optional[BranchSegment] = None,
                       part: Optional[Partition] = None, xf: Optional[XF] = None,
                       max_cycle_len: int = 48, cap: int = 400) -> PeriodicPoint:
    """A periodic (mod 1) point with rotation number exactly ``p / q``.

    Tried in order: a horseshoe of positive coverings between vertices of
    ``X_F`` (optionally only those inside ``region``), a closed walk of mean
    ``p / q`` in the Markov graph of ``X_F``, then the same two ideas on the
    line part ``T_R``.  The answer is always checked by exact iteration.
    """
    r = Fraction(p, q)
    xf = xf or compute_XF(m)
    budget = []
    if not xf.empty:
        part = part or partition_XF(m, xf)
        segs = _candidate_segments(m, part, region, cap)
        for I, J, m1, m2 in _horseshoe_search(m, r, segs, xf):
            try:
                chain = horseshoe_chain(m, I, J, m1, m2, r.numerator, r.denominator, 1, xf)
                return _checked(m, _realize_chain(m, chain, xf))
            except (NoCovering, AssertionError):
                continue
        budget.append(f"horseshoes over {len(segs)} segments")
        try:
            g = xf_graph(m, part, cap)
            nodes = None
            if region is not None:
                nodes = [i for i, V in enumerate(g.vertices) if region.lo <= V.lo and V.hi <= region.hi]
            walk = closed_walk_with_mean(g.n, g.triples(), r, nodes, max_cycle_len)
            if walk is not None:
                return _checked(m, _walk_result(m, g, walk, "markov-cycle"))
            budget.append(f"closed walks in the X_F graph ({g.n} vertices, length <= {max_cycle_len})")
        except NotMarkov:
            budget.append("X_F graph (not Markov within the cap)")
    if xf.h == 0:
        for k in range(1, 5):
            pts = fixed_points(m, Line(m.c), Line(m.c + 1), k * r.denominator, k * r.numerator)
            if pts:
                return _checked(m, PeriodicPoint(pts[0], k * r.denominator, k * r.numerator, "line"))
        budget.append("line solutions of F^kq(x) = x + kp for k <= 4")
    try:
        g = tr_graph(m, xf.h, cap)
        walk = closed_walk_with_mean(g.n, g.triples(), r, None, max_cycle_len)
        if walk is not None:
            return _checked(m, _walk_result(m, g, walk, "line-cycle"))
        budget.append(f"closed walks in the T_R graph ({g.n} vertices)")
    except NotMarkov:
        budget.append("T_R graph (not Markov within the cap)")
    raise PeriodicNotFound(f"no periodic point with rotation number {r}; searched: " + "; ".join(budget))


def _walk_result(m, g, walk, method):
    x = walk_point(m, g, walk)
    W = sum(g.edges[e].weight for e in walk)
    return PeriodicPoint(x, len(walk), W, method, walk=tuple(walk))


def _checked(m, res: PeriodicPoint) -> PeriodicPoint:
    if not res.verify(m):
        raise AssertionError(f"{res.point} does not satisfy F^{res.period}(x) = x + {res.displacement}")
    return res
