"""Markov partitions and their transition graphs.

A vertex is a compact arc of one edge of the fundamental domain: either a
piece of branch copy 0 (``kind == "B"``, coordinates are heights) or a piece
of the line inside ``[c, c + 1]`` (``kind == "L"``).  There is an edge
``A -> B`` of weight ``i`` when ``F(A)`` contains ``B + i``; it carries the
affine map from the coordinate on ``A`` to the coordinate on ``B`` of the
part of ``A`` landing on ``B + i``.  Composing those maps around a closed
walk gives a periodic point exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .dynamics import XF, Partition, compute_XF, in_TR, partition_XF, xf_copy
from .pamap import PAMap, edge_coord, edge_of, evaluate, iterate, pieces
from .space import Branch, BranchSegment, Line, Point, branch_point, height, reduce, translate

__all__ = [
    "Vertex",
    "Edge",
    "MarkovGraph",
    "NotMarkov",
    "markov_vertices",
    "tr_vertices",
    "build_graph",
    "xf_graph",
    "tr_graph",
    "walk_point",
    "walk_follows",
]

DEFAULT_POINT_CAP = 400


class NotMarkov(RuntimeError):
    """The forward orbits of the partition points did not close up."""

    def __init__(self, message, pending=()):
        super().__init__(message)
        self.pending = tuple(pending)


@dataclass(frozen=True)
class Vertex:
    kind: str
    lo: Fraction
    hi: Fraction
    parent: Optional[int] = None

    def point(self, u: Fraction, c: Fraction) -> Point:
        return Line(u) if self.kind == "L" else branch_point(0, u, c)

    def ends(self, c: Fraction):
        return self.point(self.lo, c), self.point(self.hi, c)

    @property
    def segment(self) -> BranchSegment:
        if self.kind != "B":
            raise TypeError("line vertices have no branch segment")
        return BranchSegment(0, self.lo, self.hi)

    def label(self) -> str:
        tag = "" if self.parent is None else f"X{self.parent}:"
        return f"{tag}{self.kind}[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    weight: int
    slope: Fraction
    intercept: Fraction

    @property
    def increasing(self) -> bool:
        return self.slope > 0

    def __call__(self, u: Fraction) -> Fraction:
        return self.slope * u + self.intercept


@dataclass(frozen=True)
class MarkovGraph:
    vertices: tuple
    edges: tuple
    c: Fraction = Fraction(0)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def triples(self):
        return [(e.src, e.dst, e.weight) for e in self.edges]

    def out_edges(self, v: int):
        return [i for i, e in enumerate(self.edges) if e.src == v]

    def vertices_of(self, parent: int):
        return [i for i, v in enumerate(self.vertices) if v.parent == parent]

    def to_dot(self, name: str = "markov") -> str:
        lines = [f"digraph {name} {{"]
        for i, v in enumerate(self.vertices):
            lines.append(f'  v{i} [label="{v.label()}"];')
        for e in self.edges:
            lines.append(f'  v{e.src} -> v{e.dst} [label="{e.weight}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


# --- partitions -------------------------------------------------------------------


def _close_points(m, seed, land, cap):
    """Add forward images of points until nothing new lands in a vertex interior.

    ``land(q)`` returns the coordinate to add for an image point ``q`` or
    ``None`` if the image needs no new endpoint.
    """
    pts = set(seed)
    queue = sorted(pts, key=lambda t: (t[0], t[1]))
    while queue:
        kind, u = queue.pop()
        for new in land(evaluate(m, _to_point(kind, u, m.c))):
            if new not in pts:
                pts.add(new)
                queue.append(new)
        if len(pts) > cap:
            raise NotMarkov(f"partition points exceed the cap {cap}",
                            sorted(queue, key=lambda t: (t[0], t[1]))[:10])
    return pts


def _to_point(kind, u, c):
    return Line(u) if kind == "L" else branch_point(0, u, c)


def markov_vertices(m: PAMap, part: Partition, cap: int = DEFAULT_POINT_CAP):
    """Refine every ``X_i`` into vertices whose endpoints are forward invariant.

    Endpoints are the ends of the ``X_i``, the branch breakpoints inside them
    and all images of endpoints landing strictly inside some ``X_i`` (mod 1).
    Images in ``T_R`` or in the dustbin need no new endpoint.
    """
    c, h = m.c, part.reach
    segs = part.segments

    def inside(s):
        return [seg for seg in segs if seg.lo < s < seg.hi]

    seed = set()
    for seg in segs:
        seed.add(("B", seg.lo))
        seed.add(("B", seg.hi))
        seed.update(("B", s) for s in m._branch_ss if seg.lo < s < seg.hi)

    def land(q):
        if xf_copy(q, h, c) is None or in_TR(q, h):
            return []
        s = height(q)
        return [("B", s)] if inside(s) else []

    pts = _close_points(m, seed, land, cap)
    out = []
    for i, seg in enumerate(segs, start=1):
        us = sorted(u for _, u in pts if seg.lo <= u <= seg.hi)
        if len(us) == 1:
            out.append(Vertex("B", us[0], us[0], i))
        for a, b in zip(us, us[1:]):
            out.append(Vertex("B", a, b, i))
    return out


def tr_vertices(m: PAMap, h: Fraction, cap: int = DEFAULT_POINT_CAP):
    """Vertices covering the fundamental domain of ``T_R``: the line and ``[0, h]``."""
    c = m.c
    seed = {("L", c)} | {("L", x) for x in m._line_xs[:-1]}
    if h > 0:
        seed.add(("B", h))
        seed.update(("B", s) for s in m._branch_ss if 0 < s < h)

    def land(q):
        if isinstance(q, Line):
            x = q.x - math.floor(q.x - c)
            return [("L", x)]
        if q.s <= h:
            return [("B", q.s)]
        return []

    pts = _close_points(m, seed, land, cap)
    xs = sorted(u for k, u in pts if k == "L") + [c + 1]
    out = [Vertex("L", a, b) for a, b in zip(xs, xs[1:])]
    if h > 0:
        ss = [Fraction(0)] + sorted(u for k, u in pts if k == "B")
        out += [Vertex("B", a, b) for a, b in zip(ss, ss[1:])]
    return out


# --- transition graphs ------------------------------------------------------------


def _targets(vertices, edge, v0, v1, c):
    """``(j, i)`` with vertex ``j`` shifted by ``i`` inside the image ``[v0, v1]`` on ``edge``."""
    lo, hi = min(v0, v1), max(v0, v1)
    out = []
    for j, B in enumerate(vertices):
        if edge is None:
            if B.kind != "L":
                continue
            for i in range(math.ceil(lo - B.lo), math.floor(hi - B.hi) + 1):
                out.append((j, i, i))
        elif B.kind == "B" and lo <= B.lo and B.hi <= hi:
            out.append((j, edge, 0))
    return out


def build_graph(m: PAMap, vertices: Sequence[Vertex]) -> MarkovGraph:
    c = m.c
    edges = {}
    for a, A in enumerate(vertices):
        pa, pb = A.ends(c)
        span = A.hi - A.lo
        for t0, t1, q0, q1 in pieces(m, pa, pb, 1):
            if q0 == q1:
                # a point vertex, or a flat piece landing on point vertices
                for j, B in enumerate(vertices):
                    if B.lo != B.hi:
                        continue
                    for k in _point_shifts(q0, B, c):
                        key = (a, j, k)
                        edges.setdefault(key, Edge(a, j, k, Fraction(0), B.lo))
                continue
            e = edge_of(q0, q1)
            v0, v1 = edge_coord(q0, e, c), edge_coord(q1, e, c)
            for j, weight, lift in _targets(vertices, e, v0, v1, c):
                # dst coordinate as an affine function of the src coordinate
                slope = (v1 - v0) / ((t1 - t0) * span)
                intercept = v0 - slope * (A.lo + t0 * span) - lift
                edges.setdefault((a, j, weight), Edge(a, j, weight, slope, intercept))
    ordered = tuple(edges[k] for k in sorted(edges))
    return MarkovGraph(tuple(vertices), ordered, c)


def _point_shifts(q, B, c):
    p = B.point(B.lo, c)
    q0, k = reduce(q, c)
    p0, kp = reduce(p, c)
    return [k - kp] if q0 == p0 else []


def xf_graph(m: PAMap, part: Optional[Partition] = None, cap: int = DEFAULT_POINT_CAP) -> MarkovGraph:
    part = part or partition_XF(m)
    return build_graph(m, markov_vertices(m, part, cap))


def tr_graph(m: PAMap, h: Optional[Fraction] = None, cap: int = DEFAULT_POINT_CAP) -> MarkovGraph:
    if h is None:
        h = compute_XF(m).h
    return build_graph(m, tr_vertices(m, h, cap))


# --- periodic points of closed walks ---------------------------------------------


def walk_follows(m: PAMap, g: MarkovGraph, walk: Sequence[int], x: Point) -> bool:
    """Whether ``F^j(x)`` lies in the ``j``-th vertex of ``walk`` shifted by the weights so far."""
    c = m.c
    acc = 0
    for j, ei in enumerate(walk):
        e = g.edges[ei]
        V = g.vertices[e.src]
        if not _in_vertex(x, V, acc, c):
            return False
        x = evaluate(m, x)
        acc += e.weight
    return _in_vertex(x, g.vertices[g.edges[walk[0]].src], acc, c)


def _in_vertex(p, V, k, c):
    if V.kind == "L":
        return isinstance(p, Line) and V.lo <= p.x - k <= V.hi
    u = edge_coord(p, k, c)
    return u is not None and V.lo <= u <= V.hi


def walk_point(m: PAMap, g: MarkovGraph, walk: Sequence[int]) -> Point:
    """Exact point ``x`` of the first vertex following the closed ``walk``.

    Returns ``x`` with ``F^L(x) = x + W`` (``L`` edges, total weight ``W``).
    """
    if not walk:
        raise ValueError("empty walk")
    for a, b in zip(walk, walk[1:] + walk[:1]):
        if g.edges[a].dst != g.edges[b].src:
            raise ValueError("walk is not closed")
    alpha, beta = Fraction(1), Fraction(0)
    for ei in walk:
        e = g.edges[ei]
        alpha, beta = e.slope * alpha, e.slope * beta + e.intercept
    V = g.vertices[g.edges[walk[0]].src]
    if alpha != 1:
        u = beta / (1 - alpha)
    elif beta == 0:
        u = V.lo
    else:
        raise AssertionError("walk map is a translation without fixed points")
    x = V.point(u, g.c)
    W = sum(g.edges[ei].weight for ei in walk)
    if iterate(m, x, len(walk)) != translate(x, W) or not walk_follows(m, g, walk, x):
        raise AssertionError(f"walk point {x} failed verification")
    return x
