"""Rotation sets: the line part ``I_0`` and the branch stages ``I_1, ..., I_N``.

``Rot(F)`` is the union of ``I_0`` (rotation numbers of points of the line)
and one interval per piece ``X_i`` of ``X_F``.  The stages are processed in
order: everything the earlier pieces ever reach is absorbed into a growing
invariant set ``T_i``, vertices of the Markov graph lying inside ``T_i`` are
deleted, and ``I_i`` is the cycle-mean range of what is left and still
reachable from ``X_i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import cycles
from .dynamics import XF, Partition, compute_XF, partition_XF, rho_bounds_batch
from .markov import MarkovGraph, NotMarkov, build_graph, markov_vertices, tr_graph
from .pamap import PAMap, evaluate, image_of_segment
from .space import Branch, Line, branch_point, height

__all__ = [
    "Stage",
    "RotR",
    "RotationSet",
    "markov_partition",
    "build_markov_graph",
    "cycle_mean_range",
    "oracle_cycle_enumeration",
    "rot_R",
    "rotation_set",
    "rationals_in",
    "envelope_rotation",
]

DEFAULT_ENVELOPE_CAP = 4096


def markov_partition(m: PAMap, part: Optional[Partition] = None, cap: int = 400):
    """Markov refinement of ``X_1..X_N``; raises :class:`NotMarkov` if there is none within ``cap``."""
    part = part or partition_XF(m)
    return markov_vertices(m, part, cap)


def build_markov_graph(m: PAMap, vertices) -> MarkovGraph:
    return build_graph(m, vertices)


def cycle_mean_range(g: MarkovGraph, nodes=None):
    """``(per_scc, union)`` of cycle-mean ranges; see :func:`sigmarot.cycles.cycle_mean_range`."""
    return cycles.cycle_mean_range(g.n, g.triples(), nodes)


def oracle_cycle_enumeration(g: MarkovGraph, max_len: int) -> set:
    """Means of all simple cycles and of all closed walks with at most ``max_len`` edges."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    triples = g.triples()
    return cycles.simple_cycle_means(g.n, triples, max_len) | cycles.closed_walk_means(g.n, triples, max_len)


# --- the line part ----------------------------------------------------------------


@dataclass(frozen=True)
class RotR:
    lo: Fraction
    hi: Fraction
    exact: bool
    method: str


def _line_values(m: PAMap):
    return [(x, p.x) for x, p in m.line_breaks]


def _line_map(m: PAMap, x: Fraction) -> Fraction:
    return evaluate(m, Line(x)).x


def _window_points(m, lo, hi):
    c = m.c
    xs = [x for x, _ in m.line_breaks[:-1]]
    out = []
    for k in range(math.floor(lo - c) - 1, math.floor(hi - c) + 2):
        out.extend(x + k for x in xs if lo <= x + k <= hi)
    return out


def _envelope(m: PAMap, upper: bool):
    """``x -> max_{y<=x} F(y)`` (upper) or ``x -> min_{y>=x} F(y)`` on the line."""
    vals = [p - x for x, p in _line_values(m)]
    K = math.ceil(max(vals) - min(vals)) + 2

    def f(x):
        if upper:
            ys = _window_points(m, x - K, x) + [x]
            return max(_line_map(m, y) for y in ys)
        ys = _window_points(m, x, x + K) + [x]
        return min(_line_map(m, y) for y in ys)

    return f


def envelope_rotation(m: PAMap, upper: bool, cap: int = DEFAULT_ENVELOPE_CAP):
    """Rotation number of an envelope map: ``(lo, hi, exact)``.

    The envelope is a nondecreasing degree-one lift, so every orbit has the
    same rotation number and ``|(f^n(x) - x) / n - rho| < 1 / n``.  An orbit
    repeating modulo 1 gives it exactly.
    """
    f = _envelope(m, upper)
    c = m.c
    x = c
    seen = {Fraction(0): 0}
    for n in range(1, cap + 1):
        x = f(x)
        frac = x - c - math.floor(x - c)
        if frac in seen:
            return _period_rho(f, c, seen[frac], n)
        seen[frac] = n
    d = x - c
    return d / cap - Fraction(1, cap), d / cap + Fraction(1, cap), False


def _period_rho(f, c, j, n):
    x = c
    for _ in range(j):
        x = f(x)
    y = x
    for _ in range(n - j):
        y = f(y)
    rho = (y - x) / (n - j)
    return rho, rho, True


def rot_R(m: PAMap, xf: Optional[XF] = None, cap: int = DEFAULT_ENVELOPE_CAP,
          samples: int = 200, iters: int = 2000) -> RotR:
    """Rotation interval ``I_0`` of the points of the line."""
    xf = xf or compute_XF(m)
    if xf.h == 0:
        lo_lo, lo_hi, lo_exact = envelope_rotation(m, upper=False, cap=cap)
        hi_lo, hi_hi, hi_exact = envelope_rotation(m, upper=True, cap=cap)
        if lo_exact and hi_exact:
            return RotR(lo_lo, hi_hi, True, "envelope")
    try:
        g = tr_graph(m, xf.h)
        _, union = cycle_mean_range(g)
        if len(union) == 1:
            return RotR(union[0][0], union[0][1], True, "markov")
        if union:
            return RotR(union[0][0], union[-1][1], False, "markov-hull")
    except NotMarkov:
        pass
    if xf.h == 0:
        return RotR(lo_lo, hi_hi, False, "envelope-bounds")
    c = m.c
    pts = [Line(c + Fraction(j, samples)) for j in range(samples)]
    res = rho_bounds_batch(m, pts, iters)
    lo = min(Fraction(r.lower) for r in res)
    hi = max(Fraction(r.upper) for r in res)
    return RotR(lo, hi, False, "sampling")


# --- staged assembly --------------------------------------------------------------


@dataclass(frozen=True)
class Stage:
    """``I_i``: ``index`` 0 is the line part, ``i >= 1`` the stage of ``X_i``."""

    index: int
    intervals: tuple
    threshold: Optional[Fraction] = None
    displacement: Optional[int] = None
    vertices: tuple = ()

    @property
    def empty(self) -> bool:
        return not self.intervals

    @property
    def hull(self):
        return (self.intervals[0][0], self.intervals[-1][1]) if self.intervals else None


@dataclass(frozen=True)
class RotationSet:
    """``Rot(F)`` as labelled stages and as a union of disjoint closed intervals."""

    stages: tuple
    components: tuple
    exact: bool
    problems: tuple = ()
    graph: Optional[MarkovGraph] = None
    partition: Optional[Partition] = None
    line: Optional[RotR] = None

    def __contains__(self, r) -> bool:
        r = Fraction(r)
        return any(lo <= r <= hi for lo, hi in self.components)

    def labelled(self):
        """``[(k, lo, hi)]`` for the nonempty stages, ``k`` the stage index."""
        out = []
        for st in self.stages:
            for lo, hi in st.intervals:
                out.append((st.index, lo, hi))
        return out


def _image_top(m, g, vidx):
    top = Fraction(0)
    for arc in image_of_segment(m, g.vertices[vidx].segment):
        top = max(top, height(arc[0]), height(arc[1]))
    return top


def _reachable(g: MarkovGraph, start, alive=None):
    seen = set(v for v in start if alive is None or v in alive)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for ei in g.out_edges(v):
            w = g.edges[ei].dst
            if w not in seen and (alive is None or w in alive):
                seen.add(w)
                stack.append(w)
    return seen


def rotation_set(m: PAMap, xf: Optional[XF] = None, cap: int = 400) -> RotationSet:
    """``Rot(F) = I_0 U I_1 U ... U I_N`` with empty stages dropped."""
    xf = xf or compute_XF(m)
    line = rot_R(m, xf)
    exact = line.exact and xf.exact
    stages = [Stage(0, ((line.lo, line.hi),))]
    problems = []
    part = partition_XF(m, xf)
    if part.N == 0:
        return RotationSet(tuple(stages), tuple(cycles.merge_intervals([(line.lo, line.hi)])),
                           exact, (), None, part, line)
    try:
        g = build_graph(m, markov_vertices(m, part, cap))
    except NotMarkov as err:
        return _approximate(m, xf, part, line, stages, str(err))
    t = xf.h
    tops = {}
    for i in range(1, part.N + 1):
        if i > 1:
            prev = g.vertices_of(i - 1)
            reach = _reachable(g, prev)
            for v in reach:
                if v not in tops:
                    tops[v] = _image_top(m, g, v)
            t = max([t, part.segments[i - 2].hi] + [tops[v] for v in reach])
        alive = {v for v, V in enumerate(g.vertices) if V.hi > t}
        own = [v for v in g.vertices_of(i) if v in alive]
        nodes = _reachable(g, own, alive)
        _, union = cycle_mean_range(g, nodes)
        p_i = part.displacements[i - 1]
        if union:
            if len(union) > 1:
                problems.append(f"I_{i} is not a single interval: {union}")
            if not any(lo <= p_i <= hi for lo, hi in union):
                problems.append(f"I_{i} = {union} does not contain p_{i} = {p_i}")
        stages.append(Stage(i, tuple(union), t, p_i, tuple(sorted(nodes))))
    comps = cycles.merge_intervals(iv for st in stages for iv in st.intervals)
    return RotationSet(tuple(stages), tuple(comps), exact and not problems,
                       tuple(problems), g, part, line)


def _approximate(m, xf, part, line, stages, reason):
    """Sampled rotation bounds over ``X_F`` when no Markov partition was found."""
    c, h = m.c, xf.h
    n = 200
    pts = [branch_point(0, h + (1 - h) * Fraction(j, n), c) for j in range(n + 1)]
    res = rho_bounds_batch(m, pts, 2000)
    ivs = [(Fraction(r.lower).limit_denominator(10**6), Fraction(r.upper).limit_denominator(10**6))
           for r in res]
    stage = Stage(1, ((min(lo for lo, _ in ivs), max(hi for _, hi in ivs)),))
    comps = cycles.merge_intervals([iv for st in stages for iv in st.intervals] + list(stage.intervals))
    return RotationSet(tuple(stages) + (stage,), tuple(comps), False, (reason,), None, part, line)


def rationals_in(rs: RotationSet, max_den: int):
    """``[(r, tag)]`` for every ``r = p/q`` in the set with ``q <= max_den``.

    ``tag`` is ``"boundary"`` for component endpoints and ``"interior"``
    otherwise; the list is sorted and free of repeats.
    """
    out = {}
    for lo, hi in rs.components:
        for q in range(1, max_den + 1):
            for p in range(math.ceil(lo * q), math.floor(hi * q) + 1):
                r = Fraction(p, q)
                if r not in out:
                    out[r] = "boundary" if r in (lo, hi) else "interior"
    return sorted(out.items())
