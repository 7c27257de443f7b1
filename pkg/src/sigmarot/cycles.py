"""Cycle means in integer-weighted directed multigraphs.

Graphs are given as a vertex count and a list of ``(u, v, w)`` edges; parallel
edges with different weights are allowed.  Extremal cycle means come from
Karp's dynamic program; the enumeration helpers are kept deliberately naive
so that they can serve as an independent check on it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Optional, Sequence

import networkx as nx

__all__ = [
    "SCCRange",
    "strongly_connected",
    "karp_min_mean",
    "extreme_means",
    "cycle_mean_range",
    "merge_intervals",
    "simple_cycle_means",
    "closed_walk_means",
    "closed_walk_with_mean",
    "walk_weight",
]


def strongly_connected(n: int, edges: Sequence[tuple]) -> list:
    """Strongly connected components that carry at least one cycle, as sorted lists."""
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from((u, v) for u, v, _ in edges if u >= 0)
    out = []
    for comp in nx.strongly_connected_components(g):
        comp = sorted(comp)
        if len(comp) > 1 or g.has_edge(comp[0], comp[0]):
            out.append(comp)
    out.sort()
    return out


def karp_min_mean(nodes: Sequence[int], edges: Sequence[tuple]):
    """Minimum cycle mean of the subgraph on ``nodes`` and a cycle attaining it.

    ``edges`` are indices-free triples; only those with both ends in ``nodes``
    are used.  Returns ``(mean, cycle)`` where ``cycle`` lists positions into
    ``edges``, or ``None`` if the subgraph is acyclic.
    """
    index = {v: i for i, v in enumerate(nodes)}
    local = [(index[u], index[v], w, e) for e, (u, v, w) in enumerate(edges)
             if u in index and v in index]
    n = len(nodes)
    if not local:
        return None
    INF = None
    # D[k][v]: least weight of a walk with exactly k edges ending at v
    D = [[0] * n] + [[INF] * n for _ in range(n)]
    pred = [[None] * n for _ in range(n + 1)]
    for k in range(1, n + 1):
        prev, cur = D[k - 1], D[k]
        for u, v, w, e in local:
            if prev[u] is None:
                continue
            cand = prev[u] + w
            if cur[v] is None or cand < cur[v]:
                cur[v] = cand
                pred[k][v] = (u, e)
    best, best_v = None, None
    for v in range(n):
        if D[n][v] is None:
            continue
        worst = None
        for k in range(n):
            if D[k][v] is None:
                continue
            val = Fraction(D[n][v] - D[k][v], n - k)
            if worst is None or val > worst:
                worst = val
        if worst is not None and (best is None or worst < best):
            best, best_v = worst, v
    if best is None:
        return None
    # the n-edge walk realising D[n][best_v] contains a cycle of mean `best`
    walk_nodes, walk_edges = [best_v], []
    v = best_v
    for k in range(n, 0, -1):
        u, e = pred[k][v]
        walk_edges.append(e)
        walk_nodes.append(u)
        v = u
    walk_nodes.reverse()
    walk_edges.reverse()
    cycles = []
    first = {}
    for pos, node in enumerate(walk_nodes):
        if node in first:
            cycles.append(walk_edges[first[node]:pos])
        first[node] = pos
    for cyc in cycles:
        w = sum(edges[e][2] for e in cyc)
        if Fraction(w, len(cyc)) == best:
            return best, cyc
    raise AssertionError("Karp walk holds no cycle of the optimal mean")


def extreme_means(nodes: Sequence[int], edges: Sequence[tuple]):
    """``(min_mean, min_cycle, max_mean, max_cycle)`` for the subgraph on ``nodes``."""
    lo = karp_min_mean(nodes, edges)
    if lo is None:
        return None
    neg = [(u, v, -w) for u, v, w in edges]
    hi_mean, hi_cycle = karp_min_mean(nodes, neg)
    return lo[0], lo[1], -hi_mean, hi_cycle


@dataclass(frozen=True)
class SCCRange:
    nodes: tuple
    lo: Fraction
    hi: Fraction
    lo_cycle: tuple
    hi_cycle: tuple


def merge_intervals(intervals: Iterable[tuple]) -> list:
    """Union of closed intervals ``(lo, hi)`` as a sorted list of disjoint ones."""
    out = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def cycle_mean_range(n: int, edges: Sequence[tuple], nodes: Optional[Iterable[int]] = None):
    """Per-SCC ``[min mean, max mean]`` and the union of those ranges.

    Inside one strongly connected component two cycles can be spliced
    through connecting paths in any proportion, so each component
    contributes the whole closed interval between its extreme means.
    """
    keep = set(range(n)) if nodes is None else set(nodes)
    sub = [(u, v, w) for u, v, w in edges if u in keep and v in keep]
    ranges = []
    for comp in strongly_connected(n, sub):
        lo, lo_c, hi, hi_c = extreme_means(comp, edges_restricted(edges, comp))
        ranges.append(SCCRange(tuple(comp), lo, hi, tuple(lo_c), tuple(hi_c)))
    return ranges, merge_intervals((r.lo, r.hi) for r in ranges)


def edges_restricted(edges, comp):
    # keep positions stable so cycles index into the caller's edge list;
    # dropped edges become (-1, -1, 0), which the helpers here skip
    s = set(comp)
    return [(u, v, w) if u in s and v in s else (-1, -1, 0) for u, v, w in edges]


def walk_weight(edges, walk) -> tuple:
    return sum(edges[e][2] for e in walk), len(walk)


# --- enumeration oracles -------------------------------------------------------------


def simple_cycle_means(n: int, edges: Sequence[tuple], max_len: Optional[int] = None) -> set:
    """Means of all simple cycles (every choice among parallel edges)."""
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    weights = {}
    for u, v, w in edges:
        if u < 0:
            continue
        g.add_edge(u, v)
        weights.setdefault((u, v), set()).add(w)
    bound = max_len if max_len is not None else n
    means = set()
    for cyc in nx.simple_cycles(g, length_bound=bound):
        pairs = list(zip(cyc, cyc[1:] + cyc[:1]))
        for choice in product(*(sorted(weights[p]) for p in pairs)):
            means.add(Fraction(sum(choice), len(pairs)))
    return means


def closed_walk_means(n: int, edges: Sequence[tuple], max_len: int) -> set:
    """Means of all closed walks with at most ``max_len`` edges."""
    means = set()
    for s in range(n):
        layer = {(s, 0)}
        for length in range(1, max_len + 1):
            nxt = set()
            for u, v, w in edges:
                for node, acc in layer:
                    if node == u:
                        nxt.add((v, acc + w))
            layer = nxt
            means.update(Fraction(acc, length) for node, acc in layer if node == s)
            if not layer:
                break
    return means


# --- closed walks with a prescribed mean -------------------------------------------


def _dp_search(n, edges, r: Fraction, keep, max_len):
    p, q = r.numerator, r.denominator
    out_edges = {}
    for e, (u, v, w) in enumerate(edges):
        if u in keep and v in keep:
            out_edges.setdefault(u, []).append(e)
    for L in range(q, max_len + 1, q):
        target = p * (L // q)
        for s in sorted(keep):
            # layer: (node, weight) -> edge list of one walk reaching it
            layer = {(s, 0): ()}
            for _ in range(L):
                nxt = {}
                for (node, acc), walk in layer.items():
                    for e in out_edges.get(node, ()):
                        key = (edges[e][1], acc + edges[e][2])
                        if key not in nxt:
                            nxt[key] = walk + (e,)
                layer = nxt
                if not layer:
                    break
            if (s, target) in layer:
                return list(layer[(s, target)])
    return None


def _path(edges, keep, src, dst):
    """Shortest edge path ``src -> dst`` inside ``keep`` (empty if equal)."""
    if src == dst:
        return []
    prev = {src: None}
    frontier = [src]
    while frontier:
        nxt = []
        for node in frontier:
            for e, (u, v, _) in enumerate(edges):
                if u == node and v in keep and v not in prev:
                    prev[v] = e
                    nxt.append(v)
        frontier = nxt
    if dst not in prev:
        return None
    path = []
    node = dst
    while node != src:
        e = prev[node]
        path.append(e)
        node = edges[e][0]
    return path[::-1]


def _rotate_to(edges, cycle, node):
    for i, e in enumerate(cycle):
        if edges[e][0] == node:
            return list(cycle[i:]) + list(cycle[:i])
    raise ValueError("node not on cycle")


def _splice(edges, keep, low, high, r: Fraction):
    """Closed walk of mean exactly ``r`` mixing a low-mean and a high-mean cycle."""
    p, q = r.numerator, r.denominator
    v1, v2 = edges[low[0]][0], edges[high[0]][0]
    P, Q = _path(edges, keep, v1, v2), _path(edges, keep, v2, v1)
    if P is None or Q is None:
        return None
    high = _rotate_to(edges, high, v2)
    W1, L1 = walk_weight(edges, low)
    W2, L2 = walk_weight(edges, high)
    Wc, Lc = walk_weight(edges, P + Q)
    a = -(q * W1 - p * L1)
    B = q * W2 - p * L2
    C = q * Wc - p * Lc
    if a <= 0 or B <= 0:
        return None
    g = math.gcd(a, B)
    gamma = g // math.gcd(g, C) if C else 1
    # solve beta * B - alpha * a = -gamma * C with alpha, beta >= 0
    rhs = -gamma * C
    _, x, y = _egcd(B, a)  # x * B + y * a == g
    k = rhs // g
    beta, alpha = x * k, -y * k
    step_a, step_b = B // g, a // g
    t = max(-(alpha // step_a) if alpha < 0 else 0, -(beta // step_b) if beta < 0 else 0)
    t = max(t, math.ceil(Fraction(-alpha, step_a)), math.ceil(Fraction(-beta, step_b)))
    alpha += t * step_a
    beta += t * step_b
    if alpha == beta == 0 and not P + Q:
        alpha, beta = step_a, step_b
    walk = list(low) * alpha + P + list(high) * beta + Q + (P + Q) * (gamma - 1)
    W, L = walk_weight(edges, walk)
    if L == 0 or Fraction(W, L) != r:
        return None
    return walk


def _egcd(a, b):
    if b == 0:
        return a, 1, 0
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def closed_walk_with_mean(n: int, edges: Sequence[tuple], r, nodes=None, max_len: int = 48):
    """A closed walk (list of edge positions) whose mean weight is exactly ``r``.

    Short walks are searched exhaustively up to ``max_len`` edges; failing
    that, a walk is spliced together from the extreme cycles of a strongly
    connected component whose mean range contains ``r``.  Returns ``None``
    if no component's range contains ``r``.
    """
    r = Fraction(r)
    keep = set(range(n)) if nodes is None else set(nodes)
    sub = [(u, v, w) if u in keep and v in keep else (-1, -1, 0) for u, v, w in edges]
    ranges, _ = cycle_mean_range(n, sub)
    ranges = [rg for rg in ranges if rg.lo <= r <= rg.hi]
    if not ranges:
        return None
    comp_nodes = set().union(*(rg.nodes for rg in ranges))
    walk = _dp_search(n, sub, r, comp_nodes, max_len)
    if walk is not None:
        return walk
    for rg in ranges:
        if rg.lo == r:
            return list(rg.lo_cycle)
        if rg.hi == r:
            return list(rg.hi_cycle)
        walk = _splice(sub, set(rg.nodes), list(rg.lo_cycle), list(rg.hi_cycle), r)
        if walk is not None:
            return walk
    return None
