"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py`` (the lines appear in the
terminal summary) or directly with ``python tests/test_acceptance.py``.
"""
import contextlib
import random
from fractions import Fraction as Fr

from helpers import covering_steps, random_chain, random_closed_chain
from sigmarot.cli import main, sweep, sweep_violations
from sigmarot.covering import chain_concat, chain_fixed_point, find_periodic_mod1, follows_chain
from sigmarot.cycles import cycle_mean_range as graph_mean_range
from sigmarot.cycles import edges_restricted, simple_cycle_means
from sigmarot.dynamics import partition_XF, rho_bounds
from sigmarot.mapfile import example_map
from sigmarot.markov import tr_graph, walk_point, xf_graph
from sigmarot.pamap import iterate, power
from sigmarot.random_maps import random_markov_maps
from sigmarot.rotset import rationals_in, rot_R, rotation_set
from sigmarot.space import Branch, BranchSegment, Line, reduce, translate

RESULTS = {}

A, B, C, D, E = Fr(0), Fr(1, 4), Fr(1, 2), Fr(3, 4), Fr(1)


@contextlib.contextmanager
def criterion(k, name):
    try:
        yield
    except BaseException:
        RESULTS[k] = f"criterion {k} ({name}): FAIL"
        print(RESULTS[k])
        raise
    RESULTS[k] = f"criterion {k} ({name}): PASS"
    print(RESULTS[k])


def test_1_fixture_reproduction():
    with criterion(1, "fixture reproduction"):
        m = example_map()
        part = partition_XF(m)
        assert part.segments == (BranchSegment(0, A, C), BranchSegment(0, D, E))
        assert part.displacements == (0, 1)
        g = xf_graph(m, part)
        assert [(v.lo, v.hi) for v in g.vertices] == [(A, B), (B, C), (D, E)]
        ab, bc, de = 0, 1, 2
        want = {(s, t, 0) for s in (ab, bc) for t in (ab, bc, de)} | {(de, t, 1) for t in (ab, bc, de)}
        assert {(e.src, e.dst, e.weight) for e in g.edges} == want and len(g.edges) == 9
        rs = rotation_set(m)
        assert rs.stages[1].intervals == ((0, 1),)
        line = rot_R(m)
        assert (line.lo, line.hi, line.exact) == (0, 0, True)
        assert rs.components == ((0, 1),) and rs.exact


def _walks_with_mean(g, r, max_len):
    """All closed walks (as edge lists) with mean exactly ``r``, up to ``max_len`` edges."""
    wmax = max(e.weight for e in g.edges)
    out = []

    def extend(start, walk, node, acc):
        L = len(walk)
        if L and node == start and acc == r * L:
            out.append(list(walk))
        if L == max_len:
            return
        for i, e in enumerate(g.edges):
            if e.src != node:
                continue
            # the remaining edges can add at most wmax each
            if acc + e.weight + wmax * (max_len - L - 1) < r * (L + 1):
                continue
            walk.append(i)
            extend(start, walk, e.dst, acc + e.weight)
            walk.pop()

    for v in range(g.n):
        extend(v, [], v, 0)
    return out


def test_2_unique_rho_one_point(capsys):
    with criterion(2, "unique rho = 1 periodic point"):
        capsys.readouterr()
        code = main(["periodic", "example", "1/1"])
        out = capsys.readouterr().out
        assert code == 0 and out.splitlines()[0] == "x = B 0 1"
        m = example_map()
        g = xf_graph(m)
        walks = _walks_with_mean(g, 1, 8)
        assert walks
        points = {reduce(walk_point(m, g, w), m.c)[0] for w in walks}
        assert points == {Branch(0, E)}
        # the line carries no cycle of mean 1
        assert not _walks_with_mean(tr_graph(m), 1, 8)


def test_3_rational_realization():
    with criterion(3, "rational realization q <= 8"):
        maps = [example_map()] + list(random_markov_maps(3000, 20))
        count = 0
        for m in maps:
            rs = rotation_set(m)
            assert rs.exact
            for r, _ in rationals_in(rs, 8):
                res = find_periodic_mod1(m, r.numerator, r.denominator)
                k, rem = divmod(res.period, r.denominator)
                assert rem == 0 and res.displacement == k * r.numerator
                assert iterate(m, res.point, res.period) == translate(res.point, res.displacement)
                count += 1
        assert count > len(maps)


def _random_graph(rng):
    n = rng.randint(1, 12)
    edges = {(rng.randrange(n), rng.randrange(n), rng.randint(-3, 3)) for _ in range(rng.randint(1, 2 * n))}
    return n, sorted(edges)


def test_4_oracle_equivalence():
    with criterion(4, "Karp ranges equal cycle enumeration"):
        graphs = []
        for m in random_markov_maps(4000, 50):
            for g in (xf_graph(m), tr_graph(m)):
                graphs.append((g.n, g.triples()))
        rng = random.Random(4)
        graphs += [_random_graph(rng) for _ in range(150)]
        checked = 0
        for n, edges in graphs:
            assert n <= 12
            ranges, _ = graph_mean_range(n, edges)
            for rg in ranges:
                means = simple_cycle_means(n, edges_restricted(edges, rg.nodes))
                assert (rg.lo, rg.hi) == (min(means), max(means))
                checked += 1
        assert checked >= 100


def test_5_structure():
    with criterion(5, "structure of Rot(F)"):
        for m in random_markov_maps(5000, 50):
            rs = rotation_set(m)
            N = rs.partition.N
            comps = list(rs.components)
            assert len(comps) <= N + 1
            for lo, hi in comps:
                assert isinstance(lo, Fr) and isinstance(hi, Fr) and lo <= hi
            assert all(a[1] < b[0] for a, b in zip(comps, comps[1:]))
            for st in rs.stages[1:]:
                if st.intervals:
                    lo, hi = st.hull
                    assert len(st.intervals) == 1 and lo <= st.displacement <= hi
                    assert any(lo <= k <= hi for k in range(int(lo) - 1, int(hi) + 2))


def test_6_degree_one_and_rho_laws():
    with criterion(6, "degree-1 and rho laws"):
        rng = random.Random(6)
        maps = [example_map()] + list(random_markov_maps(6000, 19))
        for _ in range(1000):
            m = rng.choice(maps)
            s = Fr(rng.randint(0, 48), 48)
            x = Branch(rng.randint(-3, 3), s) if s and rng.random() < 0.6 else Line(m.c + rng.randint(-3, 3) + s)
            k, n = rng.randint(-4, 4), rng.randint(1, 6)
            assert iterate(m, translate(x, k), n) == translate(iterate(m, x, n), k)
        laws = 0
        for m in maps[:10]:
            for r, _ in rationals_in(rotation_set(m), 3):
                x = find_periodic_mod1(m, r.numerator, r.denominator).point
                rho = rho_bounds(m, x, 64)
                assert rho.exact and rho.lower == r
                q, p = rng.randint(1, 3), rng.randint(-2, 2)
                g = rho_bounds(power(m, q, -p), x, 64)
                assert g.exact and g.lower == q * r - p
                laws += 1
        assert laws >= 20


def test_7_chain_calculus():
    with criterion(7, "chain calculus"):
        rng = random.Random(7)
        maps = [(m, covering_steps(m)) for m in random_markov_maps(7000, 25)]
        maps = [(m, s) for m, s in maps if s]
        done = closed = 0
        while done < 1000:
            m, steps = rng.choice(maps)
            a = random_chain(rng, steps, rng.randint(1, 5))
            b = random_chain(rng, steps, rng.randint(1, 5), start=a.steps[-1].target)
            if b is None:
                continue
            ab = chain_concat(a, b)
            assert (ab.L, ab.W) == (a.L + b.L, a.W + b.W)
            ch = random_closed_chain(rng, steps, 6)
            if ch is not None:
                x = chain_fixed_point(m, ch)
                assert iterate(m, x, ch.L) == translate(x, ch.W)
                assert follows_chain(m, x, ch)
                closed += 1
            done += 1
        assert closed >= 500


def test_8_sweep_containment():
    with criterion(8, "sweep containment"):
        m = example_map()
        iters = 10_000
        rows = sweep(m, 1000, iters)
        assert len(rows) == 1000
        slack = 2 / iters
        for p, b in rows:
            lo, hi = float(b.lower), float(b.upper)
            if isinstance(p, Line):
                assert -slack <= lo <= hi <= slack
            else:
                assert 0 <= lo <= hi <= 1
        assert not sweep_violations(rows, rotation_set(m), iters)


if __name__ == "__main__":
    import sys

    import pytest

    sys.exit(pytest.main([__file__, "-q"]))
