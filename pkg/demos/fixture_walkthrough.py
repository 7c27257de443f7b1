"""Walk through the bundled map: partition, Markov graph, rotation set,
periodic points and the chains behind them.

    python demos/fixture_walkthrough.py
"""
from fractions import Fraction

from sigmarot.covering import (
    chain_fixed_point, chain_from_steps, find_periodic_mod1, horseshoe_chain, positively_covers,
)
from sigmarot.dynamics import partition_XF, rho_bounds
from sigmarot.mapfile import dump_map, example_map
from sigmarot.markov import xf_graph
from sigmarot.pamap import iterate
from sigmarot.rotset import rationals_in, rotation_set
from sigmarot.space import BranchSegment, format_point

m = example_map()
print(dump_map(m))

part = partition_XF(m)
for i, (seg, p) in enumerate(zip(part.segments, part.displacements), start=1):
    print(f"X_{i} = [{seg.lo}, {seg.hi}] moves by {p}")

g = xf_graph(m, part)
print()
print(g.to_dot("fixture"))

def show(intervals):
    return " U ".join(f"[{a}, {b}]" for a, b in intervals) or "empty"


rs = rotation_set(m)
for st in rs.stages:
    print(f"I_{st.index} = {show(st.intervals)}")
print(f"Rot(F) = {show(rs.components)}")

# [a, b] covers [d, e] in place and [d, e] covers [a, b] one copy up.
# Looping around that pair moves by 1 every 2 steps.
ab = BranchSegment(0, Fraction(0), Fraction(1, 4))
de = BranchSegment(0, Fraction(3, 4), Fraction(1))
pair = chain_from_steps([positively_covers(m, ab, de, 0), positively_covers(m, de, ab, 1)])
x = chain_fixed_point(m, pair)
print()
print(pair)
print("fixed point", format_point(x), "->", format_point(iterate(m, x, 2)))

# any p/q in [0, 1] comes from mixing the loop on [a, b] with the loop on [d, e]
ch = horseshoe_chain(m, ab, de, 0, 1, 2, 7)
x = chain_fixed_point(m, ch)
print(f"2/7: L = {ch.L}, W = {ch.W}, x = {format_point(x)}, rho = {rho_bounds(m, x, 100).lower}")

print()
for r, tag in rationals_in(rs, 4):
    res = find_periodic_mod1(m, r.numerator, r.denominator)
    print(f"{str(r):>4} {tag:8} {format_point(res.point):14} via {res.method}")
