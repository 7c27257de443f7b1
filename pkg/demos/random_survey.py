"""Random Markov maps: rotation sets, and a periodic point for each small rational.

    python demos/random_survey.py [count] [seed]
"""
import sys

from sigmarot.covering import find_periodic_mod1
from sigmarot.random_maps import random_markov_maps
from sigmarot.rotset import rationals_in, rotation_set
from sigmarot.space import format_point

count = int(sys.argv[1]) if len(sys.argv) > 1 else 5
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 1

for i, m in enumerate(random_markov_maps(seed, count)):
    rs = rotation_set(m)
    comps = " U ".join(f"[{a}, {b}]" for a, b in rs.components)
    print(f"map {i}: N = {rs.partition.N}, {rs.graph.n} vertices, Rot(F) = {comps}")
    for r, tag in rationals_in(rs, 3):
        res = find_periodic_mod1(m, r.numerator, r.denominator)
        print(f"   {str(r):>5} {tag:8} {format_point(res.point)}  period {res.period}")
