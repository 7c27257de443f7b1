"""A map whose rotation set falls apart into two intervals.

The bottom of the branch is fixed.  The top moves two copies per step, or
three when it passes through the highest quarter, and it can never stay there
twice in a row, so its rotation numbers fill [2, 5/2].

    python demos/two_components.py
"""
from sigmarot.mapfile import parse_map
from sigmarot.rotset import oracle_cycle_enumeration, rotation_set

m = parse_map("""\
line:
  0 -> L 0
  1 -> L 1
branch:
  0 -> L 0
  1/4 -> B 0 1/4
  1/2 -> B 2 1/2
  3/4 -> B 2 1
  1 -> B 3 3/4
""")

def show(intervals):
    return " U ".join(f"[{a}, {b}]" for a, b in intervals) or "empty"


rs = rotation_set(m)
print(f"I_0 = {show(rs.stages[0].intervals)}")
for st in rs.stages[1:]:
    print(f"I_{st.index} = {show(st.intervals)}  (p = {st.displacement}, threshold {st.threshold})")
print(f"Rot(F) = {show(rs.components)}")

means = sorted(oracle_cycle_enumeration(rs.graph, 6))
print("closed walk means up to length 6:", ", ".join(map(str, means)))
