"""Geometry of the universal covering of the graph sigma.

The covering ``T`` is the real line with one branch of length 1 glued at each
point ``n + c``, ``n`` an integer and ``c`` in ``[0, 1)`` the attachment
offset.  A point is either ``Line(x)`` or ``Branch(n, s)`` with ``0 < s <= 1``;
a branch point of height 0 is always written as the line point it sits on.
All coordinates are exact :class:`fractions.Fraction` values.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

__all__ = [
    "Line",
    "Branch",
    "Point",
    "BranchSegment",
    "as_fraction",
    "branch_point",
    "height",
    "on_branch",
    "retract",
    "translate",
    "reduce",
    "path_length",
    "geodesic_eval",
    "legs",
    "retract_to_segment",
    "format_point",
    "parse_point",
    "format_rational",
    "parse_rational",
]


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a Fraction, int or 'p/q' string")
    return Fraction(value)


@dataclass(frozen=True, order=True)
class Line:
    x: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", as_fraction(self.x))

    def __str__(self):
        return format_point(self)


@dataclass(frozen=True, order=True)
class Branch:
    n: int
    s: Fraction

    def __post_init__(self):
        s = as_fraction(self.s)
        if not 0 < s <= 1:
            raise ValueError(f"branch height must lie in (0, 1], got {s}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "s", s)

    def __str__(self):
        return format_point(self)


Point = Union[Line, Branch]


@dataclass(frozen=True)
class BranchSegment:
    """Compact piece ``[lo, hi]`` of the branch of copy ``n`` (heights)."""

    n: int
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = as_fraction(self.lo), as_fraction(self.hi)
        if not 0 <= lo <= hi <= 1:
            raise ValueError(f"need 0 <= lo <= hi <= 1, got [{lo}, {hi}]")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def contains_height(self, s) -> bool:
        return self.lo <= s <= self.hi

    def shifted(self, k: int) -> "BranchSegment":
        return BranchSegment(self.n + k, self.lo, self.hi)

    def __str__(self):
        return f"[{self.lo}, {self.hi}]@{self.n}"


def branch_point(n: int, s, c=Fraction(0)) -> Point:
    """Point of branch copy ``n`` at height ``s``; height 0 gives the line point."""
    s = as_fraction(s)
    if s == 0:
        return Line(n + as_fraction(c))
    return Branch(n, s)


def height(p: Point) -> Fraction:
    return p.s if isinstance(p, Branch) else Fraction(0)


def on_branch(p: Point, n: int, c=Fraction(0)):
    """Height of ``p`` on branch copy ``n`` or ``None`` if ``p`` is not on it."""
    if isinstance(p, Branch):
        return p.s if p.n == n else None
    return Fraction(0) if p.x == n + c else None


def retract(p: Point, c=Fraction(0)) -> Fraction:
    if isinstance(p, Line):
        return p.x
    return p.n + as_fraction(c)


def translate(p: Point, k: int) -> Point:
    if isinstance(p, Line):
        return Line(p.x + k)
    return Branch(p.n + k, p.s)


def reduce(p: Point, c=Fraction(0)):
    """Split ``p`` into ``(q, k)`` with ``p == translate(q, k)`` and ``r(q)`` in ``[c, c+1)``."""
    k = math.floor(retract(p, c) - c)
    return translate(p, -k), k


def _anchor(p: Point, c) -> Fraction:
    # line coordinate of the point where the geodesic from p reaches the line
    return p.x if isinstance(p, Line) else p.n + c


def path_length(p: Point, q: Point, c=Fraction(0)) -> Fraction:
    c = as_fraction(c)
    if isinstance(p, Branch) and isinstance(q, Branch) and p.n == q.n:
        return abs(p.s - q.s)
    return height(p) + abs(_anchor(p, c) - _anchor(q, c)) + height(q)


def legs(p: Point, q: Point, c=Fraction(0)):
    """Split the geodesic ``p -> q`` into pieces lying on a single edge.

    An edge is either the line or one branch copy.  Zero-length pieces are
    dropped, so ``legs(p, p)`` is empty.
    """
    c = as_fraction(c)
    if isinstance(p, Branch) and isinstance(q, Branch) and p.n == q.n:
        return [(p, q)] if p != q else []
    stops = [p]
    if isinstance(p, Branch):
        stops.append(Line(p.n + c))
    if isinstance(q, Branch):
        stops.append(Line(q.n + c))
    stops.append(q)
    out = []
    for a, b in zip(stops, stops[1:]):
        if a != b:
            out.append((a, b))
    return out


def _lerp_on_edge(a: Point, b: Point, t: Fraction, c) -> Point:
    if isinstance(a, Line) and isinstance(b, Line):
        return Line(a.x + t * (b.x - a.x))
    n = a.n if isinstance(a, Branch) else b.n
    sa, sb = height(a), height(b)
    return branch_point(n, sa + t * (sb - sa), c)


def geodesic_eval(p: Point, q: Point, t, c=Fraction(0)) -> Point:
    """Point at arc-length fraction ``t`` of the geodesic from ``p`` to ``q``."""
    t, c = as_fraction(t), as_fraction(c)
    if not 0 <= t <= 1:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if t == 0:
        return p
    if t == 1:
        return q
    total = path_length(p, q, c)
    target = t * total
    for a, b in legs(p, q, c):
        ell = path_length(a, b, c)
        if target <= ell:
            return _lerp_on_edge(a, b, target / ell, c)
        target -= ell
    return q


def retract_to_segment(p: Point, seg: BranchSegment, c=Fraction(0)) -> Point:
    """Nearest-point retraction onto ``seg`` whose low end faces the line.

    Points of ``seg`` are returned unchanged, points of the component holding
    the line go to ``min seg``.  Points strictly above ``seg`` on the same
    branch are outside both regions and rejected.
    """
    s = on_branch(p, seg.n, c)
    if s is not None and s > seg.hi:
        raise ValueError(f"{format_point(p)} lies above the segment {seg}")
    if s is not None and s >= seg.lo:
        return p
    return branch_point(seg.n, seg.lo, c)


# --- text forms -------------------------------------------------------------

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not _RATIONAL.match(text):
        raise ValueError(f"not a rational number: {text!r}")
    return Fraction(text)


def format_rational(value, signed: bool = False) -> str:
    value = as_fraction(value)
    body = str(abs(value)) if signed else str(value)
    if signed:
        return ("-" if value < 0 else "+") + body
    return body


def format_point(p: Point) -> str:
    if isinstance(p, Line):
        return f"L {p.x}"
    return f"B {p.n} {p.s}"


def parse_point(text: str, c=Fraction(0)) -> Point:
    """Parse ``"L <x>"`` or ``"B <n> <s>"`` (``s`` may be 0)."""
    parts = text.split()
    if len(parts) == 2 and parts[0].upper() == "L":
        return Line(parse_rational(parts[1]))
    if len(parts) == 3 and parts[0].upper() == "B":
        try:
            n = int(parts[1])
        except ValueError:
            raise ValueError(f"bad branch index in point {text!r}") from None
        s = parse_rational(parts[2])
        if not 0 <= s <= 1:
            raise ValueError(f"branch height out of [0, 1] in point {text!r}")
        return branch_point(n, s, c)
    raise ValueError(f"malformed point {text!r}; expected 'L x' or 'B n s'")
