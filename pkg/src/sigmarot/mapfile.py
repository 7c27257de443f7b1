"""Reader and writer for map-definition files.

Grammar (one statement per line, ``#`` starts a comment)::

    attach = <rational>          # optional, defaults to 0; must come first
    line:                        # block of line breakpoints, c .. c+1
      <rational> -> <point>
    branch:                      # block of branch breakpoints, 0 .. 1
      <rational> -> <point>

Points are written ``L <x>`` or ``B <n> <s>``; rationals as ``p/q`` or
integers.  Every error carries the offending line number.
"""
from __future__ import annotations

from fractions import Fraction
from importlib import resources
from pathlib import Path

from .pamap import PAMap, validate
from .space import format_point, parse_point, parse_rational

__all__ = ["MapFileError", "parse_map", "load_map", "dump_map", "example_map", "EXAMPLE_PATH"]


class MapFileError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)


def parse_map(text: str) -> PAMap:
    c = Fraction(0)
    blocks = {"line": [], "branch": []}
    block = None
    seen_attach = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("attach"):
            key, _, value = line.partition("=")
            if key.strip() != "attach" or not value.strip():
                raise MapFileError("expected 'attach = <rational>'", lineno)
            if block is not None or seen_attach:
                raise MapFileError("'attach' must appear once, before the blocks", lineno)
            try:
                c = parse_rational(value)
            except ValueError as exc:
                raise MapFileError(str(exc), lineno) from None
            seen_attach = True
            continue
        if line.endswith(":"):
            name = line[:-1].strip()
            if name not in blocks:
                raise MapFileError(f"unknown block {name!r}", lineno)
            if blocks[name]:
                raise MapFileError(f"block {name!r} given twice", lineno)
            block = name
            continue
        if block is None:
            raise MapFileError("breakpoint outside a 'line:' or 'branch:' block", lineno)
        coord, arrow, target = line.partition("->")
        if not arrow:
            raise MapFileError("expected '<coord> -> <point>'", lineno)
        try:
            blocks[block].append((parse_rational(coord), parse_point(target.strip(), c)))
        except ValueError as exc:
            raise MapFileError(str(exc), lineno) from None
    for name, rows in blocks.items():
        if not rows:
            raise MapFileError(f"missing or empty '{name}:' block")
    m = PAMap(tuple(blocks["line"]), tuple(blocks["branch"]), c)
    problems = validate(m)
    if problems:
        raise MapFileError("; ".join(problems))
    return m


def load_map(path) -> PAMap:
    return parse_map(Path(path).read_text())


def dump_map(m: PAMap) -> str:
    out = [f"attach = {m.c}", "", "line:"]
    out += [f"  {x} -> {format_point(p)}" for x, p in m.line_breaks]
    out += ["", "branch:"]
    out += [f"  {s} -> {format_point(p)}" for s, p in m.branch_breaks]
    return "\n".join(out) + "\n"


EXAMPLE_PATH = resources.files("sigmarot") / "data" / "sigma_example.map"


def example_map() -> PAMap:
    """The bundled affine Markov example with ``a < b < c < d < e`` at heights 0, 1/4, 1/2, 3/4, 1."""
    return parse_map(EXAMPLE_PATH.read_text())
