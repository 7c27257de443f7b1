"""Seeded random piecewise-affine maps whose breakpoints form a Markov grid.

Every grid point ``c + j/M`` of the line and every grid height ``j/M`` of the
branch is a breakpoint and is sent to a grid point, so the forward orbits of
breakpoints stay on a finite set.  Used by the property tests and demos.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterator, Optional

from .dynamics import compute_XF, partition_XF
from .markov import NotMarkov, markov_vertices, tr_vertices
from .pamap import PAMap, validate
from .space import Line, branch_point

__all__ = ["random_grid_map", "random_markov_maps"]


def _grid_point(rng, M, c, spread, allow_branch=True):
    k = rng.randint(-1, spread)
    if allow_branch and rng.random() < 0.7:
        return branch_point(k, Fraction(rng.randint(0, M), M), c)
    return Line(c + k + Fraction(rng.randint(0, M - 1), M))


def random_grid_map(rng: random.Random, M: int = 4, spread: int = 2,
                    line_to_branch: bool = False, c: Fraction = Fraction(0)) -> PAMap:
    """A valid map on the grid of step ``1/M``.

    The line is translated by a random integer unless ``line_to_branch`` is
    set, in which case one interior line grid point is sent up a branch so
    that the line's orbit enters the branches.
    """
    t = rng.randint(-1, 1)
    line = [(c + Fraction(j, M), Line(c + t + Fraction(j, M))) for j in range(M + 1)]
    if line_to_branch and M > 1:
        j = rng.randint(1, M - 1)
        k = rng.randint(t - 1, t + 1)
        s = Fraction(rng.randint(1, max(1, M // 2)), M)
        line[j] = (line[j][0], branch_point(k, s, c))
    branch = [(Fraction(0), line[0][1])]
    for j in range(1, M + 1):
        branch.append((Fraction(j, M), _grid_point(rng, M, c, spread)))
    m = PAMap(tuple(line), tuple(branch), c)
    problems = validate(m)
    if problems:
        raise AssertionError(problems)
    return m


def random_markov_maps(seed: int, count: int, max_vertices: int = 12, M: Optional[int] = None,
                       line_to_branch: float = 0.25, nonempty: bool = True) -> Iterator[PAMap]:
    """``count`` maps whose ``X_F`` and ``T_R`` partitions are Markov and small.

    Draws are rejected until the Markov refinement of ``X_F`` has between 1
    (if ``nonempty``) and ``max_vertices`` vertices.
    """
    rng = random.Random(seed)
    made = 0
    while made < count:
        grid = M or rng.choice([2, 3, 4])
        m = random_grid_map(rng, grid, spread=2, line_to_branch=rng.random() < line_to_branch)
        xf = compute_XF(m)
        if not xf.exact:
            continue
        try:
            verts = markov_vertices(m, partition_XF(m, xf), cap=4 * max_vertices)
            tr_vertices(m, xf.h, cap=64)
        except NotMarkov:
            continue
        if len(verts) > max_vertices or (nonempty and not verts):
            continue
        made += 1
        yield m
