"""Builders for random chains of positive coverings."""
import math

from sigmarot.covering import chain_from_steps, positively_covers
from sigmarot.dynamics import compute_XF, partition_XF
from sigmarot.markov import markov_vertices
from sigmarot.pamap import image_of_segment
from sigmarot.space import retract


def covering_steps(m, max_segments=8):
    """All one-step coverings ``A => B + k`` between Markov vertices of ``X_F``."""
    xf = compute_XF(m)
    segs = [v.segment for v in markov_vertices(m, partition_XF(m, xf)) if v.lo < v.hi]
    segs = segs[:max_segments]
    steps = []
    for A in segs:
        ks = [math.floor(retract(q, m.c) - m.c) for arc in image_of_segment(m, A) for q in arc]
        for B in segs:
            for k in range(min(ks) - 1, max(ks) + 2):
                s = positively_covers(m, A, B, k, 1, xf)
                if s is not None:
                    steps.append(s)
    return steps


def random_chain(rng, steps, length, start=None):
    """A random walk of ``length`` coverings, optionally leaving from segment ``start``."""
    first = [s for s in steps if start is None or s.source == start]
    if not first:
        return None
    cur = rng.choice(first)
    out = [cur]
    for _ in range(length - 1):
        nxt = [s for s in steps if s.source == cur.target]
        if not nxt:
            break
        cur = rng.choice(nxt)
        out.append(cur)
    return chain_from_steps(out)


def random_closed_chain(rng, steps, length, tries=50):
    """A random walk in the covering relation cut at a return to its start."""
    for _ in range(tries):
        ch = random_chain(rng, steps, length)
        if ch is None:
            return None
        start = ch.steps[0].source
        for j, s in enumerate(ch.steps):
            if s.target == start:
                return chain_from_steps(ch.steps[: j + 1], ch.offset)
    return None
