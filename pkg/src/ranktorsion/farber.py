"""
Fixed-point statistics of finite quotient actions.

For an element g, the fraction of vertices it fixes is the probability that g
lies in a uniformly random conjugate of the point stabiliser.  Along a Farber
sequence these fractions tend to 0 for every non-trivial g; their sum over a
Cayley ball bounds the size of correction sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .schreier import BALL_LIMIT, enumerate_ball


@dataclass(frozen=True)
class FixedPointReport:
    word: tuple
    fixed: int
    fraction: Fraction


def fixed_point_fraction(action, word):
    perm = action.word_permutation(list(word))
    fixed = int(np.count_nonzero(perm == np.arange(action.n_vertices)))
    return FixedPointReport(tuple(word), fixed, Fraction(fixed, action.n_vertices))


def gamma_sum(action, group, d, limit=BALL_LIMIT):
    """Sum of fixed-point fractions over the ball S^(d^2+1) without the identity.

    Non-identity is decided in the exact group, not by the permutation.
    Raises BallTooLarge (carrying the failing radius) when the ball exceeds ``limit``.
    """
    radius = d * d + 1
    ball = enumerate_ball(group, radius, limit)
    n = action.n_vertices
    ident = np.arange(n)
    perms = {(): ident}
    total = 0
    for element, word in ball:
        if word:
            letter = word[-1]
            step = action.perms[letter - 1] if letter > 0 else action.inv_perms[-letter - 1]
            perms[word] = step[perms[word[:-1]]]
        if group.is_identity(element):
            continue
        total += int(np.count_nonzero(perms[word] == ident))
    return Fraction(total, n)
