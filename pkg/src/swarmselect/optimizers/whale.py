"""Whale optimization: encircling, prey search, and spiral attack.

Per whale a scalar A = 2a*r1 - a and C = 2*r2 are drawn (a decays linearly
from 2 to 0).  With probability 1/2 the whale encircles: it moves to
X* - A*|C*X* - X| when |A| < 1, or explores the same way around a uniformly
random whale when |A| >= 1.  Otherwise it spirals:
X <- |X* - X| * exp(b*l) * cos(2*pi*l) + X* with l ~ U[-1, 1].  The prey X*
is the best mask's saturated corner, (2*mask - 1) * seed_magnitude, rather
than the raw continuous coordinates it was first reached from: as A decays,
whales contract onto a point whose every bit agrees with the best mask and
sits deep in the transfer's flat region, so late iterations refine the best
pattern instead of resampling it.  Updates read a frozen snapshot of the old
positions.

Draw order per step, per whale in index order: r1 uniform, r2 uniform, the
branch uniform p, then either one random-whale integer (exploration) or one
l uniform (spiral); encircling draws nothing further.  Binarize calls follow
per whale in index order.
"""

from __future__ import annotations

import numpy as np

from .core import Algorithm
from .wolf import wolf_a_schedule


def whale_encircle(x, target, A, C):
    return target - A * np.abs(C * target - x)


def whale_spiral(x, best, b, l):
    return np.abs(best - x) * np.exp(b * l) * np.cos(2.0 * np.pi * l) + best


class WhaleOptimization(Algorithm):
    name = "woa"
    DEFAULTS = {"spiral_b": 1.0}

    def step(self, swarm, t, ctx):
        n, d = swarm.n, swarm.dim
        a = wolf_a_schedule(t, ctx.T)
        b = self.p["spiral_b"]
        old = swarm.positions.copy()
        best = (2.0 * ctx.best_mask.astype(np.float64) - 1.0) * ctx.cfg.seed_magnitude
        new_pos = np.empty_like(old)
        for i in range(n):
            r1 = ctx.rng.random()
            r2 = ctx.rng.random()
            A = 2.0 * a * r1 - a
            C = 2.0 * r2
            p = ctx.rng.random()
            if p < 0.5:
                if abs(A) < 1.0:
                    new_pos[i] = whale_encircle(old[i], best, A, C)
                else:
                    j = int(ctx.rng.integers(n))
                    new_pos[i] = whale_encircle(old[i], old[j], A, C)
            else:
                l = ctx.rng.uniform(-1.0, 1.0)
                new_pos[i] = whale_spiral(old[i], best, b, l)
        swarm.positions = new_pos
        for i in range(n):
            swarm.masks[i] = ctx.binarize(swarm.positions[i])
