"""Grey wolf optimizer: the pack tracks its three fittest members.

Every wolf moves to the mean of three points, one per leader (alpha, beta,
delta = the three fittest agents of the current population, ties toward the
lower index): X_leader - A * |C * X_leader - X|, with A = 2a*r1 - a and
C = 2*r2 drawn per wolf per leader per dimension.  The coefficient a decays
linearly from 2 to 0 over the run.  Updates are synchronous: all wolves move
from the same snapshot of leader positions.

Draw order per step: one uniform tensor (n, 3, dim) for r1, one for r2, then
one binarize call per wolf in index order.
"""

from __future__ import annotations

import numpy as np

from .core import Algorithm


def wolf_a_schedule(t: int, T: int) -> float:
    """Linear decay 2 -> 0 across the run."""
    return 2.0 - 2.0 * t / T


def wolf_candidate(x, leader, r1, r2, a):
    """One leader's pull on one wolf: X_l - A * |C * X_l - x|."""
    A = 2.0 * a * r1 - a
    C = 2.0 * r2
    return leader - A * np.abs(C * leader - x)


class GreyWolf(Algorithm):
    name = "gwo"
    DEFAULTS = {}
    min_agents = 3

    def step(self, swarm, t, ctx):
        n, d = swarm.n, swarm.dim
        a = wolf_a_schedule(t, ctx.T)
        leaders = np.lexsort((np.arange(n), -swarm.fitness))[:3]
        leader_pos = swarm.positions[leaders].copy()
        r1 = ctx.rng.random((n, 3, d))
        r2 = ctx.rng.random((n, 3, d))
        new_pos = np.empty_like(swarm.positions)
        for i in range(n):
            pulls = [
                wolf_candidate(swarm.positions[i], leader_pos[z], r1[i, z], r2[i, z], a)
                for z in range(3)
            ]
            new_pos[i] = np.mean(pulls, axis=0)
        swarm.positions = new_pos
        for i in range(n):
            swarm.masks[i] = ctx.binarize(swarm.positions[i])
