"""Cuckoo search: Levy flights plus abandonment of the worst nests.

Each nest proposes a candidate position by a Mantegna Levy step scaled by
alpha and by the nest's offset from the best position found so far (the
step-size scaling role of the distance term); the candidate replaces a
uniformly chosen *other* nest when fitter.  A nest whose perturbation is
exactly zero (alpha = 0, or the nest sits on the best position) keeps its
position and mask untouched and consumes no further draws.  After the
flights, the worst fraction p_a of nests (never all of them) are redrawn
uniformly at random.

Draw order per step: per nest in index order, Levy numerator normals (dim)
then denominator normals (dim); if the position moved, binarize uniforms
(dim) [+ repair index if empty], then one integer for the comparison nest.
Abandonment then visits the worst nests in (fitness, index) order, drawing a
uniform position matrix row (dim) and a binarize call each.
"""

from __future__ import annotations

import math

import numpy as np

from .core import Algorithm, levy_step


def cuckoo_abandon_count(p_a: float, n: int) -> int:
    """floor(p_a * n), capped so at least one nest always survives."""
    return min(int(math.floor(p_a * n)), n - 1)


class CuckooSearch(Algorithm):
    name = "cs"
    # alpha stays at unit scale: the flights must be able to push positions
    # into the transfer's saturated range, otherwise bits keep resampling
    # near 50/50 and the search stalls a few bits short of the optimum.
    DEFAULTS = {"alpha": 1.0, "lam": 1.5, "p_a": 0.25}

    def step(self, swarm, t, ctx):
        n, d = swarm.n, swarm.dim
        alpha, lam = self.p["alpha"], self.p["lam"]
        for i in range(n):
            steps = levy_step(ctx.rng, lam, d)
            cand_pos = swarm.positions[i] + alpha * steps * (swarm.positions[i] - ctx.best_position)
            if np.array_equal(cand_pos, swarm.positions[i]):
                continue
            cand_mask = ctx.binarize(cand_pos)
            cand_fit = ctx.evaluate(cand_mask, cand_pos)
            j = int(ctx.rng.integers(n - 1))
            if j >= i:
                j += 1
            if cand_fit > swarm.fitness[j]:
                swarm.positions[j] = cand_pos
                swarm.masks[j] = cand_mask
                swarm.fitness[j] = cand_fit

        k = cuckoo_abandon_count(self.p["p_a"], n)
        if k == 0:
            return
        worst = np.lexsort((np.arange(n), swarm.fitness))[:k]
        for i in worst:
            swarm.positions[i] = ctx.rng.uniform(-ctx.cfg.init_span, ctx.cfg.init_span, d)
            swarm.masks[i] = ctx.binarize(swarm.positions[i])
            swarm.fitness[i] = ctx.evaluate(swarm.masks[i], swarm.positions[i])

    def max_evaluations(self, n, T):
        # init + per iteration: n flight candidates and the abandoned redraws
        return n + T * (n + cuckoo_abandon_count(self.p["p_a"], n))
