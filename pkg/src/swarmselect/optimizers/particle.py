"""Binary particle swarm without an inertia weight.

The particle's position *is* its bit vector.  Velocities accumulate pulls
toward the global best mask and each particle's personal best mask (all 0/1
vectors), scaled by fresh per-dimension uniforms:
v <- clip(v + alpha*e1*(gbest - x) + beta*e2*(pbest - x)) with x the current
bits.  New bits are then drawn straight from the velocity transfer, so a
velocity pinned at +/-v_max holds its bit with probability S(v_max); a bit
that already agrees with both bests feels no pull and keeps its velocity.
Personal bests update after the driver evaluates the new masks; only a
strict improvement replaces a personal best.

Draw order per step: one uniform matrix (n, dim) for e1, one for e2, then
one binarize call per particle in index order.
"""

from __future__ import annotations

import numpy as np

from .core import Algorithm


def pso_velocity(velocity, position, gbest, pbest, e1, e2, alpha, beta, v_max):
    out = velocity + alpha * e1 * (gbest - position) + beta * e2 * (pbest - position)
    return np.clip(out, -v_max, v_max)


class ParticleSwarm(Algorithm):
    name = "pso"
    DEFAULTS = {"alpha": 2.0, "beta": 2.0}

    def initialize(self, swarm, ctx):
        swarm.pbest_masks = swarm.masks.copy()
        swarm.pbest_fitness = swarm.fitness.copy()
        swarm.positions = swarm.masks.astype(np.float64)

    def step(self, swarm, t, ctx):
        n, d = swarm.n, swarm.dim
        e1 = ctx.rng.random((n, d))
        e2 = ctx.rng.random((n, d))
        gbest = ctx.best_mask.astype(np.float64)
        pbest = swarm.pbest_masks.astype(np.float64)
        swarm.velocities = pso_velocity(
            swarm.velocities, swarm.positions, gbest, pbest,
            e1, e2, self.p["alpha"], self.p["beta"], ctx.cfg.v_max,
        )
        for i in range(n):
            swarm.masks[i] = ctx.binarize(swarm.velocities[i])
        swarm.positions = swarm.masks.astype(np.float64)

    def post_evaluate(self, swarm, ctx):
        improved = swarm.fitness > swarm.pbest_fitness
        swarm.pbest_masks[improved] = swarm.masks[improved]
        swarm.pbest_fitness[improved] = swarm.fitness[improved]
