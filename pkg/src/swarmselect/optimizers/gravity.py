"""Gravitational search: agents attract each other in proportion to fitness.

Agent masses are min-max scaled fitness values normalized to sum 1.  The
pairwise force is G*Mi*Mj*(x_j - x_i)/R with R the Euclidean distance plus a
small epsilon; acceleration divides out the agent's own mass, which also
keeps zero-mass (worst) agents moving.  The distance enters to the first
power: under the inverse-square law distant attractors become negligible and
the search stalls before the gravity constant has decayed.  Attraction is
restricted to the Kbest fittest agents, a set that shrinks linearly from the
whole population to a single agent over the run.

Draw order per step: for each agent in index order one uniform matrix of
shape (kbest, dim) scaling the force contributions componentwise; then one
uniform matrix (n, dim) damping the velocities; then one binarize call per
agent in index order.
"""

from __future__ import annotations

import numpy as np

from .core import Algorithm


def gsa_masses(fitness: np.ndarray) -> np.ndarray:
    """Normalized masses; uniform when all fitness values coincide."""
    best = fitness.max()
    worst = fitness.min()
    if best == worst:
        return np.full(fitness.size, 1.0 / fitness.size)
    m = (fitness - worst) / (best - worst)
    return m / m.sum()


def gsa_gravity(t: int, T: int, g0: float, decay: float) -> float:
    return g0 * np.exp(-decay * t / T)


def gsa_kbest_count(t: int, T: int, n: int) -> int:
    """Linear shrink from n agents at t=0 to a single agent at t=T-1."""
    if T == 1:
        return n
    return max(1, n - int(round((n - 1) * t / (T - 1))))


def gsa_acceleration(positions, masses, kbest, g, eps, rand_u):
    """Acceleration on every agent from the Kbest set.

    rand_u has shape (n, len(kbest), dim); entry [i, z] scales the pull of
    kbest[z] on agent i per component.  The own-mass factor of Newton's law
    cancels against the division by M_i, so the worst agent (mass 0) still
    accelerates.
    """
    n, d = positions.shape
    acc = np.zeros((n, d))
    for i in range(n):
        delta = positions[kbest] - positions[i]
        dist = np.linalg.norm(delta, axis=1) + eps
        coef = g * masses[kbest] / dist
        contrib = rand_u[i] * coef[:, None] * delta
        contrib[kbest == i] = 0.0
        acc[i] = contrib.sum(axis=0)
    return acc


class GravitationalSearch(Algorithm):
    name = "gsa"
    DEFAULTS = {"g0": 100.0, "g_decay": 20.0, "eps": 1e-12}

    def step(self, swarm, t, ctx):
        n, d = swarm.n, swarm.dim
        masses = gsa_masses(swarm.fitness)
        g = gsa_gravity(t, ctx.T, self.p["g0"], self.p["g_decay"])
        k = gsa_kbest_count(t, ctx.T, n)
        # fittest first, ties toward the lower agent index
        kbest = np.lexsort((np.arange(n), -swarm.fitness))[:k]

        rand_u = np.empty((n, k, d))
        for i in range(n):
            rand_u[i] = ctx.rng.random((k, d))
        acc = gsa_acceleration(swarm.positions, masses, kbest, g, self.p["eps"], rand_u)

        damp = ctx.rng.random((n, d))
        swarm.velocities = np.clip(damp * swarm.velocities + acc,
                                   -ctx.cfg.v_max, ctx.cfg.v_max)
        swarm.positions = swarm.positions + swarm.velocities
        for i in range(n):
            swarm.masks[i] = ctx.binarize(swarm.positions[i])
