"""Elitist genetic algorithm directly over bit-vector chromosomes.

Size-2 tournament selection, uniform crossover (each bit swaps with
probability 0.5, crossover applied with probability 0.9), and per-bit flip
mutation at rate 1/dim.  The single best individual survives unchanged.  When
the global best has not improved for stagnation_window generations the
mutation rate is boosted tenfold until improvement resumes.

Draw order per step, per offspring pair while the population is unfilled:
two integer pairs for the tournaments, one crossover uniform, the swap
uniforms (dim) when crossover fires, then per accepted child its mutation
uniforms (dim) [+ repair index if the child ends up empty].  The second child
of the final pair is discarded without consuming draws when the population
is already full.
"""

from __future__ import annotations

import numpy as np

from .core import Algorithm


def tournament_pick(fitness: np.ndarray, contenders) -> int:
    """Fitter contender wins; ties go to the lower agent index."""
    a, b = int(contenders[0]), int(contenders[1])
    if fitness[b] > fitness[a]:
        return b
    if fitness[a] > fitness[b]:
        return a
    return min(a, b)


class GeneticAlgorithm(Algorithm):
    name = "ga"
    DEFAULTS = {
        "crossover_prob": 0.9,
        "mutation_rate": None,  # defaults to 1/dim
        "stagnation_window": 15,
        "stagnation_boost": 10.0,
    }

    def initialize(self, swarm, ctx):
        self._last_best = ctx.best_fitness
        self._stagnant = 0
        swarm.positions = swarm.masks.astype(np.float64)

    def post_evaluate(self, swarm, ctx):
        if ctx.best_fitness > self._last_best:
            self._last_best = ctx.best_fitness
            self._stagnant = 0
        else:
            self._stagnant += 1

    def _mutation_rate(self, d):
        rate = self.p["mutation_rate"] if self.p["mutation_rate"] is not None else 1.0 / d
        if self._stagnant >= self.p["stagnation_window"]:
            rate *= self.p["stagnation_boost"]
        return min(rate, 1.0)

    def step(self, swarm, t, ctx):
        n, d = swarm.n, swarm.dim
        rate = self._mutation_rate(d)
        cx_prob = self.p["crossover_prob"]
        parents = swarm.masks

        elite = int(np.lexsort((np.arange(n), -swarm.fitness))[0])
        children = [parents[elite].copy()]
        while len(children) < n:
            p1 = tournament_pick(swarm.fitness, ctx.rng.integers(0, n, 2))
            p2 = tournament_pick(swarm.fitness, ctx.rng.integers(0, n, 2))
            if ctx.rng.random() < cx_prob:
                swap = ctx.rng.random(d) < 0.5
                c1 = np.where(swap, parents[p2], parents[p1]).astype(np.uint8)
                c2 = np.where(swap, parents[p1], parents[p2]).astype(np.uint8)
            else:
                c1 = parents[p1].copy()
                c2 = parents[p2].copy()
            for child in (c1, c2):
                if len(children) == n:
                    break
                if rate > 0:
                    flips = ctx.rng.random(d) < rate
                    child = child ^ flips.astype(np.uint8)
                if child.sum() == 0:
                    child[ctx.rng.integers(d)] = 1
                children.append(child)
        swarm.masks = np.stack(children)
        swarm.positions = swarm.masks.astype(np.float64)
