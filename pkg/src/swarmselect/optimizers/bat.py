"""Binary bat algorithm: echolocation frequencies drive mask velocities.

Positions are the masks themselves; only velocities are continuous.  Each
bat proposes one candidate per iteration: either a flight (velocity pulled
toward the global-best mask by a random frequency, then rebinarized from the
velocity) or, while its pulse rate is still low, a local random walk around
the global best.  Candidates are adopted only when they improve the bat and a
uniform draw falls under its loudness; loudness decays geometrically every
iteration regardless, and the pulse rate rises on a fixed schedule.

Draw order per step, per bat in index order: frequency uniform; flight
uniforms (dim) [+ repair index if the flight mask is empty]; walk-trigger
uniform; if walking, flip uniforms (dim) [+ repair index if empty]; accept
uniform.
"""

from __future__ import annotations

import numpy as np

from .core import Algorithm, transfer_sigmoid


def bat_velocity(velocity, mask, best_mask, freq, v_max):
    """v <- clip(v + (x - best) * f)."""
    out = velocity + (mask.astype(np.float64) - best_mask.astype(np.float64)) * freq
    return np.clip(out, -v_max, v_max)


def bat_pulse_rate(t: int, r0: float, gamma: float) -> float:
    return r0 * (1.0 - np.exp(-gamma * t))


class BinaryBat(Algorithm):
    name = "bba"
    DEFAULTS = {
        "f_min": 0.0,
        "f_max": 2.0,
        "r0": 0.5,
        "gamma": 0.9,
        "loudness0": 1.0,
        "loudness_decay": 0.9,
        "walk_flip_rate": None,  # defaults to 1/dim
    }

    def initialize(self, swarm, ctx):
        self.loudness = np.full(swarm.n, self.p["loudness0"])
        swarm.positions = swarm.masks.astype(np.float64)

    def step(self, swarm, t, ctx):
        d = swarm.dim
        r_t = bat_pulse_rate(t, self.p["r0"], self.p["gamma"])
        flip_rate = self.p["walk_flip_rate"] or 1.0 / d
        best = ctx.best_mask
        for i in range(swarm.n):
            freq = self.p["f_min"] + (self.p["f_max"] - self.p["f_min"]) * ctx.rng.random()
            swarm.velocities[i] = bat_velocity(
                swarm.velocities[i], swarm.masks[i], best, freq, ctx.cfg.v_max
            )
            # flight candidate: bits drawn from the velocity transfer
            cand = ctx.binarize(swarm.velocities[i])
            if ctx.rng.random() > r_t:
                # local walk: flip a sprinkling of the global best's bits
                flips = ctx.rng.random(d) < flip_rate
                cand = (best.astype(np.uint8) ^ flips.astype(np.uint8))
                if cand.sum() == 0:
                    cand[ctx.rng.integers(d)] = 1
            cand_fit = ctx.evaluate(cand, cand.astype(np.float64))
            if ctx.rng.random() < self.loudness[i] and cand_fit > swarm.fitness[i]:
                swarm.masks[i] = cand
                swarm.fitness[i] = cand_fit
            self.loudness[i] *= self.p["loudness_decay"]
        swarm.positions = swarm.masks.astype(np.float64)

    # transfer_sigmoid is re-exported here so the velocity/bit relation is
    # visible next to the update rule
    transfer = staticmethod(transfer_sigmoid)
