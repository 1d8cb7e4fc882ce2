"""One-step agreement between every optimizer and an independent oracle.

The package and the oracle receive identical copies of a pinned swarm state
and twin generators seeded alike; the oracle recomputes each update rule with
plain scalar loops (see oracles.py).  Positions and velocities must agree to
1e-9 per coordinate, masks and integer state exactly.
"""

import numpy as np

import oracles
from swarmselect.optimizers import ALGORITHMS
from swarmselect.optimizers.core import RunContext, SelectorConfig, Swarm

TARGET = np.array([1, 0, 1, 1, 0, 1], dtype=np.uint8)
T_MAX = 10
CASES = [(11, 101, 0), (12, 102, 3), (13, 103, 9)]


def target_fraction(mask):
    return float((np.asarray(mask) == TARGET).sum()) / TARGET.size


def pinned_state(seed, n=4, d=6):
    rng = np.random.default_rng(seed)
    positions = rng.uniform(-3.0, 3.0, (n, d))
    velocities = rng.uniform(-1.0, 1.0, (n, d))
    masks = (positions > 0).astype(np.uint8)
    for i in range(n):
        if masks[i].sum() == 0:
            masks[i, 0] = 1
    fitness = np.array([target_fraction(m) for m in masks])
    best = int(np.lexsort((np.arange(n), -fitness))[0])
    return positions, velocities, masks, fitness, best


def package_setup(algo_name, state_seed, step_seed, params=None):
    positions, velocities, masks, fitness, best = pinned_state(state_seed)
    cfg = SelectorConfig(algorithm=algo_name, num_agents=4, max_iterations=T_MAX,
                         seed=0, params=dict(params or {}))
    algo = ALGORITHMS[algo_name](cfg, 6)
    ctx = RunContext(np.random.default_rng(step_seed), cfg, 6, target_fraction)
    ctx.best_mask = masks[best].copy()
    ctx.best_fitness = float(fitness[best])
    ctx.best_position = positions[best].copy()
    swarm = Swarm(positions.copy(), velocities.copy(), masks.copy(), fitness.copy())
    algo.initialize(swarm, ctx)
    return algo, swarm, ctx


def close(a, b):
    return np.allclose(a, b, rtol=0.0, atol=1e-9)


def test_gsa_step_matches_oracle():
    for state_seed, step_seed, t in CASES:
        algo, swarm, ctx = package_setup("gsa", state_seed, step_seed)
        positions, velocities, masks, fitness, _ = pinned_state(state_seed)
        algo.step(swarm, t, ctx)

        exp_x, exp_v, exp_m = oracles.gsa_step_oracle(
            positions, velocities, fitness, t, T_MAX,
            np.random.default_rng(step_seed))
        assert close(swarm.velocities, exp_v)
        assert close(swarm.positions, exp_x)
        assert np.array_equal(swarm.masks, exp_m)


def test_bba_step_matches_oracle():
    loudness = np.array([1.0, 0.8, 0.25, 0.6])
    for state_seed, step_seed, t in CASES:
        algo, swarm, ctx = package_setup("bba", state_seed, step_seed)
        algo.loudness = loudness.copy()
        _, velocities, masks, fitness, best = pinned_state(state_seed)
        algo.step(swarm, t, ctx)

        exp_m, exp_v, exp_f, exp_a = oracles.bba_step_oracle(
            masks, velocities, fitness, loudness, masks[best], t,
            np.random.default_rng(step_seed), target_fraction)
        assert np.array_equal(swarm.masks, exp_m)
        assert close(swarm.velocities, exp_v)
        assert close(swarm.fitness, exp_f)
        assert close(algo.loudness, exp_a)
        # bat positions shadow the masks
        assert np.array_equal(swarm.positions, exp_m.astype(np.float64))


def test_cs_step_matches_oracle():
    for state_seed, step_seed, t in CASES:
        algo, swarm, ctx = package_setup("cs", state_seed, step_seed)
        positions, _, masks, fitness, best = pinned_state(state_seed)
        algo.step(swarm, t, ctx)

        exp_x, exp_m, exp_f, exp_bp, exp_bf = oracles.cs_step_oracle(
            positions, masks, fitness, positions[best], fitness[best],
            np.random.default_rng(step_seed), target_fraction)
        assert close(swarm.positions, exp_x)
        assert np.array_equal(swarm.masks, exp_m)
        assert close(swarm.fitness, exp_f)
        assert abs(ctx.best_fitness - exp_bf) <= 1e-9
        assert close(ctx.best_position, exp_bp)


def test_ga_step_matches_oracle():
    for state_seed, step_seed, t in CASES:
        algo, swarm, ctx = package_setup("ga", state_seed, step_seed)
        _, _, masks, fitness, _ = pinned_state(state_seed)
        algo.step(swarm, t, ctx)

        exp_m = oracles.ga_step_oracle(masks, fitness,
                                       np.random.default_rng(step_seed))
        assert np.array_equal(swarm.masks, exp_m)
        assert np.array_equal(swarm.positions, exp_m.astype(np.float64))


def test_ga_boosted_mutation_matches_oracle():
    algo, swarm, ctx = package_setup("ga", 21, 201)
    _, _, masks, fitness, _ = pinned_state(21)
    algo._stagnant = algo.p["stagnation_window"]
    algo.step(swarm, 0, ctx)

    exp_m = oracles.ga_step_oracle(masks, fitness, np.random.default_rng(201),
                                   boost_active=True)
    assert np.array_equal(swarm.masks, exp_m)


def test_ga_two_generations_match_oracle():
    algo, swarm, ctx = package_setup("ga", 31, 301)
    _, _, masks, fitness, _ = pinned_state(31)
    algo.step(swarm, 0, ctx)
    swarm.fitness = np.array([target_fraction(m) for m in swarm.masks])
    algo.step(swarm, 1, ctx)

    twin = np.random.default_rng(301)
    gen1 = oracles.ga_step_oracle(masks, fitness, twin)
    fit1 = [target_fraction(m) for m in gen1]
    gen2 = oracles.ga_step_oracle(gen1, fit1, twin)
    assert np.array_equal(swarm.masks, gen2)


def test_gwo_step_matches_oracle():
    for state_seed, step_seed, t in CASES:
        algo, swarm, ctx = package_setup("gwo", state_seed, step_seed)
        positions, _, masks, fitness, _ = pinned_state(state_seed)
        algo.step(swarm, t, ctx)

        exp_x, exp_m = oracles.gwo_step_oracle(
            positions, fitness, t, T_MAX, np.random.default_rng(step_seed))
        assert close(swarm.positions, exp_x)
        assert np.array_equal(swarm.masks, exp_m)


def test_pso_step_matches_oracle():
    for state_seed, step_seed, t in CASES:
        algo, swarm, ctx = package_setup("pso", state_seed, step_seed)
        _, velocities, masks, fitness, best = pinned_state(state_seed)
        pbest = np.roll(masks, 1, axis=0)
        swarm.pbest_masks = pbest.copy()
        algo.step(swarm, t, ctx)

        exp_v, exp_m = oracles.pso_step_oracle(
            masks, velocities, pbest, masks[best],
            np.random.default_rng(step_seed))
        assert close(swarm.velocities, exp_v)
        assert np.array_equal(swarm.masks, exp_m)
        # particle positions shadow the masks
        assert np.array_equal(swarm.positions, exp_m.astype(np.float64))


def test_woa_step_matches_oracle():
    for state_seed, step_seed, t in CASES:
        algo, swarm, ctx = package_setup("woa", state_seed, step_seed)
        positions, _, masks, fitness, best = pinned_state(state_seed)
        algo.step(swarm, t, ctx)

        exp_x, exp_m = oracles.woa_step_oracle(
            positions, masks[best], t, T_MAX,
            np.random.default_rng(step_seed))
        assert close(swarm.positions, exp_x)
        assert np.array_equal(swarm.masks, exp_m)
