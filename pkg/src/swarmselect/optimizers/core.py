"""Shared machinery for the binary metaheuristic selectors.

Every algorithm explores continuous positions and maps them to 0/1 feature
masks through the same sigmoid transfer with stochastic thresholding.  A
single numpy Generator seeded from the config drives each run; algorithms
document their exact draw order so an independent implementation fed the same
generator reproduces every step.  Fitness values are memoized per mask, and
the best mask ever evaluated anywhere in a run is retained as the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TRANSFER_MODES = ("standard", "literal")


def transfer_sigmoid(v):
    """Logistic transfer S(v) = 1 / (1 + exp(-v)), overflow-safe."""
    v = np.clip(np.asarray(v, dtype=np.float64), -500.0, 500.0)
    return 1.0 / (1.0 + np.exp(-v))


def binarize(values, rng, transfer: str = "standard") -> np.ndarray:
    """Draw a mask from per-component probabilities S(values).

    Draws one uniform per component; under "standard" semantics a bit is set
    when the uniform falls below S(v).  The "literal" mode inverts the
    comparison (bit cleared when the uniform falls below S(v)).  An all-zero
    outcome is repaired by setting one uniformly random bit, so the returned
    mask is never empty.
    """
    if transfer not in TRANSFER_MODES:
        raise ValueError(f"transfer must be one of {TRANSFER_MODES}")
    p = transfer_sigmoid(values)
    u = rng.random(p.size)
    bits = (u < p) if transfer == "standard" else (u >= p)
    mask = bits.astype(np.uint8)
    if mask.sum() == 0:
        mask[rng.integers(mask.size)] = 1
    return mask


def levy_sigma(lam: float) -> float:
    """Mantegna scale parameter for the numerator Gaussian."""
    num = math.gamma(1 + lam) * math.sin(math.pi * lam / 2)
    den = math.gamma((1 + lam) / 2) * lam * 2 ** ((lam - 1) / 2)
    return (num / den) ** (1 / lam)


def levy_step(rng, lam: float = 1.5, size: int | None = None):
    """Heavy-tailed step via Mantegna's algorithm: u / |v|^(1/lam).

    Draws u ~ N(0, sigma_u^2) then v ~ N(0, 1) (two generator calls).  A
    zero denominator is clamped to keep the step finite.
    """
    if not 1.0 < lam <= 2.0:
        raise ValueError("lam must lie in (1, 2]")
    sigma = levy_sigma(lam)
    u = rng.normal(0.0, sigma, size)
    v = rng.normal(0.0, 1.0, size)
    av = np.maximum(np.abs(v), 1e-300)
    step = u / av ** (1.0 / lam)
    return float(step) if size is None else step


@dataclass(frozen=True)
class SelectorConfig:
    """One selector run: algorithm, budget, seeding, and tuning overrides.

    params holds per-algorithm overrides merged over that algorithm's
    documented defaults.  leading_mask, when given, seeds agent 0 exactly and
    places its continuous position at +/-seed_magnitude per bit.
    """

    algorithm: str
    num_agents: int = 30
    max_iterations: int = 100
    seed: int = 0
    leading_mask: np.ndarray | None = None
    transfer: str = "standard"
    v_max: float = 6.0
    init_span: float = 4.0
    seed_magnitude: float = 4.0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.num_agents < 2:
            raise ValueError("num_agents must be at least 2")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.transfer not in TRANSFER_MODES:
            raise ValueError(f"transfer must be one of {TRANSFER_MODES}")
        if self.v_max <= 0 or self.init_span <= 0 or self.seed_magnitude <= 0:
            raise ValueError("v_max, init_span, and seed_magnitude must be positive")
        if self.leading_mask is not None:
            lm = np.asarray(self.leading_mask, dtype=np.uint8)
            if lm.ndim != 1 or not set(np.unique(lm)) <= {0, 1}:
                raise ValueError("leading_mask must be a 0/1 vector")
            if lm.sum() == 0:
                raise ValueError("leading_mask selects no features")
            lm = lm.copy()
            lm.setflags(write=False)
            object.__setattr__(self, "leading_mask", lm)


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of one selector run."""

    algorithm: str
    seed: int
    n_features: int
    best_mask: np.ndarray
    best_fitness: float
    fitness_history: tuple[float, ...]
    evaluations: int
    budget: int

    def __post_init__(self):
        mask = np.asarray(self.best_mask, dtype=np.uint8).copy()
        mask.setflags(write=False)
        object.__setattr__(self, "best_mask", mask)


class Swarm:
    """Mutable per-run population state (struct-of-arrays)."""

    def __init__(self, positions, velocities, masks, fitness):
        self.positions = positions    # (n, d) float64
        self.velocities = velocities  # (n, d) float64
        self.masks = masks            # (n, d) uint8
        self.fitness = fitness        # (n,) float64
        self.pbest_masks = None       # set by algorithms that track personal bests
        self.pbest_fitness = None

    @property
    def n(self):
        return self.masks.shape[0]

    @property
    def dim(self):
        return self.masks.shape[1]


class RunContext:
    """Memoized fitness evaluation plus global-best bookkeeping."""

    def __init__(self, rng, cfg: SelectorConfig, n_features: int, fitness_fn):
        self.rng = rng
        self.cfg = cfg
        self.n_features = n_features
        self.T = cfg.max_iterations
        self._fn = fitness_fn
        self._memo: dict[bytes, float] = {}
        self.misses = 0
        self.best_mask = None
        self.best_fitness = -math.inf
        self.best_position = None

    def evaluate(self, mask: np.ndarray, position: np.ndarray) -> float:
        if mask.sum() == 0:
            raise AssertionError("internal error: empty mask submitted for evaluation")
        key = mask.tobytes()
        if key in self._memo:
            fit = self._memo[key]
        else:
            fit = float(self._fn(mask.copy()))
            self._memo[key] = fit
            self.misses += 1
        # strict improvement keeps the earliest mask on ties
        if fit > self.best_fitness:
            self.best_fitness = fit
            self.best_mask = mask.copy()
            self.best_position = np.asarray(position, dtype=np.float64).copy()
        return fit

    def binarize(self, values) -> np.ndarray:
        return binarize(values, self.rng, self.cfg.transfer)


class Algorithm:
    """Base class: subclasses mutate the swarm in place each step."""

    name = "base"
    DEFAULTS: dict = {}
    min_agents = 2

    def __init__(self, cfg: SelectorConfig, n_features: int):
        unknown = set(cfg.params) - set(self.DEFAULTS)
        if unknown:
            raise ValueError(f"{self.name}: unknown params {sorted(unknown)}")
        if cfg.num_agents < self.min_agents:
            raise ValueError(f"{self.name} needs at least {self.min_agents} agents")
        self.p = {**self.DEFAULTS, **cfg.params}
        self.cfg = cfg
        self.dim = n_features

    def initialize(self, swarm: Swarm, ctx: RunContext) -> None:
        pass

    def step(self, swarm: Swarm, t: int, ctx: RunContext) -> None:
        raise NotImplementedError

    def post_evaluate(self, swarm: Swarm, ctx: RunContext) -> None:
        pass

    def max_evaluations(self, n: int, T: int) -> int:
        # init batch plus one candidate per agent per iteration
        return n * (T + 1)


def _init_swarm(cfg: SelectorConfig, n_features: int, rng) -> Swarm:
    """Initial population.

    Draw order: one uniform matrix over [-init_span, init_span] for every
    unseeded agent (agent 0 is skipped when a leading mask is given and takes
    position +/-seed_magnitude instead), then one binarize call per unseeded
    agent in index order.  The seeded agent's mask is the leading mask itself,
    drawn from no randomness.
    """
    n, d = cfg.num_agents, n_features
    positions = np.empty((n, d))
    masks = np.empty((n, d), dtype=np.uint8)
    start = 0
    if cfg.leading_mask is not None:
        lm = np.asarray(cfg.leading_mask, dtype=np.uint8)
        positions[0] = np.where(lm == 1, cfg.seed_magnitude, -cfg.seed_magnitude)
        masks[0] = lm
        start = 1
    positions[start:] = rng.uniform(-cfg.init_span, cfg.init_span, (n - start, d))
    for i in range(start, n):
        masks[i] = binarize(positions[i], rng, cfg.transfer)
    return Swarm(positions, np.zeros((n, d)), masks, np.empty(n))


def run_selector(cfg: SelectorConfig, n_features: int, fitness_fn) -> SelectionResult:
    """Run one metaheuristic to maximize fitness over feature masks.

    Args:
        cfg: algorithm choice, budget, seed, and tuning overrides.
        n_features: mask length.
        fitness_fn: deterministic map from a 0/1 mask to a real score;
            results are memoized per mask, so `evaluations` counts distinct
            masks actually scored.

    Returns:
        SelectionResult; fitness_history holds the best-so-far after
        initialization and after each iteration (length max_iterations + 1)
        and is non-decreasing.
    """
    from . import ALGORITHMS  # registry lives in the package init

    if n_features < 1:
        raise ValueError("n_features must be positive")
    if cfg.algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {cfg.algorithm!r}; choose from {sorted(ALGORITHMS)}")
    if cfg.leading_mask is not None and cfg.leading_mask.size != n_features:
        raise ValueError("leading_mask length must equal n_features")

    algo = ALGORITHMS[cfg.algorithm](cfg, n_features)
    rng = np.random.default_rng(cfg.seed)
    ctx = RunContext(rng, cfg, n_features, fitness_fn)
    swarm = _init_swarm(cfg, n_features, rng)
    for i in range(swarm.n):
        swarm.fitness[i] = ctx.evaluate(swarm.masks[i], swarm.positions[i])
    algo.initialize(swarm, ctx)

    history = [ctx.best_fitness]
    for t in range(cfg.max_iterations):
        algo.step(swarm, t, ctx)
        for i in range(swarm.n):
            swarm.fitness[i] = ctx.evaluate(swarm.masks[i], swarm.positions[i])
        algo.post_evaluate(swarm, ctx)
        history.append(ctx.best_fitness)

    budget = algo.max_evaluations(cfg.num_agents, cfg.max_iterations)
    if ctx.misses > budget:
        raise AssertionError(
            f"{cfg.algorithm} exceeded its evaluation budget: {ctx.misses} > {budget}"
        )
    return SelectionResult(
        algorithm=cfg.algorithm,
        seed=cfg.seed,
        n_features=n_features,
        best_mask=ctx.best_mask,
        best_fitness=ctx.best_fitness,
        fitness_history=tuple(history),
        evaluations=ctx.misses,
        budget=budget,
    )
