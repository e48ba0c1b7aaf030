"""Population-based search kernel: PSO (Clerc-Kennedy), DFO, and DE/best/1.

All three algorithms share bounded uniform initialisation, clamping at the
bounds, an elite archive of size one (best-found position and error), and a
common run loop that terminates on target error or the evaluation budget.
Fitness functions take an (N, D) batch of positions and return N errors.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analytics import population_diversity

FitnessFn = Callable[[np.ndarray], np.ndarray]


class Algorithm(enum.Enum):
    PSO = "PSO"
    DFO = "DFO"
    DE = "DE"


@dataclass(frozen=True)
class SearchSpace:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("lower/upper must be 1-D arrays of equal length")
        if np.any(lower > upper):
            raise ValueError("lower bound exceeds upper bound")

    @property
    def dims(self) -> int:
        return self.lower.shape[0]

    @classmethod
    def from_inventory(cls, inventory) -> "SearchSpace":
        stocks = inventory.stocks()
        return cls(lower=np.zeros_like(stocks), upper=stocks)

    def clamp(self, positions: np.ndarray) -> np.ndarray:
        return np.clip(positions, self.lower, self.upper)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.lower, self.upper, size=(n, self.dims))


@dataclass(frozen=True)
class OptimizerConfig:
    algorithm: Algorithm
    n: int = 100
    max_fes: int = 150_000
    target_error: float = 0.0
    rng_seed: int = 0
    chi: float = 0.72984  # PSO constriction factor
    c1: float = 2.05  # PSO personal-best learning factor
    c2: float = 2.05  # PSO swarm-best learning factor
    delta: float = 0.001  # DFO component-restart probability
    f: float = 0.5  # DE difference-vector weight
    cr: float = 0.9  # DE crossover rate

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("population size must be > 0")
        if self.max_fes <= 0:
            raise ValueError("max_fes must be > 0")
        if self.algorithm is Algorithm.DE and self.n < 4:
            raise ValueError("DE requires a population of at least 4")


@dataclass
class Population:
    positions: np.ndarray  # (N, D)
    errors: np.ndarray  # (N,)
    elite_position: np.ndarray  # best-so-far (D,)
    elite_error: float
    fes: int
    # PSO-only state; None for DFO/DE.
    velocities: np.ndarray | None = None
    pbest_positions: np.ndarray | None = None
    pbest_errors: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.positions.shape[0]


@dataclass
class TrialRecord:
    algorithm: Algorithm
    seed: int
    best_recipe: np.ndarray
    best_error: float
    fes_used: int
    success: bool
    iterations: int
    improvement_iters: list[int]
    diversity_trace: list[float]
    final_population: np.ndarray
    final_errors: np.ndarray

    def as_dict(self) -> dict:
        return {
            "algorithm": self.algorithm.value,
            "seed": int(self.seed),
            "best_recipe": [float(x) for x in self.best_recipe],
            "best_error": float(self.best_error),
            "fes_used": int(self.fes_used),
            "success": bool(self.success),
            "iterations": int(self.iterations),
            "improvement_iters": [int(i) for i in self.improvement_iters],
            "diversity_trace": [float(d) for d in self.diversity_trace],
            "final_population": [[float(x) for x in row] for row in self.final_population],
            "final_errors": [float(e) for e in self.final_errors],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrialRecord":
        return cls(
            algorithm=Algorithm(data["algorithm"]),
            seed=int(data["seed"]),
            best_recipe=np.array(data["best_recipe"], dtype=float),
            best_error=float(data["best_error"]),
            fes_used=int(data["fes_used"]),
            success=bool(data["success"]),
            iterations=int(data["iterations"]),
            improvement_iters=[int(i) for i in data["improvement_iters"]],
            diversity_trace=[float(d) for d in data["diversity_trace"]],
            final_population=np.array(data["final_population"], dtype=float),
            final_errors=np.array(data["final_errors"], dtype=float),
        )


def init_population(
    space: SearchSpace,
    config: OptimizerConfig,
    fitness: FitnessFn,
    rng: np.random.Generator,
) -> Population:
    """Uniform initialisation within bounds; costs N evaluations."""
    positions = space.sample(rng, config.n)
    errors = np.asarray(fitness(positions), dtype=float)
    best = int(np.argmin(errors))
    pop = Population(
        positions=positions,
        errors=errors,
        elite_position=positions[best].copy(),
        elite_error=float(errors[best]),
        fes=config.n,
    )
    if config.algorithm is Algorithm.PSO:
        pop.velocities = np.zeros_like(positions)
        pop.pbest_positions = positions.copy()
        pop.pbest_errors = errors.copy()
    return pop


def _update_elite(pop: Population) -> None:
    best = int(np.argmin(pop.errors))
    if pop.errors[best] < pop.elite_error:
        pop.elite_error = float(pop.errors[best])
        pop.elite_position = pop.positions[best].copy()


def _ring_lbest(pbest_errors: np.ndarray) -> np.ndarray:
    """Per-particle index of the best personal best in its ring neighbourhood
    {i-1, i, i+1}; ties resolve left-to-self-to-right."""
    n = pbest_errors.shape[0]
    idx = np.arange(n)
    left = (idx - 1) % n
    right = (idx + 1) % n
    stacked = np.stack([pbest_errors[left], pbest_errors, pbest_errors[right]])
    which = stacked.argmin(axis=0)
    return np.where(which == 0, left, np.where(which == 1, idx, right))


def pso_step(
    pop: Population,
    space: SearchSpace,
    config: OptimizerConfig,
    fitness: FitnessFn,
    rng: np.random.Generator,
) -> Population:
    """Constriction-factor velocity update over a ring (lbest) neighbourhood.

    r1/r2 are drawn once per particle, as in the update equations; the
    neighbourhood best plays the role of the swarm attractor.
    """
    if pop.velocities is None or pop.pbest_positions is None:
        raise ValueError("population carries no PSO state; initialise with Algorithm.PSO")
    n, d = pop.positions.shape
    g = pop.pbest_positions[_ring_lbest(pop.pbest_errors)]
    r1 = rng.random((n, 1))
    r2 = rng.random((n, 1))
    pop.velocities = config.chi * (
        pop.velocities
        + config.c1 * r1 * (pop.pbest_positions - pop.positions)
        + config.c2 * r2 * (g - pop.positions)
    )
    pop.positions = space.clamp(pop.positions + pop.velocities)
    pop.errors = np.asarray(fitness(pop.positions), dtype=float)
    pop.fes += n
    improved = pop.errors < pop.pbest_errors
    pop.pbest_positions[improved] = pop.positions[improved]
    pop.pbest_errors[improved] = pop.errors[improved]
    best = int(np.argmin(pop.pbest_errors))
    if pop.pbest_errors[best] < pop.elite_error:
        pop.elite_error = float(pop.pbest_errors[best])
        pop.elite_position = pop.pbest_positions[best].copy()
    return pop


def _ring_best_neighbors(errors: np.ndarray) -> np.ndarray:
    """Index of each member's better ring neighbour (ties to the lower index)."""
    n = errors.shape[0]
    idx = np.arange(n)
    left = (idx - 1) % n
    right = (idx + 1) % n
    lo = np.minimum(left, right)
    hi = np.maximum(left, right)
    return np.where(errors[lo] <= errors[hi], lo, hi)


def dfo_step(
    pop: Population,
    space: SearchSpace,
    config: OptimizerConfig,
    fitness: FitnessFn,
    rng: np.random.Generator,
) -> Population:
    """Component-wise move toward the best ring neighbour and the swarm best.

    Each component restarts uniformly within its bounds with probability
    delta, keeping the population dispersed. The swarm-best fly is exempt
    from the update (elite of size one), so the best-found position is never
    lost from the population. Flies move in place, one at a time, so a
    neighbour that already moved this iteration is read at its new position
    (its error ranking stays that of the last evaluation).
    """
    n, d = pop.positions.shape
    positions = pop.positions
    s = int(np.argmin(pop.errors))
    neighbors = _ring_best_neighbors(pop.errors)
    for i in range(n):
        if i == s:
            continue
        moved = positions[neighbors[i]] + rng.random(d) * (positions[s] - positions[i])
        jump = rng.random(d) < config.delta
        if jump.any():
            moved = np.where(jump, rng.uniform(space.lower, space.upper), moved)
        positions[i] = np.clip(moved, space.lower, space.upper)
    pop.errors = np.asarray(fitness(positions), dtype=float)
    pop.fes += n
    _update_elite(pop)
    return pop


def de_step(
    pop: Population,
    space: SearchSpace,
    config: OptimizerConfig,
    fitness: FitnessFn,
    rng: np.random.Generator,
) -> Population:
    """DE/best/1 with binomial crossover and greedy (<=) selection.

    Target vectors are re-evaluated every generation instead of cached, so
    one generation costs 2N evaluations.
    """
    n, d = pop.positions.shape
    if n < 4:
        raise ValueError("DE requires a population of at least 4")
    old = pop.positions
    errors = np.asarray(fitness(old), dtype=float)
    pop.fes += n
    best = old[int(np.argmin(errors))]

    trials = np.empty_like(old)
    for i in range(n):
        r1, r2 = _distinct_indices(rng, n, i)
        mutant = best + config.f * (old[r1] - old[r2])
        cross = rng.random(d) <= config.cr
        cross[int(rng.integers(d))] = True
        trials[i] = np.where(cross, mutant, old[i])
    trials = space.clamp(trials)
    trial_errors = np.asarray(fitness(trials), dtype=float)
    pop.fes += n

    accept = trial_errors <= errors
    pop.positions = np.where(accept[:, None], trials, old)
    pop.errors = np.where(accept, trial_errors, errors)
    _update_elite(pop)
    return pop


def _distinct_indices(rng: np.random.Generator, n: int, exclude: int) -> tuple[int, int]:
    r1 = int(rng.integers(n - 1))
    if r1 >= exclude:
        r1 += 1
    r2 = int(rng.integers(n - 2))
    for taken in sorted((exclude, r1)):
        if r2 >= taken:
            r2 += 1
    return r1, r2


_STEPS = {
    Algorithm.PSO: pso_step,
    Algorithm.DFO: dfo_step,
    Algorithm.DE: de_step,
}


def fes_per_iteration(config: OptimizerConfig) -> int:
    return 2 * config.n if config.algorithm is Algorithm.DE else config.n


def run(
    space: SearchSpace,
    config: OptimizerConfig,
    fitness: FitnessFn,
    on_iteration: Callable[[int, Population], None] | None = None,
) -> TrialRecord:
    """Run one seeded trial to target error or evaluation budget.

    Iterations where the elite error strictly improved are logged, along with
    a per-iteration population-diversity trace (index 0 is the initial
    population). ``on_iteration`` is invoked after initialisation and after
    every step with (iteration, population); it may raise StopIteration to
    abort early.
    """
    rng = np.random.default_rng(config.rng_seed)
    step = _STEPS[config.algorithm]
    pop = init_population(space, config, fitness, rng)
    improvement_iters: list[int] = []
    diversity_trace = [population_diversity(pop.positions)]
    iteration = 0
    stopped = False
    try:
        if on_iteration is not None:
            on_iteration(0, pop)
    except StopIteration:
        stopped = True
    while not stopped and pop.elite_error > config.target_error and pop.fes < config.max_fes:
        previous = pop.elite_error
        iteration += 1
        step(pop, space, config, fitness, rng)
        if pop.elite_error < previous:
            improvement_iters.append(iteration)
        diversity_trace.append(population_diversity(pop.positions))
        try:
            if on_iteration is not None:
                on_iteration(iteration, pop)
        except StopIteration:
            break
    return TrialRecord(
        algorithm=config.algorithm,
        seed=config.rng_seed,
        best_recipe=pop.elite_position.copy(),
        best_error=pop.elite_error,
        fes_used=pop.fes,
        success=pop.elite_error <= config.target_error,
        iterations=iteration,
        improvement_iters=improvement_iters,
        diversity_trace=diversity_trace,
        final_population=pop.positions.copy(),
        final_errors=pop.errors.copy(),
    )
