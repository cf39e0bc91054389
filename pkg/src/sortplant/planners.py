"""Offline optimizers over binary action sequences.

Both planners score candidates with the frozen-seed rollout: the same seed
realizes the same inputs no matter which actions are applied, so the episode
reward is a pure function of the bit sequence.  That gives an upper bound on
controller performance, not a controller.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .config import EnvConfig
from .env import ContractViolation, InputTape, advance, reset, step
from .rng import derive_seed
from .trajio import Transition

BRUTE_FORCE_CAP = 20


@dataclass(frozen=True)
class GaParams:
    population: int = 100
    generations: int = 25
    crossover_rate: float = 0.7
    mutation_rate: float = 0.1
    tournament_size: int = 2
    ga_seed: int = 0

    def __post_init__(self) -> None:
        if self.population < 2:
            raise ContractViolation("population must be >= 2")
        if self.generations < 0:
            raise ContractViolation("generations must be >= 0")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ContractViolation("crossover_rate must lie in [0, 1]")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ContractViolation("mutation_rate must lie in [0, 1]")
        if self.tournament_size != 2:
            raise ContractViolation("tournament_size is fixed at 2")


class GenStats(NamedTuple):
    max_reward: float
    mean_reward: float
    min_reward: float


@dataclass
class GaResult:
    best_sequence: tuple[int, ...]
    best_reward: float
    initial_stats: GenStats
    per_generation: list[GenStats]
    evaluations: int


@dataclass
class BruteForceResult:
    best_sequence: tuple[int, ...]
    best_reward: float
    evaluations: int


def episode_reward(config: EnvConfig, seed: int, actions: Sequence[int], tape: Optional[InputTape] = None) -> float:
    """Cumulative reward of an action sequence, skipping observation builds."""
    state, _ = reset(config, seed, tape)
    total = 0.0
    for action in actions:
        total += advance(state, action)[0]
    return total


def rollout(
    config: EnvConfig, seed: int, actions: Sequence[int], tape: Optional[InputTape] = None
) -> tuple[float, list[Transition]]:
    """Apply an action sequence from a fresh reset and materialize transitions."""
    state, obs = reset(config, seed, tape)
    transitions: list[Transition] = []
    total = 0.0
    for action in actions:
        result = step(state, action)
        transitions.append(Transition(obs, action, result.reward, result.observation, result.truncated))
        total += result.reward
        obs = result.observation
    return total, transitions


# ---------------------------------------------------------------------------
# genetic operators
# ---------------------------------------------------------------------------


def crossover(parent_a: Sequence[int], parent_b: Sequence[int], cut: int) -> tuple[list[int], list[int]]:
    """Single-point recombination: prefixes swapped at the cut."""
    n = len(parent_a)
    if len(parent_b) != n:
        raise ContractViolation("parents must have equal length")
    if not 1 <= cut <= n - 1:
        raise ContractViolation(f"cut must lie in [1, {n - 1}], got {cut}")
    child_a = list(parent_a[:cut]) + list(parent_b[cut:])
    child_b = list(parent_b[:cut]) + list(parent_a[cut:])
    return child_a, child_b


def mutate(seq: Sequence[int], rate: float, rng: random.Random) -> list[int]:
    """Flip each bit independently with the given probability.

    Always consumes exactly len(seq) draws, so the stream position never
    depends on outcomes.
    """
    if not 0.0 <= rate <= 1.0:
        raise ContractViolation("mutation rate must lie in [0, 1]")
    return [bit ^ 1 if rng.random() < rate else bit for bit in seq]


def tournament_select(population: Sequence[Sequence[int]], fitnesses: Sequence[float], rng: random.Random) -> int:
    """Size-2 tournament with replacement; the fitter wins, ties keep the
    first drawn."""
    if not population:
        raise ContractViolation("population must be nonempty")
    i = rng.randrange(len(population))
    j = rng.randrange(len(population))
    return i if fitnesses[i] >= fitnesses[j] else j


# ---------------------------------------------------------------------------
# fitness evaluation (serial or worker pool; bit-identical either way)
# ---------------------------------------------------------------------------


def _eval_chunk(args: tuple[EnvConfig, int, list[tuple[int, ...]]]) -> list[float]:
    config, seed, chunk = args
    tape = InputTape(config, seed)
    return [episode_reward(config, seed, bits, tape) for bits in chunk]


class _FitnessOracle:
    """Memoized frozen-seed fitness with optional process-pool evaluation.

    Candidates are deduplicated in first-appearance order; results are merged
    back by position, so worker count never changes any number.
    """

    def __init__(self, config: EnvConfig, seed: int, workers: int = 1) -> None:
        self.config = config
        self.seed = seed
        self.workers = max(1, workers)
        self.tape = InputTape(config, seed)
        self.cache: dict[tuple[int, ...], float] = {}
        self.evaluations = 0

    def fitnesses(self, population: Sequence[Sequence[int]], pool: Optional[ProcessPoolExecutor] = None) -> list[float]:
        todo: list[tuple[int, ...]] = []
        seen = set()
        for bits in population:
            key = tuple(bits)
            if key not in self.cache and key not in seen:
                seen.add(key)
                todo.append(key)
        if todo:
            self.evaluations += len(todo)
            if pool is not None and self.workers > 1 and len(todo) > 1:
                chunks = _split_chunks(todo, self.workers * 4)
                results = pool.map(_eval_chunk, [(self.config, self.seed, chunk) for chunk in chunks])
                for chunk, values in zip(chunks, results):
                    for key, value in zip(chunk, values):
                        self.cache[key] = value
            else:
                for key in todo:
                    self.cache[key] = episode_reward(self.config, self.seed, key, self.tape)
        return [self.cache[tuple(bits)] for bits in population]


def _split_chunks(items: list, n_chunks: int) -> list[list]:
    n_chunks = max(1, min(n_chunks, len(items)))
    size, extra = divmod(len(items), n_chunks)
    chunks = []
    start = 0
    for i in range(n_chunks):
        end = start + size + (1 if i < extra else 0)
        chunks.append(items[start:end])
        start = end
    return chunks


# ---------------------------------------------------------------------------
# planners
# ---------------------------------------------------------------------------


def brute_force(config: EnvConfig, seed: int, n: int, workers: int = 1) -> BruteForceResult:
    """Exhaustively score all 2**n sequences; ties pick the lexicographically
    smallest (0 before 1)."""
    if n < 1:
        raise ContractViolation("horizon must be >= 1")
    if n > BRUTE_FORCE_CAP:
        raise ContractViolation(f"brute force refuses n > {BRUTE_FORCE_CAP} (2**{n} rollouts); use the GA instead")
    total = 1 << n
    if workers > 1 and total >= 256:
        bounds = _split_chunks(list(range(total)), workers * 4)
        spans = [(config, seed, n, span[0], span[-1] + 1) for span in bounds if span]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_brute_span, spans))
        best_code, best_reward = partials[0]
        for code, reward in partials[1:]:
            if reward > best_reward:
                best_code, best_reward = code, reward
    else:
        best_code, best_reward = _brute_span((config, seed, n, 0, total))
    return BruteForceResult(_code_to_bits(best_code, n), best_reward, total)


def _brute_span(args: tuple[EnvConfig, int, int, int, int]) -> tuple[int, float]:
    config, seed, n, start, stop = args
    tape = InputTape(config, seed)
    best_code = start
    best_reward = episode_reward(config, seed, _code_to_bits(start, n), tape)
    for code in range(start + 1, stop):
        reward = episode_reward(config, seed, _code_to_bits(code, n), tape)
        if reward > best_reward:
            best_reward = reward
            best_code = code
    return best_code, best_reward


def _code_to_bits(code: int, n: int) -> tuple[int, ...]:
    # MSB first, so increasing codes enumerate sequences in lexicographic order
    return tuple((code >> (n - 1 - i)) & 1 for i in range(n))


def ga_optimize(config: EnvConfig, seed: int, n: int, params: GaParams, workers: int = 1) -> GaResult:
    """Evolve binary action sequences against the frozen-seed fitness.

    Tournament selection (size 2), single-point crossover, independent
    per-bit mutation.  The breeding population carries no elite; the best
    candidate ever evaluated is archived separately and returned.  All
    stochastic choices come from one sequential stream seeded by ga_seed and
    are drawn before fitness dispatch, so results are independent of worker
    count.
    """
    if n < 1:
        raise ContractViolation("horizon must be >= 1")
    rng = random.Random(params.ga_seed)
    oracle = _FitnessOracle(config, seed, workers)
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        population = [[rng.randrange(2) for _ in range(n)] for _ in range(params.population)]
        fitnesses = oracle.fitnesses(population, pool)
        best_idx = max(range(len(fitnesses)), key=lambda i: fitnesses[i])
        best_bits = tuple(population[best_idx])
        best_reward = fitnesses[best_idx]
        initial_stats = _gen_stats(fitnesses)

        per_generation: list[GenStats] = []
        for _ in range(params.generations):
            children: list[list[int]] = []
            while len(children) < params.population:
                pa = population[tournament_select(population, fitnesses, rng)]
                pb = population[tournament_select(population, fitnesses, rng)]
                if n >= 2 and rng.random() < params.crossover_rate:
                    cut = rng.randint(1, n - 1)
                    ca, cb = crossover(pa, pb, cut)
                else:
                    ca, cb = list(pa), list(pb)
                children.append(mutate(ca, params.mutation_rate, rng))
                children.append(mutate(cb, params.mutation_rate, rng))
            population = children[: params.population]
            fitnesses = oracle.fitnesses(population, pool)
            per_generation.append(_gen_stats(fitnesses))
            gen_best = max(range(len(fitnesses)), key=lambda i: fitnesses[i])
            if fitnesses[gen_best] > best_reward:
                best_reward = fitnesses[gen_best]
                best_bits = tuple(population[gen_best])
    finally:
        if pool is not None:
            pool.shutdown()
    return GaResult(best_bits, best_reward, initial_stats, per_generation, oracle.evaluations)


def _gen_stats(fitnesses: Sequence[float]) -> GenStats:
    return GenStats(max(fitnesses), sum(fitnesses) / len(fitnesses), min(fitnesses))


def ga_seed_for_env(base_ga_seed: int, env_seed: int) -> int:
    """Per-environment GA stream so re-runs across seeds are decorrelated."""
    return derive_seed(base_ga_seed, env_seed)
