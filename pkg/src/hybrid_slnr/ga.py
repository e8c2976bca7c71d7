"""Binary genetic algorithm over finite-resolution analog precoders.

Genome layout: the ``N_T x N_RF`` phase-index matrix in row-major order,
``B`` bits per entry, most significant bit first. The GA reaches the channel
only through an evaluation callback that scores an :class:`AnalogPrecoder`;
it never holds channel matrices itself.

The operators below work on stacks of genomes (``uint8`` arrays of shape
``(n, L)``) so a whole generation is bred with a handful of numpy calls; the
:class:`Chromosome`-level functions are thin wrappers around the same
kernels.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Protocol, runtime_checkable

import numpy as np

from .errors import ContractError, SearchSpaceTooLargeError
from .precoding import AnalogPrecoder

log = logging.getLogger(__name__)

EXHAUSTIVE_MAX_BITS = 24


@runtime_checkable
class BatchEvaluator(Protocol):
    """Optional fast path: score a stack of phase-index matrices at once."""

    def evaluate_batch(self, phase_indices: np.ndarray) -> np.ndarray: ...


Evaluator = Callable[[AnalogPrecoder], float]


@dataclass
class Chromosome:
    bits: np.ndarray
    cached_fitness: float | None = None

    def __post_init__(self):
        self.bits = _as_bits(self.bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))

    @classmethod
    def from_string(cls, s: str) -> Chromosome:
        return cls(np.array([int(ch) for ch in s], dtype=np.uint8))


def _as_bits(bits) -> np.ndarray:
    if isinstance(bits, str):
        bits = [int(ch) for ch in bits]
    arr = np.asarray(bits)
    if arr.ndim != 1 or not np.all((arr == 0) | (arr == 1)):
        raise ContractError("chromosome bits must be a 1-D array of 0/1")
    return arr.astype(np.uint8)


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 50
    max_generations: int = 200
    crossover_prob: float = 0.7
    mutation_prob: float = 0.001
    elitism_count: int = 1
    resolution_bits: int = 1
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ContractError(f"crossover_prob must be in [0, 1], got {self.crossover_prob}")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ContractError(f"mutation_prob must be in [0, 1], got {self.mutation_prob}")
        if self.population_size < 2 or self.population_size % 2:
            raise ContractError(f"population_size must be even and >= 2, got {self.population_size}")
        if not 0 <= self.elitism_count < self.population_size:
            raise ContractError("elitism_count must be in [0, population_size)")
        if self.max_generations < 0:
            raise ContractError("max_generations must be nonnegative")
        if self.resolution_bits < 1:
            raise ContractError("resolution_bits must be >= 1")


@dataclass
class Population:
    genomes: np.ndarray
    # NaN marks an unevaluated member
    fitness: np.ndarray
    generation: int = 0

    def __len__(self) -> int:
        return self.genomes.shape[0]

    @property
    def members(self) -> list[Chromosome]:
        return [
            Chromosome(g.copy(), None if np.isnan(f) else float(f))
            for g, f in zip(self.genomes, self.fitness)
        ]

    @property
    def evaluated(self) -> bool:
        return not np.any(np.isnan(self.fitness))


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_bits: str


@dataclass
class GaTrace:
    records: list[GenerationRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def best(self) -> np.ndarray:
        return np.array([r.best_fitness for r in self.records])

    @property
    def mean(self) -> np.ndarray:
        return np.array([r.mean_fitness for r in self.records])


@dataclass(frozen=True)
class GaResult:
    best: AnalogPrecoder
    best_fitness: float
    trace: GaTrace
    n_evaluations: int


class EvolutionError(RuntimeError):
    """The evaluation callback failed; ``trace`` holds the generations completed so far."""

    def __init__(self, message: str, trace: GaTrace):
        super().__init__(message)
        self.trace = trace


# -- encoding ---------------------------------------------------------------


def genome_length(n_tx: int, n_rf: int, bits: int) -> int:
    return n_tx * n_rf * bits


def decode_indices(genomes: np.ndarray, n_tx: int, n_rf: int, bits: int) -> np.ndarray:
    """Genome stack ``(P, L)`` to phase-index stack ``(P, n_tx, n_rf)``."""
    genomes = np.atleast_2d(genomes)
    if genomes.shape[1] != genome_length(n_tx, n_rf, bits):
        raise ContractError(
            f"genome has {genomes.shape[1]} bits, expected {n_tx}*{n_rf}*{bits}"
        )
    weights = 1 << np.arange(bits - 1, -1, -1)
    groups = genomes.reshape(genomes.shape[0], n_tx * n_rf, bits).astype(np.int64)
    return (groups @ weights).reshape(-1, n_tx, n_rf)


def decode(c: Chromosome, n_tx: int, n_rf: int, bits: int) -> AnalogPrecoder:
    return AnalogPrecoder(decode_indices(c.bits[None], n_tx, n_rf, bits)[0], bits)


def encode(analog: AnalogPrecoder) -> Chromosome:
    b = analog.resolution_bits
    shifts = np.arange(b - 1, -1, -1)
    bits = (analog.phase_indices.reshape(-1, 1) >> shifts) & 1
    return Chromosome(bits.reshape(-1).astype(np.uint8))


# -- operators ----------------------------------------------------------------


def init_population(config: GaConfig, genome_length: int, rng: np.random.Generator) -> Population:
    if genome_length < 1:
        raise ContractError("genome length must be positive")
    genomes = rng.integers(0, 2, size=(config.population_size, genome_length), dtype=np.uint8)
    return Population(genomes, np.full(config.population_size, np.nan), 0)


def roulette_indices(fitness: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` member indices with probability proportional to fitness, with replacement.

    An all-zero fitness vector falls back to uniform selection.
    """
    f = np.asarray(fitness, dtype=float)
    if np.any(f < 0) or np.any(np.isnan(f)):
        raise ContractError("roulette selection needs evaluated, nonnegative fitness")
    total = f.sum()
    if total <= 0:
        return rng.integers(0, f.size, size=n)
    cdf = np.cumsum(f) / total
    idx = np.searchsorted(cdf, rng.random(n), side="right")
    return np.minimum(idx, f.size - 1)


def roulette_select(pop: Population, rng: np.random.Generator) -> tuple[Chromosome, Chromosome]:
    i, j = roulette_indices(pop.fitness, 2, rng)
    members = pop.members
    return members[i], members[j]


def crossover_rows(
    a: np.ndarray, b: np.ndarray, p_c: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Single-point crossover applied pairwise to rows of ``a`` and ``b``."""
    n, length = a.shape
    do = rng.random(n) < p_c
    if length < 2:
        return a.copy(), b.copy()
    cut = rng.integers(1, length, size=n)
    swap = (np.arange(length)[None, :] >= cut[:, None]) & do[:, None]
    return np.where(swap, b, a), np.where(swap, a, b)


def crossover(
    parent_a: Chromosome, parent_b: Chromosome, p_c: float, rng: np.random.Generator
) -> tuple[Chromosome, Chromosome]:
    if parent_a.bits.shape != parent_b.bits.shape:
        raise ContractError("parents must have equal genome length")
    ca, cb = crossover_rows(parent_a.bits[None], parent_b.bits[None], p_c, rng)
    return Chromosome(ca[0]), Chromosome(cb[0])


def mutate_rows(genomes: np.ndarray, p_m: float, rng: np.random.Generator) -> np.ndarray:
    flips = rng.random(genomes.shape) < p_m
    return genomes ^ flips.astype(np.uint8)


def mutate(c: Chromosome, p_m: float, rng: np.random.Generator) -> Chromosome:
    out = mutate_rows(c.bits[None], p_m, rng)[0]
    if np.array_equal(out, c.bits):
        return Chromosome(out, c.cached_fitness)
    return Chromosome(out)


def breed(pop: Population, config: GaConfig, rng: np.random.Generator) -> Population:
    """One generation of selection, crossover, mutation and elitist replacement."""
    if not pop.evaluated:
        raise ContractError("population must be evaluated before breeding")
    n_p = len(pop)
    parents = roulette_indices(pop.fitness, n_p, rng)
    ca, cb = crossover_rows(pop.genomes[parents[0::2]], pop.genomes[parents[1::2]], config.crossover_prob, rng)
    children = np.empty_like(pop.genomes)
    children[0::2], children[1::2] = ca, cb
    children = mutate_rows(children, config.mutation_prob, rng)

    e = config.elitism_count
    elite = np.argsort(-pop.fitness, kind="stable")[:e]
    genomes = np.concatenate([pop.genomes[elite], children[: n_p - e]])
    fitness = np.concatenate([pop.fitness[elite], np.full(n_p - e, np.nan)])
    return Population(genomes, fitness, pop.generation + 1)


# -- driver --------------------------------------------------------------------


class _CachedEvaluator:
    """Scores genomes once per run, memoized on the genome bytes."""

    def __init__(self, evaluate, n_tx: int, n_rf: int, bits: int):
        self.evaluate = evaluate
        self.dims = (n_tx, n_rf, bits)
        self.cache: dict[bytes, float] = {}

    def __call__(self, genomes: np.ndarray) -> np.ndarray:
        keys = [g.tobytes() for g in genomes]
        todo = {}
        for k, g in zip(keys, genomes):
            if k not in self.cache and k not in todo:
                todo[k] = g
        if todo:
            idx = decode_indices(np.array(list(todo.values())), *self.dims)
            if isinstance(self.evaluate, BatchEvaluator):
                scores = np.asarray(self.evaluate.evaluate_batch(idx), dtype=float)
            else:
                bits = self.dims[2]
                scores = np.array([float(self.evaluate(AnalogPrecoder(i, bits))) for i in idx])
            if scores.shape != (len(todo),) or np.any(~np.isfinite(scores)) or np.any(scores < 0):
                raise ContractError("evaluation callback must return finite, nonnegative fitness")
            self.cache.update(zip(todo, scores))
        return np.array([self.cache[k] for k in keys])


def _evaluate_population(pop: Population, score: _CachedEvaluator) -> None:
    pending = np.isnan(pop.fitness)
    if np.any(pending):
        pop.fitness[pending] = score(pop.genomes[pending])


def evolve(
    evaluate: Evaluator,
    config: GaConfig,
    dims: tuple[int, ...],
    rng: np.random.Generator,
) -> GaResult:
    """Run the generational GA and return the best analog precoder ever seen.

    ``dims`` is ``(N_T, N_RF)`` or ``(N_T, N_RF, K)``; ``K`` is not needed by
    the search itself. The initial population and each of the
    ``config.max_generations`` bred populations are evaluated and recorded,
    so the trace has ``max_generations + 1`` rows.
    """
    n_tx, n_rf = dims[0], dims[1]
    bits = config.resolution_bits
    score = _CachedEvaluator(evaluate, n_tx, n_rf, bits)
    trace = GaTrace()
    pop = init_population(config, genome_length(n_tx, n_rf, bits), rng)
    best_bits, best_fit = None, -np.inf

    while True:
        try:
            _evaluate_population(pop, score)
        except Exception as exc:
            raise EvolutionError(f"fitness evaluation failed at generation {pop.generation}: {exc}", trace) from exc
        i = int(np.argmax(pop.fitness))
        if pop.fitness[i] > best_fit:
            best_fit, best_bits = float(pop.fitness[i]), pop.genomes[i].copy()
        trace.records.append(
            GenerationRecord(
                pop.generation,
                float(pop.fitness[i]),
                float(pop.fitness.mean()),
                "".join(map(str, pop.genomes[i])),
            )
        )
        if pop.generation >= config.max_generations:
            break
        pop = breed(pop, config, rng)

    log.debug("GA done: best %.6g after %d evaluations", best_fit, len(score.cache))
    best = AnalogPrecoder(decode_indices(best_bits[None], n_tx, n_rf, bits)[0], bits)
    return GaResult(best, best_fit, trace, len(score.cache))


def exhaustive_oracle(
    evaluate: Evaluator, dims: tuple[int, ...], bits: int, chunk: int = 4096
) -> tuple[AnalogPrecoder, float]:
    """Brute-force maximum over every ``bits``-bit analog precoder.

    Ties go to the genome with the smallest binary value.
    """
    n_tx, n_rf = dims[0], dims[1]
    length = genome_length(n_tx, n_rf, bits)
    if length > EXHAUSTIVE_MAX_BITS:
        raise SearchSpaceTooLargeError(
            f"exhaustive search over 2^{length} precoders exceeds the cap of 2^{EXHAUSTIVE_MAX_BITS}"
        )
    shifts = np.arange(length - 1, -1, -1)
    best_val, best_fit = 0, -np.inf
    for start in range(0, 2**length, chunk):
        values = np.arange(start, min(start + chunk, 2**length))
        genomes = ((values[:, None] >> shifts) & 1).astype(np.uint8)
        idx = decode_indices(genomes, n_tx, n_rf, bits)
        if isinstance(evaluate, BatchEvaluator):
            scores = np.asarray(evaluate.evaluate_batch(idx), dtype=float)
        else:
            scores = np.array([float(evaluate(AnalogPrecoder(i, bits))) for i in idx])
        j = int(np.argmax(scores))
        if scores[j] > best_fit:
            best_fit, best_val = float(scores[j]), int(values[j])
    genome = ((best_val >> shifts) & 1).astype(np.uint8)
    return AnalogPrecoder(decode_indices(genome[None], n_tx, n_rf, bits)[0], bits), best_fit
