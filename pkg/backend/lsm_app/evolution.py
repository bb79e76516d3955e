"""
Structure evolution of the liquid layer.

A chromosome is the binary connectivity matrix of one liquid. Fitness is the
separation property: the rank of the binary spike-state matrix the liquid
produces under the task's probe inputs. Mutation repairs silence by wiring an
inactive neuron to a nearby active one.

Generation loop:
    every individual spawns offspring, each gets one mutation and a score;
    the best offspring replaces its parent unless it is strictly worse;
    before g_th the bottom `rate` share is replaced by fresh random liquids,
    from g_th on the population is cut down to the n_opt best.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import seeding
from .exceptions import ParameterError
from .snn import SpikeStateMatrix, rate_code, run_window
from .topology import LiquidGrid, distance_mask, edge_weights, init_liquid, liquid_density

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Chromosome:
    bits: np.ndarray
    grid: LiquidGrid

    def __post_init__(self):
        n = self.grid.n_neurons
        if self.bits.shape != (n, n):
            raise ParameterError(f'chromosome must be {n}x{n}, got {self.bits.shape}')

    @classmethod
    def from_weights(cls, w, grid):
        return cls(bits=(np.asarray(w) > 0).astype(np.uint8), grid=grid)

    def to_weights(self, topology):
        """alpha * p(d) on every 1-bit."""
        return np.where(self.bits.astype(bool), edge_weights(self.grid, topology), 0.0)

    @property
    def edges(self):
        return int(np.count_nonzero(self.bits))

    @property
    def density(self):
        return liquid_density(self.bits)

    def with_edge(self, pre, post):
        bits = self.bits.copy()
        bits[pre, post] = 1
        return Chromosome(bits=bits, grid=self.grid)


@dataclass(frozen=True)
class EvolutionParams:
    n_ini: int = 100
    n_opt: int = 20
    offspring_per_individual: int = 10
    g_th: int = 20
    generations: int = 30
    rate: float = 0.2
    probe_window: int = 100

    def __post_init__(self):
        if self.n_opt < 1 or self.n_opt > self.n_ini:
            raise ParameterError(f'n_opt must lie in [1, n_ini={self.n_ini}], got {self.n_opt}')
        if not 0 <= self.rate < 1:
            raise ParameterError(f'rate must lie in [0, 1), got {self.rate}')
        if self.generations < self.g_th:
            raise ParameterError(f'generations ({self.generations}) must be >= g_th ({self.g_th})')
        if self.offspring_per_individual < 1:
            raise ParameterError('every individual needs at least one offspring')
        if self.probe_window < 1:
            raise ParameterError(f'probe_window must be >= 1, got {self.probe_window}')


@dataclass(frozen=True)
class Individual:
    """A scored chromosome and the per-neuron activity of its probe."""

    chromosome: Chromosome
    fitness: int
    activity: np.ndarray


@dataclass
class FitnessRecord:
    per_individual: list = field(default_factory=list)
    best: list = field(default_factory=list)
    mean: list = field(default_factory=list)
    min: list = field(default_factory=list)

    def log(self, fitnesses):
        values = [int(f) for f in fitnesses]
        self.per_individual.append(values)
        self.best.append(max(values))
        self.mean.append(float(np.mean(values)))
        self.min.append(min(values))

    @property
    def generations(self):
        return len(self.best)


# ===============================================================
# Separation property
# ===============================================================
def separation_property(s):
    """Exact rank over the rationals of a 0/1 matrix.

    Zero and duplicate rows/columns are dropped first (rank preserving),
    then a fraction-free elimination runs on Python integers.
    """
    bits = np.asarray(s.bits if isinstance(s, SpikeStateMatrix) else s)
    if bits.size == 0:
        return 0
    m = bits[bits.any(axis=1)]
    if m.size == 0:
        return 0
    m = m[:, m.any(axis=0)]
    m = np.unique(np.unique(m, axis=0), axis=1)
    if m.shape[0] > m.shape[1]:
        m = m.T
    return _bareiss_rank(m)


def _bareiss_rank(m):
    a = m.astype(object)
    rows, cols = a.shape
    rank = 0
    previous = 1
    for col in range(cols):
        if rank == rows:
            break
        candidates = np.flatnonzero(a[rank:, col] != 0)
        if candidates.size == 0:
            continue
        pivot_row = rank + int(candidates[0])
        if pivot_row != rank:
            a[[rank, pivot_row]] = a[[pivot_row, rank]]
        pivot = a[rank, col]
        below = a[rank + 1:, col:]
        factors = below[:, 0].copy()
        a[rank + 1:, col:] = (pivot * below - np.outer(factors, a[rank, col:])) // previous
        previous = pivot
        rank += 1
    return rank


# ===============================================================
# Probing and fitness
# ===============================================================
def build_probe(observation_currents, input_projection, probe_window):
    """Liquid current segments for the fitness ensemble.

    Each distinct observation is rate coded for probe_window // len(ensemble)
    ticks (at least one) and pushed through the input projection.
    """
    if not observation_currents:
        raise ParameterError('probe ensemble must hold at least one observation')
    ticks = max(1, probe_window // len(observation_currents))
    return [input_projection.T @ rate_code(currents, ticks) for currents in observation_currents]


def probe_liquid(weights, ensemble, lif):
    """Spike-state matrix of the liquid under every ensemble segment, each from rest."""
    return SpikeStateMatrix.hstack(
        run_window(weights, segment, lif, segment.shape[1]) for segment in ensemble
    )


def evaluate_fitness(chrom, ensemble, lif, topology):
    return separation_property(probe_liquid(chrom.to_weights(topology), ensemble, lif))


def assess(chrom, ensemble, lif, topology):
    state = probe_liquid(chrom.to_weights(topology), ensemble, lif)
    return Individual(chromosome=chrom, fitness=separation_property(state), activity=state.fired_any())


# ===============================================================
# Mutation
# ===============================================================
def mutation_candidates(chrom, activity, d_th):
    """Every (active pre, inactive post) pair within d_th that is not yet an edge."""
    active = np.asarray(activity, dtype=bool)
    eligible = (
        distance_mask(chrom.grid, d_th)
        & (chrom.bits == 0)
        & active[:, None]
        & ~active[None, :]
    )
    pre, post = np.nonzero(eligible)
    return np.stack([pre, post], axis=1)


def mutate(chrom, activity, rng, d_th, density_cap):
    """Connect a random inactive neuron to a random nearby active one.

    Returns (chromosome, mutated). The chromosome comes back unchanged when
    every neuron is active, no inactive neuron has an active neighbour, or
    one more edge would break the density cap.
    """
    n = chrom.grid.n_neurons
    if chrom.edges + 1 > density_cap * n * n:
        logger.debug('mutation skipped: density cap %.3f reached', density_cap)
        return chrom, False
    candidates = mutation_candidates(chrom, activity, d_th)
    if candidates.size == 0:
        return chrom, False
    posts = np.unique(candidates[:, 1])
    post = posts[rng.integers(posts.size)]
    pres = candidates[candidates[:, 1] == post, 0]
    pre = pres[rng.integers(pres.size)]
    return chrom.with_edge(int(pre), int(post)), True


# ===============================================================
# Evolution
# ===============================================================
def random_chromosome(grid, topology, rng):
    return Chromosome.from_weights(init_liquid(grid, topology, rng).w, grid)


def _fresh_individual(job):
    grid, topology, lif, ensemble, seed, keys = job
    chrom = random_chromosome(grid, topology, seeding.sub_rng(seed, *keys))
    return assess(chrom, ensemble, lif, topology)


def _spawn_offspring(job):
    parent, topology, lif, ensemble, seed, keys = job
    child, mutated = mutate(
        parent.chromosome, parent.activity, seeding.sub_rng(seed, *keys),
        d_th=topology.d_th, density_cap=topology.density_cap,
    )
    if not mutated:
        return parent
    return assess(child, ensemble, lif, topology)


def ranked(population):
    """Indices by fitness descending, ties by index ascending."""
    return sorted(range(len(population)), key=lambda i: (-population[i].fitness, i))


class _SerialMap:
    def map(self, fn, jobs):
        return map(fn, jobs)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def worker_pool(workers):
    """Process pool for workers > 1, an in-process stand-in otherwise."""
    return ProcessPoolExecutor(max_workers=workers) if workers > 1 else _SerialMap()


def evolve(params, ensemble, seed, grid, topology, lif, workers=1):
    """Evolve liquid connectivity; returns (n_opt best individuals, FitnessRecord)."""
    record = FitnessRecord()
    pool = worker_pool(workers)
    logger.info(
        'evolving %d liquids for %d generations (g_th=%d, rate=%.2f, seed=%d)',
        params.n_ini, params.generations, params.g_th, params.rate, seed,
    )
    with pool:
        population = list(pool.map(_fresh_individual, [
            (grid, topology, lif, ensemble, seed, (seeding.INITIAL, 0, i)) for i in range(params.n_ini)
        ]))
        record.log(ind.fitness for ind in population)

        for generation in range(1, params.generations + 1):
            k = params.offspring_per_individual
            jobs = [
                (parent, topology, lif, ensemble, seed, (seeding.OFFSPRING, generation, i, j))
                for i, parent in enumerate(population)
                for j in range(k)
            ]
            offspring = list(pool.map(_spawn_offspring, jobs))
            for i, parent in enumerate(population):
                brood = offspring[i * k:(i + 1) * k]
                best = max(range(k), key=lambda j: (brood[j].fitness, -j))
                if brood[best].fitness >= parent.fitness:
                    population[i] = brood[best]

            order = ranked(population)
            if generation < params.g_th:
                n_fresh = min(int(round(params.rate * len(population))), len(population) - 1)
                survivors = [population[i] for i in order[:len(population) - n_fresh]]
                fresh = list(pool.map(_fresh_individual, [
                    (grid, topology, lif, ensemble, seed, (seeding.FRESH, generation, j))
                    for j in range(n_fresh)
                ]))
                population = survivors + fresh
            else:
                population = [population[i] for i in order[:params.n_opt]]

            record.log(ind.fitness for ind in population)
            logger.info(
                'generation %d: best=%d mean=%.2f min=%d',
                generation, record.best[-1], record.mean[-1], record.min[-1],
            )

    best = [population[i] for i in ranked(population)[:params.n_opt]]
    return best, record
