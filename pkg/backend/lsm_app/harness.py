"""
Experiment orchestration: wire liquids to tasks, run agents, score populations.

A run lasts `horizon` decision steps; episodes are concatenated, so a run
always logs exactly `horizon` rows. The population reward of a cell is

    R = sum over individuals and steps of DA / number of individuals
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np
from scipy.ndimage import gaussian_filter1d

from . import seeding
from .environments import TASKS, encode_observation, make_task, q_learning_baseline
from .evolution import build_probe, evolve, probe_liquid, worker_pool
from .exceptions import ConfigurationError, EmptyPopulationError, ParameterError
from .network import LiquidNetwork
from .plasticity import DA_BCM, LEARNING_RULES, NONE, STDP
from .snn import rate_code
from .topology import init_input_projection, init_liquid, init_readout

logger = logging.getLogger(__name__)

EVOLVED = 'evolved'
UNEVOLVED = 'unevolved'
STRUCTURES = (EVOLVED, UNEVOLVED)
READOUT_RULES = (STDP, DA_BCM)

# (structure, liquid rule, readout rule), weakest expected first
ABLATION_ROWS = (
    (EVOLVED, STDP, STDP),
    (UNEVOLVED, DA_BCM, DA_BCM),
    (EVOLVED, NONE, DA_BCM),
    (EVOLVED, STDP, DA_BCM),
    (EVOLVED, DA_BCM, DA_BCM),
)


@dataclass(frozen=True)
class ExperimentConfig:
    task: str
    structure: str = EVOLVED
    liquid_rule: str = DA_BCM
    readout_rule: str = DA_BCM
    horizon: int = 500
    n_opt: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigurationError(f'unknown task {self.task!r}; expected one of {", ".join(TASKS)}')
        if self.structure not in STRUCTURES:
            raise ConfigurationError(f'unknown structure {self.structure!r}; expected evolved or unevolved')
        if self.liquid_rule not in LEARNING_RULES:
            raise ConfigurationError(f'unknown liquid rule {self.liquid_rule!r}')
        if self.readout_rule not in READOUT_RULES:
            raise ConfigurationError(f'readout rule must be stdp or da-bcm, got {self.readout_rule!r}')
        if self.horizon < 1:
            raise ParameterError(f'horizon must be >= 1, got {self.horizon}')
        if self.n_opt < 1:
            raise ParameterError(f'n_opt must be >= 1, got {self.n_opt}')

    @property
    def label(self):
        return f'{self.structure} {self.liquid_rule}/{self.readout_rule}'


class StepLog(NamedTuple):
    step: int
    episode: int
    observation: str
    action: int
    da: float
    cumulative: float
    episode_end: str


@dataclass
class RunRecord:
    individual: int
    rewards: np.ndarray
    rows: list = field(default_factory=list)
    reversals: list = field(default_factory=list)
    parameters: int = 0
    network: LiquidNetwork = field(default=None, repr=False)

    @property
    def cumulative(self):
        return math.fsum(self.rewards)

    def recomputed_reward(self):
        """Cumulative reward rebuilt from the step log alone."""
        return math.fsum(row.da for row in self.rows)

    def episode_outcomes(self):
        """{episode: end reason} for every episode that ended inside the run."""
        return {row.episode: row.episode_end for row in self.rows if row.episode_end}


# ===============================================================
# Wiring
# ===============================================================
def wire_inputs(task, params, seed):
    """Input projection shared by evolution and every agent of a seed."""
    return init_input_projection(
        task.n_inputs, params.grid.n_neurons, params.topology.input_fan_out, params.topology.beta,
        seeding.sub_rng(seed, seeding.WIRING),
    )


def probe_ensemble(task, input_projection, params):
    return build_probe(task.observation_ensemble(), input_projection, params.evolution.probe_window)


def evolve_liquids(task, params, seed, workers=1):
    """Evolve liquids for `task`; returns (survivors, FitnessRecord, input projection)."""
    projection = wire_inputs(task, params, seed)
    survivors, record = evolve(
        params.evolution, probe_ensemble(task, projection, params), seed,
        params.grid, params.topology, params.lif, workers=workers,
    )
    logger.info('%s seed %d: evolved %d survivors, best SP %d', task.name, seed, len(survivors), record.best[-1])
    return survivors, record, projection


def count_parameters(network):
    """Plastic parameters: nonzero liquid and readout weights plus input edges."""
    return int(
        np.count_nonzero(network.liquid)
        + np.count_nonzero(network.readout)
        + np.count_nonzero(network.input_projection)
    )


# ===============================================================
# Agent
# ===============================================================
def lsm_policy(counts, rng):
    """Action with the most readout spikes; ties drawn uniformly."""
    counts = np.asarray(counts)
    best = np.flatnonzero(counts == counts.max())
    if best.size == 1:
        return int(best[0])
    return int(best[rng.integers(best.size)])


def build_network(config, params, task, chromosome=None, input_projection=None, individual=0):
    if config.structure == EVOLVED and chromosome is None:
        raise ConfigurationError('an evolved run needs a chromosome')
    if config.structure == UNEVOLVED and chromosome is not None:
        raise ConfigurationError('an unevolved run draws its own liquid; drop the chromosome')
    if input_projection is None:
        input_projection = wire_inputs(task, params, config.seed)

    if chromosome is not None:
        liquid = chromosome.to_weights(params.topology)
    else:
        liquid = init_liquid(
            params.grid, params.topology, seeding.sub_rng(config.seed, seeding.UNEVOLVED, individual),
        ).w
    probe = probe_liquid(liquid, probe_ensemble(task, input_projection, params), params.lif)
    readout = init_readout(
        probe, task.n_actions, params.topology.beta,
        seeding.sub_rng(config.seed, seeding.AGENT, individual),
    )
    return LiquidNetwork(
        liquid=liquid, readout=readout.w, input_projection=input_projection,
        lif=params.lif, plasticity=params.plasticity,
    )


def run_agent(config, params, chromosome=None, input_projection=None, individual=0):
    """Run one LSM agent for config.horizon steps and log every step."""
    task = make_task(config.task, params.tmaze, params.flappy)
    network = build_network(config, params, task, chromosome, input_projection, individual)
    parameters = count_parameters(network)
    env_rng = seeding.sub_rng(config.seed, seeding.ENVIRONMENT, individual)
    policy_rng = seeding.sub_rng(config.seed, seeding.POLICY, individual)

    rewards = np.zeros(config.horizon, dtype=np.float64)
    rows, reversals = [], []
    cumulative = 0.0
    world = task.reset(env_rng)
    for step in range(config.horizon):
        observation = task.observe(world)
        spikes = rate_code(encode_observation(observation), params.lif.ticks_per_step)
        action = lsm_policy(network.step(spikes), policy_rng)
        result = task.step(world, action)
        da = result.reward.da
        network.learn(da, config.liquid_rule, config.readout_rule)

        rewards[step] = da
        cumulative += da
        rows.append(StepLog(
            step=step, episode=world.episode, observation=str(observation), action=action,
            da=da, cumulative=cumulative, episode_end=result.reason if result.done else '',
        ))
        world = result.world
        if result.done:
            ended = world.episode
            world, reversed_ = task.end_episode(world, env_rng)
            logger.debug('individual %d: episode %d ended (%s)', individual, ended, result.reason)
            if reversed_:
                reversals.append(ended)

    return RunRecord(
        individual=individual, rewards=rewards, rows=rows, reversals=reversals,
        parameters=parameters, network=network,
    )


def _agent_job(job):
    config, params, chromosome, projection, individual = job
    return run_agent(config, params, chromosome, projection, individual)


def run_population(config, params, chromosomes=None, input_projection=None, workers=1):
    """n_opt agents of one cell: the first n_opt survivors, or fresh random liquids."""
    if config.structure == EVOLVED:
        if not chromosomes:
            raise ConfigurationError('an evolved cell needs survivor chromosomes')
        if len(chromosomes) < config.n_opt:
            raise ConfigurationError(f'{len(chromosomes)} survivors for n_opt={config.n_opt}')
        chromosomes = list(chromosomes)[:config.n_opt]
    else:
        chromosomes = [None] * config.n_opt
    jobs = [(config, params, chrom, input_projection, i) for i, chrom in enumerate(chromosomes)]
    with worker_pool(workers) as pool:
        return list(pool.map(_agent_job, jobs))


def population_reward(records):
    if not records:
        raise EmptyPopulationError('population reward needs at least one run')
    return math.fsum(math.fsum(r.rewards) for r in records) / len(records)


def reward_timeseries(records, sigma):
    """Per-step population cumulative reward, raw and Gaussian smoothed."""
    if not records:
        raise EmptyPopulationError('reward series needs at least one run')
    lengths = {len(r.rewards) for r in records}
    if len(lengths) != 1:
        raise ConfigurationError(f'runs differ in length: {sorted(lengths)}')
    raw = np.cumsum(np.stack([r.rewards for r in records]), axis=1).mean(axis=0)
    smoothed = gaussian_filter1d(raw, sigma) if sigma > 0 else raw.copy()
    return raw, smoothed


def reversal_report(record, window=20):
    """(reversal episode, poison visits in the next `window` episodes, episodes seen) per reversal."""
    outcomes = record.episode_outcomes()
    report = []
    for episode in record.reversals:
        following = [outcomes[e] for e in range(episode + 1, episode + 1 + window) if e in outcomes]
        report.append((episode, following.count('poison'), len(following)))
    return report


# ===============================================================
# Ablation and baseline
# ===============================================================
@dataclass(frozen=True)
class AblationRun:
    cell: ExperimentConfig
    seed: int
    reward: float


@dataclass(frozen=True)
class CellSummary:
    cell: ExperimentConfig
    mean: float
    std: float
    runs: int


def default_cells(task, horizon, n_opt):
    return [
        ExperimentConfig(
            task=task, structure=structure, liquid_rule=liquid, readout_rule=readout,
            horizon=horizon, n_opt=n_opt,
        )
        for structure, liquid, readout in ABLATION_ROWS
    ]


def summarise(runs, cells):
    summary = []
    for cell in cells:
        values = np.array([run.reward for run in runs if run.cell == cell], dtype=np.float64)
        summary.append(CellSummary(cell=cell, mean=float(values.mean()), std=float(values.std()), runs=len(values)))
    return summary


def run_ablation(cells, seeds, params, survivors=None, workers=1):
    """R for every (cell, seed); returns (runs, per-cell summary).

    `survivors` maps a task name to (chromosomes, input projection) loaded
    from disk; without it evolved cells evolve once per (task, seed).
    """
    cells, seeds = list(cells), [int(s) for s in seeds]
    if not cells:
        raise ConfigurationError('ablation needs at least one cell')
    if not seeds:
        raise ConfigurationError('ablation needs at least one seed')

    evolved = {}
    runs = []
    for seed in seeds:
        for cell in cells:
            seeded = replace(cell, seed=seed)
            chromosomes, projection = None, None
            if cell.structure == EVOLVED:
                if survivors and cell.task in survivors:
                    chromosomes, projection = survivors[cell.task]
                else:
                    if (cell.task, seed) not in evolved:
                        task = make_task(cell.task, params.tmaze, params.flappy)
                        best, _, projection = evolve_liquids(task, params, seed, workers)
                        evolved[cell.task, seed] = ([ind.chromosome for ind in best], projection)
                    chromosomes, projection = evolved[cell.task, seed]
            records = run_population(seeded, params, chromosomes, projection, workers)
            reward = population_reward(records)
            logger.info('%s %s seed %d: R=%.4f', cell.task, cell.label, seed, reward)
            runs.append(AblationRun(cell=cell, seed=seed, reward=reward))
    return runs, summarise(runs, cells)


def run_baseline(task_name, params, seeds, n_runs, horizon):
    """Tabular Q-learning: per seed, the list of n_runs reward records."""
    task = make_task(task_name, params.tmaze, params.flappy)
    results = {}
    for seed in seeds:
        results[int(seed)] = [
            RunRecord(
                individual=i,
                rewards=q_learning_baseline(
                    task, horizon, params.qlearning, seeding.sub_rng(seed, seeding.QLEARNING, i),
                ),
                parameters=task.n_states * task.n_actions,
            )
            for i in range(n_runs)
        ]
        logger.info('%s Q-learning seed %d: R=%.4f', task_name, seed, population_reward(results[int(seed)]))
    return results
