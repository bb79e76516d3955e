from pathlib import Path

import numpy as np

from lsm_app.artifacts import write_baseline, write_reward_timeseries
from lsm_app.harness import population_reward, reward_timeseries, run_baseline

from ._base import EngineCommand


class Command(EngineCommand):
    help = 'Tabular Q-learning baseline under the same reward metric.'
    overrides = {**EngineCommand.overrides, 'seeds': 'SEEDS', 'nopt': 'N_OPT'}

    def add_engine_arguments(self, parser):
        parser.add_argument('--seeds', type=int)
        parser.add_argument('--nopt', type=int, help='runs per seed')
        parser.add_argument('--horizon', type=int)

    def run(self, params, **options):
        task = options['task']
        seeds = range(options['seed'], options['seed'] + params.harness.seeds)
        results = run_baseline(
            task, params, seeds, params.evolution.n_opt, options['horizon'] or params.horizon(task),
        )
        rewards = {seed: population_reward(records) for seed, records in results.items()}
        out = Path(options['out'])
        write_baseline(out / 'baseline_summary.csv', task, rewards)
        write_reward_timeseries(
            out / 'reward_timeseries.csv',
            *reward_timeseries(results[seeds[0]], params.harness.smoothing_sigma),
        )
        values = np.array(list(rewards.values()))
        self.success(f'{task} Q-learning: R={values.mean():.4f} +/- {values.std():.4f}')
