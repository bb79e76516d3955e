from pathlib import Path

from lsm_app.artifacts import read_survivors, write_episode_trace, write_reward_timeseries
from lsm_app.harness import (
    EVOLVED, READOUT_RULES, STRUCTURES, ExperimentConfig, population_reward, reward_timeseries,
    run_population,
)
from lsm_app.plasticity import DA_BCM, LEARNING_RULES

from ._base import EngineCommand


class Command(EngineCommand):
    help = 'Run one ablation cell: n_opt agents for T steps.'
    overrides = {**EngineCommand.overrides, 'nopt': 'N_OPT'}

    def add_engine_arguments(self, parser):
        parser.add_argument('--structure', choices=STRUCTURES, default=EVOLVED)
        parser.add_argument('--liquid-rule', choices=LEARNING_RULES, default=DA_BCM)
        parser.add_argument('--readout-rule', choices=READOUT_RULES, default=DA_BCM)
        parser.add_argument('--survivors', help='directory written by `evolve` (needed for evolved runs)')
        parser.add_argument('--horizon', type=int, help='decision steps per agent (default per task)')
        parser.add_argument('--nopt', type=int, help='number of agents')

    def run(self, params, **options):
        config = ExperimentConfig(
            task=options['task'],
            structure=options['structure'],
            liquid_rule=options['liquid_rule'],
            readout_rule=options['readout_rule'],
            horizon=options['horizon'] or params.horizon(options['task']),
            n_opt=params.evolution.n_opt,
            seed=options['seed'],
        )
        chromosomes, projection = None, None
        if options['survivors']:
            chromosomes, projection = read_survivors(options['survivors'], params.grid)
            if config.structure != EVOLVED:
                chromosomes = None

        records = run_population(config, params, chromosomes, projection, workers=params.harness.workers)
        out = Path(options['out'])
        write_episode_trace(out / 'episode_trace.csv', records)
        write_reward_timeseries(
            out / 'reward_timeseries.csv', *reward_timeseries(records, params.harness.smoothing_sigma),
        )
        parameters = max(record.parameters for record in records)
        self.success(
            f'{config.task} {config.label}: R={population_reward(records):.4f} '
            f'over {len(records)} agents, up to {parameters} plastic parameters'
        )
