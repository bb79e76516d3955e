from pathlib import Path

from lsm_app.artifacts import write_fitness, write_survivors
from lsm_app.environments import make_task
from lsm_app.harness import evolve_liquids

from ._base import EngineCommand


class Command(EngineCommand):
    help = 'Evolve liquid structures for a task and save the survivors.'
    overrides = {
        **EngineCommand.overrides,
        'generations': 'GENERATIONS', 'gth': 'G_TH', 'rate': 'RATE', 'pop': 'N_INI', 'nopt': 'N_OPT',
    }

    def add_engine_arguments(self, parser):
        parser.add_argument('--generations', type=int)
        parser.add_argument('--gth', type=int, help='generation from which the population is cut to n_opt')
        parser.add_argument('--rate', type=float, help='share replaced by fresh liquids before g_th')
        parser.add_argument('--pop', type=int, help='initial population size')
        parser.add_argument('--nopt', type=int, help='number of survivors')

    def run(self, params, **options):
        out = Path(options['out'])
        task = make_task(options['task'], params.tmaze, params.flappy)
        survivors, record, projection = evolve_liquids(
            task, params, options['seed'], workers=params.harness.workers,
        )
        write_fitness(out, record)
        write_survivors(out, survivors, projection)
        self.success(
            f'{task.name}: best SP {record.best[-1]} after {record.generations - 1} generations; '
            f'{len(survivors)} survivors in {out}'
        )
