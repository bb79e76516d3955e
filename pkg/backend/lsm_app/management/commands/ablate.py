from pathlib import Path

from lsm_app.artifacts import read_survivors, write_ablation
from lsm_app.harness import default_cells, run_ablation

from ._base import EngineCommand


class Command(EngineCommand):
    help = 'Run the ablation matrix over several master seeds.'
    overrides = {**EngineCommand.overrides, 'seeds': 'SEEDS'}

    def add_engine_arguments(self, parser):
        parser.add_argument('--seeds', type=int, help='number of master seeds, starting at --seed')
        parser.add_argument('--survivors', help='reuse survivors from `evolve` instead of evolving per seed')
        parser.add_argument('--horizon', type=int)

    def run(self, params, **options):
        task = options['task']
        cells = default_cells(task, options['horizon'] or params.horizon(task), params.evolution.n_opt)
        seeds = range(options['seed'], options['seed'] + params.harness.seeds)
        survivors = None
        if options['survivors']:
            survivors = {task: read_survivors(options['survivors'], params.grid)}

        runs, summary = run_ablation(cells, seeds, params, survivors=survivors, workers=params.harness.workers)
        write_ablation(Path(options['out']), runs, summary)
        for row in summary:
            self.stdout.write(f'{row.cell.label:<28} {row.mean:12.4f} +/- {row.std:.4f}')
        self.success(f'{task}: {len(summary)} cells x {len(seeds)} seeds')
