"""
Output files of the engine.

CSVs are written with csv.DictWriter, '\n' line endings and repr() floats,
so the same seed always produces byte-identical files.
"""
import csv
import logging
from pathlib import Path

from .evolution import Chromosome
from .exceptions import ChromosomeFormatError
from .topology import read_matrix, write_matrix

logger = logging.getLogger(__name__)

INPUT_PROJECTION = 'input_projection.weights'


def _write_rows(path, fieldnames, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as handle:
        writer = csv.DictWriter(handle, fieldnames=fieldnames, lineterminator='\n')
        writer.writeheader()
        writer.writerows(rows)
    logger.info('wrote %s', path)
    return path


def write_fitness(out_dir, record):
    out_dir = Path(out_dir)
    per_generation = _write_rows(
        out_dir / 'fitness_per_generation.csv', ('generation', 'best', 'mean', 'min'),
        (
            {'generation': g, 'best': record.best[g], 'mean': record.mean[g], 'min': record.min[g]}
            for g in range(record.generations)
        ),
    )
    per_individual = _write_rows(
        out_dir / 'fitness_per_individual.csv', ('generation', 'individual', 'fitness'),
        (
            {'generation': g, 'individual': i, 'fitness': fitness}
            for g, fitnesses in enumerate(record.per_individual)
            for i, fitness in enumerate(fitnesses)
        ),
    )
    return per_generation, per_individual


def write_survivors(out_dir, survivors, input_projection):
    """survivor_<k>.chrom, fittest first, plus the shared input projection."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, individual in enumerate(survivors):
        path = out_dir / f'survivor_{k}.chrom'
        write_matrix(path, individual.chromosome.bits, binary=True)
        paths.append(path)
    write_matrix(out_dir / INPUT_PROJECTION, input_projection)
    logger.info('wrote %d survivors to %s', len(paths), out_dir)
    return paths


def read_survivors(directory, grid):
    """(chromosomes ordered by k, input projection) from a survivors directory."""
    directory = Path(directory)
    files = sorted(directory.glob('survivor_*.chrom'), key=lambda p: int(p.stem.split('_')[1]))
    if not files:
        raise ChromosomeFormatError(f'no survivor_<k>.chrom files in {directory}')
    projection_path = directory / INPUT_PROJECTION
    if not projection_path.exists():
        raise ChromosomeFormatError(f'{projection_path} is missing')
    chromosomes = [Chromosome(bits=read_matrix(path, binary=True), grid=grid) for path in files]
    return chromosomes, read_matrix(projection_path)


def write_episode_trace(path, records):
    fields = ('individual', 'step', 'episode', 'observation', 'action', 'da', 'cumulative', 'episode_end')
    return _write_rows(path, fields, (
        {'individual': record.individual, **row._asdict()}
        for record in records
        for row in record.rows
    ))


def write_reward_timeseries(path, raw, smoothed):
    return _write_rows(path, ('step', 'smoothed', 'raw'), (
        {'step': t, 'smoothed': float(smoothed[t]), 'raw': float(raw[t])} for t in range(len(raw))
    ))


def _cell_fields(cell):
    return {
        'task': cell.task, 'structure': cell.structure,
        'liquid_rule': cell.liquid_rule, 'readout_rule': cell.readout_rule,
    }


def write_ablation(out_dir, runs, summary):
    out_dir = Path(out_dir)
    cell_keys = ('task', 'structure', 'liquid_rule', 'readout_rule')
    runs_path = _write_rows(out_dir / 'ablation_runs.csv', cell_keys + ('seed', 'reward'), (
        {**_cell_fields(run.cell), 'seed': run.seed, 'reward': run.reward} for run in runs
    ))
    summary_path = _write_rows(out_dir / 'ablation_summary.csv', cell_keys + ('mean', 'std', 'runs'), (
        {**_cell_fields(row.cell), 'mean': row.mean, 'std': row.std, 'runs': row.runs} for row in summary
    ))
    return runs_path, summary_path


def write_baseline(path, task_name, rewards_by_seed):
    """One row per seed with the Q-learning population reward."""
    return _write_rows(path, ('task', 'seed', 'reward'), (
        {'task': task_name, 'seed': seed, 'reward': reward} for seed, reward in rewards_by_seed.items()
    ))
