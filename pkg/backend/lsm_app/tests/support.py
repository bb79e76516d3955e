"""Toy-scale parameters shared by the test modules."""
from dataclasses import replace

from lsm_app.conf import Parameters
from lsm_app.environments import FlappyParams, TMazeParams
from lsm_app.evolution import EvolutionParams
from lsm_app.snn import LifParams
from lsm_app.topology import LiquidGrid, TopologyParams

# settings.LSM keys for a run that finishes in well under a second
TOY_SETTINGS = {
    'GRID_WIDTH': 4,
    'GRID_HEIGHT': 4,
    'SPARSITY': 0.2,
    'DENSITY_CAP': 0.3,
    'N_INI': 4,
    'N_OPT': 2,
    'OFFSPRING': 2,
    'G_TH': 1,
    'GENERATIONS': 2,
    'PROBE_WINDOW': 20,
    'TICKS_PER_STEP': 5,
    'TMAZE_HORIZON': 30,
    'FLAPPY_HORIZON': 30,
    'SEEDS': 2,
}


def toy_parameters(**changes):
    params = Parameters(
        lif=LifParams(ticks_per_step=5),
        grid=LiquidGrid(width=4, height=4),
        topology=TopologyParams(sparsity=0.2, density_cap=0.3),
        evolution=EvolutionParams(
            n_ini=4, n_opt=2, offspring_per_individual=2, g_th=1, generations=2, probe_window=20,
        ),
        tmaze=TMazeParams(horizon=30),
        flappy=FlappyParams(horizon=30),
    )
    return replace(params, **changes)


def write_config(path, values):
    path.write_text(''.join(f'{key}={value}\n' for key, value in values.items()))
    return path
