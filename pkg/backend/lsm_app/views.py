import logging

from django.http import JsonResponse
from rest_framework.decorators import api_view

from .conf import load_parameters
from .environments import make_task
from .exceptions import LsmError
from .harness import (
    EVOLVED, ExperimentConfig, evolve_liquids, population_reward, run_baseline, run_population,
)
from .serializers import BaselineSerializer, RunSerializer

logger = logging.getLogger(__name__)


def _invalid(errors):
    return JsonResponse({'error': errors}, status=400)


# ===============================================================
# API VIEW: create_run
# ---------------------------------------------------------------
# Runs one ablation cell at the requested scale. Evolved cells
# evolve their liquids first under the same seed. Returns R and
# the cumulative reward and parameter count of every agent.
# ===============================================================
@api_view(['POST'])
def create_run(request):
    serializer = RunSerializer(data=request.data)
    if not serializer.is_valid():
        return _invalid(serializer.errors)
    data = serializer.validated_data

    try:
        params = load_parameters(overrides=data['overrides'])
        task = make_task(data['task'], params.tmaze, params.flappy)
        config = ExperimentConfig(
            task=task.name,
            structure=data['structure'],
            liquid_rule=data['liquid_rule'],
            readout_rule=data['readout_rule'],
            horizon=data.get('horizon') or params.horizon(task.name),
            n_opt=params.evolution.n_opt,
            seed=data['seed'],
        )
        chromosomes, projection, best_sp = None, None, None
        if config.structure == EVOLVED:
            survivors, record, projection = evolve_liquids(task, params, config.seed)
            chromosomes = [individual.chromosome for individual in survivors]
            best_sp = record.best[-1]
        records = run_population(config, params, chromosomes, projection)
    except LsmError as exc:
        logger.warning('run rejected: %s', exc)
        return _invalid(str(exc))

    return JsonResponse({
        'task': config.task,
        'cell': config.label,
        'horizon': config.horizon,
        'reward': population_reward(records),
        'best_separation': best_sp,
        'agents': [
            {'individual': r.individual, 'cumulative': r.cumulative, 'parameters': r.parameters}
            for r in records
        ],
    })


# ===============================================================
# API VIEW: create_baseline
# ---------------------------------------------------------------
# Tabular Q-learning on the same task and horizon, scored with
# the same population reward.
# ===============================================================
@api_view(['POST'])
def create_baseline(request):
    serializer = BaselineSerializer(data=request.data)
    if not serializer.is_valid():
        return _invalid(serializer.errors)
    data = serializer.validated_data

    try:
        params = load_parameters(overrides=data['overrides'])
        horizon = data.get('horizon') or params.horizon(data['task'])
        records = run_baseline(data['task'], params, [data['seed']], data['runs'], horizon)[data['seed']]
    except LsmError as exc:
        logger.warning('baseline rejected: %s', exc)
        return _invalid(str(exc))

    return JsonResponse({
        'task': data['task'],
        'horizon': horizon,
        'reward': population_reward(records),
        'runs': [r.cumulative for r in records],
    })
