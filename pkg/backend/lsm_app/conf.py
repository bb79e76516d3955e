"""
Typed parameters built from the flat `settings.LSM` map.

A flat KEY=value file (same format python-decouple reads for `.env`) can
override any key for a single invocation; explicit overrides (CLI flags,
API payloads) win over both.
"""
import logging
from dataclasses import dataclass, field

from decouple import RepositoryEnv
from django.conf import settings

from .environments import FlappyParams, QLearningParams, TMazeParams
from .evolution import EvolutionParams
from .exceptions import ParameterError
from .plasticity import PlasticityParams, StdpParams
from .snn import LifParams
from .topology import LiquidGrid, TopologyParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HarnessParams:
    smoothing_sigma: float = 5.0
    workers: int = 1
    seeds: int = 10

    def __post_init__(self):
        if self.smoothing_sigma < 0:
            raise ParameterError(f'smoothing sigma must be >= 0, got {self.smoothing_sigma}')
        if self.workers < 1:
            raise ParameterError(f'workers must be >= 1, got {self.workers}')
        if self.seeds < 1:
            raise ParameterError(f'seeds must be >= 1, got {self.seeds}')


@dataclass(frozen=True)
class Parameters:
    lif: LifParams = field(default_factory=LifParams)
    grid: LiquidGrid = field(default_factory=LiquidGrid)
    topology: TopologyParams = field(default_factory=TopologyParams)
    evolution: EvolutionParams = field(default_factory=EvolutionParams)
    plasticity: PlasticityParams = field(default_factory=PlasticityParams)
    tmaze: TMazeParams = field(default_factory=TMazeParams)
    flappy: FlappyParams = field(default_factory=FlappyParams)
    qlearning: QLearningParams = field(default_factory=QLearningParams)
    harness: HarnessParams = field(default_factory=HarnessParams)

    def horizon(self, task_name):
        return self.tmaze.horizon if task_name == 'tmaze' else self.flappy.horizon


def parameters_from_mapping(values):
    v = values
    return Parameters(
        lif=LifParams(
            tau_m=v['TAU_M'], v_th=v['V_TH'], v_reset=v['V_RESET'], ticks_per_step=v['TICKS_PER_STEP'],
        ),
        grid=LiquidGrid(width=v['GRID_WIDTH'], height=v['GRID_HEIGHT']),
        topology=TopologyParams(
            lambda_=v['LAMBDA'], alpha=v['ALPHA'], d_th=v['D_TH'], sparsity=v['SPARSITY'],
            beta=v['BETA'], input_fan_out=v['INPUT_FAN_OUT'], density_cap=v['DENSITY_CAP'],
        ),
        evolution=EvolutionParams(
            n_ini=v['N_INI'], n_opt=v['N_OPT'], offspring_per_individual=v['OFFSPRING'],
            g_th=v['G_TH'], generations=v['GENERATIONS'], rate=v['RATE'], probe_window=v['PROBE_WINDOW'],
        ),
        plasticity=PlasticityParams(
            epsilon=v['EPSILON'], learning_rate=v['LEARNING_RATE'], w_min=v['W_MIN'], w_max=v['W_MAX'],
            tau_bcm=v['TAU_BCM'], theta_window=v['THETA_WINDOW'], headroom=v['BCM_HEADROOM'],
            stdp=StdpParams(
                a_plus=v['STDP_A_PLUS'], a_minus=v['STDP_A_MINUS'],
                tau_plus=v['STDP_TAU_PLUS'], tau_minus=v['STDP_TAU_MINUS'],
            ),
        ),
        tmaze=TMazeParams(
            energy=v['TMAZE_ENERGY'], reversal_probability=v['REVERSAL_PROBABILITY'],
            reversal_streak=v['REVERSAL_STREAK'], horizon=v['TMAZE_HORIZON'],
        ),
        flappy=FlappyParams(
            height=v['FLAPPY_HEIGHT'], gap=v['FLAPPY_GAP'], pipe_spacing=v['FLAPPY_PIPE_SPACING'],
            pipe_width=v['FLAPPY_PIPE_WIDTH'], flap=v['FLAPPY_FLAP'], gravity=v['FLAPPY_GRAVITY'],
            max_fall=v['FLAPPY_MAX_FALL'], horizon=v['FLAPPY_HORIZON'],
        ),
        qlearning=QLearningParams(
            alpha=v['Q_ALPHA'], greedy=v['Q_GREEDY'],
            gamma_tmaze=v['Q_GAMMA_TMAZE'], gamma_flappy=v['Q_GAMMA_FLAPPY'],
        ),
        harness=HarnessParams(
            smoothing_sigma=v['SMOOTHING_SIGMA'], workers=v['WORKERS'], seeds=v['SEEDS'],
        ),
    )


def _cast_like(key, value, default):
    try:
        return type(default)(value)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f'{key}={value!r} is not a valid {type(default).__name__}') from exc


def load_values(config_path=None, overrides=None):
    """Merged KEY -> value map: settings.LSM, then the config file, then overrides.

    File keys are read from the file alone, so they beat the environment
    that filled settings.LSM.
    """
    values = dict(settings.LSM)
    if config_path:
        repository = RepositoryEnv(str(config_path))
        for key, raw in repository.data.items():
            if key not in values:
                continue
            try:
                values[key] = type(values[key])(raw)
            except ValueError as exc:
                raise ParameterError(f'{config_path}: {key} is not a valid {type(values[key]).__name__}') from exc
        unknown = sorted(set(repository.data) - set(values))
        if unknown:
            logger.warning('%s: ignoring unknown keys %s', config_path, ', '.join(unknown))
    for key, value in (overrides or {}).items():
        if key not in values:
            raise ParameterError(f'unknown parameter {key!r}')
        if value is not None:
            values[key] = _cast_like(key, value, values[key])
    return values


def load_parameters(config_path=None, overrides=None):
    return parameters_from_mapping(load_values(config_path, overrides))
