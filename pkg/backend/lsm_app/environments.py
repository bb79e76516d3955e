"""
Decision tasks: a T-maze with reward reversal and a discretised Flappy Bird.

Worlds are frozen dataclasses; every step returns a new world, so a run is a
pure function of its seed. The reward of each step is the dopamine signal
that gates learning.

T-maze layout (x right, y up), F/P are the two arm ends:

    F . J . P      y = 4   (J = junction, (2, 4))
        .          y = 3
        .          y = 2
        .          y = 1
        S          y = 0   (start, heading north)
"""
import logging
from collections import deque
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .exceptions import ConfigurationError, ParameterError
from .seeding import sub_rng

logger = logging.getLogger(__name__)

TMAZE = 'tmaze'
FLAPPY = 'flappy'
TASKS = (TMAZE, FLAPPY)


class RewardSignal(NamedTuple):
    da: float


class StepResult(NamedTuple):
    world: object
    observation: object
    reward: RewardSignal
    done: bool
    reason: str


# ===============================================================
# T-maze
# ===============================================================
TMAZE_ACTIONS = ('forward', 'left', 'right')
FORWARD, LEFT, RIGHT = range(3)

WALL, ROAD, FOOD, POISON = 'wall', 'road', 'food', 'poison'
SYMBOL_CURRENT = {WALL: 0.5, ROAD: 1.0, POISON: 1.5, FOOD: 2.0}

# north, east, south, west
HEADINGS = ((0, 1), (1, 0), (0, -1), (-1, 0))
NORTH = 0

STEM = tuple((2, y) for y in range(5))
ARM_ENDS = ((0, 4), (4, 4))
WALKABLE = frozenset(STEM + ((1, 4), (0, 4), (3, 4), (4, 4)))
START = (2, 0)
NON_TERMINAL = tuple(sorted(WALKABLE - set(ARM_ENDS)))

TMAZE_REWARDS = {'food': 3.0, 'poison': -3.0, 'closer': 1.0, 'not_closer': -1.0, 'blocked': 0.0}


@dataclass(frozen=True)
class TMazeParams:
    energy: int = 30
    reversal_probability: float = 0.25
    reversal_streak: int = 3
    horizon: int = 500

    def __post_init__(self):
        if self.energy < 1:
            raise ParameterError(f'energy must be >= 1, got {self.energy}')
        if not 0 <= self.reversal_probability <= 1:
            raise ParameterError(f'reversal probability must lie in [0, 1], got {self.reversal_probability}')
        if self.reversal_streak < 1:
            raise ParameterError(f'reversal streak must be >= 1, got {self.reversal_streak}')
        if self.horizon < 1:
            raise ParameterError(f'horizon must be >= 1, got {self.horizon}')


class TMazeObservation(NamedTuple):
    left: str
    front: str
    right: str

    def __str__(self):
        return f'{self.left}/{self.front}/{self.right}'


@dataclass(frozen=True)
class TMazeWorld:
    position: tuple = START
    heading: int = NORTH
    food: tuple = ARM_ENDS[0]
    poison: tuple = ARM_ENDS[1]
    steps: int = 0
    streak: int = 0
    episode: int = 0
    params: TMazeParams = TMazeParams()

    @classmethod
    def create(cls, params, rng=None):
        """Fresh world; with an rng the food side is drawn at random."""
        food, poison = ARM_ENDS
        if rng is not None and rng.random() < 0.5:
            food, poison = poison, food
        return cls(food=food, poison=poison, params=params)

    def symbol_at(self, cell):
        if cell not in WALKABLE:
            return WALL
        if cell == self.food:
            return FOOD
        if cell == self.poison:
            return POISON
        return ROAD


def _ahead(position, heading):
    dx, dy = HEADINGS[heading]
    return position[0] + dx, position[1] + dy


def tmaze_observe(world):
    h = world.heading
    return TMazeObservation(
        left=world.symbol_at(_ahead(world.position, (h - 1) % 4)),
        front=world.symbol_at(_ahead(world.position, h)),
        right=world.symbol_at(_ahead(world.position, (h + 1) % 4)),
    )


def _path_lengths(target):
    """Shortest walkable path length from every cell to `target`."""
    lengths = {target: 0}
    queue = deque([target])
    while queue:
        cell = queue.popleft()
        for dx, dy in HEADINGS:
            nxt = (cell[0] + dx, cell[1] + dy)
            if nxt in WALKABLE and nxt not in lengths:
                lengths[nxt] = lengths[cell] + 1
                queue.append(nxt)
    return lengths


_FOOD_DISTANCE = {end: _path_lengths(end) for end in ARM_ENDS}


def food_distance(world, cell=None):
    return _FOOD_DISTANCE[world.food][world.position if cell is None else cell]


def tmaze_step(world, action):
    """Apply forward/left/right; turns rotate the heading then step.

    A step into a wall is not a move: the position stays, no reward is paid
    and the step still spends energy.
    """
    if action not in (FORWARD, LEFT, RIGHT):
        raise ConfigurationError(f'invalid T-maze action {action!r}; expected 0, 1 or 2')

    heading = {FORWARD: world.heading, LEFT: (world.heading - 1) % 4, RIGHT: (world.heading + 1) % 4}[action]
    target = _ahead(world.position, heading)
    position = target if target in WALKABLE else world.position
    dis_m = food_distance(world, position) - food_distance(world)

    moved = replace(world, position=position, heading=heading, steps=world.steps + 1)
    if position == world.food:
        da, done, reason = TMAZE_REWARDS['food'], True, 'food'
        moved = replace(moved, streak=world.streak + 1)
    elif position == world.poison:
        da, done, reason = TMAZE_REWARDS['poison'], True, 'poison'
        moved = replace(moved, streak=0)
    else:
        if position == world.position:
            da = TMAZE_REWARDS['blocked']
        else:
            da = TMAZE_REWARDS['closer'] if dis_m < 0 else TMAZE_REWARDS['not_closer']
        done = moved.steps >= world.params.energy
        reason = 'timeout' if done else ''
        if done:
            moved = replace(moved, streak=0)
    return StepResult(moved, tmaze_observe(moved), RewardSignal(da), done, reason)


def maybe_reverse(world, rng):
    """Swap food and poison after a run of successful episodes.

    Once the streak reaches the configured length the swap happens with the
    configured probability and the streak starts over either way.
    Returns the new world and whether a swap happened.
    """
    if world.streak < world.params.reversal_streak:
        return world, False
    swapped = rng.random() < world.params.reversal_probability
    if swapped:
        logger.debug('reversal after episode %d: food moves to %s', world.episode, world.poison)
        return replace(world, food=world.poison, poison=world.food, streak=0), True
    return replace(world, streak=0), False


def tmaze_reset(world):
    """Start the next episode at the stem; food/poison sides and streak carry over."""
    return replace(world, position=START, heading=NORTH, steps=0, episode=world.episode + 1)


def tmaze_state_index(world):
    """(cell, heading) index into the 28-entry table of non-terminal states."""
    return NON_TERMINAL.index(world.position) * len(HEADINGS) + world.heading


# ===============================================================
# Flappy Bird
# ===============================================================
FLAPPY_ACTIONS = ('up', 'down')
UP, DOWN = range(2)
FLAPPY_STATES = 9
COLLISION = 8
FLAPPY_CURRENT = 2.0


@dataclass(frozen=True)
class FlappyParams:
    height: int = 20
    gap: int = 6
    pipe_spacing: int = 12
    pipe_width: int = 2
    flap: int = 2
    gravity: int = 1
    max_fall: int = 3
    horizon: int = 2000

    def __post_init__(self):
        if self.gap < 2 or self.gap >= self.height - 2:
            raise ParameterError(f'gap {self.gap} does not fit a height of {self.height}')
        if self.pipe_width < 1 or self.pipe_spacing <= self.pipe_width:
            raise ParameterError('pipe spacing must exceed pipe width, both positive')
        if self.flap < 1 or self.gravity < 1 or self.max_fall < 1:
            raise ParameterError('flap, gravity and max_fall must be positive')
        if self.horizon < 1:
            raise ParameterError(f'horizon must be >= 1, got {self.horizon}')


@dataclass(frozen=True)
class FlappyWorld:
    y: int
    velocity: int
    gap_center: int
    pipe_dx: int
    state: int
    last_state: int
    pipe_index: int = 0
    episode: int = 0
    pipe_seed: int = 0
    params: FlappyParams = FlappyParams()

    @classmethod
    def create(cls, params, pipe_seed=0):
        return _new_flight(params, pipe_seed, pipe_index=0, episode=0)


def _gap_center(params, pipe_seed, pipe_index):
    half = params.gap // 2
    rng = sub_rng(pipe_seed, pipe_index)
    return int(rng.integers(half + 1, params.height - half - 1))


def _new_flight(params, pipe_seed, pipe_index, episode):
    y = params.height // 2
    center = _gap_center(params, pipe_seed, pipe_index)
    state = flappy_state(y, center, params.pipe_spacing, params)
    return FlappyWorld(
        y=y, velocity=0, gap_center=center, pipe_dx=params.pipe_spacing,
        state=state, last_state=state, pipe_index=pipe_index, episode=episode,
        pipe_seed=pipe_seed, params=params,
    )


def flappy_state(y, gap_center, pipe_dx, params):
    """Discretise the bird/pipe relation into one of 9 states (8 = collision)."""
    half = params.gap // 2
    dy = y - gap_center
    in_column = -params.pipe_width < pipe_dx <= 0
    if y < 0 or y >= params.height:
        return COLLISION
    if in_column:
        if abs(dy) >= half:
            return COLLISION
        return 6 if dy >= 0 else 7
    if abs(dy) < half:
        return 0 if dy >= 0 else 1
    if abs(dy) < params.gap:
        return 2 if dy > 0 else 3
    return 4 if dy > 0 else 5


def flappy_reward(state, last_state, dis_f):
    """Dopamine signal from the (current, last, distance change) table."""
    if state in (0, 1):
        return 6.0
    if state == COLLISION:
        return -100.0
    if state != last_state:
        return {2: -3.0, 3: -3.0, 4: -5.0, 5: -5.0, 6: -3.0, 7: -3.0}[state]
    if dis_f < 0:
        return 3.0
    return {2: -5.0, 3: -5.0, 4: -8.0, 5: -8.0, 6: -3.0, 7: -3.0}[state]


def flappy_step(world, action):
    if action not in (UP, DOWN):
        raise ConfigurationError(f'invalid Flappy Bird action {action!r}; expected 0 or 1')
    params = world.params

    if action == UP:
        velocity = params.flap
    else:
        velocity = max(world.velocity - params.gravity, -params.max_fall)
    y = world.y + velocity

    pipe_dx, pipe_index, center = world.pipe_dx - 1, world.pipe_index, world.gap_center
    if pipe_dx <= -params.pipe_width:
        pipe_index += 1
        pipe_dx += params.pipe_spacing
        center = _gap_center(params, world.pipe_seed, pipe_index)

    state = flappy_state(y, center, pipe_dx, params)
    dis_f = abs(y - center) - abs(world.y - world.gap_center)
    da = flappy_reward(state, world.state, dis_f)
    moved = replace(
        world, y=y, velocity=velocity, gap_center=center, pipe_dx=pipe_dx,
        pipe_index=pipe_index, state=state, last_state=world.state,
    )
    done = state == COLLISION
    return StepResult(moved, state, RewardSignal(da), done, 'collision' if done else '')


def flappy_reset(world):
    return _new_flight(world.params, world.pipe_seed, world.pipe_index + 1, world.episode + 1)


# ===============================================================
# Observation encoding
# ===============================================================
def encode_observation(observation):
    """Per-tick input current for each input neuron."""
    if isinstance(observation, TMazeObservation):
        try:
            return np.array([SYMBOL_CURRENT[s] for s in observation], dtype=np.float64)
        except KeyError as exc:
            raise ConfigurationError(f'unknown T-maze symbol {exc.args[0]!r}') from exc
    if isinstance(observation, (int, np.integer)) and not isinstance(observation, bool):
        if not 0 <= observation < FLAPPY_STATES:
            raise ConfigurationError(f'Flappy Bird state {observation} outside 0..{FLAPPY_STATES - 1}')
        currents = np.zeros(FLAPPY_STATES, dtype=np.float64)
        currents[observation] = FLAPPY_CURRENT
        return currents
    raise ConfigurationError(f'cannot encode observation {observation!r}')


# ===============================================================
# Task adapters: one interface for the LSM harness and Q-learning
# ===============================================================
class TMazeTask:
    name = TMAZE
    actions = TMAZE_ACTIONS
    n_inputs = 3
    n_states = len(NON_TERMINAL) * len(HEADINGS)
    end_reasons = ('food', 'poison', 'timeout')

    def __init__(self, params):
        self.params = params

    @property
    def n_actions(self):
        return len(self.actions)

    def reset(self, rng):
        return TMazeWorld.create(self.params, rng)

    def observe(self, world):
        return tmaze_observe(world)

    def step(self, world, action):
        return tmaze_step(world, action)

    def end_episode(self, world, rng):
        world, reversed_ = maybe_reverse(world, rng)
        return tmaze_reset(world), reversed_

    def state_index(self, world):
        return tmaze_state_index(world)

    def observation_ensemble(self):
        """Distinct observations over non-terminal (cell, heading) in both layouts."""
        seen = []
        for food, poison in (ARM_ENDS, ARM_ENDS[::-1]):
            base = TMazeWorld(food=food, poison=poison, params=self.params)
            for cell in NON_TERMINAL:
                for heading in range(len(HEADINGS)):
                    obs = tmaze_observe(replace(base, position=cell, heading=heading))
                    if obs not in seen:
                        seen.append(obs)
        return [encode_observation(obs) for obs in seen]


class FlappyTask:
    name = FLAPPY
    actions = FLAPPY_ACTIONS
    n_inputs = FLAPPY_STATES
    n_states = FLAPPY_STATES
    end_reasons = ('collision',)

    def __init__(self, params):
        self.params = params

    @property
    def n_actions(self):
        return len(self.actions)

    def reset(self, rng):
        return FlappyWorld.create(self.params, pipe_seed=int(rng.integers(2 ** 31)))

    def observe(self, world):
        return world.state

    def step(self, world, action):
        return flappy_step(world, action)

    def end_episode(self, world, rng):
        return flappy_reset(world), False

    def state_index(self, world):
        return world.state

    def observation_ensemble(self):
        return [encode_observation(s) for s in range(FLAPPY_STATES)]


def make_task(name, tmaze=None, flappy=None):
    if name == TMAZE:
        return TMazeTask(tmaze or TMazeParams())
    if name == FLAPPY:
        return FlappyTask(flappy or FlappyParams())
    raise ConfigurationError(f'unknown task {name!r}; expected one of {", ".join(TASKS)}')


# ===============================================================
# Tabular Q-learning baseline
# ===============================================================
@dataclass(frozen=True)
class QLearningParams:
    alpha: float = 0.1
    greedy: float = 0.8
    gamma_tmaze: float = 0.9
    gamma_flappy: float = 0.99

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ParameterError(f'alpha must lie in (0, 1], got {self.alpha}')
        if not 0 <= self.greedy <= 1:
            raise ParameterError(f'greedy probability must lie in [0, 1], got {self.greedy}')

    def gamma(self, task_name):
        return self.gamma_tmaze if task_name == TMAZE else self.gamma_flappy


def q_update(q, state, action, reward, next_state, alpha, gamma, terminal=False):
    """Q(s,a) += alpha * (R + gamma * max_a' Q(s',a') - Q(s,a)), in place."""
    target = reward if terminal else reward + gamma * q[next_state].max()
    q[state, action] += alpha * (target - q[state, action])
    return q[state, action]


def epsilon_greedy(q_row, greedy, rng):
    """Greedy action with probability `greedy`, uniform otherwise; ties at random."""
    if rng.random() < greedy:
        best = np.flatnonzero(q_row == q_row.max())
        return int(best[rng.integers(len(best))])
    return int(rng.integers(len(q_row)))


def q_learning_baseline(task, horizon, params, rng):
    """Run tabular Q-learning for `horizon` steps; returns the per-step rewards."""
    rng = np.random.default_rng(rng)
    gamma = params.gamma(task.name)
    q = np.zeros((task.n_states, task.n_actions), dtype=np.float64)
    rewards = np.zeros(horizon, dtype=np.float64)

    world = task.reset(rng)
    for t in range(horizon):
        state = task.state_index(world)
        action = epsilon_greedy(q[state], params.greedy, rng)
        result = task.step(world, action)
        rewards[t] = result.reward.da
        # terminal cells are not table states; they end the bootstrap
        next_state = state if result.done else task.state_index(result.world)
        q_update(q, state, action, result.reward.da, next_state, params.alpha, gamma, terminal=result.done)
        world = result.world
        if result.done:
            world, _ = task.end_episode(world, rng)
    return rewards
