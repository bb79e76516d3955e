"""
Discrete-time leaky integrate-and-fire dynamics.

Forward Euler with dt = 1 tick on  tau_m dV/dt = I(t) - V(t):

    v' = v + (I_total - v) / tau_m,    I_total = I_ext + W^T . s(t-1)

A neuron whose updated potential reaches v_th emits a spike and is reset to
v_reset within the same tick. There is no refractory period.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, EmptyWindowError, ParameterError

logger = logging.getLogger(__name__)

# spikes per tick per unit of input current
RATE_SCALE = 0.5


@dataclass(frozen=True)
class LifParams:
    tau_m: float = 2.0
    v_th: float = 1.0
    v_reset: float = 0.0
    ticks_per_step: int = 20

    def __post_init__(self):
        if self.tau_m <= 0:
            raise ParameterError(f'tau_m must be positive, got {self.tau_m}')
        if self.v_th <= self.v_reset:
            raise ParameterError(f'v_th ({self.v_th}) must exceed v_reset ({self.v_reset})')
        if self.ticks_per_step < 1:
            raise ParameterError(f'ticks_per_step must be >= 1, got {self.ticks_per_step}')


@dataclass(frozen=True)
class NeuronState:
    """Membrane potentials and the spikes emitted on the last tick."""

    v: np.ndarray
    fired: np.ndarray

    @classmethod
    def rest(cls, n_neurons, params):
        return cls(
            v=np.full(n_neurons, params.v_reset, dtype=np.float64),
            fired=np.zeros(n_neurons, dtype=bool),
        )

    @property
    def size(self):
        return self.v.shape[0]


@dataclass(frozen=True)
class SpikeStateMatrix:
    """Binary firing record: rows are neurons, columns are ticks."""

    bits: np.ndarray

    @property
    def n_neurons(self):
        return self.bits.shape[0]

    @property
    def window(self):
        return self.bits.shape[1]

    def fired_any(self):
        """Per-neuron flag: fired at least once in the window."""
        return self.bits.any(axis=1)

    def counts(self):
        return self.bits.sum(axis=1, dtype=np.int64)

    @classmethod
    def hstack(cls, matrices):
        matrices = list(matrices)
        if not matrices:
            raise EmptyWindowError('cannot concatenate an empty list of spike matrices')
        return cls(np.hstack([m.bits for m in matrices]))


def _check_network(n_neurons, weights):
    if weights.ndim != 2 or weights.shape != (n_neurons, n_neurons):
        raise ConfigurationError(
            f'weight matrix must be {n_neurons}x{n_neurons}, got {weights.shape}'
        )


def _integrate(v, fired, current, weights, params):
    total = current + weights.T @ fired
    v = v + (total - v) / params.tau_m
    spikes = v >= params.v_th
    v = np.where(spikes, params.v_reset, v)
    return v, spikes


def lif_tick(state, input_current, weights, params):
    """Advance every neuron by one tick.

    The recurrent drive comes from `state.fired` (the previous tick).
    Returns the new state and the binary spike vector; nothing is mutated.
    """
    current = np.asarray(input_current, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if current.shape != (state.size,):
        raise ConfigurationError(
            f'input current has shape {current.shape}, expected ({state.size},)'
        )
    _check_network(state.size, weights)

    v, spikes = _integrate(state.v, state.fired.astype(np.float64), current, weights, params)
    return NeuronState(v=v, fired=spikes), spikes.astype(np.uint8)


def run_window(weights, input_currents, params, window, state=None, carry=False):
    """Drive the network for `window` ticks and record who fired when.

    `input_currents` is an (n_neurons, >= window) per-tick current matrix.
    With carry=True the simulation continues from `state`; otherwise it
    starts from rest.
    """
    if window <= 0:
        raise EmptyWindowError('window must cover at least one tick')
    weights = np.asarray(weights, dtype=np.float64)
    currents = np.asarray(input_currents, dtype=np.float64)
    n_neurons = weights.shape[0]
    _check_network(n_neurons, weights)
    if currents.ndim != 2 or currents.shape[0] != n_neurons or currents.shape[1] < window:
        raise ConfigurationError(
            f'input currents {currents.shape} do not cover {n_neurons} neurons x {window} ticks'
        )
    if carry:
        if state is None:
            raise ConfigurationError('carry=True needs a state to continue from')
        if state.size != n_neurons:
            raise ConfigurationError(f'state has {state.size} neurons, network has {n_neurons}')
        v, fired = state.v, state.fired.astype(np.float64)
    else:
        rest = NeuronState.rest(n_neurons, params)
        v, fired = rest.v, rest.fired.astype(np.float64)

    bits = np.zeros((n_neurons, window), dtype=np.uint8)
    for t in range(window):
        v, spikes = _integrate(v, fired, currents[:, t], weights, params)
        bits[:, t] = spikes
        fired = spikes.astype(np.float64)
    return SpikeStateMatrix(bits)


def rate_code(currents, ticks):
    """Deterministic rate coding of per-input current amplitudes.

    Input k fires at tick t iff floor((t+1)*r) > floor(t*r) with
    r = RATE_SCALE * currents[k], i.e. evenly spaced spikes at rate r.
    """
    if ticks <= 0:
        raise EmptyWindowError('rate coding needs at least one tick')
    rates = np.clip(np.asarray(currents, dtype=np.float64) * RATE_SCALE, 0.0, 1.0)
    edges = np.floor(np.outer(rates, np.arange(ticks + 1)) + 1e-9)
    return (np.diff(edges, axis=1) > 0).astype(np.uint8)
