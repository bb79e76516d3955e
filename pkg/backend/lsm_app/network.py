"""
A simulated liquid state machine: input projection, LIF liquid, LIF readout.

Per tick:
    liquid current  = W_in^T . input spikes + W_l^T . liquid spikes (previous tick)
    readout current = W_r^T . liquid spikes (this tick)

Traces and sliding thresholds advance every tick; `learn` applies one weight
update per layer at the end of a decision step. The input projection never
learns, and only synapses that exist in the structure can change.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError
from .plasticity import (
    DA_BCM, LEARNING_RULES, STDP, TraceState, da_bcm_layer_update, stdp_layer_update,
)
from .snn import NeuronState, lif_tick

logger = logging.getLogger(__name__)


@dataclass
class LiquidNetwork:
    liquid: np.ndarray
    readout: np.ndarray
    input_projection: np.ndarray
    lif: object
    plasticity: object
    liquid_mask: np.ndarray = None
    readout_mask: np.ndarray = None
    liquid_state: NeuronState = field(default=None, init=False, repr=False)
    readout_state: NeuronState = field(default=None, init=False, repr=False)
    liquid_traces: TraceState = field(default=None, init=False, repr=False)
    readout_traces: TraceState = field(default=None, init=False, repr=False)
    last_liquid_spike: np.ndarray = field(default=None, init=False, repr=False)
    last_readout_spike: np.ndarray = field(default=None, init=False, repr=False)
    _readout_recurrence: np.ndarray = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.liquid = np.array(self.liquid, dtype=np.float64)
        self.readout = np.array(self.readout, dtype=np.float64)
        self.input_projection = np.asarray(self.input_projection, dtype=np.float64)
        n, n_out = self.n_liquid, self.n_readout
        if self.liquid.shape != (n, n):
            raise ConfigurationError(f'liquid weights must be square, got {self.liquid.shape}')
        if self.readout.shape[0] != n:
            raise ConfigurationError(f'readout has {self.readout.shape[0]} rows for {n} liquid neurons')
        if self.input_projection.shape[1] != n:
            raise ConfigurationError(
                f'input projection targets {self.input_projection.shape[1]} neurons, liquid has {n}'
            )
        if self.liquid_mask is None:
            self.liquid_mask = self.liquid > 0
        if self.readout_mask is None:
            self.readout_mask = self.readout > 0
        self.liquid_state = NeuronState.rest(n, self.lif)
        self.readout_state = NeuronState.rest(n_out, self.lif)
        self.liquid_traces = TraceState.zeros(n, self.plasticity)
        self.readout_traces = TraceState.zeros(n_out, self.plasticity)
        self.last_liquid_spike = np.full(n, -1, dtype=np.int64)
        self.last_readout_spike = np.full(n_out, -1, dtype=np.int64)
        self._readout_recurrence = np.zeros((n_out, n_out), dtype=np.float64)

    @property
    def n_liquid(self):
        return self.liquid.shape[0]

    @property
    def n_readout(self):
        return self.readout.shape[1]

    @property
    def n_inputs(self):
        return self.input_projection.shape[0]

    def step(self, input_spikes):
        """Run one decision window; returns readout spike counts."""
        input_spikes = np.asarray(input_spikes, dtype=np.float64)
        if input_spikes.ndim != 2 or input_spikes.shape[0] != self.n_inputs:
            raise ConfigurationError(
                f'input spikes {input_spikes.shape} do not match {self.n_inputs} input neurons'
            )
        self.last_liquid_spike.fill(-1)
        self.last_readout_spike.fill(-1)
        counts = np.zeros(self.n_readout, dtype=np.int64)
        drive = input_spikes.T @ self.input_projection

        for t in range(input_spikes.shape[1]):
            self.liquid_state, liquid_spikes = lif_tick(self.liquid_state, drive[t], self.liquid, self.lif)
            self.readout_state, readout_spikes = lif_tick(
                self.readout_state, liquid_spikes @ self.readout, self._readout_recurrence, self.lif,
            )
            self.liquid_traces.advance(liquid_spikes)
            self.readout_traces.advance(readout_spikes)
            self.last_liquid_spike[liquid_spikes > 0] = t
            self.last_readout_spike[readout_spikes > 0] = t
            counts += readout_spikes
        return counts

    def learn(self, da, liquid_rule, readout_rule):
        for rule in (liquid_rule, readout_rule):
            if rule not in LEARNING_RULES:
                raise ConfigurationError(f'unknown learning rule {rule!r}')

        if liquid_rule == DA_BCM:
            self.liquid = da_bcm_layer_update(
                self.liquid, self.liquid_mask, self.liquid_traces, self.liquid_traces, da, self.plasticity,
            )
        elif liquid_rule == STDP:
            self.liquid = stdp_layer_update(
                self.liquid, self.liquid_mask, self.last_liquid_spike, self.last_liquid_spike, self.plasticity,
            )

        if readout_rule == DA_BCM:
            self.readout = da_bcm_layer_update(
                self.readout, self.readout_mask, self.liquid_traces, self.readout_traces, da, self.plasticity,
            )
        elif readout_rule == STDP:
            self.readout = stdp_layer_update(
                self.readout, self.readout_mask, self.last_liquid_spike, self.last_readout_spike, self.plasticity,
            )
