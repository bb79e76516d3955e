"""
Online synaptic learning rules.

Scalar forms follow the trace-based BCM rule and its dopamine-gated variant:

    e'      = tau_bcm * e + o
    phi(e)  = e * (e - theta_m)
    dm      = lr * (phi(e_post) * e_pre - eps * m)           BCM
    dm      = lr * DA * (phi(e_post) * e_pre - eps * m)      DA-BCM
    theta'  = (1 - 1/window) * theta + (1/window) * e_post^2

plus a pair-based exponential STDP rule used as the unsupervised baseline.
Every scalar function broadcasts over numpy arrays; the `*_layer_update`
functions apply a rule to a whole weight matrix, touching only synapses in
the layer's structural mask. Weights are indexed [pre, post].

Inside a network the postsynaptic side works on a normalised trace,
e / trace_norm with trace_norm = headroom / (1 - tau_bcm). A neuron firing
every tick settles at 1/headroom, so with headroom > 1 a neuron firing at its
usual rate sits above its threshold and only a drop below its recent
activity turns phi negative. The presynaptic factor stays the raw trace.
"""
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError, ParameterError

NONE = 'none'
STDP = 'stdp'
DA_BCM = 'da-bcm'
LEARNING_RULES = (NONE, STDP, DA_BCM)


@dataclass(frozen=True)
class StdpParams:
    a_plus: float = 0.01
    a_minus: float = 0.012
    tau_plus: float = 5.0
    tau_minus: float = 5.0

    def __post_init__(self):
        if self.tau_plus <= 0 or self.tau_minus <= 0:
            raise ParameterError('STDP time constants must be positive')


@dataclass(frozen=True)
class PlasticityParams:
    epsilon: float = 0.001
    learning_rate: float = 0.05
    w_min: float = 0.0
    w_max: float = 8.0
    tau_bcm: float = 0.9
    theta_window: float = 50.0
    headroom: float = 2.0
    stdp: StdpParams = field(default_factory=StdpParams)

    def __post_init__(self):
        if self.epsilon < 0:
            raise ParameterError(f'epsilon must be >= 0, got {self.epsilon}')
        if self.w_min >= self.w_max:
            raise ParameterError(f'w_min ({self.w_min}) must be below w_max ({self.w_max})')
        if not 0 <= self.tau_bcm < 1:
            raise ParameterError(f'tau_bcm must lie in [0, 1), got {self.tau_bcm}')
        if self.theta_window < 1:
            raise ParameterError(f'theta_window must be >= 1, got {self.theta_window}')
        if self.headroom <= 1:
            raise ParameterError(f'headroom must be > 1, got {self.headroom}')

    @property
    def trace_norm(self):
        return self.headroom / (1.0 - self.tau_bcm)


@dataclass
class TraceState:
    """Spike traces and sliding BCM thresholds for one neuron population."""

    e: np.ndarray
    theta: np.ndarray
    tau_bcm: float = 0.9
    theta_window: float = 50.0
    trace_norm: float = 1.0

    @classmethod
    def zeros(cls, n_neurons, params):
        return cls(
            e=np.zeros(n_neurons, dtype=np.float64),
            theta=np.zeros(n_neurons, dtype=np.float64),
            tau_bcm=params.tau_bcm,
            theta_window=params.theta_window,
            trace_norm=params.trace_norm,
        )

    @property
    def rate(self):
        return self.e / self.trace_norm

    def advance(self, spikes):
        self.e = update_trace(self.e, spikes, self.tau_bcm)
        self.theta = update_theta(self.theta, self.rate, self.theta_window)


def update_trace(e, o, tau_bcm):
    return tau_bcm * e + o


def bcm_phi(e_post, theta_m):
    return e_post * (e_post - theta_m)


def update_theta(theta_m, e_post, window):
    rate = 1.0 / window
    return (1.0 - rate) * theta_m + rate * e_post ** 2


def clamp(m, params):
    return np.clip(m, params.w_min, params.w_max)


def bcm_delta(m, e_pre, e_post, theta_m, params):
    """Unclamped BCM weight change for one step."""
    return params.learning_rate * (bcm_phi(e_post, theta_m) * e_pre - params.epsilon * m)


def bcm_update(m, e_pre, e_post, theta_m, params):
    return clamp(m + bcm_delta(m, e_pre, e_post, theta_m, params), params)


def da_bcm_update(m, e_pre, e_post, theta_m, da, params):
    return clamp(m + da * bcm_delta(m, e_pre, e_post, theta_m, params), params)


def stdp_delta(dt, params):
    """Pair-based exponential window; dt = post spike tick - pre spike tick."""
    dt = np.asarray(dt, dtype=np.float64)
    stdp = params.stdp
    potentiation = stdp.a_plus * np.exp(-np.abs(dt) / stdp.tau_plus)
    depression = -stdp.a_minus * np.exp(-np.abs(dt) / stdp.tau_minus)
    delta = np.where(dt > 0, potentiation, np.where(dt < 0, depression, 0.0))
    return float(delta) if delta.ndim == 0 else delta


def stdp_update(m, dt, params):
    return clamp(m + stdp_delta(dt, params), params)


# ===============================================================
# Layer updates
# ===============================================================
def da_bcm_layer_update(w, mask, pre, post, da, params):
    """One DA-BCM step over a weight matrix from `pre` traces to `post` traces.

    phi is taken on the normalised post trace against its own threshold.
    """
    if w.shape != (pre.e.shape[0], post.e.shape[0]) or mask.shape != w.shape:
        raise ConfigurationError(
            f'weights {w.shape} / mask {mask.shape} do not match '
            f'{pre.e.shape[0]} pre x {post.e.shape[0]} post neurons'
        )
    phi = bcm_phi(post.rate, post.theta)
    delta = params.learning_rate * da * (np.outer(pre.e, phi) - params.epsilon * w)
    return np.where(mask, clamp(w + delta, params), w)


def bcm_layer_update(w, mask, pre, post, params):
    return da_bcm_layer_update(w, mask, pre, post, 1.0, params)


def stdp_layer_update(w, mask, last_pre, last_post, params):
    """Apply STDP to every masked synapse whose two endpoints spiked this window.

    `last_pre` / `last_post` hold the tick of each neuron's last spike in
    the window, -1 when it stayed silent.
    """
    last_pre = np.asarray(last_pre)
    last_post = np.asarray(last_post)
    if w.shape != (last_pre.shape[0], last_post.shape[0]) or mask.shape != w.shape:
        raise ConfigurationError(
            f'weights {w.shape} / mask {mask.shape} do not match spike-time vectors'
        )
    paired = (last_pre[:, None] >= 0) & (last_post[None, :] >= 0) & mask
    lag = last_post[None, :] - last_pre[:, None]
    return np.where(paired, clamp(w + stdp_delta(lag, params), params), w)
