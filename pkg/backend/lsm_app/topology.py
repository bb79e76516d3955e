"""
Liquid layer construction and readout wiring.

    p(d)  = (exp(-1 / lambda^2)) ** (d^2)
    W_l   = alpha * M_dis * M_sparse * p
    W_r   = beta * M_r * fired * w_rand

M_dis keeps pairs no farther apart than D_th (never i == j), M_sparse keeps
a random `sparsity` fraction of entries, M_r assigns every liquid neuron to
exactly one readout neuron and `fired` drops neurons silent in the probe.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .exceptions import ChromosomeFormatError, ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LiquidGrid:
    width: int = 10
    height: int = 10

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ParameterError(f'grid must be at least 1x1, got {self.width}x{self.height}')

    @property
    def n_neurons(self):
        return self.width * self.height

    def position(self, i):
        if not 0 <= i < self.n_neurons:
            raise ParameterError(f'neuron {i} is outside a {self.width}x{self.height} grid')
        return i % self.width, i // self.width

    def distances(self):
        """Euclidean distance between every pair of neurons."""
        return _distance_matrix(self.width, self.height)


@lru_cache(maxsize=8)
def _distance_matrix(width, height):
    idx = np.arange(width * height)
    xy = np.stack([idx % width, idx // width], axis=1).astype(np.float64)
    diff = xy[:, None, :] - xy[None, :, :]
    d = np.sqrt((diff ** 2).sum(axis=-1))
    d.setflags(write=False)
    return d


@dataclass(frozen=True)
class TopologyParams:
    lambda_: float = 2.0
    alpha: float = 4.0
    d_th: float = 3.0
    sparsity: float = 0.01
    beta: float = 4.0
    input_fan_out: int = 4
    density_cap: float = 0.02

    def __post_init__(self):
        if self.lambda_ <= 0:
            raise ParameterError(f'lambda must be positive, got {self.lambda_}')
        if self.alpha <= 0:
            raise ParameterError(f'alpha must be positive, got {self.alpha}')
        if self.d_th <= 0:
            raise ParameterError(f'd_th must be positive, got {self.d_th}')
        if not 0 < self.sparsity <= 1:
            raise ParameterError(f'sparsity must lie in (0, 1], got {self.sparsity}')
        if self.beta <= 0:
            raise ParameterError(f'beta must be positive, got {self.beta}')
        if self.input_fan_out < 1:
            raise ParameterError(f'input_fan_out must be >= 1, got {self.input_fan_out}')
        if not 0 < self.density_cap <= 1:
            raise ParameterError(f'density_cap must lie in (0, 1], got {self.density_cap}')


@dataclass(frozen=True)
class LiquidWeights:
    w: np.ndarray

    @property
    def edges(self):
        return int(np.count_nonzero(self.w))

    @property
    def density(self):
        return liquid_density(self.w)


@dataclass(frozen=True)
class ReadoutWeights:
    w: np.ndarray
    assignment: np.ndarray

    @property
    def mask(self):
        return self.w > 0


def liquid_density(w):
    n = w.shape[0]
    return np.count_nonzero(w) / float(n * n)


def connection_probability(d, lambda_):
    if lambda_ <= 0:
        raise ParameterError(f'lambda must be positive, got {lambda_}')
    d = np.asarray(d, dtype=np.float64)
    if np.any(d < 0):
        raise ParameterError('distances must be non-negative')
    p = np.exp(-(d ** 2) / lambda_ ** 2)
    return float(p) if p.ndim == 0 else p


def distance_mask(grid, d_th):
    d = grid.distances()
    mask = d <= d_th
    np.fill_diagonal(mask, False)
    return mask


def edge_weights(grid, params):
    """alpha * p(d) for every pair, before any masking."""
    return params.alpha * connection_probability(grid.distances(), params.lambda_)


def init_liquid(grid, params, rng):
    rng = np.random.default_rng(rng)
    n = grid.n_neurons
    sparse = rng.random((n, n)) < params.sparsity
    w = np.where(distance_mask(grid, params.d_th) & sparse, edge_weights(grid, params), 0.0)
    weights = LiquidWeights(w)
    logger.debug('liquid initialised: %d edges, density %.4f', weights.edges, weights.density)
    return weights


def init_readout(probe, n_readout, beta, rng):
    """Random partition of liquid neurons onto readout neurons, gated on probe activity."""
    n_liquid = probe.n_neurons
    if n_readout < 1:
        raise ParameterError(f'n_readout must be >= 1, got {n_readout}')
    if n_readout > n_liquid:
        raise ParameterError(f'{n_readout} readout neurons exceed {n_liquid} liquid neurons')
    rng = np.random.default_rng(rng)

    assignment = np.empty(n_liquid, dtype=np.int64)
    assignment[rng.permutation(n_liquid)] = np.arange(n_liquid) % n_readout
    # uniform on (0, 1]
    w_rand = 1.0 - rng.random(n_liquid)
    fired = probe.fired_any().astype(np.float64)

    w = np.zeros((n_liquid, n_readout), dtype=np.float64)
    w[np.arange(n_liquid), assignment] = beta * fired * w_rand
    return ReadoutWeights(w=w, assignment=assignment)


def init_input_projection(n_inputs, n_liquid, fan_out, beta, rng):
    """Each input neuron drives `fan_out` distinct random liquid neurons with weight beta."""
    if fan_out > n_liquid:
        raise ParameterError(f'fan_out {fan_out} exceeds {n_liquid} liquid neurons')
    rng = np.random.default_rng(rng)
    projection = np.zeros((n_inputs, n_liquid), dtype=np.float64)
    for k in range(n_inputs):
        projection[k, rng.choice(n_liquid, size=fan_out, replace=False)] = beta
    return projection


# ===============================================================
# Text format: "rows cols" header, then one row per line.
# 0/1 for binary matrices, repr() decimals for weights so that
# reading back yields the identical float64 values.
# ===============================================================
def format_matrix(matrix, binary=False):
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise ChromosomeFormatError(f'expected a 2-D matrix, got {matrix.ndim} dimensions')
    rows, cols = matrix.shape
    lines = [f'{rows} {cols}']
    for row in matrix:
        if binary:
            lines.append(' '.join('1' if x else '0' for x in row))
        else:
            lines.append(' '.join(repr(float(x)) for x in row))
    return '\n'.join(lines) + '\n'


def parse_matrix(text, binary=False):
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ChromosomeFormatError('empty matrix file')
    try:
        rows, cols = (int(x) for x in lines[0].split())
    except ValueError as exc:
        raise ChromosomeFormatError(f'bad header line: {lines[0]!r}') from exc
    body = lines[1:]
    if len(body) != rows:
        raise ChromosomeFormatError(f'header says {rows} rows, found {len(body)}')

    dtype = np.uint8 if binary else np.float64
    matrix = np.zeros((rows, cols), dtype=dtype)
    for r, line in enumerate(body):
        values = line.split()
        if len(values) != cols:
            raise ChromosomeFormatError(f'row {r} has {len(values)} values, expected {cols}')
        if binary:
            if any(v not in ('0', '1') for v in values):
                raise ChromosomeFormatError(f'row {r} holds non-binary values')
            matrix[r] = [int(v) for v in values]
        else:
            try:
                matrix[r] = [float(v) for v in values]
            except ValueError as exc:
                raise ChromosomeFormatError(f'row {r}: {exc}') from exc
    return matrix


def write_matrix(path, matrix, binary=False):
    Path(path).write_text(format_matrix(matrix, binary=binary))


def read_matrix(path, binary=False):
    return parse_matrix(Path(path).read_text(), binary=binary)
