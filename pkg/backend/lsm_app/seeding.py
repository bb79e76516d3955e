"""Deterministic sub-seeds.

Each unit of work (an offspring evaluation, an agent run, a fresh random
network) owns a generator derived from the master seed and its own position
in the schedule, never from a shared stream. Serial and process-pool runs
therefore draw identical numbers.
"""
import numpy as np

# spawn-key roles
INITIAL = 0
OFFSPRING = 1
FRESH = 2
WIRING = 3
AGENT = 4
ENVIRONMENT = 5
UNEVOLVED = 6
POLICY = 7
QLEARNING = 8


def sub_seed(master_seed, *keys):
    return np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in keys))


def sub_rng(master_seed, *keys):
    """Generator for the work unit identified by `keys` under `master_seed`."""
    return np.random.default_rng(sub_seed(master_seed, *keys))
