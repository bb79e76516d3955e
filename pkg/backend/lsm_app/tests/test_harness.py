"""
Tests for experiment orchestration: policy, agent runs, the population
reward, ablations and the Q-learning comparison.

Runs at laptop scale (ablation ordering, baseline comparison, reversal
learning, learning against a frozen readout, parameter accounting) only
execute with LSM_ACCEPTANCE=1.
"""
import os
import unittest
from unittest.mock import patch

import numpy as np
from django.test import SimpleTestCase

from lsm_app.conf import Parameters
from lsm_app.environments import RewardSignal, TMazeParams, TMazeTask, make_task
from lsm_app.exceptions import ConfigurationError, EmptyPopulationError, ParameterError
from lsm_app.harness import (
    ABLATION_ROWS, EVOLVED, UNEVOLVED, ExperimentConfig, RunRecord, StepLog, build_network,
    count_parameters, default_cells, evolve_liquids, lsm_policy, population_reward, reversal_report,
    reward_timeseries, run_ablation, run_agent, run_baseline, run_population,
)
from lsm_app.network import LiquidNetwork
from lsm_app.plasticity import DA_BCM, NONE, STDP, PlasticityParams
from lsm_app.snn import LifParams

from .support import toy_parameters

ACCEPTANCE = os.environ.get('LSM_ACCEPTANCE') == '1'


def _record(rewards, individual=0):
    return RunRecord(individual=individual, rewards=np.array(rewards, dtype=np.float64))


class ZeroRewardTask(TMazeTask):
    def step(self, world, action):
        return super().step(world, action)._replace(reward=RewardSignal(0.0))


# ===============================================================
# Policy and metric
# ===============================================================
class LsmPolicyTests(SimpleTestCase):
    """Argmax over readout spike counts with uniform tie-breaking."""

    def test_strict_argmax(self):
        self.assertEqual(lsm_policy(np.array([5, 2, 1]), np.random.default_rng(0)), 0)

    def test_full_tie(self):
        rng = np.random.default_rng(0)
        self.assertEqual({lsm_policy(np.zeros(3), rng) for _ in range(200)}, {0, 1, 2})

    def test_partial_tie_is_fair(self):
        """
        TEST: counts (3, 3, 1) over 10000 seeded draws.

        Objective:
        - Action 2 is never picked; actions 0 and 1 split evenly within 4 sigma.
        """
        rng = np.random.default_rng(12)
        picks = np.bincount([lsm_policy(np.array([3, 3, 1]), rng) for _ in range(10000)], minlength=3)
        self.assertEqual(picks[2], 0)
        self.assertLess(abs(picks[0] - 5000), 4 * 50)


class PopulationRewardTests(SimpleTestCase):

    def test_mean_cumulative_reward(self):
        self.assertEqual(population_reward([_record([1, 2]), _record([3, 4])]), 5.0)
        self.assertEqual(population_reward([_record([0, 0, 0])]), 0.0)
        self.assertEqual(population_reward([_record([-1, 3, 6])]), 8.0)

    def test_empty_population(self):
        with self.assertRaises(EmptyPopulationError):
            population_reward([])

    def test_timeseries(self):
        raw, smoothed = reward_timeseries([_record([1, 2]), _record([3, 4])], sigma=0)
        np.testing.assert_array_equal(raw, [2.0, 5.0])
        np.testing.assert_array_equal(smoothed, raw)
        raw, smoothed = reward_timeseries([_record(np.ones(50))], sigma=3.0)
        self.assertEqual(smoothed.shape, (50,))
        self.assertAlmostEqual(smoothed[25], raw[25], places=6)

    def test_timeseries_needs_equal_lengths(self):
        with self.assertRaises(ConfigurationError):
            reward_timeseries([_record([1]), _record([1, 2])], sigma=1.0)

    def test_reversal_report(self):
        rows = [
            StepLog(0, 0, 'a', 0, 3.0, 3.0, 'food'),
            StepLog(1, 1, 'a', 0, -3.0, 0.0, 'poison'),
            StepLog(2, 2, 'a', 0, 3.0, 3.0, 'food'),
            StepLog(3, 3, 'a', 0, -1.0, 2.0, ''),
        ]
        record = RunRecord(individual=0, rewards=np.array([r.da for r in rows]), rows=rows, reversals=[0])
        self.assertEqual(reversal_report(record, window=20), [(0, 1, 2)])


class ExperimentConfigTests(SimpleTestCase):

    def test_validation(self):
        with self.assertRaises(ConfigurationError):
            ExperimentConfig(task='tmaze', readout_rule=NONE)
        with self.assertRaises(ConfigurationError):
            ExperimentConfig(task='tmaze', structure='random')
        with self.assertRaises(ParameterError):
            ExperimentConfig(task='flappy', horizon=0)

    def test_default_matrix(self):
        cells = default_cells('flappy', 2000, 20)
        self.assertEqual([(c.structure, c.liquid_rule, c.readout_rule) for c in cells], list(ABLATION_ROWS))
        self.assertTrue(all(c.horizon == 2000 for c in cells))


class CountParametersTests(SimpleTestCase):

    def test_empty_network_counts_input_edges(self):
        network = LiquidNetwork(
            liquid=np.zeros((5, 5)), readout=np.zeros((5, 2)), input_projection=np.eye(1, 5) * 4.0,
            lif=LifParams(), plasticity=PlasticityParams(),
        )
        self.assertEqual(count_parameters(network), 1)

    def test_counts_every_nonzero_weight(self):
        params = toy_parameters()
        task = TMazeTask(params.tmaze)
        network = build_network(ExperimentConfig(task='tmaze', structure=UNEVOLVED), params, task)
        expected = sum(
            int((matrix != 0).sum())
            for matrix in (network.liquid, network.readout, network.input_projection)
        )
        self.assertEqual(count_parameters(network), expected)


# ===============================================================
# Agent runs
# ===============================================================
class RunAgentTests(SimpleTestCase):
    """Single agents at toy scale."""

    def setUp(self):
        self.params = toy_parameters()
        self.config = ExperimentConfig(task='tmaze', structure=UNEVOLVED, horizon=60, n_opt=2, seed=3)

    def test_logs_exactly_horizon_steps(self):
        record = run_agent(self.config, self.params)
        self.assertEqual(len(record.rows), 60)
        self.assertEqual(record.rewards.shape, (60,))
        self.assertEqual([row.step for row in record.rows], list(range(60)))

    def test_metric_is_recomputable_from_the_log(self):
        record = run_agent(self.config, self.params)
        self.assertEqual(record.recomputed_reward(), record.cumulative)
        self.assertAlmostEqual(record.rows[-1].cumulative, record.cumulative, places=9)
        self.assertEqual(population_reward([record]), record.cumulative)

    def test_episode_accounting(self):
        record = run_agent(self.config, self.params)
        ends = [row.episode_end for row in record.rows if row.episode_end]
        self.assertEqual(len(ends), sum(ends.count(reason) for reason in ('food', 'poison', 'timeout')))
        self.assertEqual(record.rows[-1].episode, len(ends) - (1 if record.rows[-1].episode_end else 0))

    def test_frozen_liquid(self):
        config = ExperimentConfig(
            task='tmaze', structure=UNEVOLVED, liquid_rule=NONE, readout_rule=DA_BCM, horizon=40, seed=3,
        )
        before = build_network(config, self.params, TMazeTask(self.params.tmaze)).liquid
        record = run_agent(config, self.params)
        np.testing.assert_array_equal(record.network.liquid, before)

    def test_zero_reward_leaves_readout_untouched(self):
        """
        TEST: DA-BCM readout while every step pays 0.

        Objective:
        - The dopamine gate closes every update, so readout weights are unchanged.
        """
        task = ZeroRewardTask(self.params.tmaze)
        before = build_network(self.config, self.params, task).readout
        with patch('lsm_app.harness.make_task', return_value=task):
            record = run_agent(self.config, self.params)
        self.assertFalse(record.rewards.any())
        np.testing.assert_array_equal(record.network.readout, before)

    def test_deterministic(self):
        first = run_agent(self.config, self.params)
        second = run_agent(self.config, self.params)
        np.testing.assert_array_equal(first.rewards, second.rewards)
        self.assertEqual(first.rows, second.rows)

    def test_flappy_agent(self):
        config = ExperimentConfig(task='flappy', structure=UNEVOLVED, horizon=50, seed=1)
        record = run_agent(config, self.params)
        self.assertEqual(len(record.rows), 50)
        self.assertTrue(set(record.rewards.tolist()) <= {6.0, 3.0, -3.0, -5.0, -8.0, -100.0})

    def test_structure_and_chromosome_must_agree(self):
        task = make_task('tmaze', self.params.tmaze)
        survivors, _, projection = evolve_liquids(task, self.params, seed=0)
        evolved = ExperimentConfig(task='tmaze', structure=EVOLVED, horizon=10)
        with self.assertRaises(ConfigurationError):
            run_agent(evolved, self.params)
        with self.assertRaises(ConfigurationError):
            run_agent(self.config, self.params, chromosome=survivors[0].chromosome)
        record = run_agent(evolved, self.params, survivors[0].chromosome, projection)
        self.assertEqual(len(record.rows), 10)


class PopulationTests(SimpleTestCase):

    def setUp(self):
        self.params = toy_parameters()
        task = make_task('tmaze', self.params.tmaze)
        survivors, _, self.projection = evolve_liquids(task, self.params, seed=4)
        self.chromosomes = [ind.chromosome for ind in survivors]
        self.config = ExperimentConfig(task='tmaze', horizon=25, n_opt=2, seed=4)

    def test_process_pool_matches_serial_run(self):
        serial = run_population(self.config, self.params, self.chromosomes, self.projection)
        pooled = run_population(self.config, self.params, self.chromosomes, self.projection, workers=2)
        for a, b in zip(serial, pooled):
            np.testing.assert_array_equal(a.rewards, b.rewards)
            self.assertEqual(a.rows, b.rows)

    def test_too_few_survivors(self):
        with self.assertRaises(ConfigurationError):
            run_population(self.config, self.params, self.chromosomes[:1], self.projection)

    def test_unevolved_population_is_fresh_every_individual(self):
        config = ExperimentConfig(task='tmaze', structure=UNEVOLVED, horizon=5, n_opt=2, seed=4)
        records = run_population(config, self.params)
        self.assertEqual([r.individual for r in records], [0, 1])
        self.assertFalse(np.array_equal(records[0].network.liquid, records[1].network.liquid)
                         and np.array_equal(records[0].network.readout, records[1].network.readout))


class AblationTests(SimpleTestCase):

    def test_one_run_per_cell_and_seed(self):
        """
        TEST: Two cells over two seeds at toy scale.

        Objective:
        - One run per (cell, seed) and one summary row per cell.
        - Summary mean and population std recompute from the runs.
        """
        params = toy_parameters()
        cells = [
            ExperimentConfig(task='tmaze', structure=UNEVOLVED, horizon=20, n_opt=2),
            ExperimentConfig(task='tmaze', structure=EVOLVED, liquid_rule=STDP, horizon=20, n_opt=2),
        ]
        runs, summary = run_ablation(cells, [0, 1], params)
        self.assertEqual(len(runs), 4)
        self.assertEqual([row.cell for row in summary], cells)
        for row in summary:
            values = np.array([run.reward for run in runs if run.cell == row.cell])
            self.assertAlmostEqual(row.mean, values.mean(), delta=1e-12)
            self.assertAlmostEqual(row.std, values.std(), delta=1e-12)
            self.assertEqual(row.runs, 2)

    def test_survivors_are_reused(self):
        params = toy_parameters()
        task = make_task('tmaze', params.tmaze)
        survivors, _, projection = evolve_liquids(task, params, seed=0)
        cells = [ExperimentConfig(task='tmaze', horizon=10, n_opt=2)]
        with patch('lsm_app.harness.evolve_liquids') as evolve_mock:
            runs, _ = run_ablation(
                cells, [0, 1], params, survivors={'tmaze': ([s.chromosome for s in survivors], projection)},
            )
        evolve_mock.assert_not_called()
        self.assertEqual(len(runs), 2)

    def test_empty_matrix(self):
        with self.assertRaises(ConfigurationError):
            run_ablation([], [0], toy_parameters())


class BaselineTests(SimpleTestCase):

    def test_baseline_records(self):
        results = run_baseline('tmaze', toy_parameters(), [0, 1], n_runs=3, horizon=40)
        self.assertEqual(sorted(results), [0, 1])
        self.assertEqual([len(r.rewards) for r in results[0]], [40, 40, 40])
        self.assertEqual(results[0][0].parameters, 84)
        again = run_baseline('tmaze', toy_parameters(), [0], n_runs=3, horizon=40)
        self.assertEqual(population_reward(again[0]), population_reward(results[0]))


# ===============================================================
# Laptop-scale acceptance runs
# ===============================================================
@unittest.skipUnless(ACCEPTANCE, 'set LSM_ACCEPTANCE=1 to run laptop-scale experiments')
class AcceptanceTests(SimpleTestCase):
    """Orderings and magnitudes with the default parameters over ten seeds."""

    seeds = range(10)

    def _ablation(self, task):
        params = Parameters()
        cells = default_cells(task, params.horizon(task), params.evolution.n_opt)
        _, summary = run_ablation(cells, self.seeds, params, workers=os.cpu_count() or 1)
        return {(row.cell.structure, row.cell.liquid_rule, row.cell.readout_rule): row for row in summary}

    def _assert_ordering(self, summary):
        order = [summary[row] for row in reversed(ABLATION_ROWS)]
        means = [row.mean for row in order]
        self.assertEqual(means, sorted(means, reverse=True))
        self.assertGreater(order[0].mean - order[-1].mean, 5 * order[0].std)

    def test_tmaze_ablation_ordering(self):
        summary = self._ablation('tmaze')
        self._assert_ordering(summary)
        stdp = summary[EVOLVED, STDP, STDP]
        self.assertLessEqual(abs(stdp.mean), 3 * max(stdp.std, 1e-9))

    def test_flappy_ablation_ordering(self):
        summary = self._ablation('flappy')
        self._assert_ordering(summary)
        self.assertLess(summary[EVOLVED, STDP, STDP].mean, 0)

    def test_beats_q_learning(self):
        params = Parameters()
        for task_name in ('tmaze', 'flappy'):
            horizon = params.horizon(task_name)
            baseline = run_baseline(task_name, params, self.seeds, params.evolution.n_opt, horizon)
            q_mean = np.mean([population_reward(records) for records in baseline.values()])
            cell = ExperimentConfig(task=task_name, horizon=horizon, n_opt=params.evolution.n_opt)
            _, summary = run_ablation([cell], self.seeds, params, workers=os.cpu_count() or 1)
            self.assertGreater(summary[0].mean, q_mean)

    def test_tmaze_learning_beats_a_frozen_readout(self):
        """
        TEST: Unevolved none/DA-BCM agents against the same agents with learning switched off.

        Objective:
        - Over ten seeds the learning agents collect more reward.
        """
        params = Parameters()
        configs = [
            ExperimentConfig(task='tmaze', structure=UNEVOLVED, liquid_rule=NONE, n_opt=params.evolution.n_opt, seed=s)
            for s in self.seeds
        ]
        learned = [population_reward(run_population(config, params)) for config in configs]
        with patch.object(LiquidNetwork, 'learn', autospec=True):
            frozen = [population_reward(run_population(config, params)) for config in configs]
        self.assertGreater(np.mean(learned), np.mean(frozen))

    def test_reversal_learning(self):
        params = Parameters()
        task = make_task('tmaze', params.tmaze)
        passed = 0
        for seed in self.seeds:
            survivors, _, projection = evolve_liquids(task, params, seed, workers=os.cpu_count() or 1)
            config = ExperimentConfig(task='tmaze', horizon=params.tmaze.horizon, seed=seed)
            record = run_agent(config, params, survivors[0].chromosome, projection)
            passed += all(visits <= 3 for _, visits, _ in reversal_report(record))
        self.assertGreaterEqual(passed, 8)

    def test_parameter_accounting(self):
        params = Parameters()
        task = make_task('tmaze', params.tmaze)
        survivors, _, projection = evolve_liquids(task, params, seed=0, workers=os.cpu_count() or 1)
        config = ExperimentConfig(task='tmaze', seed=0)
        for individual, survivor in enumerate(survivors):
            self.assertLessEqual(survivor.chromosome.density, 0.02)
            network = build_network(config, params, task, survivor.chromosome, projection, individual)
            self.assertTrue(50 <= count_parameters(network) <= 500)


class TMazeParamsDefaultsTests(SimpleTestCase):

    def test_horizons(self):
        params = Parameters()
        self.assertEqual(params.horizon('tmaze'), 500)
        self.assertEqual(params.horizon('flappy'), 2000)
        self.assertEqual(TMazeParams().energy, 30)
