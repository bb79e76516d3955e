"""
Tests for parameter loading: settings.LSM, --config files and overrides.
"""
import os
import tempfile
from dataclasses import replace
from pathlib import Path
from unittest.mock import patch

from django.test import SimpleTestCase

from lsm_app.conf import HarnessParams, Parameters, load_parameters, load_values, parameters_from_mapping
from lsm_app.exceptions import ParameterError

from .support import TOY_SETTINGS, toy_parameters, write_config


class LoadParametersTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def test_settings_defaults_match_the_dataclasses(self):
        self.assertEqual(load_parameters(), Parameters())

    def test_overrides(self):
        params = load_parameters(overrides={'N_OPT': 5, 'RATE': '0.5', 'WORKERS': None})
        self.assertEqual(params.evolution.n_opt, 5)
        self.assertEqual(params.evolution.rate, 0.5)
        self.assertEqual(params.harness.workers, 1)

    def test_unknown_override(self):
        with self.assertRaises(ParameterError):
            load_parameters(overrides={'TAU': 3.0})

    def test_invalid_override_value(self):
        with self.assertRaises(ParameterError):
            load_parameters(overrides={'GRID_WIDTH': 'wide'})

    def test_config_file(self):
        """
        TEST: A KEY=value file with one known and one unknown key.

        Objective:
        - The known key is cast to the type of its default.
        - The unknown key is reported with a warning and otherwise ignored.
        """
        path = write_config(self.dir / 'lsm.env', {'TAU_M': 3.5, 'FLAPPY_GAPS': 4})
        with self.assertLogs('lsm_app.conf', 'WARNING') as logs:
            values = load_values(path)
        self.assertEqual(values['TAU_M'], 3.5)
        self.assertIn('FLAPPY_GAPS', logs.output[0])

    def test_file_wins_over_the_environment(self):
        """
        TEST: TAU_M is exported in the environment and set in the config file.

        Objective:
        - The file value is used, not the exported one.
        """
        path = write_config(self.dir / 'lsm.env', {'TAU_M': 3.5})
        with patch.dict(os.environ, {'TAU_M': '9.0'}):
            self.assertEqual(load_values(path)['TAU_M'], 3.5)
            self.assertEqual(load_parameters(path).lif.tau_m, 3.5)

    def test_overrides_win_over_the_file(self):
        path = write_config(self.dir / 'lsm.env', {'N_OPT': 4})
        self.assertEqual(load_parameters(path, {'N_OPT': 3}).evolution.n_opt, 3)

    def test_bad_file_value(self):
        path = write_config(self.dir / 'lsm.env', {'TICKS_PER_STEP': 'often'})
        with self.assertRaises(ParameterError):
            load_values(path)

    def test_toy_file_matches_toy_parameters(self):
        path = write_config(self.dir / 'toy.env', TOY_SETTINGS)
        params = load_parameters(path)
        self.assertEqual(replace(params, harness=HarnessParams()), toy_parameters())
        self.assertEqual(params.harness.seeds, 2)

    def test_cross_field_validation(self):
        values = load_values(overrides={'N_OPT': 200})
        with self.assertRaises(ParameterError):
            parameters_from_mapping(values)
