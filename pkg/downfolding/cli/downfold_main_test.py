# coding=utf-8
# Copyright 2024 The Downfolding Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Tests for downfolding.cli.downfold_main."""

import io
import json
import os
from unittest import mock

from absl.testing import flagsaver

from downfolding.cli import config as config_lib
from downfolding.cli import downfold_main
from downfolding.cli import run_lib
from downfolding.rhd import solver
from downfolding.utils import fixtures
from downfolding.utils import test_utils


def _execute(command):
  with mock.patch('sys.stdout', new_callable=io.StringIO) as stdout:
    code = downfold_main.execute(command)
  return code, json.loads(stdout.getvalue())


class DownfoldMainTest(test_utils.TestCase):

  def test_run_h2(self):
    out = self.create_tempdir().full_path
    with flagsaver.flagsaver(
        fcidump=fixtures.testdata_path(fixtures.H2_STO3G), out=out,
        tol=1e-10):
      code, payload = _execute('run')
    self.assertEqual(code, 0)
    self.assertAllClose(payload['total_energy'], -1.137285, atol=2e-6)
    self.assertTrue(os.path.isfile(os.path.join(out, run_lib.SUMMARY_FILE)))

  def test_missing_input(self):
    missing = os.path.join(self.create_tempdir().full_path, 'absent.fcidump')
    with flagsaver.flagsaver(fcidump=missing):
      code, payload = _execute('run')
    self.assertEqual(code, 2)
    self.assertEqual(payload['error']['type'], 'InputNotFoundError')
    self.assertIn('input not found', payload['error']['message'])

  def test_config_file_and_flags(self):
    path = self.create_tempfile(
        content='tol = 1e-6\nseed = 4\nmode = factorized\n').full_path
    with flagsaver.flagsaver(config_file=path, tol=1e-9, dense_only=True):
      run_config = downfold_main.build_run_config()
    self.assertEqual(run_config.tol, 1e-9)
    self.assertEqual(run_config.seed, 4)
    self.assertEqual(run_config.mode, 'dense')

  def test_rank_mult_flag(self):
    with flagsaver.flagsaver(rank_mult=3.0, factorized=True):
      run_config = downfold_main.build_run_config()
    self.assertEqual(run_config.htf_mult, 3.0)
    self.assertEqual(run_config.mode, 'factorized')

  def test_contradicting_mode_flags(self):
    with flagsaver.flagsaver(dense_only=True, factorized=True):
      code, payload = _execute('run')
    self.assertEqual(code, 2)
    self.assertEqual(payload['error']['type'], 'UsageError')

  def test_every_override_names_a_config_field(self):
    defaults = config_lib.RunConfig()
    for holder, field in downfold_main._OVERRIDES:
      self.assertTrue(hasattr(defaults, field), msg=holder.name)

  def test_odd_electron_count_is_an_input_error(self):
    path = self.create_tempfile(
        content='&FCI NORB=2,NELEC=3,MS2=0 &END\n 0.1 1 1 0 0\n').full_path
    with flagsaver.flagsaver(fcidump=path):
      code, payload = _execute('run')
    self.assertEqual(code, 2)
    self.assertEqual(payload['error']['type'], 'FcidumpFormatError')

  def test_rejected_gin_binding(self):
    with flagsaver.flagsaver(
        fcidump=fixtures.testdata_path(fixtures.H2_STO3G),
        gin_bindings=['SolverConfig.diis_vectors = -1']):
      code, payload = _execute('run')
    self.assertEqual(code, 2)
    self.assertEqual(payload['error']['type'], 'ConfigError')
    self.assertIn('diis_vectors', payload['error']['message'])

  def test_unknown_gin_configurable(self):
    with flagsaver.flagsaver(gin_bindings=['NoSuchThing.value = 1']):
      code, payload = _execute('verify')
    self.assertEqual(code, 2)
    self.assertEqual(payload['error']['type'], 'ConfigError')

  def test_bad_config_value(self):
    with flagsaver.flagsaver(tol=-1.0):
      code, payload = _execute('verify')
    self.assertEqual(code, 2)
    self.assertEqual(payload['error']['type'], 'ConfigError')

  def test_verify_blockenc(self):
    with flagsaver.flagsaver(suite='blockenc', seed=1, size=4):
      code, payload = _execute('verify')
    self.assertEqual(code, 0)
    self.assertTrue(payload['passed'])

  def test_verify_oracle(self):
    with flagsaver.flagsaver(suite='oracle', seed=0, size=2):
      code, payload = _execute('verify')
    self.assertEqual(code, 0)
    self.assertEqual(payload['size'], 2)

  def test_unknown_suite(self):
    with flagsaver.flagsaver(suite='everything'):
      code, payload = _execute('verify')
    self.assertEqual(code, 2)
    self.assertEqual(payload['error']['type'], 'UnknownSuiteError')

  def test_estimate_published_row(self):
    with flagsaver.flagsaver(published_row='retinol'):
      code, payload = _execute('estimate')
    self.assertEqual(code, 0)
    self.assertEqual(payload['published_reference']['qubits'], 108)

  def test_estimate_dims_from_run(self):
    out = self.create_tempdir().full_path
    with flagsaver.flagsaver(
        fcidump=fixtures.testdata_path(fixtures.H2_STO3G), out=out):
      self.assertEqual(_execute('run')[0], 0)
    with flagsaver.flagsaver(dims_from=out, model='solovay_kitaev'):
      code, payload = _execute('estimate')
    self.assertEqual(code, 0)
    self.assertEqual(payload['dimensions']['n_o'], 1)
    self.assertEqual(payload['cost_model'], 'solovay_kitaev')

  def test_estimate_without_dims(self):
    code, payload = _execute('estimate')
    self.assertEqual(code, 2)
    self.assertEqual(payload['error']['type'], 'MissingDimensionsError')

  def test_numerical_failure(self):
    error = solver.SolverDivergenceError(
        'Residual diverged.',
        solver.StepDiagnostics(orbital=3, iterations=7, residual_norm=1e9))
    with mock.patch.object(run_lib, 'cmd_run', side_effect=error):
      with mock.patch.dict(downfold_main.COMMANDS, {'run': run_lib.cmd_run}):
        code, payload = _execute('run')
    self.assertEqual(code, 1)
    self.assertEqual(payload['error']['orbital'], 3)
    self.assertEqual(payload['error']['iterations'], 7)

  def test_unknown_command(self):
    code, payload = _execute('plot')
    self.assertEqual(code, 2)
    self.assertIn('plot', payload['error']['message'])

  def test_main_needs_a_command(self):
    with mock.patch('sys.stdout', new_callable=io.StringIO):
      self.assertEqual(downfold_main.main(['downfold']), 2)


if __name__ == '__main__':
  test_utils.main()
