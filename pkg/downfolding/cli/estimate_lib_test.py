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
"""Tests for downfolding.cli.estimate_lib."""

import json
import os

from downfolding.cli import estimate_lib
from downfolding.cli import run_lib
from downfolding.qres import estimator
from downfolding.qres import registers
from downfolding.utils import test_utils

_DIMS = {'n_o': 4, 'n_v': 10, 'n_aux': 40, 'n_htf': 80, 'n_ttf': 20}


class DimsTest(test_utils.TestCase):

  def _run_dir(self, summary):
    directory = self.create_tempdir().full_path
    with open(os.path.join(directory, run_lib.SUMMARY_FILE), 'w') as f:
      json.dump(summary, f)
    return directory

  def test_from_run(self):
    dims = estimate_lib.dims_from_run(self._run_dir({'dimensions': _DIMS}))
    self.assertEqual(dims, registers.Dimensions(**_DIMS))

  def test_run_without_dimensions(self):
    with self.assertRaises(estimate_lib.MissingDimensionsError):
      estimate_lib.dims_from_run(self._run_dir({'total_energy': -1.0}))

  def test_run_without_summary(self):
    with self.assertRaisesRegex(run_lib.InputNotFoundError,
                                'input not found'):
      estimate_lib.dims_from_run(self.create_tempdir().full_path)

  def test_from_values_defaults_ttf_rank(self):
    dims = estimate_lib.dims_from_values(
        {'n_o': 3, 'n_v': 5, 'n_aux': 9, 'n_htf': 18, 'n_ttf': None})
    self.assertEqual(dims.n_ttf, 6)

  def test_from_values_missing(self):
    with self.assertRaises(estimate_lib.MissingDimensionsError):
      estimate_lib.dims_from_values({'n_o': 3, 'n_v': None})

  def test_matching_row(self):
    dims = registers.Dimensions(n_o=79, n_v=992, n_aux=2496, n_htf=2496)
    self.assertEqual(estimate_lib.matching_row(dims), 'retinol')
    self.assertIsNone(
        estimate_lib.matching_row(registers.Dimensions(**_DIMS)))


class CmdEstimateTest(test_utils.TestCase):

  def test_plain_dims(self):
    dims = registers.Dimensions(**_DIMS)
    payload = estimate_lib.cmd_estimate(dims, estimator.EstimatorConfig())
    expected = estimator.estimate_total(dims)
    self.assertEqual(payload['qubits'], expected.qubits)
    self.assertEqual(payload['live_qubits'], expected.live_qubits)
    self.assertEqual(payload['register_deltas'], expected.register_deltas())
    self.assertEqual(payload['t_depth'], expected.t_depth)
    self.assertEqual(payload['dimensions'], _DIMS)
    self.assertNotIn('published_reference', payload)

  def test_retinol_dims_add_reference(self):
    dims = registers.Dimensions(n_o=79, n_v=992, n_aux=2496, n_htf=2496)
    payload = estimate_lib.cmd_estimate(dims, estimator.EstimatorConfig())
    self.assertEqual(payload['published_reference']['qubits'], 108)
    self.assertEqual(payload['published_reference']['name'], 'retinol')
    self.assertAllClose(payload['qubit_ratio'], payload['qubits'] / 108)
    self.assertLen(payload['expression_depth_ratios'], 11)

  def test_row_only(self):
    payload = estimate_lib.cmd_estimate(
        None, estimator.EstimatorConfig(epsilon=1e-2, aggregation='max'),
        'beta_carotene')
    self.assertEqual(payload['dimensions']['n_aux'], 6816)
    self.assertEqual(payload['published_reference']['depth'], 6.71e8)
    self.assertBetween(payload['depth_ratio'], 0.25, 4.0)

  def test_nothing_to_estimate(self):
    with self.assertRaises(estimate_lib.MissingDimensionsError):
      estimate_lib.cmd_estimate(None, estimator.EstimatorConfig())

  def test_unknown_row(self):
    with self.assertRaises(KeyError):
      estimate_lib.cmd_estimate(None, estimator.EstimatorConfig(), 'benzene')


if __name__ == '__main__':
  test_utils.main()
