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
"""Tests for downfolding.qres.estimator."""

from absl.testing import parameterized
import gin

from downfolding.qres import estimator
from downfolding.qres import registers
from downfolding.utils import test_utils

_DIMS = registers.Dimensions(n_o=50, n_v=120, n_aux=1094, n_htf=2000,
                             n_ttf=300)
_UNIT_DIMS = registers.Dimensions(1, 1, 1, 1, 1)


class EstimateExpressionTest(test_utils.TestCase, parameterized.TestCase):

  def test_singles_fock_term(self):
    self.assertEqual(estimator.estimate_expression(1, _DIMS, 1e-3), 1000)

  def test_cholesky_term(self):
    self.assertEqual(estimator.estimate_expression(2, _DIMS, 1e-3), 91601000)

  def test_widest_term_polynomial(self):
    o, v, a, h, t = 50, 120, 1094, 2000, 300
    expected = (2 * a * h + 2 * o * h + v * h + h + 4 * o * t + 2 * v * t)
    self.assertEqual(estimator.expression(11).polynomial(_DIMS), expected)

  @parameterized.parameters(*range(1, 12))
  def test_unit_log_factor(self, expr_id):
    self.assertEqual(
        estimator.estimate_expression(expr_id, _DIMS, 0.5),
        2 * estimator.expression(expr_id).polynomial(_DIMS))

  def test_unknown_expression_raises(self):
    with self.assertRaises(estimator.UnknownExpressionError):
      estimator.estimate_expression(12, _DIMS, 1e-3)

  @parameterized.parameters((0.5, 1), (0.25, 2), (1e-2, 7), (1e-3, 10),
                            (1e-5, 17))
  def test_log_factor(self, epsilon, expected):
    self.assertEqual(estimator.log_factor(epsilon), expected)

  @parameterized.parameters(0.0, 1.0, -0.1)
  def test_bad_epsilon_raises(self, epsilon):
    with self.assertRaises(ValueError):
      estimator.log_factor(epsilon)

  @parameterized.parameters(1e-2, 1e-3, 1e-5)
  def test_diophantine_cheaper(self, epsilon):
    for expr_id in range(1, 12):
      self.assertLess(
          estimator.estimate_expression(expr_id, _DIMS, epsilon,
                                        estimator.CostModel.DIOPHANTINE),
          estimator.estimate_expression(expr_id, _DIMS, epsilon,
                                        estimator.CostModel.SOLOVAY_KITAEV))

  def test_models_differ_by_a_constant_ratio(self):
    unit = estimator.rotation_depth(1e-3, 'solovay_kitaev')
    for expr_id in (2, 7, 11):
      self.assertEqual(
          estimator.estimate_expression(expr_id, _DIMS, 1e-3,
                                        'solovay_kitaev'),
          unit * estimator.estimate_expression(expr_id, _DIMS, 0.5))


class EstimateTotalTest(test_utils.TestCase):

  def test_totals_are_sums(self):
    estimate = estimator.estimate_total(_DIMS)
    self.assertLen(estimate.breakdown, 11)
    self.assertEqual(estimate.t_depth,
                     sum(e.t_depth for e in estimate.breakdown))
    self.assertEqual(estimate.cnot_depth,
                     sum(e.cnot_depth for e in estimate.breakdown))

  def test_max_aggregation(self):
    estimate = estimator.estimate_total(
        _DIMS, estimator.EstimatorConfig(aggregation='max'))
    self.assertEqual(estimate.t_depth,
                     max(e.t_depth for e in estimate.breakdown))

  def test_unit_dimensions(self):
    estimate = estimator.estimate_total(
        _UNIT_DIMS, estimator.EstimatorConfig(epsilon=0.5))
    self.assertEqual(estimate.qubits, 13)
    encoders = sum(len(e.loads) for e in estimator.EXPRESSIONS)
    self.assertEqual(estimate.t_depth, 2 * encoders)

  def test_widest_expression(self):
    estimate = estimator.estimate_total(_DIMS)
    self.assertEqual(estimate.widest, 'E11')
    layout = registers.RegisterLayout.from_dimensions(_DIMS)
    self.assertEqual(estimate.qubits, layout.total_qubits)
    self.assertEqual(estimate.live_qubits,
                     layout.live_qubits(estimator.expression(11).registers))
    deltas = estimate.register_deltas()
    self.assertEqual(sum(deltas.values()),
                     estimate.qubits - estimate.live_qubits)
    self.assertNotIn(registers.DATA, deltas)
    for name in estimator.expression(11).registers:
      self.assertNotIn(name, deltas)

  def test_report(self):
    report = estimator.estimate_total(_DIMS).as_dict()
    self.assertEqual(report['cost_model'], 'diophantine')
    self.assertEqual(report['aggregation'], 'sum')
    self.assertLen(report['expressions'], 11)
    self.assertIn('X', report['registers'])

  def test_gin_bindings(self):
    gin.parse_config(
        ["EstimatorConfig.cost_model = 'solovay_kitaev'",
         'EstimatorConfig.epsilon = 0.01'])
    config = estimator.EstimatorConfig()
    self.assertIs(config.cost_model, estimator.CostModel.SOLOVAY_KITAEV)
    self.assertEqual(config.epsilon, 0.01)

  def test_bad_config_raises(self):
    with self.assertRaises(ValueError):
      estimator.EstimatorConfig(cost_model='exact')
    with self.assertRaises(ValueError):
      estimator.EstimatorConfig(epsilon=2.0)


class PublishedComparisonTest(test_utils.TestCase, parameterized.TestCase):

  @parameterized.parameters(('beta_carotene', 144, 124, 117),
                            ('retinol', 137, 117, 108))
  def test_qubits(self, name, layout, live, published):
    comparison = estimator.compare_to_published(name)
    report = comparison['estimate']
    self.assertEqual(report['qubits'], layout)
    self.assertEqual(report['live_qubits'], live)
    self.assertEqual(sum(report['register_deltas'].values()), layout - live)
    self.assertEqual(comparison['qubit_delta'], layout - published)
    self.assertAllClose(comparison['qubit_ratio'], layout / published)

  @parameterized.parameters('beta_carotene', 'retinol')
  def test_depth_within_factor_four(self, name):
    comparison = estimator.compare_to_published(
        name, estimator.EstimatorConfig(epsilon=1e-2, aggregation='max'))
    self.assertEqual(comparison['published_reference']['depth'],
                     estimator.PUBLISHED_ROWS[name].depths[0][1])
    self.assertBetween(comparison['depth_ratio'], 0.25, 4.0)
    self.assertLen(comparison['expression_depth_ratios'], 11)

  def test_retinol_reference_block(self):
    comparison = estimator.compare_to_published('retinol')
    self.assertEqual(comparison['published_reference']['qubits'], 108)
    self.assertEqual(comparison['dimensions']['n_htf'], 2496)

  def test_unlisted_precision_has_no_ratio(self):
    comparison = estimator.compare_to_published(
        'c60', estimator.EstimatorConfig(epsilon=0.5))
    self.assertIsNone(comparison['depth_ratio'])

  def test_own_dimensions(self):
    comparison = estimator.compare_to_published('retinol', dims=_UNIT_DIMS)
    self.assertEqual(comparison['estimate']['qubits'], 13)
    self.assertEqual(comparison['qubit_ratio'], 13 / 108)
    self.assertEqual(comparison['dimensions'], _UNIT_DIMS.as_dict())

  def test_unknown_row_raises(self):
    with self.assertRaises(KeyError):
      estimator.compare_to_published('benzene')


if __name__ == '__main__':
  test_utils.main()
