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
"""Tests for downfolding.qres.registers."""

from absl.testing import parameterized

from downfolding.qres import registers
from downfolding.utils import test_utils


class CeilLog2Test(parameterized.TestCase):

  @parameterized.parameters((1, 0), (2, 1), (3, 2), (4, 2), (5, 3),
                            (2496, 12), (6816, 13))
  def test_width(self, n, expected):
    self.assertEqual(registers.ceil_log2(n), expected)

  def test_zero_raises(self):
    with self.assertRaises(ValueError):
      registers.ceil_log2(0)


class DimensionsTest(test_utils.TestCase):

  def test_default_amplitude_rank(self):
    dims = registers.Dimensions(n_o=148, n_v=692, n_aux=6816, n_htf=6816)
    self.assertEqual(dims.n_ttf, 692)
    dims = registers.Dimensions(n_o=10, n_v=12, n_aux=30, n_htf=60)
    self.assertEqual(dims.n_ttf, 20)

  def test_non_positive_raises(self):
    with self.assertRaisesRegex(ValueError, 'n_v'):
      registers.Dimensions(n_o=2, n_v=-1, n_aux=3, n_htf=4)

  def test_from_dict(self):
    dims = registers.Dimensions.from_dict({
        'n_o': 2, 'n_v': 3, 'n_aux': 4, 'n_htf': 8, 'ignored': 1
    })
    self.assertEqual(dims, registers.Dimensions(2, 3, 4, 8, 4))
    self.assertEqual(registers.Dimensions.from_dict(dims.as_dict()), dims)

  def test_from_dict_missing_raises(self):
    with self.assertRaisesRegex(ValueError, 'n_aux'):
      registers.Dimensions.from_dict({'n_o': 2, 'n_v': 3, 'n_htf': 8})


class RegisterLayoutTest(test_utils.TestCase):

  def test_beta_carotene_layout(self):
    layout = registers.RegisterLayout.from_dimensions(
        registers.Dimensions(n_o=148, n_v=692, n_aux=6816, n_htf=6816))
    widths = layout.widths()
    self.assertEqual(widths['P'], 13)
    self.assertEqual(widths['S'], 10)
    self.assertEqual(widths['L'], 8)
    self.assertEqual(widths['D'], 10)
    self.assertEqual(widths['X'], 13)
    self.assertEqual(widths[registers.ANCILLA], 1)
    self.assertEqual(widths[registers.DATA], 12)
    self.assertEqual(layout.total_qubits, 144)
    self.assertEqual(layout.as_dict()['total_qubits'], 144)

  def test_live_qubits(self):
    layout = registers.RegisterLayout.from_dimensions(
        registers.Dimensions(n_o=4, n_v=8, n_aux=16, n_htf=32))
    self.assertEqual(layout.live_qubits([]), 13)
    self.assertEqual(layout.live_qubits(['I', 'I', 'A', 'X']), 13 + 2 + 3 + 4)

  def test_unit_dimensions_have_no_index_qubits(self):
    layout = registers.RegisterLayout.from_dimensions(
        registers.Dimensions(1, 1, 1, 1, 1))
    self.assertEqual(layout.total_qubits, 13)

  def test_unknown_register_raises(self):
    layout = registers.RegisterLayout.from_dimensions(
        registers.Dimensions(1, 1, 1, 1, 1))
    with self.assertRaises(KeyError):
      layout['Z']


if __name__ == '__main__':
  test_utils.main()
