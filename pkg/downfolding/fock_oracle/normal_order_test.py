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
"""Tests for downfolding.fock_oracle.normal_order."""

import numpy as np

from downfolding.fock_oracle import fock_space
from downfolding.fock_oracle import normal_order
from downfolding.fock_oracle import oracle_lib
from downfolding.utils import fixtures
from downfolding.utils import test_utils

NormalOrderedOperator = normal_order.NormalOrderedOperator


class CanonicalKeyTest(test_utils.TestCase):

  def test_sign(self):
    self.assertEqual(
        normal_order.canonical_key([1, 0], [2, 3]), (1, ((0, 1), (2, 3))))
    self.assertEqual(
        normal_order.canonical_key([0, 1], [2, 3]), (-1, ((0, 1), (2, 3))))
    self.assertEqual(normal_order.canonical_key([1, 1], [0, 2])[0], 0)

  def test_key_ops(self):
    self.assertEqual(
        normal_order.key_ops(((0, 1), (2, 3))),
        ((True, 0), (True, 1), (False, 3), (False, 2)))


class NormalOrderTest(test_utils.TestCase):

  def test_contraction(self):
    op = NormalOrderedOperator.from_string(((False, 0), (True, 0)))
    self.assertEqual(op.terms, {((), ()): 1.0, ((0,), (0,)): -1.0})

  def test_distinct_modes_anticommute(self):
    op = NormalOrderedOperator.from_string(((False, 0), (True, 1)), 3.0)
    self.assertEqual(op.coefficient([1], [0]), -3.0)
    self.assertLen(op, 1)

  def test_pauli(self):
    op = NormalOrderedOperator.from_string(((True, 2), (True, 2)))
    self.assertEmpty(op.terms)

  def test_coefficient_in_written_order(self):
    op = NormalOrderedOperator.from_string(
        ((True, 0), (True, 1), (False, 3), (False, 2)), 2.0)
    self.assertEqual(op.coefficient([0, 1], [3, 2]), 2.0)
    self.assertEqual(op.coefficient([1, 0], [3, 2]), -2.0)
    self.assertEqual(op.coefficient([0, 1], [2, 3]), -2.0)
    self.assertEqual(op.max_rank(), 2)

  def test_without_annihilators(self):
    op = (NormalOrderedOperator.number(0) + NormalOrderedOperator.number(1) +
          NormalOrderedOperator.identity())
    kept = op.without_annihilators([1])
    self.assertEqual(set(kept.terms), {((), ()), ((0,), (0,))})

  def test_number_is_idempotent(self):
    number = NormalOrderedOperator.number(3)
    self.assertEqual((number @ number).terms, number.terms)


class FockSpaceAgreementTest(test_utils.TestCase):

  def test_hamiltonian(self):
    system = fixtures.random_system(3, seed=2)
    engine = oracle_lib.to_fock(
        normal_order.hamiltonian(system.h1, system.h2), 3)
    dense = fock_space.build_hamiltonian(system.h1, system.h2)
    self.assertAllClose(engine.matrix, dense.matrix, atol=1e-12)

  def test_product(self):
    system = fixtures.random_system(2, seed=3)
    left = normal_order.hamiltonian(system.h1, system.h2)
    right = (NormalOrderedOperator.from_string(((True, 2), (False, 0)), 0.3) +
             NormalOrderedOperator.from_string(
                 ((True, 2), (True, 3), (False, 1), (False, 0)), -0.7) +
             NormalOrderedOperator.number(1))
    product = oracle_lib.to_fock(left @ right, 2).matrix
    expected = (oracle_lib.to_fock(left, 2).matrix @
                oracle_lib.to_fock(right, 2).matrix)
    self.assertAllClose(product, expected, atol=1e-12)
    self.assertGreater(np.abs(product).max(), 0.0)


if __name__ == '__main__':
  test_utils.main()
