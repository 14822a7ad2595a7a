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
"""Tests for downfolding.integrals.orbitals."""

from absl.testing import parameterized
import numpy as np

from downfolding.integrals import molecular_system
from downfolding.integrals import orbitals
from downfolding.utils import fixtures
from downfolding.utils import test_utils

C = molecular_system.OrbitalClass.CORE
A = molecular_system.OrbitalClass.ACTIVE
V = molecular_system.OrbitalClass.VIRTUAL


def _system(energies, n_electrons=2):
  return molecular_system.MolecularSystem(
      n_spatial=len(energies),
      n_electrons=n_electrons,
      mo_energies=np.array(energies))


class OrbitalsTest(test_utils.TestCase, parameterized.TestCase):

  @parameterized.named_parameters(
      ('unsorted', [-0.5, -1.2, 0.3], [1, 0, 2]),
      ('sorted', [-1.0, 0.0, 1.0, 2.0], [0, 1, 2, 3]),
      ('degenerate', [-1.0, -1.0, 0.2], [0, 1, 2]),
      ('degenerate_tail', [0.4, -1.0, 0.4, -1.0], [1, 3, 0, 2]),
  )
  def test_order_orbitals(self, energies, expected):
    np.testing.assert_array_equal(
        orbitals.order_orbitals(_system(energies)), expected)

  def test_order_is_idempotent(self):
    system = _system([0.3, -0.2, 0.3, -0.9, 0.1])
    perm = orbitals.order_orbitals(system)
    ordered = _system(system.mo_energies[perm])
    np.testing.assert_array_equal(
        orbitals.order_orbitals(ordered), np.arange(5))

  @parameterized.named_parameters(
      ('four_four', 4, 4, None, (C, C, V, V)),
      ('two_two', 2, 2, None, (C, V)),
      ('active_window', 4, 4, [1, 2], (C, A, A, V)),
  )
  def test_classify(self, n, n_electrons, active, expected):
    system = _system(np.arange(n, dtype=float), n_electrons)
    classification = orbitals.classify_orbitals(system, n_electrons, active)
    self.assertEqual(classification.labels, expected)

  def test_classify_occupied_includes_active(self):
    system = _system([0.0, 1.0, 2.0, 3.0], 4)
    classification = orbitals.classify_orbitals(system, active=[1, 2])
    np.testing.assert_array_equal(classification.occupied, [0, 1])
    np.testing.assert_array_equal(classification.frozen, [1, 2])
    self.assertEqual(str(classification), 'CAAV')

  def test_classify_too_many_electrons(self):
    system = _system([0.0, 1.0])
    with self.assertRaises(ValueError):
      orbitals.classify_orbitals(system, 6)

  def test_fock_without_two_body(self):
    h1 = np.array([[-1.0, 0.1], [0.1, 0.5]])
    h2 = np.zeros((2, 2, 2, 2))
    self.assertAllClose(orbitals.fock_matrix(h1, h2, [0]), h1)

  def test_fock_without_occupied(self):
    integrals = fixtures.random_system(3, 2, seed=1)
    self.assertAllClose(
        orbitals.fock_matrix(integrals.h1, integrals.h2, []), integrals.h1)

  def test_fock_h2_fixture(self):
    system, h1, h2, _ = fixtures.load_h2()
    fock = orbitals.fock_matrix(h1, h2, [0])
    self.assertAllClose(np.diag(fock), system.mo_energies, atol=1e-8)
    self.assertAllClose(fock, fock.T, atol=1e-12)

  def test_fock_matches_chemist_formula(self):
    integrals = fixtures.random_system(4, 4, seed=5)
    g = molecular_system.to_chemist(integrals.h2)
    occ = [0, 1]
    expected = integrals.h1.copy()
    for i in occ:
      expected += 2.0 * g[:, :, i, i] - g[:, i, i, :]
    self.assertAllClose(
        orbitals.fock_matrix(integrals.h1, integrals.h2, occ), expected,
        atol=1e-12)


if __name__ == '__main__':
  test_utils.main()
