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
"""Tests for downfolding.fock_oracle.fock_space."""

import itertools

from absl.testing import parameterized
import numpy as np

from downfolding.fock_oracle import fock_space
from downfolding.utils import fixtures
from downfolding.utils import test_utils


class LadderTest(test_utils.TestCase):

  def test_apply_string_sign(self):
    self.assertEqual(
        fock_space.apply_string(((True, 1), (True, 0)), 0), (-1, 0b11))
    self.assertEqual(
        fock_space.apply_string(((True, 0), (True, 1)), 0), (1, 0b11))
    self.assertIsNone(fock_space.apply_string(((True, 0),), 0b1))
    self.assertIsNone(fock_space.apply_string(((False, 2),), 0b1))

  def test_anticommutation(self):
    space = fock_space.FockSpace(2)
    identity = space.identity().toarray()
    for j, k in itertools.product(range(4), repeat=2):
      a_j = space.annihilator(j)
      anti = (a_j @ space.creator(k) + space.creator(k) @ a_j).toarray()
      self.assertAllClose(anti, identity if j == k else 0.0 * identity)
      anti = (a_j @ space.annihilator(k) +
              space.annihilator(k) @ a_j).toarray()
      self.assertAllClose(anti, 0.0 * identity)

  def test_string_matches_apply(self):
    space = fock_space.FockSpace(2)
    ops = ((True, 2), (True, 3), (False, 1), (False, 0))
    matrix = space.string(ops).toarray()
    sign, bits = fock_space.apply_string(ops, 0b0011)
    self.assertEqual(matrix[bits, 0b0011], sign)
    self.assertEqual(np.count_nonzero(matrix), 1)

  def test_reference_bits(self):
    self.assertEqual(fock_space.reference_bits(2), 0b1111)
    self.assertEqual(fock_space.determinant([0, 3]), 0b1001)

  def test_sector(self):
    space = fock_space.FockSpace(2)
    self.assertLen(space.sector(2), 4)
    self.assertLen(space.sector(2, sz2=None), 6)
    self.assertLen(space.sector(2, sz2=2), 1)
    self.assertEqual(list(space.sector(2, sz2=2)), [0b0101])


class SizeTest(test_utils.TestCase, parameterized.TestCase):

  @parameterized.parameters(0, 6)
  def test_cap(self, n):
    with self.assertRaises(fock_space.OracleSizeError):
      fock_space.FockSpace(n)

  def test_hamiltonian_cap(self):
    with self.assertRaises(fock_space.OracleSizeError):
      fock_space.build_hamiltonian(np.zeros((6, 6)), np.zeros((6,) * 4))

  def test_bad_matrix_shape(self):
    with self.assertRaises(ValueError):
      fock_space.FockSpaceOperator(matrix=np.zeros((8, 8)), n_spatial=2)


class HamiltonianTest(test_utils.TestCase):

  def test_free_fermions(self):
    energies = np.array([-0.7, 0.2, 0.9])
    hamiltonian = fock_space.build_hamiltonian(
        np.diag(energies), np.zeros((3,) * 4))
    modes = np.repeat(energies, 2)
    sums = sorted(
        sum(modes[list(subset)])
        for r in range(len(modes) + 1)
        for subset in itertools.combinations(range(len(modes)), r))
    self.assertAllClose(np.linalg.eigvalsh(hamiltonian.matrix), sums)

  def test_single_orbital(self):
    eps, u = -0.4, 0.75
    hamiltonian = fock_space.build_hamiltonian(
        np.array([[eps]]), np.full((1, 1, 1, 1), u))
    self.assertAllClose(np.diag(hamiltonian.matrix),
                        [0.0, eps, eps, 2 * eps + u])
    diagonal = np.diag(np.diag(hamiltonian.matrix))
    self.assertAllClose(hamiltonian.matrix, diagonal)

  def test_hermitian_and_number_conserving(self):
    system = fixtures.random_system(3, seed=4)
    hamiltonian = fock_space.build_hamiltonian(system.h1, system.h2)
    self.assertTrue(hamiltonian.is_hermitian())
    number = np.diag(fock_space.FockSpace(3).total_number().astype(float))
    commutator = hamiltonian.matrix @ number - number @ hamiltonian.matrix
    self.assertAllClose(commutator, np.zeros_like(number))

  def test_hartree_fock_diagonal(self):
    h2_system = fixtures.load_h2()
    hamiltonian = fock_space.build_hamiltonian(h2_system.h1, h2_system.h2)
    self.assertAllClose(
        hamiltonian.matrix[0b0011, 0b0011] + h2_system.core_energy,
        -1.116714, atol=2e-6)

  def test_h2_ground_state(self):
    h2_system = fixtures.load_h2()
    energy = fock_space.ground_state_energy(h2_system.h1, h2_system.h2,
                                            h2_system.core_energy, 2)
    self.assertAllClose(energy, -1.137285, atol=2e-6)

  def test_empty_sector(self):
    with self.assertRaises(ValueError):
      fock_space.ground_state_energy(np.zeros((1, 1)), np.zeros((1,) * 4),
                                     0.0, 3)


if __name__ == '__main__':
  test_utils.main()
