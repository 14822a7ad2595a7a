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
"""Tests for downfolding.fock_oracle.oracle_lib."""

from absl.testing import parameterized
import numpy as np

from downfolding.fock_oracle import fock_space
from downfolding.fock_oracle import mr_coefficients
from downfolding.fock_oracle import oracle_lib
from downfolding.rhd import amplitudes
from downfolding.rhd import effective_hamiltonian
from downfolding.rhd import residuals
from downfolding.rhd import rg_flow
from downfolding.rhd import solver
from downfolding.utils import fixtures
from downfolding.utils import test_utils


def _random_amplitudes(space, seed, scale=0.1, interpretation=None):
  rng = np.random.default_rng(seed)
  interpretation = interpretation or amplitudes.T2Interpretation.SPIN_ADAPTED
  amps = amplitudes.AmplitudeSet.zeros(space, interpretation)
  amps.t1 = scale * rng.normal(size=amps.t1.shape)
  amps.t2m = scale * rng.normal(size=amps.t2m.shape)
  amps.t3 = scale * rng.normal(size=amps.t3.shape)
  if amps.t2m_an is not None:
    amps.t2m_an = scale * rng.normal(size=amps.t2m_an.shape)
  return amps


def _h2():
  return effective_hamiltonian.from_integrals(fixtures.load_h2())


def _converged_h2():
  hamiltonian = _h2()
  amps, _ = solver.solve_step(hamiltonian, solver.SolverConfig(tol=1e-12))
  fock_h = fock_space.build_hamiltonian(hamiltonian.h1, hamiltonian.h2)
  return hamiltonian, amps, fock_h


class ProjectorTest(test_utils.TestCase, parameterized.TestCase):

  @parameterized.parameters(False, True)
  def test_complementary(self, occupied):
    primary, secondary = oracle_lib.projectors(2, occupied=occupied)
    self.assertAllClose(primary.matrix @ primary.matrix, primary.matrix)
    self.assertAllClose(primary.matrix + secondary.matrix, np.eye(16))
    self.assertAllClose(primary.matrix @ secondary.matrix, np.zeros((16, 16)))

  def test_virtual_primary_has_empty_target(self):
    primary, _ = oracle_lib.projectors(2)
    self.assertEqual(np.trace(primary.matrix), 4)
    self.assertEqual(primary.matrix[0b0011, 0b0011], 1.0)
    self.assertEqual(primary.matrix[0b0111, 0b0111], 0.0)

  def test_occupied_primary_has_full_target(self):
    primary, _ = oracle_lib.projectors(2, occupied=True)
    self.assertEqual(np.trace(primary.matrix), 4)
    self.assertEqual(primary.matrix[0b1100, 0b1100], 1.0)


class GeneratorTest(test_utils.TestCase, parameterized.TestCase):

  def test_zero_amplitudes(self):
    space = amplitudes.StepSpace(3, 1)
    eta = oracle_lib.build_eta(amplitudes.AmplitudeSet.zeros(space), space)
    self.assertEqual(np.count_nonzero(eta.matrix), 0)
    s, s_inv = oracle_lib.build_similarity(eta)
    self.assertAllClose(s.matrix, np.eye(64))
    self.assertAllClose(s_inv.matrix, np.eye(64))

  @parameterized.parameters((3, 1), (4, 2), (4, 1))
  def test_structure(self, n, n_occupied):
    space = amplitudes.StepSpace(n, n_occupied)
    eta = oracle_lib.build_eta(_random_amplitudes(space, seed=n), space)
    primary, secondary = oracle_lib.projectors(n)
    zero = np.zeros_like(eta.matrix)
    self.assertGreater(np.abs(eta.matrix).max(), 0.0)
    self.assertAllClose(eta.matrix @ eta.matrix, zero, atol=1e-15)
    self.assertAllClose(secondary.matrix @ eta.matrix @ primary.matrix,
                        eta.matrix, atol=1e-15)
    s, s_inv = oracle_lib.build_similarity(eta)
    self.assertAllClose(s.matrix @ s_inv.matrix, np.eye(4**n), atol=1e-15)

  def test_components_sum_to_eta(self):
    space = amplitudes.StepSpace(3, 1)
    amps = _random_amplitudes(space, seed=5)
    components = oracle_lib.eta_components(amps, space)
    # Two singles, two opposite-spin mixed doubles and one paired double.
    self.assertLen(components, 5)
    self.assertAllClose(
        sum(c.matrix for c in components),
        oracle_lib.build_eta(amps, space).matrix)

  def test_occupied_target(self):
    space = amplitudes.StepSpace(2, 2)
    with self.assertRaises(ValueError):
      oracle_lib.build_eta(amplitudes.AmplitudeSet.zeros(space), space)


class ResidualProjectionTest(test_utils.TestCase, parameterized.TestCase):

  @parameterized.parameters(0, 1, 2)
  def test_matches_residuals(self, seed):
    hamiltonian = effective_hamiltonian.from_integrals(
        fixtures.random_system(4, 4, seed=seed, scale=0.3, coupling=0.2))
    amps = _random_amplitudes(hamiltonian.space, seed=seed)
    expected = residuals.residuals(hamiltonian, amps)
    projected = oracle_lib.residual_projections(hamiltonian, amps)
    self.assertAllClose(projected.pack(), expected.pack())

  def test_matches_on_renormalized_hamiltonian(self):
    hamiltonian = effective_hamiltonian.from_integrals(
        fixtures.random_system(5, 2, seed=7, scale=0.3, coupling=0.2))
    amps = _random_amplitudes(hamiltonian.space, seed=7)
    reduced, _ = rg_flow.rg_update(hamiltonian, amps)
    self.assertFalse(reduced.is_hermitian())
    trial = _random_amplitudes(reduced.space, seed=8)
    self.assertAllClose(
        oracle_lib.residual_projections(reduced, trial).pack(),
        residuals.residuals(reduced, trial).pack())

  def test_independent_interpretation(self):
    hamiltonian = effective_hamiltonian.from_integrals(
        fixtures.random_system(4, 2, seed=3, scale=0.3))
    amps = _random_amplitudes(
        hamiltonian.space, seed=3,
        interpretation=amplitudes.T2Interpretation.INDEPENDENT)
    projected = oracle_lib.residual_projections(hamiltonian, amps)
    self.assertIsNotNone(projected.r2_an)
    self.assertAllClose(projected.pack(),
                        residuals.residuals(hamiltonian, amps).pack())

  def test_single_and_double_targets(self):
    hamiltonian = _h2()
    amps = amplitudes.AmplitudeSet.zeros(hamiltonian.space)
    projected = oracle_lib.residual_projections(hamiltonian, amps)
    # Brillouin: f[N,0] vanishes in the canonical basis.
    self.assertAllClose(projected.r1, [0.0], atol=1e-6)
    self.assertAllClose(projected.r2p, [[0.1813]], atol=1e-4)


class BlochTest(test_utils.TestCase):

  def test_block_diagonal(self):
    h1 = np.diag([-0.5, 0.3, 0.8])
    fock_h = fock_space.build_hamiltonian(h1, np.zeros((3,) * 4))
    eta = oracle_lib.build_eta(
        amplitudes.AmplitudeSet.zeros(amplitudes.StepSpace(3, 1)),
        amplitudes.StepSpace(3, 1))
    self.assertEqual(oracle_lib.bloch_residual_norm(fock_h, eta), 0.0)

  def test_converged_h2(self):
    hamiltonian, amps, fock_h = _converged_h2()
    eta = oracle_lib.build_eta(amps, hamiltonian.space)
    reference = [fock_space.reference_bits(1)]
    converged = oracle_lib.bloch_residual_norm(fock_h, eta, columns=reference)
    self.assertLess(converged, 1e-10)
    perturbed = amplitudes.AmplitudeSet(
        t1=amps.t1 + 0.01, t2m=amps.t2m, t3=amps.t3 + 0.01)
    eta = oracle_lib.build_eta(perturbed, hamiltonian.space)
    self.assertGreater(
        oracle_lib.bloch_residual_norm(fock_h, eta, columns=reference),
        converged)

  def test_two_electron_sector_is_the_reference(self):
    hamiltonian, amps, fock_h = _converged_h2()
    eta = oracle_lib.build_eta(amps, hamiltonian.space)
    sector = fock_space.FockSpace(2).sector(2)
    self.assertAllClose(
        oracle_lib.bloch_residual_norm(fock_h, eta, columns=sector),
        oracle_lib.bloch_residual_norm(
            fock_h, eta, columns=[fock_space.reference_bits(1)]))


class SpectrumTest(test_utils.TestCase):

  def test_free_fermions(self):
    h1 = np.diag([-0.5, 0.3, 0.8])
    fock_h = fock_space.build_hamiltonian(h1, np.zeros((3,) * 4))
    space = amplitudes.StepSpace(3, 1)
    eta = oracle_lib.build_eta(amplitudes.AmplitudeSet.zeros(space), space)
    report = oracle_lib.spectrum_check(fock_h, eta)
    self.assertTrue(report.is_subset)
    self.assertLen(report.matched, 16)

  def test_converged_h2(self):
    hamiltonian, amps, fock_h = _converged_h2()
    eta = oracle_lib.build_eta(amps, hamiltonian.space)
    report = oracle_lib.spectrum_check(fock_h, eta, n_electrons=2)
    self.assertTrue(report.is_subset)
    self.assertLen(report.matched, 1)
    value, partner = report.matched[0]
    self.assertAllClose(value + hamiltonian.core_energy, -1.137285,
                        atol=2e-6)
    self.assertAllClose(value, partner, atol=1e-8)

  def test_unconverged_generator(self):
    hamiltonian = effective_hamiltonian.from_integrals(
        fixtures.random_system(3, 2, seed=1, scale=0.3))
    fock_h = fock_space.build_hamiltonian(hamiltonian.h1, hamiltonian.h2)
    eta = oracle_lib.build_eta(
        _random_amplitudes(hamiltonian.space, seed=1, scale=0.5),
        hamiltonian.space)
    with self.assertRaises(oracle_lib.BlochThresholdError):
      oracle_lib.spectrum_check(fock_h, eta, n_electrons=2)
    report = oracle_lib.spectrum_check(
        fock_h, eta, n_electrons=2, enforce=False)
    self.assertFalse(report.is_subset)
    self.assertNotEmpty(report.unmatched)
    self.assertGreater(report.bloch_norm, 1e-8)

  def test_match_eigenvalues(self):
    matched, unmatched = oracle_lib.match_eigenvalues([1.0, 1.0, 3.5],
                                                      [0.0, 1.0, 2.0, 3.0],
                                                      atol=1e-8)
    self.assertEqual(matched, [(1.0, 1.0)])
    self.assertEqual(unmatched, [1.0, 3.5])


class UnitaryTest(test_utils.TestCase):

  def test_zero_generator(self):
    unitary = oracle_lib.build_unitary(
        fock_space.FockSpaceOperator(np.zeros((16, 16)), 2))
    self.assertAllClose(unitary.matrix, np.eye(16))

  def test_single_amplitude_rotation(self):
    t = 0.37
    eta = oracle_lib.to_fock(
        mr_coefficients.generator(np.array([[t], [0.0]]), np.zeros((1, 1)), 2),
        2)
    unitary = oracle_lib.build_unitary(eta).matrix
    ground = 0b0001
    sign, excited = fock_space.apply_string(
        ((True, fock_space.mode(1, fock_space.UP)),
         (False, fock_space.mode(0, fock_space.UP))), ground)
    basis = np.zeros((16, 2))
    basis[ground, 0] = 1.0
    basis[excited, 1] = sign
    c, s = 1.0 / np.sqrt(1 + t * t), t / np.sqrt(1 + t * t)
    self.assertAllClose(basis.T @ unitary @ basis, [[c, -s], [s, c]])

  def test_unitary_and_hermitian_transform(self):
    hamiltonian = effective_hamiltonian.from_integrals(
        fixtures.random_system(3, 2, seed=6, scale=0.3))
    space = hamiltonian.space
    amps = _random_amplitudes(space, seed=6, scale=0.3)
    eta = oracle_lib.build_eta(amps, space)
    fock_h = fock_space.build_hamiltonian(hamiltonian.h1, hamiltonian.h2)
    primary, secondary = oracle_lib.projectors(3)
    for form in oracle_lib.UnitaryForm:
      generators = (
          oracle_lib.eta_components(amps, space)
          if form is oracle_lib.UnitaryForm.PRODUCT else eta)
      unitary = oracle_lib.build_unitary(generators, form).matrix
      self.assertAllClose(unitary.T @ unitary, np.eye(64), atol=1e-12)
      rotated = unitary.T @ fock_h.matrix @ unitary
      self.assertAllClose(
          np.linalg.norm(primary.matrix @ rotated @ secondary.matrix),
          np.linalg.norm(secondary.matrix @ rotated @ primary.matrix))

  def test_forms_agree_for_one_excitation(self):
    space = amplitudes.StepSpace(2, 1)
    amps = amplitudes.AmplitudeSet.zeros(space)
    amps.t3 = np.array([[0.8]])
    components = oracle_lib.eta_components(amps, space)
    self.assertLen(components, 1)
    self.assertAllClose(
        oracle_lib.build_unitary(components,
                                 oracle_lib.UnitaryForm.PRODUCT).matrix,
        oracle_lib.build_unitary(components[0]).matrix)

  def test_large_amplitudes(self):
    space = amplitudes.StepSpace(2, 1)
    amps = amplitudes.AmplitudeSet(
        t1=np.array([10.0]), t2m=np.zeros((0, 1, 1)), t3=np.array([[-10.0]]))
    unitary = oracle_lib.build_unitary(oracle_lib.build_eta(amps, space))
    self.assertAllClose(unitary.matrix.T @ unitary.matrix, np.eye(16),
                        atol=1e-12)

  def test_empty(self):
    with self.assertRaises(ValueError):
      oracle_lib.build_unitary([])


if __name__ == '__main__':
  test_utils.main()
