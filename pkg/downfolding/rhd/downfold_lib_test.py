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
"""Tests for downfolding.rhd.downfold_lib."""

import csv
import json
import os

from absl.testing import parameterized
import numpy as np

from downfolding.integrals import molecular_system
from downfolding.integrals import orbitals
from downfolding.rhd import downfold_lib
from downfolding.rhd import effective_hamiltonian
from downfolding.rhd import solver
from downfolding.tensorfactor import factorization
from downfolding.utils import fixtures
from downfolding.utils import test_utils


def _two_orbital_exact(integrals):
  """Exact ground state of two electrons in two orbitals."""
  h1 = integrals.h1
  g = molecular_system.to_chemist(integrals.h2)
  e0 = 2.0 * h1[0, 0] + g[0, 0, 0, 0]
  e2 = 2.0 * h1[1, 1] + g[1, 1, 1, 1]
  k = g[0, 1, 0, 1]
  return (integrals.core_energy + 0.5 * (e0 + e2) -
          np.sqrt(0.25 * (e2 - e0)**2 + k**2))


class DownfoldConfigTest(test_utils.TestCase, parameterized.TestCase):

  @parameterized.named_parameters(
      ('stop_at', dict(stop_at=0)),
      ('mode', dict(mode='sparse')),
  )
  def test_invalid(self, kwargs):
    with self.assertRaises(ValueError):
      downfold_lib.DownfoldConfig(**kwargs)

  def test_defaults(self):
    config = downfold_lib.DownfoldConfig()
    self.assertEqual(config.solver_config, solver.SolverConfig())
    self.assertEqual(config.stop_at, 1)


class DownfoldTest(test_utils.TestCase, parameterized.TestCase):

  def test_single_orbital_has_no_steps(self):
    hamiltonian = effective_hamiltonian.EffectiveHamiltonian(
        h1=np.array([[-1.0]]), h2=np.zeros((1,) * 4), n_occupied=1)
    trace = downfold_lib.downfold(hamiltonian)
    self.assertEmpty(trace.steps)
    self.assertEqual(trace.total_energy, -2.0)
    self.assertEqual(trace.correlation_energy, 0.0)
    self.assertEqual(trace.cumulative_energy, 0.0)

  def test_decoupled_system_has_no_correlation(self):
    hamiltonian = effective_hamiltonian.EffectiveHamiltonian(
        h1=np.diag([-1.0, -0.5, 0.5, 1.0]),
        h2=np.zeros((4,) * 4),
        n_occupied=2)
    trace = downfold_lib.downfold(hamiltonian)
    self.assertLen(trace.steps, 3)
    self.assertAllClose(trace.total_energy, -3.0, atol=1e-12)
    self.assertAllClose(trace.correlation_energy, 0.0, atol=1e-12)
    self.assertEqual([s.kind for s in trace.steps],
                     ['virtual', 'virtual', 'occupied'])

  def test_h2_recovers_exact_energy(self):
    integrals = fixtures.load_h2()
    hamiltonian = effective_hamiltonian.from_integrals(integrals)
    config = downfold_lib.DownfoldConfig(
        solver_config=solver.SolverConfig(tol=1e-11))
    trace = downfold_lib.downfold(hamiltonian, config)
    self.assertLen(trace.steps, 1)
    self.assertAllClose(trace.hf_energy, -1.116714, atol=2e-6)
    self.assertAllClose(
        trace.total_energy, _two_orbital_exact(integrals), atol=1e-9)
    self.assertAllClose(trace.total_energy, -1.137285, atol=2e-6)
    self.assertEqual(trace.steps[0].orbital, 1)
    self.assertLess(trace.steps[0].e_step, 0.0)

  def test_factorized_mode_matches_dense(self):
    hamiltonian = effective_hamiltonian.from_integrals(fixtures.load_h2())
    solver_config = solver.SolverConfig(tol=1e-11)
    dense = downfold_lib.downfold(
        hamiltonian, downfold_lib.DownfoldConfig(solver_config=solver_config))
    factorized = downfold_lib.downfold(
        hamiltonian,
        downfold_lib.DownfoldConfig(
            mode='factorized',
            solver_config=solver_config,
            factorization_config=factorization.FactorizationConfig(
                delta=1e-12)))
    self.assertAllClose(factorized.total_energy, dense.total_energy,
                        atol=1e-8)

  @fixtures.requires_pyscf
  def test_h2o_correlation_tracks_ccsd(self):
    hamiltonian = effective_hamiltonian.from_integrals(fixtures.load_h2o())
    trace = downfold_lib.downfold(hamiltonian)
    self.assertAllClose(trace.hf_energy, fixtures.h2o_hf_energy(), atol=1e-8)
    reference = fixtures.h2o_ccsd_energy() - fixtures.h2o_hf_energy()
    self.assertGreater(abs(trace.correlation_energy), 0.0)
    self.assertLess(
        abs(trace.correlation_energy - reference), 0.15 * abs(reference))

  @fixtures.requires_pyscf
  def test_h2o_factorized_energy_shift(self):
    hamiltonian = effective_hamiltonian.from_integrals(fixtures.load_h2o())
    config = factorization.FactorizationConfig()
    factors = factorization.factorize_hamiltonian(hamiltonian.h2, config)
    self.assertEqual(factors.n_htf, 2 * factors.n_aux)
    dense = downfold_lib.downfold(hamiltonian)
    factorized = downfold_lib.downfold(
        hamiltonian,
        downfold_lib.DownfoldConfig(
            mode='factorized', factorization_config=config))
    self.assertLess(
        abs(factorized.correlation_energy - dense.correlation_energy), 1e-3)

  @parameterized.parameters((3, 2, ['virtual', 'virtual']),
                            (4, 4, ['virtual', 'virtual', 'occupied']),
                            (5, 4, ['virtual'] * 3 + ['occupied']))
  def test_step_kinds(self, n_spatial, n_electrons, kinds):
    hamiltonian = effective_hamiltonian.from_integrals(
        fixtures.random_system(n_spatial, n_electrons, seed=n_spatial))
    trace = downfold_lib.downfold(hamiltonian)
    self.assertEqual([s.kind for s in trace.steps], kinds)
    self.assertEqual([s.orbital for s in trace.steps],
                     list(range(n_spatial - 1, 0, -1)))
    self.assertEqual(trace.final.n_active, 1)
    self.assertTrue(all(s.iters >= 1 for s in trace.steps
                        if s.kind == 'virtual'))

  def test_energy_bookkeeping(self):
    hamiltonian = effective_hamiltonian.from_integrals(
        fixtures.random_system(5, 4, seed=11))
    trace = downfold_lib.downfold(hamiltonian)
    e_steps = [s.e_step for s in trace.steps]
    for k, record in enumerate(trace.steps):
      self.assertAllClose(record.e_cum, sum(e_steps[:k + 1]), atol=1e-12)
    self.assertEqual(
        sum(s.e_diag for s in trace.steps), sum(trace.final.energy_ledger))
    self.assertAllClose(trace.total_energy,
                        trace.hf_energy + trace.cumulative_energy, atol=1e-12)
    # Virtual steps leave the ledger alone.
    for record in trace.steps:
      if record.kind == 'virtual':
        self.assertEqual(record.e_diag, 0.0)

  def test_stop_at(self):
    hamiltonian = effective_hamiltonian.from_integrals(
        fixtures.random_system(5, 2, seed=12))
    trace = downfold_lib.downfold(
        hamiltonian, downfold_lib.DownfoldConfig(stop_at=3))
    self.assertLen(trace.steps, 2)
    self.assertEqual(trace.final.n_active, 3)
    self.assertEqual(trace.final.labels, (0, 1, 2))

  def test_active_window_stops_recursion(self):
    integrals = fixtures.random_system(4, 2, seed=13)
    hamiltonian = effective_hamiltonian.from_integrals(integrals)
    classification = orbitals.classify_orbitals(integrals.system, active=[2])
    trace = downfold_lib.downfold(hamiltonian, classification=classification)
    self.assertLen(trace.steps, 1)
    self.assertEqual(trace.final.n_active, 3)

  def test_iteration_cap(self):
    hamiltonian = effective_hamiltonian.from_integrals(fixtures.load_h2())
    capped = solver.SolverConfig(max_iterations=1)
    with self.assertRaises(solver.SolverConvergenceError) as error:
      downfold_lib.downfold(
          hamiltonian, downfold_lib.DownfoldConfig(solver_config=capped))
    self.assertStartsWith(str(error.exception), 'Step 1:')
    trace = downfold_lib.downfold(
        hamiltonian,
        downfold_lib.DownfoldConfig(
            solver_config=capped, require_convergence=False))
    self.assertLen(trace.steps, 1)
    self.assertAllClose(trace.total_energy, trace.hf_energy, atol=1e-12)

  def test_outputs(self):
    hamiltonian = effective_hamiltonian.from_integrals(
        fixtures.random_system(4, 2, seed=14))
    trace = downfold_lib.downfold(hamiltonian)
    out_dir = self.create_tempdir().full_path
    csv_path = os.path.join(out_dir, 'trace.csv')
    json_path = os.path.join(out_dir, 'trace.json')
    trace.write_csv(csv_path)
    trace.write_json(json_path, metadata={'command': 'run'})

    with open(csv_path) as f:
      rows = list(csv.reader(f))
    self.assertEqual(tuple(rows[0]), downfold_lib.CSV_COLUMNS)
    self.assertLen(rows, len(trace.steps) + 1)
    self.assertAllClose(float(rows[-1][5]), trace.cumulative_energy,
                        atol=1e-11)

    with open(json_path) as f:
      payload = json.load(f)
    self.assertEqual(payload['metadata'], {'command': 'run'})
    self.assertLen(payload['steps'], len(trace.steps))
    self.assertAllClose(payload['total_energy'], trace.total_energy)
    self.assertEqual(payload['remaining_orbitals'], 1)


if __name__ == '__main__':
  test_utils.main()
