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
"""Randomized property suites behind the `verify` command.

Every suite is deterministic for a given seed. A suite is a list of named
checks, each a measured value against the threshold it must not exceed.
"""

import dataclasses
import enum
from typing import Any, Callable, Dict, List, Optional

from absl import logging
import numpy as np

from downfolding.fock_oracle import fock_space
from downfolding.fock_oracle import oracle_lib
from downfolding.integrals import molecular_system
from downfolding.qres import theorems
from downfolding.rhd import amplitudes
from downfolding.rhd import effective_hamiltonian
from downfolding.rhd import residuals
from downfolding.rhd import solver
from downfolding.tensorfactor import cholesky
from downfolding.tensorfactor import cp_als
from downfolding.utils import fixtures

BLOCK_ENCODING_ATOL = 1e-10
ORACLE_ATOL = 1e-8
ORACLE_ELECTRONS = (2, 4)


@enum.unique
class Suite(enum.Enum):
  ORACLE = 'oracle'
  BLOCKENC = 'blockenc'
  FACTORIZATION = 'factorization'


class UnknownSuiteError(ValueError):
  pass


class PropertyViolationError(ValueError):
  """A check failed; carries the first failing check."""

  def __init__(self, message: str, counterexample: Dict[str, Any]):
    super().__init__(message)
    self.counterexample = counterexample


@dataclasses.dataclass
class Check:
  name: str
  value: float
  threshold: float
  details: Dict[str, Any] = dataclasses.field(default_factory=dict)

  @property
  def passed(self) -> bool:
    return bool(np.isfinite(self.value)) and self.value <= self.threshold

  def as_dict(self) -> Dict[str, Any]:
    return dict(
        name=self.name,
        value=self.value,
        threshold=self.threshold,
        passed=self.passed,
        **self.details)


@dataclasses.dataclass
class SuiteReport:
  suite: str
  seed: int
  size: int
  checks: List[Check]

  @property
  def passed(self) -> bool:
    return all(c.passed for c in self.checks)

  @property
  def first_failure(self) -> Optional[Check]:
    return next((c for c in self.checks if not c.passed), None)

  def as_dict(self) -> Dict[str, Any]:
    return {
        'suite': self.suite,
        'seed': self.seed,
        'size': self.size,
        'passed': self.passed,
        'checks': [c.as_dict() for c in self.checks],
    }


def parse_suite(name: str) -> Suite:
  try:
    return Suite(name)
  except ValueError:
    choices = ', '.join(s.value for s in Suite)
    raise UnknownSuiteError(
        f'Unknown suite {name!r}; expected one of {choices}.') from None


def _random_amplitudes(space: amplitudes.StepSpace,
                       rng: np.random.Generator,
                       scale: float = 0.1) -> amplitudes.AmplitudeSet:
  amps = amplitudes.AmplitudeSet.zeros(space)
  amps.t1 = scale * rng.normal(size=amps.t1.shape)
  amps.t2m = scale * rng.normal(size=amps.t2m.shape)
  t3 = scale * rng.normal(size=amps.t3.shape)
  amps.t3 = 0.5 * (t3 + t3.T)
  return amps


def oracle_electrons(seed: int, size: int) -> int:
  """Electron count of the oracle system drawn for `seed`.

  Drawn from ORACLE_ELECTRONS, keeping at least one virtual orbital.
  """
  choices = [n for n in ORACLE_ELECTRONS if n < 2 * size]
  return int(np.random.default_rng([seed, size]).choice(choices))


def oracle_checks(seed: int, size: int) -> List[Check]:
  """Checks one step of a random `size`-orbital system in Fock space.

  Residuals of random amplitudes must equal the projections of the Bloch
  operator. For the converged step the generator must square to zero and
  the Bloch residual on the reference must vanish. When the Bloch residual
  vanishes on the whole primary sector of the drawn electron count, the
  primary block must keep eigenvalues of the Hamiltonian.
  """
  if not 2 <= size <= fock_space.MAX_SPATIAL_ORBITALS:
    raise ValueError(
        f'The oracle suite needs 2 to {fock_space.MAX_SPATIAL_ORBITALS} '
        f'orbitals, got {size}.')
  rng = np.random.default_rng(seed)
  n_electrons = oracle_electrons(seed, size)
  integrals = fixtures.random_system(size, n_electrons=n_electrons, seed=seed)
  hamiltonian = effective_hamiltonian.from_integrals(integrals)
  space = hamiltonian.space
  trial = _random_amplitudes(space, rng)
  projection_error = float(np.max(np.abs(
      oracle_lib.residual_projections(hamiltonian, trial).pack() -
      residuals.residuals(hamiltonian, trial).pack())))

  amps, diagnostics = solver.solve_step(hamiltonian,
                                        solver.SolverConfig(tol=1e-12))
  fock_h = fock_space.build_hamiltonian(hamiltonian.h1, hamiltonian.h2)
  eta = oracle_lib.build_eta(amps, space)
  bloch = oracle_lib.bloch_residual_norm(
      fock_h, eta, columns=[fock_space.reference_bits(space.n_o)])
  spectrum = oracle_lib.spectrum_check(
      fock_h, eta, n_electrons=hamiltonian.n_electrons,
      bloch_threshold=ORACLE_ATOL, enforce=False)
  applicable = spectrum.bloch_norm <= ORACLE_ATOL
  unmatched = len(spectrum.unmatched) if applicable else 0
  return [
      Check('residual_projection', projection_error, ORACLE_ATOL,
            {'n_electrons': n_electrons}),
      Check('nilpotency', float(np.abs(eta.matrix @ eta.matrix).max()),
            ORACLE_ATOL),
      Check('bloch_residual', bloch, ORACLE_ATOL,
            {'iterations': diagnostics.iterations}),
      Check('spectrum_subset', float(unmatched), 0.0, {
          'applicable': applicable,
          'sector_bloch_norm': spectrum.bloch_norm,
          'matched': len(spectrum.matched),
      }),
  ]


def blockenc_checks(seed: int, size: int) -> List[Check]:
  return [
      Check(v.name, v.max_error, BLOCK_ENCODING_ATOL,
            {'shape': list(v.expected.shape), 'n_qubits': v.n_qubits})
      for v in theorems.random_suite(seed, size)
  ]


def factorization_checks(seed: int, size: int) -> List[Check]:
  """CP-ALS and Cholesky properties on random tensors of side `size`."""
  if size < 1:
    raise ValueError(f'size must be positive, got {size}.')
  rng = np.random.default_rng(seed)
  n_x, n_a, n_i = 2 * size, size + 1, size
  tensor = rng.normal(size=(n_x, n_a, n_i))
  fit = cp_als.cp_als(tensor, max(size, 2), seed=seed)
  increase = float(np.max(np.diff(fit.errors), initial=0.0))

  u, v, w = (rng.normal(size=n) for n in (n_x, n_a, n_i))
  rank_one = np.einsum('x,a,i->xai', u, v, w)
  recovered = cp_als.cp_als(rank_one, 1, seed=seed)

  delta = 1e-8
  h2 = molecular_system.from_chemist(
      fixtures.random_chemist_eri(size, rng))
  chol = cholesky.decompose_eri(h2, delta=delta)
  reconstruction = float(
      np.linalg.norm(cholesky.eri_from_cholesky(chol) - h2))
  return [
      Check('cp_als_monotone', increase, 1e-12, {'sweeps': fit.sweeps}),
      Check('cp_als_rank_one', recovered.error / np.linalg.norm(rank_one),
            1e-8),
      Check('cholesky_reconstruction', reconstruction, size**2 * delta,
            {'n_aux': chol.n_aux}),
  ]


_SUITES: Dict[Suite, Callable[[int, int], List[Check]]] = {
    Suite.ORACLE: oracle_checks,
    Suite.BLOCKENC: blockenc_checks,
    Suite.FACTORIZATION: factorization_checks,
}


def run_suite(suite: str, seed: int = 0, size: int = 4) -> SuiteReport:
  """Runs one suite and returns its report, failed or not."""
  parsed = parse_suite(suite)
  checks = _SUITES[parsed](seed, size)
  for check in checks:
    logging.vlog(1, '%s/%s: %.3e (threshold %.3e)', parsed.value, check.name,
                 check.value, check.threshold)
  return SuiteReport(parsed.value, seed, size, checks)


def cmd_verify(suite: str, seed: int = 0, size: int = 4) -> Dict[str, Any]:
  """Runs a suite and returns its report.

  Raises:
    UnknownSuiteError: `suite` names no suite.
    PropertyViolationError: A check failed; the error carries the first
      failing check as its counterexample.
  """
  report = run_suite(suite, seed, size)
  failure = report.first_failure
  if failure is not None:
    raise PropertyViolationError(
        f'{report.suite} suite failed {failure.name} for seed {seed}: '
        f'{failure.value:.3e} > {failure.threshold:.3e}.',
        dict(failure.as_dict(), suite=report.suite, seed=seed, size=size))
  logging.info('Suite %s passed %d checks for seed %d.', report.suite,
               len(report.checks), seed)
  return report.as_dict()
