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
"""The `run` and `factorize` commands."""

import os
from typing import Any, Dict

from absl import logging
import numpy as np

from downfolding.cli import config as config_lib
from downfolding.cli import report
from downfolding.integrals import fcidump
from downfolding.integrals import molecular_system
from downfolding.integrals import orbitals
from downfolding.qres import registers
from downfolding.rhd import downfold_lib
from downfolding.rhd import effective_hamiltonian
from downfolding.tensorfactor import cp_als
from downfolding.tensorfactor import factor_io
from downfolding.tensorfactor import factorization

SUMMARY_FILE = 'summary.json'
TRACE_CSV = 'energy_trace.csv'
TRACE_JSON = 'energy_trace.json'
FACTORIZATION_FILE = 'factorization.json'
FACTORS_FILE = 'factors.bin'


class InputNotFoundError(ValueError):
  """The integral file does not exist."""


def load_integrals(path: str) -> fcidump.Integrals:
  if not path or not os.path.isfile(path):
    raise InputNotFoundError(f'input not found: {path!r}')
  return fcidump.read_fcidump(path)


def reference_check(
    integrals: fcidump.Integrals,
    hamiltonian: effective_hamiltonian.EffectiveHamiltonian
) -> Dict[str, Any]:
  """Compares the file-order closed-shell energy with the ordered start.

  The Brillouin entry is the largest occupied-virtual Fock element; it is
  zero for canonical Hartree-Fock orbitals.
  """
  perm = orbitals.order_orbitals(integrals.system)
  occupied = perm[:hamiltonian.n_occupied]
  file_energy = molecular_system.hartree_fock_energy(
      integrals.h1, integrals.h2, occupied, integrals.core_energy)
  start = hamiltonian.total_energy()
  space = hamiltonian.space
  fock = hamiltonian.fock
  brillouin = 0.0
  if space.n_o and hamiltonian.n_active > space.n_o:
    brillouin = float(np.max(np.abs(fock[:space.n_o, space.n_o:])))
  return {
      'file_order_energy': file_energy,
      'reference_energy': start,
      'difference': start - file_energy,
      'brillouin_max': brillouin,
  }


def dimensions(hamiltonian: effective_hamiltonian.EffectiveHamiltonian,
               factors: factorization.FactorizedHamiltonian,
               run_config: config_lib.RunConfig) -> registers.Dimensions:
  """Sizes of the starting step for resource estimates."""
  n_o = max(hamiltonian.n_occupied, 1)
  n_v = max(hamiltonian.n_active - hamiltonian.n_occupied, 1)
  return registers.Dimensions(
      n_o=n_o,
      n_v=n_v,
      n_aux=max(factors.n_aux, 1),
      n_htf=max(factors.n_htf, 1),
      n_ttf=run_config.ttf_rank or cp_als.default_ttf_rank(n_o, n_v))


def factorization_report(
    hamiltonian: effective_hamiltonian.EffectiveHamiltonian,
    factors: factorization.FactorizedHamiltonian,
    run_config: config_lib.RunConfig) -> Dict[str, Any]:
  dims = dimensions(hamiltonian, factors, run_config)
  payload = factors.report()
  payload['n_ttf'] = dims.n_ttf
  payload['rank_ordering_holds'] = cp_als.check_rank_ordering(
      dims.n_htf, dims.n_aux, dims.n_ttf, dims.n_v, dims.n_o)
  payload['dense_error'] = float(
      np.linalg.norm(factors.h2() - hamiltonian.h2))
  payload['orbital_order'] = list(hamiltonian.labels)
  return payload


def cmd_run(run_config: config_lib.RunConfig) -> Dict[str, Any]:
  """Downfolds the input system and writes the run artifacts.

  Writes the energy trace as CSV and JSON, the factorization report and a
  summary into `run_config.out`.

  Args:
    run_config: Settings of the run.

  Returns:
    The summary, as written.

  Raises:
    InputNotFoundError: The integral file does not exist.
    fcidump.FcidumpFormatError: The file cannot be parsed.
    solver.SolverDivergenceError: A step diverged.
    solver.SolverConvergenceError: A step did not converge.
  """
  integrals = load_integrals(run_config.fcidump)
  hamiltonian = effective_hamiltonian.from_integrals(integrals)
  os.makedirs(run_config.out, exist_ok=True)
  factors = factorization.factorize_hamiltonian(
      hamiltonian.h2, run_config.factorization_config())
  factor_report = factorization_report(hamiltonian, factors, run_config)
  report.write_json(
      os.path.join(run_config.out, FACTORIZATION_FILE), factor_report)

  trace = downfold_lib.downfold(hamiltonian, run_config.downfold_config())
  trace.write_csv(os.path.join(run_config.out, TRACE_CSV))
  trace_payload = trace.as_dict()
  wall_ms = [step.pop('wall_ms') for step in trace_payload['steps']]
  report.write_json(
      os.path.join(run_config.out, TRACE_JSON), trace_payload,
      {'wall_ms': wall_ms})

  summary = {
      'input': os.path.basename(run_config.fcidump),
      'mode': run_config.mode,
      'n_orbitals': hamiltonian.n_active,
      'n_electrons': integrals.system.n_electrons,
      'hf_energy': trace.hf_energy,
      'reference_check': reference_check(integrals, hamiltonian),
      'total_energy': trace.total_energy,
      'correlation_energy': trace.correlation_energy,
      'remaining_orbitals': trace_payload['remaining_orbitals'],
      'steps': [{
          'step': s.step,
          'orbital': s.orbital,
          'kind': s.kind,
          'iterations': s.iters,
          'residual_norm': s.residual_norm,
          'e_step': s.e_step,
      } for s in trace.steps],
      'dimensions': dimensions(hamiltonian, factors, run_config).as_dict(),
      'config': run_config.as_dict(),
  }
  report.write_json(
      os.path.join(run_config.out, SUMMARY_FILE), summary,
      {'wall_ms_total': float(sum(wall_ms))})
  logging.info('Run finished: correlation energy %.10f, artifacts in %s.',
               trace.correlation_energy, run_config.out)
  return summary


def cmd_factorize(run_config: config_lib.RunConfig) -> Dict[str, Any]:
  """Writes Cholesky and CP factors (binary and CSV) and their report.

  Raises:
    InputNotFoundError: The integral file does not exist.
    fcidump.FcidumpFormatError: The file cannot be parsed.
  """
  integrals = load_integrals(run_config.fcidump)
  hamiltonian = effective_hamiltonian.from_integrals(integrals)
  os.makedirs(run_config.out, exist_ok=True)
  factors = factorization.factorize_hamiltonian(
      hamiltonian.h2, run_config.factorization_config())
  arrays = {
      'cholesky': factors.cholesky.vectors,
      'signs': factors.cholesky.signs.astype(float),
      'cp_x': factors.cp.x,
      'cp_y': factors.cp.y,
      'cp_z': factors.cp.z,
  }
  factor_io.save_factors(os.path.join(run_config.out, FACTORS_FILE), arrays)
  for name, array in arrays.items():
    factor_io.write_csv(os.path.join(run_config.out, f'{name}.csv'), array)
  payload = factorization_report(hamiltonian, factors, run_config)
  payload['files'] = [FACTORS_FILE] + [f'{name}.csv' for name in arrays]
  report.write_json(
      os.path.join(run_config.out, FACTORIZATION_FILE), payload)
  return payload
