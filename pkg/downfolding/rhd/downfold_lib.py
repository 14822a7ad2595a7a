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
"""Recursive downfolding driver."""

import csv
import dataclasses
import json
import time
from typing import Any, Dict, List, Optional

from absl import logging
import gin

from downfolding.integrals import molecular_system
from downfolding.rhd import effective_hamiltonian
from downfolding.rhd import residual_factorized
from downfolding.rhd import rg_flow
from downfolding.rhd import solver
from downfolding.tensorfactor import factorization

CSV_COLUMNS = ('step', 'orbital', 'iters', 'residual_norm', 'e_step', 'e_cum',
               'wall_ms')
_FLOAT_FORMAT = '%.12g'


@gin.configurable
@dataclasses.dataclass
class DownfoldConfig:
  """Settings of a full downfolding run.

  Attributes:
    stop_at: Number of orbitals left when the recursion stops, at least 1.
    mode: 'dense' or 'factorized' residuals.
    require_convergence: Raise when a step reaches the iteration cap.
    solver_config: Amplitude solver settings.
    factorization_config: Factorization settings of the factorized mode.
  """
  stop_at: int = 1
  mode: str = 'dense'
  require_convergence: bool = True
  solver_config: Optional[solver.SolverConfig] = None
  factorization_config: Optional[factorization.FactorizationConfig] = None

  def __post_init__(self):
    if self.stop_at < 1:
      raise ValueError(f'stop_at must be at least 1, got {self.stop_at}.')
    if self.mode not in ('dense', 'factorized'):
      raise ValueError(f'Unknown residual mode {self.mode!r}.')
    self.solver_config = self.solver_config or solver.SolverConfig()
    self.factorization_config = (
        self.factorization_config or factorization.FactorizationConfig())


@dataclasses.dataclass
class StepRecord:
  """One downfolding step.

  e_step is the change of the energy estimate core + ledger + <Phi|H|Phi>
  over the step; e_diag is what the step added to the ledger.
  """
  step: int
  orbital: int
  kind: str
  iters: int
  residual_norm: float
  e_step: float
  e_cum: float
  e_diag: float
  wall_ms: float
  quasi_degenerate: bool = False


@dataclasses.dataclass
class EnergyTrace:
  """Per-step energies of a run.

  Attributes:
    hf_energy: Reference energy of the starting Hamiltonian.
    steps: Records in the order the orbitals were removed.
    final: The reduced Hamiltonian left when the recursion stopped.
  """
  hf_energy: float
  steps: List[StepRecord] = dataclasses.field(default_factory=list)
  final: Optional[effective_hamiltonian.EffectiveHamiltonian] = None

  @property
  def total_energy(self) -> float:
    if self.final is None:
      return self.hf_energy
    return self.final.total_energy()

  @property
  def correlation_energy(self) -> float:
    return self.total_energy - self.hf_energy

  @property
  def cumulative_energy(self) -> float:
    return self.steps[-1].e_cum if self.steps else 0.0

  def as_dict(self) -> Dict[str, Any]:
    return {
        'hf_energy': self.hf_energy,
        'total_energy': self.total_energy,
        'correlation_energy': self.correlation_energy,
        'remaining_orbitals': self.final.n_active if self.final else None,
        'steps': [dataclasses.asdict(s) for s in self.steps],
    }

  def write_csv(self, path: str) -> None:
    with open(path, 'w', newline='') as f:
      writer = csv.writer(f)
      writer.writerow(CSV_COLUMNS)
      for s in self.steps:
        writer.writerow([
            s.step, s.orbital, s.iters, _FLOAT_FORMAT % s.residual_norm,
            _FLOAT_FORMAT % s.e_step, _FLOAT_FORMAT % s.e_cum,
            _FLOAT_FORMAT % s.wall_ms
        ])

  def write_json(self, path: str,
                 metadata: Optional[Dict[str, Any]] = None) -> None:
    payload = self.as_dict()
    if metadata:
      payload['metadata'] = metadata
    with open(path, 'w') as f:
      json.dump(payload, f, indent=2, sort_keys=True)


def _residual_fn(config: DownfoldConfig):
  if config.mode == 'factorized':
    return residual_factorized.FactorizedResidualFn(
        config.factorization_config)
  return None


@gin.configurable(denylist=['hamiltonian', 'config', 'classification'])
def downfold(
    hamiltonian: effective_hamiltonian.EffectiveHamiltonian,
    config: Optional[DownfoldConfig] = None,
    classification: Optional[molecular_system.OrbitalClassification] = None
) -> EnergyTrace:
  """Downfolds orbitals from the highest energy down.

  Virtual orbitals are removed by solving their amplitude equations and
  renormalizing the rest; once none is left, occupied orbitals are removed
  by filling them. The recursion stops at `config.stop_at` orbitals or at
  the first orbital the classification labels active.

  Args:
    hamiltonian: Starting Hamiltonian in ascending orbital energy order.
    config: Run settings.
    classification: Labels of the starting orbitals, by position.

  Returns:
    The energy trace with the final reduced Hamiltonian attached.

  Raises:
    solver.SolverDivergenceError: A step diverged.
    solver.SolverConvergenceError: A step hit the iteration cap while
      `config.require_convergence` is set.
  """
  config = config or DownfoldConfig()
  frozen = set()
  if classification is not None:
    frozen = {hamiltonian.labels[p] for p in classification.frozen}
  residual_fn = _residual_fn(config)
  trace = EnergyTrace(hf_energy=hamiltonian.total_energy())
  estimate = trace.hf_energy
  current = hamiltonian
  step = 0
  while current.n_active > config.stop_at:
    orbital = current.labels[current.space.target]
    if orbital in frozen:
      logging.info('Stopping at active orbital %d.', orbital)
      break
    step += 1
    start = time.perf_counter()
    if current.space.target_is_virtual:
      kind = 'virtual'
      try:
        amps, diagnostics = solver.solve_step(
            current, config.solver_config, residual_fn)
      except solver.SolverDivergenceError as e:
        raise solver.SolverDivergenceError(f'Step {step}: {e}',
                                           e.diagnostics) from e
      if not diagnostics.converged and config.require_convergence:
        raise solver.SolverConvergenceError(
            f'Step {step}: orbital {orbital} not converged in '
            f'{diagnostics.iterations} iterations, residual '
            f'{diagnostics.residual_norm:.3e}.', diagnostics)
      current, e_diag = rg_flow.rg_update(current, amps)
      iters, norm = diagnostics.iterations, diagnostics.residual_norm
      quasi = diagnostics.quasi_degenerate
    else:
      kind = 'occupied'
      current, e_diag = rg_flow.rg_update(current)
      iters, norm, quasi = 0, 0.0, False
    previous, estimate = estimate, current.total_energy()
    e_step = estimate - previous
    e_cum = (trace.steps[-1].e_cum if trace.steps else 0.0) + e_step
    record = StepRecord(
        step=step,
        orbital=orbital,
        kind=kind,
        iters=iters,
        residual_norm=norm,
        e_step=e_step,
        e_cum=e_cum,
        e_diag=e_diag,
        wall_ms=1e3 * (time.perf_counter() - start),
        quasi_degenerate=quasi)
    trace.steps.append(record)
    logging.info('Step %d: %s orbital %d, %d iterations, e_step %.10f, '
                 'e_cum %.10f.', step, kind, orbital, iters, e_step, e_cum)
  trace.final = current
  logging.info('Downfolded %d orbitals; correlation energy %.10f.',
               len(trace.steps), trace.correlation_energy)
  return trace
