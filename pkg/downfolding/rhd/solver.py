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
"""Preconditioned fixed-point solver for the amplitudes of one step."""

import dataclasses
import time
from typing import Callable, List, Optional, Tuple

from absl import logging
import gin
import numpy as np

from downfolding.rhd import amplitudes
from downfolding.rhd import diis
from downfolding.rhd import effective_hamiltonian
from downfolding.rhd import residuals

ResidualFn = Callable[
    [effective_hamiltonian.EffectiveHamiltonian, amplitudes.AmplitudeSet],
    amplitudes.ResidualSet]


class SolverDivergenceError(ValueError):
  """The residual blew up or became non-finite."""

  def __init__(self, message: str, diagnostics: 'StepDiagnostics'):
    super().__init__(message)
    self.diagnostics = diagnostics


class SolverConvergenceError(ValueError):
  """The iteration cap was reached above the tolerance."""

  def __init__(self, message: str, diagnostics: 'StepDiagnostics'):
    super().__init__(message)
    self.diagnostics = diagnostics


@gin.configurable
@dataclasses.dataclass
class SolverConfig:
  """Settings of the amplitude iteration.

  Attributes:
    tol: Convergence threshold on the residual infinity norm.
    max_iterations: Cap on residual evaluations.
    diis_vectors: Subspace size; 0 disables DIIS.
    diis_start: Plain iterations before extrapolation starts.
    divergence_threshold: Residual norm treated as divergence.
    denominator_floor: Smallest |D| used in the preconditioner.
    interpretation: 'spin_adapted' or 'independent' mixed doubles.
  """
  tol: float = 1e-8
  max_iterations: int = 200
  diis_vectors: int = 8
  diis_start: int = 1
  divergence_threshold: float = 1e3
  denominator_floor: float = 1e-6
  interpretation: str = 'spin_adapted'

  def __post_init__(self):
    if self.tol <= 0:
      raise ValueError(f'tol must be positive, got {self.tol}.')
    if self.max_iterations < 1:
      raise ValueError(
          f'max_iterations must be positive, got {self.max_iterations}.')
    if self.diis_vectors < 0:
      raise ValueError(
          f'diis_vectors must be non-negative, got {self.diis_vectors}.')
    amplitudes.T2Interpretation(self.interpretation)

  @property
  def t2_interpretation(self) -> amplitudes.T2Interpretation:
    return amplitudes.T2Interpretation(self.interpretation)


@dataclasses.dataclass
class StepDiagnostics:
  """What happened while solving one step."""
  orbital: int
  iterations: int = 0
  residual_norm: float = float('inf')
  converged: bool = False
  quasi_degenerate: bool = False
  wall_ms: float = 0.0
  history: List[float] = dataclasses.field(default_factory=list)


def _floor(d: np.ndarray, floor: float) -> Tuple[np.ndarray, bool]:
  small = np.abs(d) < floor
  if not np.any(small):
    return d, False
  d = d.copy()
  d[small] = np.where(d[small] < 0, -floor, floor)
  return d, True


def denominators(
    hamiltonian: effective_hamiltonian.EffectiveHamiltonian,
    floor: float = 1e-6
) -> Tuple[Tuple[np.ndarray, np.ndarray, np.ndarray], bool]:
  """Preconditioner D1[i], D2[b,i,j] and D2p[i,j] with the |D| floor.

  Returns:
    The three denominator blocks and whether any was floored.
  """
  space = hamiltonian.space
  diagonal = np.diag(hamiltonian.fock)
  e_o = diagonal[space.occupied]
  e_v = diagonal[space.virtual]
  e_n = diagonal[space.target]
  d1 = e_o - e_n
  d2 = (e_o[None, :, None] + e_o[None, None, :] - e_v[:, None, None] - e_n)
  d2p = e_o[:, None] + e_o[None, :] - 2.0 * e_n
  flagged = False
  blocks = []
  for d in (d1, d2, d2p):
    d, small = _floor(d, floor)
    flagged |= small
    blocks.append(d)
  return tuple(blocks), flagged


def _update(amps: amplitudes.AmplitudeSet, res: amplitudes.ResidualSet,
            d: Tuple[np.ndarray, np.ndarray, np.ndarray]) -> np.ndarray:
  d1, d2, d2p = d
  steps = [res.r1 / d1, res.r2 / d2, res.r2p / d2p]
  if amps.t2m_an is not None:
    # Only t2m + t2m_an^T enters the equations; split the step between them.
    steps[1] = 0.5 * steps[1]
    steps.append(0.5 * res.r2_an / d2.transpose(0, 2, 1))
  return np.concatenate([s.ravel() for s in steps])


def solve_step(
    hamiltonian: effective_hamiltonian.EffectiveHamiltonian,
    config: Optional[SolverConfig] = None,
    residual_fn: Optional[ResidualFn] = None
) -> Tuple[amplitudes.AmplitudeSet, StepDiagnostics]:
  """Solves the amplitude equations of the outermost (virtual) orbital.

  Starts from zero amplitudes and iterates t <- t + r / D, extrapolated
  with DIIS. Iterations count residual evaluations, so a problem solved by
  t = 0 takes one.

  Args:
    hamiltonian: Current Hamiltonian; the last orbital must be virtual.
    config: Solver settings.
    residual_fn: Residual evaluator, the dense residuals by default.

  Returns:
    The converged amplitudes, or the best iterate when the cap is reached,
    and the diagnostics.

  Raises:
    SolverDivergenceError: The residual norm exceeded the divergence
      threshold or became non-finite.
  """
  config = config or SolverConfig()
  residual_fn = residual_fn or residuals.residuals
  space = hamiltonian.space
  diagnostics = StepDiagnostics(orbital=hamiltonian.labels[space.target])
  start = time.perf_counter()

  d, diagnostics.quasi_degenerate = denominators(hamiltonian,
                                                 config.denominator_floor)
  if diagnostics.quasi_degenerate:
    logging.warning(
        'Quasi-degenerate denominators for orbital %d; floored at %g.',
        diagnostics.orbital, config.denominator_floor)

  accelerator = (
      diis.DIIS(config.diis_vectors, config.diis_start)
      if config.diis_vectors else None)
  amps = amplitudes.AmplitudeSet.zeros(space, config.t2_interpretation)
  best, best_norm = amps, float('inf')
  for iteration in range(1, config.max_iterations + 1):
    res = residual_fn(hamiltonian, amps)
    norm = res.norm()
    diagnostics.iterations = iteration
    diagnostics.history.append(norm)
    logging.vlog(1, 'Orbital %d iteration %d residual %.3e.',
                 diagnostics.orbital, iteration, norm)
    if not np.isfinite(norm) or norm > config.divergence_threshold:
      diagnostics.residual_norm = best_norm
      diagnostics.wall_ms = 1e3 * (time.perf_counter() - start)
      raise SolverDivergenceError(
          f'Residual norm {norm:.3e} at iteration {iteration} for orbital '
          f'{diagnostics.orbital} exceeds {config.divergence_threshold:g}.',
          diagnostics)
    if norm < best_norm:
      best, best_norm = amps, norm
    if norm <= config.tol:
      diagnostics.converged = True
      break
    step = _update(amps, res, d)
    trial = amps.pack() + step
    if accelerator is not None:
      trial = accelerator.extrapolate(trial, step)
    amps = amps.unpack(trial)

  diagnostics.residual_norm = best_norm
  diagnostics.wall_ms = 1e3 * (time.perf_counter() - start)
  if not diagnostics.converged:
    logging.warning(
        'Orbital %d not converged after %d iterations; best residual %.3e.',
        diagnostics.orbital, diagnostics.iterations, best_norm)
  return best, diagnostics
