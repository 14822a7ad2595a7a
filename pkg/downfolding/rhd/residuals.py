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
"""Dense residuals of the single-reference downfolding step.

These are the authoritative residuals; the factorized expressions and the
printed term table are checked against them.
"""

from typing import Tuple

import numpy as np

from downfolding.rhd import amplitudes
from downfolding.rhd import effective_hamiltonian
from downfolding.rhd import spin_orbital


def w2(h2: np.ndarray) -> np.ndarray:
  """Spin-summed two-body tensor, w2[i,j,a,b] = 2 h2[i,j,a,b] - h2[i,j,b,a]."""
  return 2.0 * h2 - h2.transpose(0, 1, 3, 2)


def permute_pair(x: np.ndarray) -> np.ndarray:
  """P{x}[a,b,i,j] = x[a,b,i,j] + x[b,a,j,i]."""
  return x + x.transpose(1, 0, 3, 2)


def _evaluate(
    hamiltonian: effective_hamiltonian.EffectiveHamiltonian,
    amps: amplitudes.AmplitudeSet
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
  space = hamiltonian.space
  r1, r2, _ = spin_orbital.spin_orbital_residuals(hamiltonian.h1,
                                                  hamiltonian.h2, amps, space)
  return spin_orbital.extract_residuals(r1, r2, space)


def residual_t1(hamiltonian: effective_hamiltonian.EffectiveHamiltonian,
                amps: amplitudes.AmplitudeSet) -> np.ndarray:
  """Singles residual r1[i] of the outermost orbital."""
  return _evaluate(hamiltonian, amps)[0]


def residual_t2(
    hamiltonian: effective_hamiltonian.EffectiveHamiltonian,
    amps: amplitudes.AmplitudeSet) -> Tuple[np.ndarray, np.ndarray]:
  """Mixed-doubles residual r2[b,i,j] and paired-doubles residual r2p[i,j]."""
  _, r2, r2p = _evaluate(hamiltonian, amps)
  return r2, r2p


def residuals(hamiltonian: effective_hamiltonian.EffectiveHamiltonian,
              amps: amplitudes.AmplitudeSet) -> amplitudes.ResidualSet:
  """All residual blocks of the step, shaped like `amps`.

  Args:
    hamiltonian: Current Hamiltonian; its last orbital is the target.
    amps: Trial amplitudes.

  Returns:
    The residuals. Under the independent interpretation the aN block is the
    mixed-doubles residual read with the occupied indices swapped.
  """
  r1, r2, r2p = _evaluate(hamiltonian, amps)
  r2_an = None
  if amps.interpretation is amplitudes.T2Interpretation.INDEPENDENT:
    r2_an = r2.transpose(0, 2, 1).copy()
  return amplitudes.ResidualSet(r1=r1, r2=r2, r2p=r2p, r2_an=r2_an)
