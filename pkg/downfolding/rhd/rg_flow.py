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
"""Renormalization of the Hamiltonian after one orbital is decoupled.

For a virtual target N with converged amplitudes the decoupled Hamiltonian
(1 - eta) H (1 + eta) is projected onto the space where N is empty. In the
chemist view g[p,q,r,s] = (pq|rs), with t(q) the singles, T[r,q,s] the mixed
doubles embedded over all orbitals and t3s the symmetrized paired doubles,

  h1'[p,q]   = h1[p,q] + h1[p,N] t(q),
  g'[p,q,r,s] = g[p,q,r,s] + g[p,N,r,s] t(q) + g[p,q,r,N] t(s)
              + c[p,q,r,s] + c[r,s,p,q],
  c[p,q,r,s] = h1[p,N] T[r,q,s] + sum_b g[p,N,r,b] T[b,q,s]
              + 1/2 g[p,N,r,N] t3s[q,s].

The three-body part of the transformed Hamiltonian is not carried. An
occupied target is decoupled by filling it: its diagonal energy goes to the
ledger and its mean field is folded into h1.
"""

from typing import Optional, Tuple

from absl import logging
import numpy as np
import opt_einsum as oe

from downfolding.integrals import molecular_system
from downfolding.rhd import amplitudes
from downfolding.rhd import effective_hamiltonian


def embed_amplitudes(
    amps: amplitudes.AmplitudeSet, space: amplitudes.StepSpace
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
  """Spreads the step amplitudes over all orbitals of the step.

  Returns:
    t1f[q], t2f[b,i,j] and the symmetrized paired doubles t3s[i,j], zero
    outside the occupied and virtual blocks.
  """
  n = space.n_orbitals
  o, v = space.occupied, space.virtual
  t1f = np.zeros(n)
  t1f[o] = amps.t1
  t2f = np.zeros((n, n, n))
  t2f[np.ix_(v, o, o)] = amps.effective_t2m()
  t3s = np.zeros((n, n))
  t3s[np.ix_(o, o)] = 0.5 * (amps.t3 + amps.t3.T)
  return t1f, t2f, t3s


def _fold_virtual(hamiltonian: effective_hamiltonian.EffectiveHamiltonian,
                  amps: amplitudes.AmplitudeSet):
  space = hamiltonian.space
  n = space.target
  h1 = hamiltonian.h1
  g = molecular_system.to_chemist(hamiltonian.h2)
  t1f, t2f, t3s = embed_amplitudes(amps, space)

  h1_new = h1 + np.outer(h1[:, n], t1f)
  c = (oe.contract('p,rqs->pqrs', h1[:, n], t2f) +
       oe.contract('prb,bqs->pqrs', g[:, n, :, :], t2f) +
       0.5 * oe.contract('pr,qs->pqrs', g[:, n, :, n], t3s))
  g_new = (g + oe.contract('prs,q->pqrs', g[:, n], t1f) +
           oe.contract('pqr,s->pqrs', g[:, :, :, n], t1f) + c +
           c.transpose(2, 3, 0, 1))
  return hamiltonian.restrict(
      np.arange(n),
      h1=h1_new,
      h2=molecular_system.from_chemist(g_new),
      step_energy=0.0)


def _fold_occupied(hamiltonian: effective_hamiltonian.EffectiveHamiltonian):
  n = hamiltonian.space.target
  h1 = hamiltonian.h1
  g = molecular_system.to_chemist(hamiltonian.h2)
  energy = 2.0 * h1[n, n] + g[n, n, n, n]
  h1_new = h1 + 2.0 * g[:, :, n, n] - g[:, n, n, :]
  return hamiltonian.restrict(
      np.arange(n),
      h1=h1_new,
      n_occupied=hamiltonian.n_occupied - 1,
      step_energy=energy)


def rg_update(
    hamiltonian: effective_hamiltonian.EffectiveHamiltonian,
    amps: Optional[amplitudes.AmplitudeSet] = None
) -> Tuple[effective_hamiltonian.EffectiveHamiltonian, float]:
  """Removes the outermost orbital and renormalizes the rest.

  Args:
    hamiltonian: Current Hamiltonian.
    amps: Converged amplitudes of a virtual target. Ignored for an occupied
      target; None stands for zero amplitudes.

  Returns:
    The Hamiltonian over one orbital fewer and the step energy, which is
    zero for a virtual target.
  """
  space = hamiltonian.space
  if hamiltonian.n_active < 1:
    raise ValueError('No orbital left to downfold.')
  if space.target_is_virtual:
    if amps is None:
      amps = amplitudes.AmplitudeSet.zeros(space)
    if not amps.is_finite():
      raise ValueError('Cannot renormalize with non-finite amplitudes.')
    reduced = _fold_virtual(hamiltonian, amps)
  else:
    reduced = _fold_occupied(hamiltonian)
  step_energy = reduced.energy_ledger[-1]
  logging.vlog(1, 'Folded orbital %d into %d remaining; step energy %.12g.',
               hamiltonian.labels[space.target], reduced.n_active, step_energy)
  return reduced, step_energy
