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
"""Orbital ordering, classification and Fock matrices."""

from typing import Iterable, Optional, Sequence

from absl import logging
import numpy as np

from downfolding.integrals import molecular_system

OrbitalClass = molecular_system.OrbitalClass


def order_orbitals(system: molecular_system.MolecularSystem) -> np.ndarray:
  """Returns the permutation sorting orbital energies ascending.

  Degenerate energies keep their original relative order.

  Args:
    system: The molecular system.

  Returns:
    An integer array `perm` such that `system.mo_energies[perm]` is sorted.
  """
  return np.argsort(system.mo_energies, kind='stable')


def classify_orbitals(
    system: molecular_system.MolecularSystem,
    n_electrons: Optional[int] = None,
    active: Optional[Iterable[int]] = None
) -> molecular_system.OrbitalClassification:
  """Labels the orbitals of an energy-ordered basis.

  The lowest n_electrons / 2 orbitals are doubly occupied. They are labelled
  core unless they fall inside the requested active window; an active
  window may also extend into the virtual range.

  Args:
    system: The molecular system, in the ordered basis.
    n_electrons: Electron count, defaults to `system.n_electrons`.
    active: Optional orbital indices to label active.

  Returns:
    The classification.

  Raises:
    ValueError: If the electrons do not fit or the window is out of range.
  """
  n = system.n_spatial
  n_electrons = system.n_electrons if n_electrons is None else n_electrons
  if n_electrons > 2 * n:
    raise ValueError(
        f'{n_electrons} electrons do not fit in {n} spatial orbitals.')
  if n_electrons % 2:
    raise ValueError(f'Odd electron count {n_electrons} is not supported.')
  active = set(active or ())
  if any(a < 0 or a >= n for a in active):
    raise ValueError(f'Active window {sorted(active)} outside [0, {n}).')
  n_occ = n_electrons // 2
  labels = []
  for i in range(n):
    if i in active:
      labels.append(OrbitalClass.ACTIVE)
    elif i < n_occ:
      labels.append(OrbitalClass.CORE)
    else:
      labels.append(OrbitalClass.VIRTUAL)
  classification = molecular_system.OrbitalClassification(
      tuple(labels), n_occ)
  logging.info('Orbital classification: %s', classification)
  return classification


def fock_matrix(h1: np.ndarray, h2: np.ndarray,
                occupied: Sequence[int]) -> np.ndarray:
  """Closed-shell Fock matrix f_pq = h1_pq + sum_i 2 (pq|ii) - (pi|iq).

  Args:
    h1: One-electron integrals.
    h2: Two-electron integrals in operator ordering, h2[a,b,c,d] = (ad|bc).
    occupied: Doubly occupied orbitals.

  Returns:
    The Fock matrix. It is symmetric whenever h1 and h2 carry the real
    integral symmetries.
  """
  occ = np.asarray(occupied, dtype=int)
  if occ.size == 0:
    return np.array(h1, dtype=np.float64)
  # (pq|ii) = h2[p,i,i,q] and (pi|iq) = h2[p,i,q,i].
  coulomb = np.einsum('piiq->pq', h2[:, occ][:, :, occ])
  exchange = np.einsum('piqi->pq', h2[:, occ][:, :, :, occ])
  return h1 + 2.0 * coulomb - exchange
