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
"""The Hamiltonian being downfolded, one orbital at a time."""

import dataclasses
from typing import Optional, Sequence, Tuple

import numpy as np

from downfolding.integrals import fcidump
from downfolding.integrals import molecular_system
from downfolding.integrals import orbitals
from downfolding.rhd import amplitudes


@dataclasses.dataclass
class EffectiveHamiltonian:
  """One- and two-body tensors over the orbitals not yet downfolded.

  The orbitals are kept in ascending energy order so the next target is
  always the last one. After the first virtual step h1 and h2 are no longer
  Hermitian; h2 keeps the pair-swap symmetry h2[a,b,c,d] = h2[b,a,d,c].

  Attributes:
    h1: One-body tensor over the active orbitals.
    h2: Two-body tensor in operator ordering.
    n_occupied: Doubly occupied orbitals of the reference, the lowest ones.
    core_energy: Constant shift carried from the integral file.
    energy_ledger: Diagonal energies of the downfolded orbitals, in order.
    labels: Original orbital index of every active orbital.
    fock: Fock matrix of the reference determinant, rebuilt on
      construction.
  """
  h1: np.ndarray
  h2: np.ndarray
  n_occupied: int
  core_energy: float = 0.0
  energy_ledger: Tuple[float, ...] = ()
  labels: Tuple[int, ...] = ()
  fock: np.ndarray = dataclasses.field(init=False, repr=False)

  def __post_init__(self):
    molecular_system.validate_tensors(self.h1, self.h2)
    if not self.labels:
      self.labels = tuple(range(self.n_active))
    if len(self.labels) != self.n_active:
      raise ValueError(
          f'{len(self.labels)} labels for {self.n_active} orbitals.')
    if not 0 <= self.n_occupied <= self.n_active:
      raise ValueError(
          f'{self.n_occupied} occupied orbitals out of {self.n_active}.')
    self.fock = orbitals.fock_matrix(self.h1, self.h2,
                                     np.arange(self.n_occupied))

  @property
  def n_active(self) -> int:
    return self.h1.shape[0]

  @property
  def n_electrons(self) -> int:
    return 2 * self.n_occupied

  @property
  def space(self) -> amplitudes.StepSpace:
    return amplitudes.StepSpace(self.n_active, self.n_occupied)

  def reference_energy(self) -> float:
    """<Phi|H|Phi> of the active tensors, without core or ledger."""
    return molecular_system.hartree_fock_energy(self.h1, self.h2,
                                                np.arange(self.n_occupied))

  def total_energy(self) -> float:
    return (self.core_energy + float(sum(self.energy_ledger)) +
            self.reference_energy())

  def is_hermitian(self, atol: float = 1e-10) -> bool:
    g = molecular_system.to_chemist(self.h2)
    return (np.allclose(self.h1, self.h1.T, atol=atol, rtol=0) and
            molecular_system.check_eight_fold(g, atol=atol))

  def restrict(self,
               keep: Sequence[int],
               h1: Optional[np.ndarray] = None,
               h2: Optional[np.ndarray] = None,
               n_occupied: Optional[int] = None,
               step_energy: Optional[float] = None) -> 'EffectiveHamiltonian':
    """Returns a Hamiltonian over `keep`, optionally from new tensors.

    Args:
      keep: Orbitals to keep, in order.
      h1: Replacement one-body tensor over the current orbitals.
      h2: Replacement two-body tensor over the current orbitals.
      n_occupied: Occupied count of the result.
      step_energy: Appended to the energy ledger when given.

    Returns:
      The restricted Hamiltonian.
    """
    keep = np.asarray(keep, dtype=int)
    h1 = self.h1 if h1 is None else h1
    h2 = self.h2 if h2 is None else h2
    ledger = self.energy_ledger
    if step_energy is not None:
      ledger = ledger + (float(step_energy),)
    return EffectiveHamiltonian(
        h1=h1[np.ix_(keep, keep)].copy(),
        h2=h2[np.ix_(keep, keep, keep, keep)].copy(),
        n_occupied=self.n_occupied if n_occupied is None else n_occupied,
        core_energy=self.core_energy,
        energy_ledger=ledger,
        labels=tuple(self.labels[k] for k in keep))


def from_integrals(
    integrals: fcidump.Integrals,
    classification: Optional[molecular_system.OrbitalClassification] = None
) -> EffectiveHamiltonian:
  """Orders the orbitals by energy and wraps the tensors.

  Args:
    integrals: Parsed integrals.
    classification: Labels of the energy-ordered orbitals; sets the number
      of occupied orbitals. Defaults to aufbau filling.

  Returns:
    The starting Hamiltonian, with labels pointing at file orbitals.
  """
  system = integrals.system
  perm = orbitals.order_orbitals(system)
  h1, h2 = molecular_system.permute_integrals(integrals.h1, integrals.h2,
                                              perm)
  n_occupied = (
      system.n_occupied
      if classification is None else classification.n_occupied)
  return EffectiveHamiltonian(
      h1=h1,
      h2=h2,
      n_occupied=n_occupied,
      core_energy=integrals.core_energy,
      labels=tuple(int(p) for p in perm))
