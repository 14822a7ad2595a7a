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
"""Molecular system records and the two-electron integral convention.

Two-electron integrals are stored in the operator ordering of the
Hamiltonian

  H = sum_{ab,s} h1[a,b] f+_{a,s} f_{b,s}
      + 1/2 sum_{abcd,s,t} h2[a,b,c,d] f+_{a,s} f+_{b,t} f_{c,t} f_{d,s},

so that h2[a,b,c,d] equals the chemist integral (ad|bc). Slices named in the
amplitude equations, e.g. h2[a,N,i,j], index this tensor directly. Chemist
views are produced at the boundary with `to_chemist` and read back with
`from_chemist`.
"""

import dataclasses
import enum
from typing import Optional, Sequence, Tuple

import numpy as np

# Symmetry tolerance used by the validators.
SYMMETRY_ATOL = 1e-12


@enum.unique
class OrbitalClass(enum.Enum):
  """Orbital labels used when downfolding."""
  VIRTUAL = 'V'
  CORE = 'C'
  ACTIVE = 'A'


@dataclasses.dataclass
class MolecularSystem:
  """A closed-shell molecular system read from an integral file.

  Attributes:
    n_spatial: Number of spatial orbitals.
    n_electrons: Number of electrons. Must be even.
    mo_energies: Orbital energies in Hartree, length n_spatial.
    ms2: Twice the spin projection. Only 0 is supported.
    orbsym: Point group irreps of the orbitals, as written in the file.
    isym: Irrep of the target state.
  """
  n_spatial: int
  n_electrons: int
  mo_energies: np.ndarray
  ms2: int = 0
  orbsym: Tuple[int, ...] = ()
  isym: int = 1

  def __post_init__(self):
    self.mo_energies = np.asarray(self.mo_energies, dtype=np.float64)
    if self.n_electrons % 2:
      raise ValueError(
          f'Only closed-shell systems are supported, got {self.n_electrons} '
          'electrons.')
    if self.mo_energies.shape != (self.n_spatial,):
      raise ValueError(
          f'Expected {self.n_spatial} orbital energies, got '
          f'{self.mo_energies.shape}.')
    if not np.all(np.isfinite(self.mo_energies)):
      raise ValueError('Orbital energies must be finite.')

  @property
  def n_occupied(self) -> int:
    return self.n_electrons // 2


@dataclasses.dataclass
class OrbitalClassification:
  """Per-orbital labels in the ordered basis.

  Attributes:
    labels: One label per orbital.
    n_occupied: Number of doubly occupied orbitals of the reference
      determinant; they are the lowest ones. Active orbitals may sit on
      either side of the Fermi level.
  """
  labels: Tuple[OrbitalClass, ...]
  n_occupied: int

  def __len__(self) -> int:
    return len(self.labels)

  def indices(self, *classes: OrbitalClass) -> np.ndarray:
    return np.array([i for i, c in enumerate(self.labels) if c in classes],
                    dtype=int)

  @property
  def occupied(self) -> np.ndarray:
    """Doubly occupied orbitals in the reference determinant."""
    return np.arange(self.n_occupied)

  @property
  def frozen(self) -> np.ndarray:
    """Orbitals that are never downfolded."""
    return self.indices(OrbitalClass.ACTIVE)

  def __str__(self) -> str:
    return ''.join(c.value for c in self.labels)


def to_chemist(h2: np.ndarray) -> np.ndarray:
  """Returns g[p,q,r,s] = (pq|rs) from the operator-ordered tensor."""
  return np.ascontiguousarray(np.einsum('prsq->pqrs', h2))


def from_chemist(g: np.ndarray) -> np.ndarray:
  """Returns the operator-ordered h2[a,b,c,d] = (ad|bc)."""
  return np.ascontiguousarray(np.einsum('adbc->abcd', g))


def symmetrize_chemist(g: np.ndarray) -> np.ndarray:
  """Completes the 8-fold real symmetry of a partially filled chemist tensor.

  Entries that are zero in every symmetry image stay zero. Nonzero images
  must agree; the first nonzero value found wins.

  Args:
    g: Chemist tensor (pq|rs) with some images left at zero.

  Returns:
    A new tensor with all 8 images filled in.
  """
  out = np.array(g, dtype=np.float64)
  for perm in ('pqrs', 'qprs', 'pqsr', 'qpsr', 'rspq', 'srpq', 'rsqp',
               'srqp'):
    image = np.einsum(f'{perm}->pqrs', g)
    fill = (out == 0.0) & (image != 0.0)
    out[fill] = image[fill]
  return out


def check_eight_fold(g: np.ndarray, atol: float = SYMMETRY_ATOL) -> bool:
  """Returns True if the chemist tensor has real 8-fold symmetry."""
  for perm in ('qprs', 'pqsr', 'rspq'):
    if not np.allclose(g, np.einsum(f'{perm}->pqrs', g), atol=atol, rtol=0):
      return False
  return True


def permute_integrals(
    h1: np.ndarray, h2: np.ndarray,
    perm: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
  """Reorders both tensors so that new orbital k is old orbital perm[k]."""
  perm = np.asarray(perm, dtype=int)
  return (h1[np.ix_(perm, perm)].copy(),
          h2[np.ix_(perm, perm, perm, perm)].copy())


def hartree_fock_energy(h1: np.ndarray,
                        h2: np.ndarray,
                        occupied: Sequence[int],
                        core_energy: float = 0.0) -> float:
  """Closed-shell determinant energy <Phi|H|Phi> plus the core energy."""
  occ = np.asarray(occupied, dtype=int)
  if occ.size == 0:
    return float(core_energy)
  g = to_chemist(h2)[np.ix_(occ, occ, occ, occ)]
  one_body = 2.0 * np.trace(h1[np.ix_(occ, occ)])
  coulomb = 2.0 * np.einsum('iijj->', g)
  exchange = np.einsum('ijji->', g)
  return float(core_energy + one_body + coulomb - exchange)


def validate_tensors(h1: np.ndarray,
                     h2: np.ndarray,
                     n_spatial: Optional[int] = None) -> None:
  """Raises ValueError if the tensor shapes disagree."""
  n = h1.shape[0] if n_spatial is None else n_spatial
  if h1.shape != (n, n):
    raise ValueError(f'h1 must be {n}x{n}, got {h1.shape}.')
  if h2.shape != (n, n, n, n):
    raise ValueError(f'h2 must have shape {(n,) * 4}, got {h2.shape}.')
