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
"""Dense Fock-space operators over a handful of spatial orbitals.

Spin orbital (p, s) is mode 2p + s with s = 0 for up and 1 for down. Basis
state `bits` is the determinant a+_{k1} a+_{k2} ... |vac> with the set bits
k1 < k2 < ..., so the basis is ordered by binary value and a ladder
operator on mode k picks up (-1)^(number of occupied modes below k).
"""

import dataclasses
from typing import Iterable, Optional, Sequence, Tuple

from absl import logging
import numpy as np
import scipy.linalg
import scipy.sparse

MAX_SPATIAL_ORBITALS = 5

UP = 0
DOWN = 1

# A ladder operator (is_creation, mode); a string applies right to left.
LadderOp = Tuple[bool, int]


class OracleSizeError(ValueError):
  pass


def check_size(n_spatial: int) -> None:
  if n_spatial > MAX_SPATIAL_ORBITALS:
    raise OracleSizeError(
        f'The Fock-space oracle handles at most {MAX_SPATIAL_ORBITALS} '
        f'spatial orbitals, got {n_spatial}.')
  if n_spatial < 1:
    raise OracleSizeError(f'Need at least one orbital, got {n_spatial}.')


def mode(orbital: int, spin: int) -> int:
  return 2 * orbital + spin


def popcount(x: np.ndarray) -> np.ndarray:
  x = np.asarray(x, dtype=np.int64)
  count = np.zeros_like(x)
  while np.any(x):
    count += x & 1
    x = x >> 1
  return count


def apply_string(ops: Sequence[LadderOp],
                 bits: int) -> Optional[Tuple[int, int]]:
  """Applies a ladder string to a basis state.

  Args:
    ops: Ladder operators in written order; the rightmost acts first.
    bits: Basis state.

  Returns:
    (sign, bits) of the image, or None if the string annihilates the state.
  """
  sign = 1
  for creation, k in reversed(ops):
    occupied = (bits >> k) & 1
    if occupied == creation:
      return None
    if bin(bits & ((1 << k) - 1)).count('1') % 2:
      sign = -sign
    bits ^= 1 << k
  return sign, bits


def determinant(modes: Iterable[int]) -> int:
  bits = 0
  for k in modes:
    bits |= 1 << k
  return bits


def reference_bits(n_occupied: int) -> int:
  """Closed-shell determinant with the lowest n_occupied orbitals filled."""
  return (1 << (2 * n_occupied)) - 1


@dataclasses.dataclass
class FockSpaceOperator:
  """Dense matrix over the 4**n_spatial occupation-number basis."""
  matrix: np.ndarray
  n_spatial: int

  def __post_init__(self):
    dim = 4**self.n_spatial
    if self.matrix.shape != (dim, dim):
      raise ValueError(
          f'Expected a {dim}x{dim} matrix for {self.n_spatial} orbitals, got '
          f'{self.matrix.shape}.')

  @property
  def dim(self) -> int:
    return self.matrix.shape[0]

  def is_hermitian(self, atol: float = 1e-12) -> bool:
    return np.allclose(self.matrix, self.matrix.T, atol=atol, rtol=0.0)


class FockSpace:
  """Sparse ladder operators of one Fock space."""

  def __init__(self, n_spatial: int):
    check_size(n_spatial)
    self.n_spatial = n_spatial
    self.n_modes = 2 * n_spatial
    self.dim = 1 << self.n_modes
    self._states = np.arange(self.dim, dtype=np.int64)
    self._annihilators = [
        self._build_annihilator(k) for k in range(self.n_modes)
    ]

  def _build_annihilator(self, k: int) -> scipy.sparse.csr_matrix:
    states = self._states
    source = states[(states >> k) & 1 == 1]
    sign = 1.0 - 2.0 * (popcount(source & ((1 << k) - 1)) % 2)
    return scipy.sparse.csr_matrix((sign, (source ^ (1 << k), source)),
                                   shape=(self.dim, self.dim))

  def annihilator(self, k: int) -> scipy.sparse.csr_matrix:
    return self._annihilators[k]

  def creator(self, k: int) -> scipy.sparse.csr_matrix:
    return self.annihilator(k).T.tocsr()

  def number(self, k: int) -> scipy.sparse.csr_matrix:
    occupied = ((self._states >> k) & 1).astype(np.float64)
    return scipy.sparse.diags(occupied, format='csr')

  def identity(self) -> scipy.sparse.csr_matrix:
    return scipy.sparse.identity(self.dim, format='csr')

  def string(self, ops: Sequence[LadderOp]) -> scipy.sparse.csr_matrix:
    result = self.identity()
    for creation, k in ops:
      result = result @ (self.creator(k) if creation else self.annihilator(k))
    return result

  def total_number(self) -> np.ndarray:
    return popcount(self._states)

  def sz2(self) -> np.ndarray:
    """Twice S_z of every basis state."""
    up = popcount(self._states & int('01' * self.n_spatial, 2))
    return 2 * up - self.total_number()

  def sector(self, n_electrons: int, sz2: Optional[int] = 0) -> np.ndarray:
    """Basis states with the given particle number and 2 S_z."""
    keep = self.total_number() == n_electrons
    if sz2 is not None:
      keep &= self.sz2() == sz2
    return self._states[keep]


def build_hamiltonian(h1: np.ndarray, h2: np.ndarray) -> FockSpaceOperator:
  """H = sum h1[a,b] a+ b + 1/2 sum h2[a,b,c,d] a+_s b+_t c_t d_s.

  Args:
    h1: One-body tensor.
    h2: Two-body tensor in operator ordering, h2[a,b,c,d] = (ad|bc).

  Returns:
    The Hamiltonian on the full Fock space. It conserves particle number
    and is Hermitian whenever the tensors carry the real integral
    symmetries.
  """
  n = h1.shape[0]
  space = FockSpace(n)
  annihilators = [space.annihilator(k) for k in range(space.n_modes)]
  creators = [space.creator(k) for k in range(space.n_modes)]
  matrix = scipy.sparse.csr_matrix((space.dim, space.dim))
  for s in (UP, DOWN):
    for a in range(n):
      for b in range(n):
        if h1[a, b] != 0.0:
          matrix = matrix + h1[a, b] * (
              creators[mode(a, s)] @ annihilators[mode(b, s)])
  for s in (UP, DOWN):
    for t in (UP, DOWN):
      for a in range(n):
        for b in range(n):
          pair = creators[mode(a, s)] @ creators[mode(b, t)]
          inner = scipy.sparse.csr_matrix((space.dim, space.dim))
          for c in range(n):
            for d in range(n):
              if h2[a, b, c, d] != 0.0:
                inner = inner + h2[a, b, c, d] * (
                    annihilators[mode(c, t)] @ annihilators[mode(d, s)])
          if inner.nnz:
            matrix = matrix + 0.5 * (pair @ inner)
  logging.vlog(1, 'Built the Fock-space Hamiltonian over %d orbitals.', n)
  return FockSpaceOperator(matrix=matrix.toarray(), n_spatial=n)


def sector_block(operator: FockSpaceOperator,
                 states: np.ndarray) -> np.ndarray:
  return operator.matrix[np.ix_(states, states)]


def ground_state_energy(h1: np.ndarray,
                        h2: np.ndarray,
                        core_energy: float,
                        n_electrons: int,
                        sz2: int = 0) -> float:
  """Lowest eigenvalue in the (n_electrons, S_z) sector plus the core energy.

  Args:
    h1: One-body tensor, Hermitian.
    h2: Two-body tensor in operator ordering.
    core_energy: Constant shift.
    n_electrons: Particle number of the sector.
    sz2: Twice S_z of the sector.

  Returns:
    The full configuration-interaction energy of the sector.
  """
  hamiltonian = build_hamiltonian(h1, h2)
  states = FockSpace(hamiltonian.n_spatial).sector(n_electrons, sz2)
  if states.size == 0:
    raise ValueError(
        f'No states with {n_electrons} electrons and 2Sz={sz2} in '
        f'{hamiltonian.n_spatial} orbitals.')
  block = sector_block(hamiltonian, states)
  return float(scipy.linalg.eigvalsh(block)[0]) + core_energy
