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
"""Pivoted Cholesky factorization of two-electron integrals.

The chemist tensor (pq|rs) is read as the matrix M[(pq),(rs)] and factored
as M = sum_x s_x L_x L_x^T with s_x = +1 for every Cholesky vector. The
renormalized integrals produced while downfolding are symmetric under the
pair swap (pq) <-> (rs) but not necessarily positive semidefinite; for those
`decompose_eri` falls back to a signed eigendecomposition, s_x = sign of the
eigenvalue.
"""

import dataclasses
from typing import Optional

from absl import logging
import gin
import numpy as np
import scipy.linalg

from downfolding.integrals import molecular_system


class NotPositiveSemidefiniteError(ValueError):
  """Raised when a residual diagonal turns negative beyond tolerance."""
  pass


@dataclasses.dataclass
class CholeskyFactors:
  """Cholesky vectors of a chemist ERI tensor.

  Attributes:
    vectors: L[x, p, q], shape (n_aux, n, n).
    signs: s_x in {+1, -1}, shape (n_aux,).
    error: Frobenius error of the reconstruction.
    delta: Tolerance the factors were built with.
  """
  vectors: np.ndarray
  signs: np.ndarray
  error: float = 0.0
  delta: float = 0.0

  @property
  def n_aux(self) -> int:
    return self.vectors.shape[0]

  @property
  def n_orbitals(self) -> int:
    return self.vectors.shape[1]

  @property
  def is_signed(self) -> bool:
    return bool(np.any(self.signs < 0))

  def signed_vectors(self) -> np.ndarray:
    """Returns s_x L_x, the left factor of the reconstruction."""
    return self.signs[:, None, None] * self.vectors


def _as_matrix(g: np.ndarray) -> np.ndarray:
  n = g.shape[0]
  return g.reshape(n * n, n * n)


def reconstruct_chemist(factors: CholeskyFactors) -> np.ndarray:
  """Returns sum_x s_x L_x[p,q] L_x[r,s]."""
  n = factors.n_orbitals
  if factors.n_aux == 0:
    return np.zeros((n,) * 4)
  return np.einsum('xpq,xrs->pqrs', factors.signed_vectors(), factors.vectors)


def eri_from_cholesky(factors: CholeskyFactors) -> np.ndarray:
  """Rebuilds the operator-ordered h2 tensor from Cholesky factors."""
  return molecular_system.from_chemist(reconstruct_chemist(factors))


def _error(g: np.ndarray, factors: CholeskyFactors) -> float:
  return float(np.linalg.norm(g - reconstruct_chemist(factors)))


@gin.configurable
def pivoted_cholesky(h2: np.ndarray,
                     delta: float = 1e-6,
                     max_vectors: Optional[int] = None) -> CholeskyFactors:
  """Diagonal-pivoted Cholesky decomposition of the ERI matrix.

  Args:
    h2: Two-electron integrals in operator ordering.
    delta: Stop once the largest residual diagonal falls below delta.
    max_vectors: Optional cap on the number of vectors.

  Returns:
    The Cholesky factors, all signs +1.

  Raises:
    NotPositiveSemidefiniteError: If a residual diagonal drops below
      -10 * delta.
  """
  g = molecular_system.to_chemist(h2)
  n = g.shape[0]
  m = _as_matrix(g)
  diagonal = np.array(np.diag(m), dtype=np.float64)
  max_vectors = n * n if max_vectors is None else min(max_vectors, n * n)
  columns = []
  while len(columns) < max_vectors:
    if diagonal.min(initial=0.0) < -10.0 * delta:
      raise NotPositiveSemidefiniteError(
          f'Residual diagonal {diagonal.min():.3e} after {len(columns)} '
          'vectors; the integrals are not positive semidefinite.')
    pivot = int(np.argmax(diagonal))
    if diagonal[pivot] < delta:
      break
    column = m[:, pivot].copy()
    for previous in columns:
      column -= previous * previous[pivot]
    column /= np.sqrt(diagonal[pivot])
    columns.append(column)
    diagonal -= column**2
    diagonal[pivot] = 0.0
  vectors = (np.array(columns).reshape(len(columns), n, n)
             if columns else np.zeros((0, n, n)))
  factors = CholeskyFactors(
      vectors=vectors, signs=np.ones(len(columns)), delta=delta)
  factors.error = _error(g, factors)
  logging.info('Pivoted Cholesky: %d vectors, error %.3e.', factors.n_aux,
               factors.error)
  return factors


def signed_eigendecomposition(h2: np.ndarray,
                              delta: float = 1e-6) -> CholeskyFactors:
  """Factors a pair-swap symmetric ERI matrix through its eigenvectors.

  Eigenpairs with |lambda| < delta are dropped. The vectors are
  sqrt(|lambda|) v and the signs are sign(lambda).

  Args:
    h2: Two-electron integrals in operator ordering.
    delta: Eigenvalue cutoff.

  Returns:
    The signed factors, ordered by decreasing |lambda|.
  """
  g = molecular_system.to_chemist(h2)
  n = g.shape[0]
  m = _as_matrix(g)
  m = 0.5 * (m + m.T)
  eigvals, eigvecs = scipy.linalg.eigh(m)
  keep = np.flatnonzero(np.abs(eigvals) >= delta)
  keep = keep[np.argsort(-np.abs(eigvals[keep]), kind='stable')]
  vectors = (np.sqrt(np.abs(eigvals[keep]))[None, :] * eigvecs[:, keep]).T
  factors = CholeskyFactors(
      vectors=vectors.reshape(len(keep), n, n),
      signs=np.sign(eigvals[keep]),
      delta=delta)
  factors.error = _error(g, factors)
  logging.info('Signed eigendecomposition: %d vectors (%d negative), '
               'error %.3e.', factors.n_aux, int(np.sum(factors.signs < 0)),
               factors.error)
  return factors


@gin.configurable
def decompose_eri(h2: np.ndarray, delta: float = 1e-6) -> CholeskyFactors:
  """Cholesky factors when possible, signed eigenvectors otherwise."""
  # A positive semidefinite remainder with diagonal below delta has
  # Frobenius norm below n^2 * delta.
  bound = h2.shape[0]**2 * delta
  try:
    factors = pivoted_cholesky(h2, delta=delta)
    if factors.error <= bound:
      return factors
    logging.warning('Cholesky error %.3e above tolerance; the integrals are '
                    'indefinite.', factors.error)
  except NotPositiveSemidefiniteError as e:
    logging.warning('%s Falling back to a signed eigendecomposition.', e)
  return signed_eigendecomposition(h2, delta=delta)
