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
"""Pulay extrapolation over the iterative subspace."""

import collections

from absl import logging
import numpy as np


class DIIS:
  """Extrapolates a fixed-point iteration from its recent error vectors.

  The coefficients c minimize |sum_k c_k e_k| subject to sum_k c_k = 1,
  which is the bordered linear system

    [B  -1] [c]   [ 0]
    [-1  0] [l] = [-1],   B_kl = <e_k, e_l>.
  """

  def __init__(self, max_vectors: int = 8, start_iteration: int = 1):
    if max_vectors < 1:
      raise ValueError(f'max_vectors must be positive, got {max_vectors}.')
    self._start = start_iteration
    self._iteration = 0
    self._solutions = collections.deque(maxlen=max_vectors)
    self._errors = collections.deque(maxlen=max_vectors)

  def __len__(self) -> int:
    return len(self._solutions)

  def reset(self) -> None:
    self._iteration = 0
    self._solutions.clear()
    self._errors.clear()

  def extrapolate(self, solution: np.ndarray, error: np.ndarray) -> np.ndarray:
    """Stores (solution, error) and returns the extrapolated solution.

    Args:
      solution: Flattened iterate.
      error: Flattened error vector of the iterate.

    Returns:
      The DIIS combination of the stored iterates, or `solution` itself
      before `start_iteration` vectors are stored or when the subspace
      equations are singular.
    """
    self._iteration += 1
    self._solutions.append(np.array(solution, dtype=np.float64))
    self._errors.append(np.array(error, dtype=np.float64))
    if self._iteration <= self._start or len(self._solutions) < 2:
      return solution

    dim = len(self._errors) + 1
    errors = np.stack(self._errors)
    b = np.zeros((dim, dim))
    b[:-1, :-1] = errors @ errors.T
    b[:-1, -1] = -1.0
    b[-1, :-1] = -1.0
    rhs = np.zeros(dim)
    rhs[-1] = -1.0
    try:
      coefficients = np.linalg.solve(b, rhs)[:-1]
    except np.linalg.LinAlgError:
      logging.vlog(1, 'Singular DIIS subspace of size %d.', dim - 1)
      return solution
    if not np.all(np.isfinite(coefficients)):
      return solution
    return coefficients @ np.stack(self._solutions)
