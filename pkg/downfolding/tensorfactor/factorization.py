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
"""Two-level factorization of a Hamiltonian's two-electron integrals.

(pq|rs) ~ sum_x s_x L[x,p,q] L[x,r,s] and L[x,p,q] ~ sum_p X Y Z, so that

  (pq|rs) ~ sum_{x,p,q} (s_x X[x,p]) X[x,q] Y[p,p'] Z[q,p'] Y[r,q'] Z[s,q'].

`xs` below denotes the signed first factor s_x X[x,p].
"""

import dataclasses
from typing import Any, Dict, Optional

from absl import logging
import gin
import numpy as np
import opt_einsum as oe

from downfolding.integrals import molecular_system
from downfolding.tensorfactor import cholesky
from downfolding.tensorfactor import cp_als


@gin.configurable
@dataclasses.dataclass
class FactorizationConfig:
  """Tolerances and ranks of the factorized representation.

  Attributes:
    delta: Cholesky tolerance.
    htf_mult: N_htf = ceil(htf_mult * N_aux).
    ttf_rank: N_ttf override; 0 selects max(N_v, 2 N_o).
    max_sweeps: CP-ALS sweep cap.
    tol: CP-ALS tolerance.
    seed: CP-ALS random seed.
    init: CP-ALS initialization, 'unfold' or 'random'.
    enforce_rank_ordering: Raise instead of warn when
      N_htf > N_aux > N_ttf > N_v > N_o does not hold.
  """
  delta: float = 1e-6
  htf_mult: float = 2.0
  ttf_rank: int = 0
  max_sweeps: int = 500
  tol: float = 1e-8
  seed: int = 0
  init: str = 'unfold'
  enforce_rank_ordering: bool = False

  def __post_init__(self):
    if self.delta <= 0 or self.tol <= 0:
      raise ValueError('Factorization tolerances must be positive.')
    if self.htf_mult < 0.5:
      raise ValueError(f'htf_mult must be >= 0.5, got {self.htf_mult}.')


@dataclasses.dataclass
class FactorizedHamiltonian:
  """Cholesky and CP factors of one set of two-electron integrals."""
  cholesky: cholesky.CholeskyFactors
  cp: cp_als.CPFactors
  norm: float

  @property
  def n_aux(self) -> int:
    return self.cholesky.n_aux

  @property
  def n_htf(self) -> int:
    return self.cp.rank

  @property
  def xs(self) -> np.ndarray:
    return self.cholesky.signs[:, None] * self.cp.x

  def chemist(self) -> np.ndarray:
    """The chemist tensor carried by the CP factors."""
    n = self.cp.y.shape[0]
    if self.n_aux == 0:
      return np.zeros((n,) * 4)
    return oe.contract('xp,xq,ap,ip,bq,jq->aibj', self.xs, self.cp.x,
                       self.cp.y, self.cp.z, self.cp.y, self.cp.z)

  def h2(self) -> np.ndarray:
    return eri_from_cp(self)

  def report(self) -> Dict[str, Any]:
    relative = self.cp.error / max(
        float(np.linalg.norm(self.cholesky.vectors)), 1e-300)
    return {
        'n_aux': self.n_aux,
        'n_htf': self.n_htf,
        'signed': self.cholesky.is_signed,
        'cholesky_error': self.cholesky.error,
        'cp_error': self.cp.error,
        'cp_relative_error': relative if self.n_aux else 0.0,
        'cp_sweeps': self.cp.sweeps,
        'eri_norm': self.norm,
    }


def eri_from_cp(factors: FactorizedHamiltonian) -> np.ndarray:
  """Rebuilds the operator-ordered h2 tensor from CP factors."""
  return molecular_system.from_chemist(factors.chemist())


def factorize_hamiltonian(
    h2: np.ndarray,
    config: Optional[FactorizationConfig] = None) -> FactorizedHamiltonian:
  """Cholesky-decomposes h2 and CP-factors the Cholesky vectors."""
  config = config or FactorizationConfig()
  chol = cholesky.decompose_eri(h2, delta=config.delta)
  n = h2.shape[0]
  if chol.n_aux == 0:
    rank = 1
    cp = cp_als.CPFactors(
        np.zeros((0, rank)), np.zeros((n, rank)), np.zeros((n, rank)),
        errors=[0.0])
  else:
    rank = cp_als.default_htf_rank(chol.n_aux, config.htf_mult)
    cp = cp_als.cp_als(
        chol.vectors,
        rank,
        max_sweeps=config.max_sweeps,
        tol=config.tol,
        seed=config.seed,
        init=config.init)
  factors = FactorizedHamiltonian(
      cholesky=chol,
      cp=cp,
      norm=float(np.linalg.norm(h2)))
  logging.info('Factorized %d orbitals: N_aux=%d N_htf=%d CP error %.3e.', n,
               factors.n_aux, factors.n_htf, cp.error)
  return factors
