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
"""Canonical polyadic decomposition of three-index tensors by ALS.

A tensor A[x,a,i] is approximated by sum_p X[x,p] Y[a,p] Z[i,p]. Each sweep
solves the three linear least-squares problems in the order Z, X, Y with
the Hadamard normal matrix, e.g. P = (X^T X) * (Y^T Y) and Z = C P^-1 with
C[i,p] = sum_xa A[x,a,i] X[x,p] Y[a,p].
"""

import dataclasses
import enum
from typing import List, Optional, Tuple, Union

from absl import logging
import gin
import numpy as np
import opt_einsum as oe
import scipy.linalg

from downfolding.tensorfactor import cholesky

# Relative ridge added to an ill-conditioned normal matrix, scaled by
# trace(P) / rank.
RIDGE = 1e-10
# Normal matrices better conditioned than this are solved exactly.
MAX_CONDITION = 1e12
# Stop once a sweep lowers the error by less than this fraction.
STALL_TOL = 1e-8


@enum.unique
class InitMethod(enum.Enum):
  RANDOM = 'random'
  UNFOLD = 'unfold'


@dataclasses.dataclass
class CPFactors:
  """Rank-R factors of a three-index tensor.

  Attributes:
    x: First-mode factor, shape (I, R).
    y: Second-mode factor, shape (J, R).
    z: Third-mode factor, shape (K, R).
    errors: Frobenius error after initialization and after every sweep.
    converged: Whether a stopping criterion was met before max_sweeps.
  """
  x: np.ndarray
  y: np.ndarray
  z: np.ndarray
  errors: List[float] = dataclasses.field(default_factory=list)
  converged: bool = True

  @property
  def rank(self) -> int:
    return self.x.shape[1]

  @property
  def shape(self) -> Tuple[int, int, int]:
    return (self.x.shape[0], self.y.shape[0], self.z.shape[0])

  @property
  def error(self) -> float:
    return self.errors[-1] if self.errors else float('nan')

  @property
  def sweeps(self) -> int:
    return max(len(self.errors) - 1, 0)


@dataclasses.dataclass
class AmplitudeFactors:
  """Factors t2[a,i,j] ~ sum_r T[a,r] U[i,r] V[j,r]."""
  t: np.ndarray
  u: np.ndarray
  v: np.ndarray
  error: float = 0.0

  @property
  def rank(self) -> int:
    return self.t.shape[1]


def cp_reconstruct(factors: CPFactors) -> np.ndarray:
  """Returns the dense tensor sum_p X[x,p] Y[a,p] Z[i,p]."""
  return oe.contract('xp,ap,ip->xai', factors.x, factors.y, factors.z)


def cp_error(factors: CPFactors, reference: np.ndarray) -> float:
  """Frobenius distance between the factors and a reference tensor."""
  if tuple(reference.shape) != factors.shape:
    raise ValueError(
        f'Reference shape {reference.shape} does not match factors '
        f'{factors.shape}.')
  return float(np.linalg.norm(reference - cp_reconstruct(factors)))


def _solve_normal(c: np.ndarray, p: np.ndarray) -> np.ndarray:
  """Returns C P^-1 for the symmetric normal matrix P."""
  trace = float(np.trace(p))
  if trace <= 0.0:
    return np.zeros_like(c)
  if np.linalg.cond(p) < MAX_CONDITION:
    try:
      return scipy.linalg.solve(p, c.T, assume_a='pos').T
    except scipy.linalg.LinAlgError:
      pass
  ridge = RIDGE * trace / p.shape[0]
  regularized = p + ridge * np.eye(p.shape[0])
  try:
    return scipy.linalg.solve(regularized, c.T, assume_a='pos').T
  except scipy.linalg.LinAlgError:
    return scipy.linalg.lstsq(regularized, c.T)[0].T


def _unfold_init(tensor: np.ndarray, rank: int) -> List[np.ndarray]:
  """Places unit vectors on the two smallest modes and fibers on the third.

  When rank >= the product of the two smallest dimensions the construction
  is exact; otherwise the fibers with the largest norms are kept.
  """
  dims = tensor.shape
  keep_mode = int(np.argmax(dims))
  unit_modes = [m for m in range(3) if m != keep_mode]
  fibers = np.moveaxis(tensor, keep_mode, 0).reshape(dims[keep_mode], -1)
  order = np.argsort(-np.linalg.norm(fibers, axis=0), kind='stable')[:rank]
  factors = [np.zeros((d, rank)) for d in dims]
  d1 = dims[unit_modes[1]]
  for column, flat in enumerate(order):
    factors[keep_mode][:, column] = fibers[:, flat]
    factors[unit_modes[0]][flat // d1, column] = 1.0
    factors[unit_modes[1]][flat % d1, column] = 1.0
  return factors


@gin.configurable(denylist=['tensor', 'rank'])
def cp_als(tensor: Union[np.ndarray, cholesky.CholeskyFactors],
           rank: int,
           max_sweeps: int = 500,
           tol: float = 1e-8,
           seed: int = 0,
           init: str = 'random') -> CPFactors:
  """Fits a rank-`rank` CP decomposition by alternating least squares.

  Each sweep solves Z, then X, then Y against the exact normal matrix; a
  ridge is added only when that matrix is ill-conditioned. A sweep that
  lowers the error by less than a fraction STALL_TOL ends the fit.

  Args:
    tensor: Three-index tensor A[x,a,i], or Cholesky factors whose vectors
      are decomposed.
    rank: Number of components, at least 1.
    max_sweeps: Maximum number of (Z, X, Y) sweeps.
    tol: Stops when the Frobenius error drops to tol.
    seed: Seed of the uniform(-1, 1) initialization.
    init: 'random' or 'unfold'.

  Returns:
    The fitted factors and their error history. The history never
    increases: a sweep that would raise the error is rolled back and ends
    the fit.

  Raises:
    ValueError: If rank < 1 or the tensor is not three-index.
  """
  if isinstance(tensor, cholesky.CholeskyFactors):
    tensor = tensor.vectors
  tensor = np.asarray(tensor, dtype=np.float64)
  if tensor.ndim != 3:
    raise ValueError(f'Expected a three-index tensor, got {tensor.shape}.')
  if rank < 1:
    raise ValueError(f'CP rank must be at least 1, got {rank}.')
  norm = float(np.linalg.norm(tensor))
  if norm == 0.0:
    return CPFactors(*[np.zeros((d, rank)) for d in tensor.shape], errors=[0.0])

  method = InitMethod(init)
  if method is InitMethod.UNFOLD:
    x, y, z = _unfold_init(tensor, rank)
  else:
    rng = np.random.default_rng(seed)
    x, y, z = [rng.uniform(-1.0, 1.0, size=(d, rank)) for d in tensor.shape]

  factors = CPFactors(x, y, z, converged=False)
  factors.errors.append(cp_error(factors, tensor))
  for sweep in range(max_sweeps):
    if factors.error <= tol:
      factors.converged = True
      break
    x, y, z = factors.x, factors.y, factors.z
    z_new = _solve_normal(
        oe.contract('xai,xp,ap->ip', tensor, x, y), (x.T @ x) * (y.T @ y))
    x_new = _solve_normal(
        oe.contract('xai,ap,ip->xp', tensor, y, z_new),
        (y.T @ y) * (z_new.T @ z_new))
    y_new = _solve_normal(
        oe.contract('xai,xp,ip->ap', tensor, x_new, z_new),
        (x_new.T @ x_new) * (z_new.T @ z_new))
    candidate = CPFactors(x_new, y_new, z_new)
    error = cp_error(candidate, tensor)
    previous = factors.error
    if error > previous:
      logging.vlog(1, 'CP-ALS sweep %d raised the error %.3e -> %.3e; '
                   'keeping the previous factors.', sweep, previous, error)
      factors.converged = True
      break
    factors.x, factors.y, factors.z = x_new, y_new, z_new
    factors.errors.append(error)
    logging.log_every_n(logging.INFO, 'CP-ALS sweep %d: error %.3e', 50,
                        sweep, error)
    if error <= tol or previous - error < STALL_TOL * previous:
      factors.converged = True
      break
  if not factors.converged:
    logging.warning('CP-ALS at rank %d stopped after %d sweeps with relative '
                    'error %.3e.', rank, factors.sweeps, factors.error / norm)
  return factors


def factorize_t2(t2: np.ndarray,
                 rank: int,
                 max_sweeps: int = 500,
                 tol: float = 1e-8,
                 seed: int = 0,
                 init: str = 'unfold') -> AmplitudeFactors:
  """CP factors of mixed doubles amplitudes t2[a,i,j].

  Args:
    t2: Amplitudes of shape (n_v, n_o, n_o).
    rank: N_ttf.
    max_sweeps: See `cp_als`.
    tol: See `cp_als`.
    seed: See `cp_als`.
    init: See `cp_als`.

  Returns:
    Factors T (n_v, rank), U (n_o, rank), V (n_o, rank).
  """
  if t2.ndim != 3 or t2.shape[1] != t2.shape[2]:
    raise ValueError(f't2 must have shape (n_v, n_o, n_o), got {t2.shape}.')
  factors = cp_als(
      t2, rank, max_sweeps=max_sweeps, tol=tol, seed=seed, init=init)
  return AmplitudeFactors(
      t=factors.x, u=factors.y, v=factors.z, error=factors.error)


def amplitudes_from_factors(factors: AmplitudeFactors) -> np.ndarray:
  return oe.contract('ar,ir,jr->aij', factors.t, factors.u, factors.v)


def default_ttf_rank(n_occupied: int, n_virtual: int) -> int:
  return max(n_virtual, 2 * n_occupied, 1)


def default_htf_rank(n_aux: int, htf_mult: float = 2.0) -> int:
  return max(int(np.ceil(htf_mult * n_aux)), 1)


class RankOrderingError(ValueError):
  pass


def check_rank_ordering(n_htf: int,
                        n_aux: int,
                        n_ttf: int,
                        n_virtual: int,
                        n_occupied: int,
                        enforce: bool = False) -> bool:
  """Checks N_htf > N_aux > N_ttf > N_v > N_o.

  Small systems routinely violate the ordering; a violation is logged, and
  raised only when `enforce` is set.

  Returns:
    True if the ordering holds.
  """
  chain = [('N_htf', n_htf), ('N_aux', n_aux), ('N_ttf', n_ttf),
           ('N_v', n_virtual), ('N_o', n_occupied)]
  broken = [(a, b) for a, b in zip(chain, chain[1:]) if not a[1] > b[1]]
  if not broken:
    return True
  message = ', '.join(f'{a[0]}={a[1]} <= {b[0]}={b[1]}' for a, b in broken)
  if enforce:
    raise RankOrderingError(f'Rank ordering violated: {message}.')
  logging.warning('Rank ordering violated: %s.', message)
  return False


def ranks_for(n_aux: int,
              n_occupied: int,
              n_virtual: int,
              htf_mult: float = 2.0,
              ttf_rank: Optional[int] = None) -> Tuple[int, int]:
  """Returns (N_htf, N_ttf) from the multipliers."""
  return (default_htf_rank(n_aux, htf_mult),
          ttf_rank or default_ttf_rank(n_occupied, n_virtual))
