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
"""Residuals assembled from the factorized Hamiltonian and amplitudes.

The two-electron tensor enters only through the three-index tensors
L[x,p,q] = sum_r X[x,r] Y[p,r] Z[q,r] rebuilt from the CP factors, with

  (pq|rs) = sum_x s_x L[x,p,q] L[x,r,s],

so no four-index block is ever formed. The contraction plans E1, E2, E4, E6
and E7 supply the residual terms they stand for; every other term is a
contraction over x of two slices of L with the amplitudes. The remaining
plans are evaluated for the cost report.

The assembly is the closed-shell reduction of the spin-orbital equations in
`spin_orbital`. It reads the paired doubles as symmetric in (i, j), which
the equations preserve.
"""

import dataclasses
from typing import Dict, Optional, Tuple

from absl import logging
import numpy as np
import opt_einsum as oe

from downfolding.rhd import amplitudes
from downfolding.rhd import contraction_plans
from downfolding.rhd import effective_hamiltonian
from downfolding.tensorfactor import cp_als
from downfolding.tensorfactor import factorization

# Plans whose values enter the residual.
RESIDUAL_PLANS = ('E1', 'E2', 'E4', 'E6', 'E7')


class MissingFactorsError(ValueError):
  pass


@dataclasses.dataclass
class ExpressionResult:
  """Value and multiply counts of one factorized term."""
  value: np.ndarray
  core_multiplies: int
  assembly_multiplies: int
  reference_cost: int

  @property
  def multiplies(self) -> int:
    return self.core_multiplies + self.assembly_multiplies


@dataclasses.dataclass
class FactorizedResidual:
  residuals: amplitudes.ResidualSet
  expressions: Dict[str, ExpressionResult]
  e_t: float = 0.0

  def flop_report(self) -> Dict[str, Dict[str, int]]:
    return {
        name: {
            'core_multiplies': e.core_multiplies,
            'assembly_multiplies': e.assembly_multiplies,
            'reference_cost': e.reference_cost,
        } for name, e in self.expressions.items()
    }


def full_cp_rank(shape) -> int:
  """A rank at which the unfolded CP initialization is exact."""
  dims = sorted(shape)
  return max(dims[0] * dims[1], 1)


def factorize_amplitudes(amps: amplitudes.AmplitudeSet,
                         rank: int,
                         max_sweeps: int = 500,
                         tol: float = 1e-8) -> cp_als.AmplitudeFactors:
  """CP factors of the mixed doubles that enter the equations."""
  t2m = amps.effective_t2m()
  if t2m.size == 0:
    return cp_als.AmplitudeFactors(
        t=np.zeros((t2m.shape[0], rank)),
        u=np.zeros((t2m.shape[1], rank)),
        v=np.zeros((t2m.shape[2], rank)))
  return cp_als.factorize_t2(t2m, rank, max_sweeps=max_sweeps, tol=tol)


def three_index_factors(
    factors: factorization.FactorizedHamiltonian
) -> Tuple[np.ndarray, np.ndarray]:
  """Returns (signed, plain) L[x,p,q] carried by the CP factors."""
  plain = cp_als.cp_reconstruct(factors.cp)
  signed = factors.cholesky.signs[:, None, None] * plain
  return signed, plain


def factor_fock(h1: np.ndarray, signed: np.ndarray, plain: np.ndarray,
                n_occupied: int) -> np.ndarray:
  """Closed-shell Fock matrix of the tensor carried by the factors."""
  o = slice(0, n_occupied)
  occupied_trace = np.einsum('xkk->x', plain[:, o, o])
  coulomb = oe.contract('xpq,x->pq', signed, occupied_trace)
  exchange = oe.contract('xpk,xkq->pq', signed[:, :, o], plain[:, o, :])
  return h1 + 2.0 * coulomb - exchange


def _operands(space: amplitudes.StepSpace, fock: np.ndarray,
              factors: factorization.FactorizedHamiltonian,
              amp_factors: cp_als.AmplitudeFactors,
              t1: np.ndarray) -> Dict[str, np.ndarray]:
  cp = factors.cp
  return contraction_plans.operand_slices(
      factors.xs, cp.x, cp.y, cp.z, amp_factors.t, amp_factors.u,
      amp_factors.v, t1, fock, space.occupied, space.virtual, space.target)


def evaluate_expressions(
    space: amplitudes.StepSpace, fock: np.ndarray,
    factors: factorization.FactorizedHamiltonian,
    amp_factors: cp_als.AmplitudeFactors,
    t1: np.ndarray) -> Dict[str, ExpressionResult]:
  """Runs the eleven contraction plans on the factors of one step."""
  operands = _operands(space, fock, factors, amp_factors, t1)
  dims = contraction_plans.dims_from(factors.n_aux, factors.n_htf,
                                     amp_factors.rank, space.n_o, space.n_v)
  results = {}
  for name, plan in contraction_plans.expression_plans().items():
    results[name] = ExpressionResult(
        value=plan.execute(operands),
        core_multiplies=plan.multiplies(dims, contraction_plans.Stage.CORE),
        assembly_multiplies=plan.multiplies(
            dims, contraction_plans.Stage.ASSEMBLY),
        reference_cost=plan.reference_cost(dims))
  return results


@dataclasses.dataclass
class _StepTensors:
  """Operands of the assembly; (pq|rs) = sum_x left[x,p,q] right[x,r,s]."""
  fock: np.ndarray
  left: np.ndarray
  right: np.ndarray
  t: np.ndarray
  m: np.ndarray
  p: np.ndarray
  o: slice
  v: slice
  n: int

  @property
  def mt(self) -> np.ndarray:
    return 2.0 * self.m - self.m.transpose(0, 2, 1)

  @property
  def pt(self) -> np.ndarray:
    return 2.0 * self.p - self.p.T


def _energy(s: _StepTensors) -> float:
  """E_T = <Phi|H_N T|Phi>."""
  f, a, b, o, v, n = s.fock, s.left, s.right, s.o, s.v, s.n
  return float(2.0 * f[o, n] @ s.t +
               oe.contract('xk,xld,dkl->', a[:, o, n], b[:, o, v], s.mt) +
               oe.contract('xkc,xl,clk->', a[:, o, v], b[:, o, n], s.mt) +
               oe.contract('xk,xl,kl->', a[:, o, n], b[:, o, n], s.pt))


def _singles(s: _StepTensors, values: Dict[str, np.ndarray],
             e_t: float) -> np.ndarray:
  f, a, b, o, v, n = s.fock, s.left, s.right, s.o, s.v, s.n
  t, mt, pt = s.t, s.mt, s.pt
  return (values['E1'] + f[n, n] * t - f[o, o].T @ t +
          2.0 * values['E2'] -
          oe.contract('x,xki,k->i', a[:, n, n], b[:, o, o], t) +
          oe.contract('kc,cik->i', f[o, v], mt) + pt @ f[o, n] +
          oe.contract('x,xkd,dik->i', a[:, n, n], b[:, o, v], mt) +
          oe.contract('xc,xk,cki->i', a[:, n, v], b[:, o, n], mt) +
          oe.contract('x,xk,ik->i', a[:, n, n], b[:, o, n], pt) -
          2.0 * values['E4'] + values['E4_swapped'] -
          oe.contract('xki,xl,kl->i', a[:, o, o], b[:, o, n], pt) - t * e_t)


def _virtual_singles(s: _StepTensors) -> np.ndarray:
  """Linear singles terms l1[b, j] of the other virtual orbitals."""
  f, a, b, o, v, n = s.fock, s.left, s.right, s.o, s.v, s.n
  t, mt = s.t, s.mt
  return (np.outer(f[v, n], t) +
          2.0 * oe.contract('xbj,xk,k->bj', a[:, v, o], b[:, o, n], t) -
          oe.contract('xb,xkj,k->bj', a[:, v, n], b[:, o, o], t) +
          oe.contract('k,bkj->bj', f[o, n], mt) +
          oe.contract('xb,xkd,djk->bj', a[:, v, n], b[:, o, v], mt) +
          oe.contract('xbc,xk,ckj->bj', a[:, v, v], b[:, o, n], mt) +
          oe.contract('xb,xk,jk->bj', a[:, v, n], b[:, o, n], s.pt) -
          oe.contract('xkj,xl,blk->bj', a[:, o, o], b[:, o, n], mt))


def _mixed_doubles(s: _StepTensors, values: Dict[str, np.ndarray],
                   e_t: float) -> np.ndarray:
  f, a, b, o, v, n = s.fock, s.left, s.right, s.o, s.v, s.n
  t, m, p, mt, pt = s.t, s.m, s.p, s.mt, s.pt
  fock_terms = (oe.contract('bc,cij->bij', f[v, v], m) +
                f[v, n][:, None, None] * p + f[n, n] * m -
                oe.contract('bik,kj->bij', m, f[o, o]) -
                oe.contract('ki,bkj->bij', f[o, o], m))
  ladders = (values['E7'] +
             oe.contract('x,xbd,dij->bij', a[:, n, n], b[:, v, v], m) +
             oe.contract('xc,xb,cji->bij', a[:, n, v], b[:, v, n], m) +
             oe.contract('x,xb,ij->bij', a[:, n, n], b[:, v, n], p))
  rings = (oe.contract('xkc,xbj,cik->bij', a[:, o, v], b[:, v, o], mt) -
           oe.contract('xkj,xbc,cik->bij', a[:, o, o], b[:, v, v], m) +
           oe.contract('xk,xbj,ik->bij', a[:, o, n], b[:, v, o], pt) -
           oe.contract('xkj,xb,ik->bij', a[:, o, o], b[:, v, n], p) -
           oe.contract('xki,xbc,ckj->bij', a[:, o, o], b[:, v, v], m) -
           oe.contract('xki,xb,kj->bij', a[:, o, o], b[:, v, n], p) -
           oe.contract('xkj,x,bik->bij', a[:, o, o], b[:, n, n], m) +
           oe.contract('xk,xi,bkj->bij', a[:, o, n], b[:, n, o], mt) -
           oe.contract('xki,x,bkj->bij', a[:, o, o], b[:, n, n], m))
  singles = (oe.contract('x,xbj,i->bij', a[:, n, n], b[:, v, o], t) +
             oe.contract('xi,xb,j->bij', a[:, n, o], b[:, v, n], t) -
             oe.contract('xki,xbj,k->bij', a[:, o, o], b[:, v, o], t) -
             oe.contract('i,bj->bij', t, _virtual_singles(s)))
  return (values['E6'].transpose(0, 2, 1) + fock_terms + ladders + rings +
          singles - m * e_t)


def _paired_doubles(s: _StepTensors, e_t: float) -> np.ndarray:
  f, a, b, o, v, n = s.fock, s.left, s.right, s.o, s.v, s.n
  t, m, p, mt, pt = s.t, s.m, s.p, s.mt, s.pt
  f_n = f[n, o]
  nnnn = float(oe.contract('x,x->', a[:, n, n], b[:, n, n]))
  fock_terms = (oe.contract('c,cij->ij', f[n, v], m + m.transpose(0, 2, 1)) +
                2.0 * f[n, n] * p - p @ f[o, o] - f[o, o].T @ p)
  ladders = (oe.contract('xki,xlj,kl->ij', a[:, o, o], b[:, o, o], p) +
             oe.contract('x,xd,dij->ij', a[:, n, n], b[:, n, v], m) +
             oe.contract('xc,x,cji->ij', a[:, n, v], b[:, n, n], m) +
             nnnn * p)
  rings = (oe.contract('xkc,xj,cik->ij', a[:, o, v], b[:, n, o], mt) -
           oe.contract('xkj,xc,cik->ij', a[:, o, o], b[:, n, v], m) +
           oe.contract('xk,xj,ik->ij', a[:, o, n], b[:, n, o], pt) -
           oe.contract('xkj,x,ik->ij', a[:, o, o], b[:, n, n], p) -
           oe.contract('xki,xc,ckj->ij', a[:, o, o], b[:, n, v], m) -
           oe.contract('xki,x,kj->ij', a[:, o, o], b[:, n, n], p) -
           oe.contract('xkj,xc,cki->ij', a[:, o, o], b[:, n, v], m) -
           oe.contract('xkj,x,ik->ij', a[:, o, o], b[:, n, n], p) +
           oe.contract('xkc,xi,cjk->ij', a[:, o, v], b[:, n, o], mt) -
           oe.contract('xki,xc,cjk->ij', a[:, o, o], b[:, n, v], m) +
           oe.contract('xk,xi,jk->ij', a[:, o, n], b[:, n, o], pt) -
           oe.contract('xki,x,jk->ij', a[:, o, o], b[:, n, n], p))
  singles = (
      np.outer(t, oe.contract('x,xj->j', a[:, n, n], b[:, n, o])) +
      np.outer(oe.contract('xi,x->i', a[:, n, o], b[:, n, n]), t) -
      oe.contract('xki,xj,k->ij', a[:, o, o], b[:, n, o], t) -
      oe.contract('xkj,xi,k->ij', a[:, o, o], b[:, n, o], t) +
      np.outer(t, f_n) + np.outer(f_n, t))
  return (oe.contract('xi,xj->ij', a[:, n, o], b[:, n, o]) + fock_terms +
          ladders + rings + singles - p * e_t)


def residual_factorized(
    hamiltonian: effective_hamiltonian.EffectiveHamiltonian,
    factors: Optional[factorization.FactorizedHamiltonian],
    amp_factors: Optional[cp_als.AmplitudeFactors],
    amps: amplitudes.AmplitudeSet) -> FactorizedResidual:
  """Residuals with the two-electron integrals and doubles taken from factors.

  The result equals the dense residual of the Hamiltonian whose two-electron
  tensor is the one the factors carry, with the mixed doubles rebuilt from
  `amp_factors`. At full rank it equals the dense residual itself.

  Args:
    hamiltonian: Current Hamiltonian; supplies h1 and the partition.
    factors: Cholesky and CP factors of the current two-electron tensor.
    amp_factors: CP factors of the mixed doubles.
    amps: Current amplitudes; the singles and paired doubles are used as is.

  Returns:
    The residual blocks, E_T and the per-term results of all eleven plans.

  Raises:
    MissingFactorsError: If either set of factors is absent.
    ValueError: If the target orbital is occupied.
  """
  if factors is None or amp_factors is None:
    raise MissingFactorsError(
        'The factorized residual needs Hamiltonian and amplitude factors.')
  space = hamiltonian.space
  if not space.target_is_virtual:
    raise ValueError('Amplitude equations need a virtual target orbital.')
  left, right = three_index_factors(factors)
  fock = factor_fock(hamiltonian.h1, left, right, space.n_o)
  expressions = evaluate_expressions(space, fock, factors, amp_factors,
                                     amps.t1)
  values = {name: expressions[name].value for name in RESIDUAL_PLANS}
  operands = _operands(space, fock, factors, amp_factors, amps.t1)
  swapped = dict(operands, U=operands['V'], V=operands['U'])
  values['E4_swapped'] = (
      contraction_plans.expression_plans()['E4'].execute(swapped))

  s = _StepTensors(
      fock=fock,
      left=left,
      right=right,
      t=amps.t1,
      m=cp_als.amplitudes_from_factors(amp_factors),
      p=amps.t3,
      o=slice(0, space.n_o),
      v=slice(space.n_o, space.n_o + space.n_v),
      n=space.target)
  e_t = _energy(s)
  res = amplitudes.ResidualSet(
      r1=_singles(s, values, e_t),
      r2=_mixed_doubles(s, values, e_t),
      r2p=_paired_doubles(s, e_t))
  if amps.interpretation is amplitudes.T2Interpretation.INDEPENDENT:
    res.r2_an = res.r2.transpose(0, 2, 1).copy()
  return FactorizedResidual(residuals=res, expressions=expressions, e_t=e_t)


class FactorizedResidualFn:
  """Residual callable for the solver that works through factors.

  The Hamiltonian is factorized once per step; the mixed doubles are
  refactorized at every evaluation.
  """

  def __init__(self,
               config: Optional[factorization.FactorizationConfig] = None):
    self._config = config or factorization.FactorizationConfig()
    self._key = None
    self._factors = None
    self.last: Optional[FactorizedResidual] = None

  def factors_for(
      self, hamiltonian: effective_hamiltonian.EffectiveHamiltonian
  ) -> factorization.FactorizedHamiltonian:
    if self._key is not hamiltonian:
      self._factors = factorization.factorize_hamiltonian(
          hamiltonian.h2, self._config)
      self._key = hamiltonian
    return self._factors

  def __call__(
      self, hamiltonian: effective_hamiltonian.EffectiveHamiltonian,
      amps: amplitudes.AmplitudeSet) -> amplitudes.ResidualSet:
    factors = self.factors_for(hamiltonian)
    space = hamiltonian.space
    rank = self._config.ttf_rank or cp_als.default_ttf_rank(
        space.n_o, space.n_v)
    amp_factors = factorize_amplitudes(
        amps, rank, max_sweeps=self._config.max_sweeps, tol=self._config.tol)
    self.last = residual_factorized(hamiltonian, factors, amp_factors, amps)
    logging.vlog(2, 'Factorized residual norm %.3e.',
                 self.last.residuals.norm())
    return self.last.residuals
