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
"""Pairwise contraction plans for the eleven factorized residual terms.

Every term is a chain of pairwise contractions over CP factors of the
Cholesky vectors (Xs, X, Y, Z, with Xs the signed copy of X) and of the
mixed doubles (T, U, V). Index letters fix the dimension they run over:

  x: N_aux   p, q: N_htf   r, s: N_ttf   i, j, k, l: N_o   a, b, c: N_v

A step multiplies the dimensions of every distinct letter it touches;
that is its multiply count. Core steps reduce the term to its smallest
factorized form. Assembly steps expand that form to the dense output and
are counted separately.

Input slices: Yo/Yv/YN are the occupied rows, virtual rows and target row
of Y, likewise for Z. t1 is the singles vector, fN = f[N, occ],
fvv = f[vir, vir] and fvN = f[vir, N].
"""

import dataclasses
import enum
import math
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
import opt_einsum as oe

INDEX_DIMS = {
    'x': 'A', 'p': 'H', 'q': 'H', 'r': 'T', 's': 'T',
    'i': 'O', 'j': 'O', 'k': 'O', 'l': 'O',
    'a': 'V', 'b': 'V', 'c': 'V',
}


@enum.unique
class Stage(enum.Enum):
  CORE = 'core'
  ASSEMBLY = 'assembly'


@dataclasses.dataclass(frozen=True)
class Step:
  """out = contract(equation, *inputs), or a plain sum when `add` is set."""
  out: str
  equation: str
  inputs: Tuple[str, ...]
  stage: Stage = Stage.CORE
  add: bool = False

  def multiplies(self, dims: Mapping[str, int]) -> int:
    if self.add:
      return 0
    letters = set(self.equation.replace(',', '').replace('->', ''))
    return math.prod(dims[INDEX_DIMS[c]] for c in letters)


@dataclasses.dataclass(frozen=True)
class ContractionPlan:
  """One factorized residual term.

  Attributes:
    name: 'E1' .. 'E11'.
    description: The dense term the plan evaluates.
    residual: 'r1' or 'r2'.
    steps: Steps in execution order; the last one produces the term.
    reference: Cost polynomial as (coefficient, letters) monomials over
      A, H, T, O and V.
  """
  name: str
  description: str
  residual: str
  steps: Tuple[Step, ...]
  reference: Tuple[Tuple[int, str], ...]

  def multiplies(self,
                 dims: Mapping[str, int],
                 stage: Optional[Stage] = None) -> int:
    return sum(
        s.multiplies(dims)
        for s in self.steps
        if stage is None or s.stage is stage)

  def reference_cost(self, dims: Mapping[str, int]) -> int:
    return sum(c * math.prod(dims[letter] for letter in monomial)
               for c, monomial in self.reference)

  def inputs(self) -> Tuple[str, ...]:
    produced = {s.out for s in self.steps}
    names = []
    for step in self.steps:
      for name in step.inputs:
        if name not in produced and name not in names:
          names.append(name)
    return tuple(names)

  def execute(self, operands: Mapping[str, np.ndarray]) -> np.ndarray:
    """Runs the steps on the named operands and returns the term."""
    values = dict(operands)
    for step in self.steps:
      args = [values[name] for name in step.inputs]
      if step.add:
        values[step.out] = sum(args[1:], args[0])
      else:
        values[step.out] = oe.contract(step.equation, *args)
    return values[self.steps[-1].out]


def _s(out: str, equation: str, *inputs: str, stage: Stage = Stage.CORE):
  return Step(out, equation, tuple(inputs), stage)


def _asm(out: str, equation: str, *inputs: str):
  return Step(out, equation, tuple(inputs), Stage.ASSEMBLY)


def _poly(text: str) -> Tuple[Tuple[int, str], ...]:
  """Parses '2HA+3HO+H' or 'AV2' (V squared) into monomials."""
  monomials = []
  for term in text.split('+'):
    digits = ''
    while term and term[0].isdigit():
      digits += term[0]
      term = term[1:]
    letters = ''
    for ch in term:
      letters += letters[-1] * (int(ch) - 1) if ch.isdigit() else ch
    monomials.append((int(digits or 1), letters))
  return tuple(monomials)


_PLANS = (
    ContractionPlan(
        'E1', 'f[N, i]', 'r1',
        (_s('out', 'i->i', 'fN'),),
        _poly('O')),
    ContractionPlan(
        'E2', 'sum_j (jN|Ni) t[j]', 'r1',
        (_s('u', 'jp,j->p', 'Yo', 't1'),
         _s('v', 'p,p->p', 'u', 'ZN'),
         _s('w', 'xp,p->x', 'Xs', 'v'),
         _s('y', 'xq,x->q', 'X', 'w'),
         _s('y2', 'q,q->q', 'y', 'YN'),
         _s('out', 'iq,q->i', 'Zo', 'y2')),
        _poly('2HA+3HO+H')),
    ContractionPlan(
        'E3', 'sum_jk (ji|kN) t[j] t[k]', 'r1',
        (_s('u', 'kq,k->q', 'Yo', 't1'),
         _s('u2', 'q,q->q', 'u', 'ZN'),
         _s('w', 'xq,q->x', 'X', 'u2'),
         _s('y', 'xp,x->p', 'Xs', 'w'),
         _s('v', 'jp,j->p', 'Yo', 't1'),
         _s('z', 'p,p->p', 'v', 'y'),
         _s('out', 'ip,p->i', 'Zo', 'z')),
        _poly('2HA+4HO+H')),
    ContractionPlan(
        'E4', 'sum_kla (ki|la) t2[a,k,l]', 'r1',
        (_s('b', 'kp,kr->pr', 'Yo', 'U'),
         _s('c', 'lq,lr->qr', 'Yo', 'V'),
         _s('d', 'aq,ar->qr', 'Zv', 'T'),
         _s('e', 'qr,qr->qr', 'c', 'd'),
         _s('f', 'xq,qr->xr', 'X', 'e'),
         _s('g', 'xp,xr->pr', 'Xs', 'f'),
         _s('h', 'pr,pr->p', 'b', 'g'),
         _s('out', 'ip,p->i', 'Zo', 'h')),
        _poly('2HTA+2HTO+HTV+HA+HT+HO')),
    ContractionPlan(
        'E5', 'sum_klc (kc|lN) t[l] t2[c,i,k]', 'r1',
        (_s('u', 'lq,l->q', 'Yo', 't1'),
         _s('u2', 'q,q->q', 'u', 'ZN'),
         _s('w', 'xq,q->x', 'X', 'u2'),
         _s('y', 'xp,x->p', 'Xs', 'w'),
         _s('b', 'kp,kr->pr', 'Yo', 'V'),
         _s('c', 'cp,cr->pr', 'Zv', 'T'),
         _s('d', 'pr,pr->pr', 'b', 'c'),
         _s('e', 'p,pr->r', 'y', 'd'),
         _s('out', 'ir,r->i', 'U', 'e')),
        _poly('HTO+HTV+HO+2HT+2HA+TO+H')),
    ContractionPlan(
        'E6', '(ai|Nj)', 'r2',
        (_s('w', 'q,jq->jq', 'YN', 'Zo'),
         _s('b', 'xq,jq->xj', 'X', 'w'),
         _s('c', 'xp,xj->pj', 'Xs', 'b'),
         _asm('m', 'ap,ip->aip', 'Yv', 'Zo'),
         _asm('out', 'aip,pj->aij', 'm', 'c')),
        _poly('2HAO+HO')),
    ContractionPlan(
        'E7', 'sum_kl (ki|lj) t2[a,k,l]', 'r2',
        (_s('b', 'kp,kr->pr', 'Yo', 'U'),
         _s('c', 'lq,lr->qr', 'Yo', 'V'),
         _asm('zb', 'ip,pr->ipr', 'Zo', 'b'),
         _asm('p', 'xp,ipr->xir', 'Xs', 'zb'),
         _asm('zc', 'jq,qr->jqr', 'Zo', 'c'),
         _asm('q', 'xq,jqr->xjr', 'X', 'zc'),
         _asm('w', 'xir,xjr->ijr', 'p', 'q'),
         _asm('out', 'ar,ijr->aij', 'T', 'w')),
        _poly('HTA+2HTO')),
    ContractionPlan(
        'E8', 'sum_b (f[a,b] + (aN|Nb)) t2[b,i,j]', 'r2',
        (_s('yz', 'ap,p->ap', 'Yv', 'ZN'),
         _s('lan', 'xp,ap->xa', 'Xs', 'yz'),
         _s('zy', 'bq,q->bq', 'Zv', 'YN'),
         _s('lnb', 'xq,bq->xb', 'X', 'zy'),
         _s('g', 'xa,xb->ab', 'lan', 'lnb'),
         Step('f', 'ab,ab->ab', ('fvv', 'g'), add=True),
         _s('ft', 'ab,br->ar', 'f', 'T'),
         _asm('fu', 'ar,ir->air', 'ft', 'U'),
         _asm('out', 'air,jr->aij', 'fu', 'V')),
        _poly('2HAV+AV2+TV2+2HV')),
    ContractionPlan(
        'E9', 'sum_kb (ab|kN) t[k] t2[b,i,j]', 'r2',
        (_s('u', 'kq,k->q', 'Yo', 't1'),
         _s('u2', 'q,q->q', 'u', 'ZN'),
         _s('w', 'xq,q->x', 'X', 'u2'),
         _s('y', 'xp,x->p', 'Xs', 'w'),
         _s('yy', 'ap,p->ap', 'Yv', 'y'),
         _s('zt', 'bp,br->pr', 'Zv', 'T'),
         _s('m', 'ap,pr->ar', 'yy', 'zt'),
         _asm('mu', 'ar,ir->air', 'm', 'U'),
         _asm('out', 'air,jr->aij', 'mu', 'V')),
        _poly('2HTV+2HA+HV+HO+V')),
    ContractionPlan(
        'E10', '(f[a,N] + (aN|NN)) t[i] t[j]', 'r2',
        (_s('yzn', 'q,q->q', 'YN', 'ZN'),
         _s('w', 'xq,q->x', 'X', 'yzn'),
         _s('s', 'xp,x->p', 'Xs', 'w'),
         _s('z', 'p,p->p', 'ZN', 's'),
         _s('g', 'ap,p->a', 'Yv', 'z'),
         Step('c', 'a,a->a', ('fvN', 'g'), add=True),
         _asm('tt', 'i,j->ij', 't1', 't1'),
         _asm('out', 'a,ij->aij', 'c', 'tt')),
        _poly('2HV+2HA+H')),
    ContractionPlan(
        'E11', 'sum_klc (kc|lN) t2[c,i,l] t2[a,k,j]', 'r2',
        (_s('yz', 'lq,q->lq', 'Yo', 'ZN'),
         _s('lln', 'xq,lq->xl', 'X', 'yz'),
         _s('a1', 'xl,lr->xr', 'lln', 'V'),
         _s('xa', 'xp,xr->pr', 'Xs', 'a1'),
         _s('zt', 'cp,cr->pr', 'Zv', 'T'),
         _s('k', 'pr,pr->pr', 'zt', 'xa'),
         _s('g', 'kp,pr->kr', 'Yo', 'k'),
         _asm('h', 'kr,ir->ki', 'g', 'U'),
         _asm('m', 'ki,ks->is', 'h', 'U'),
         _asm('tm', 'as,is->ais', 'T', 'm'),
         _asm('out', 'ais,js->aij', 'tm', 'V')),
        _poly('2HTA+HTV+4HTO+HT+HO')),
)


def expression_plans() -> Dict[str, ContractionPlan]:
  """All eleven plans keyed by name, singles terms first."""
  return {plan.name: plan for plan in _PLANS}


def dims_from(n_aux: int, n_htf: int, n_ttf: int, n_occupied: int,
              n_virtual: int) -> Dict[str, int]:
  return {'A': n_aux, 'H': n_htf, 'T': n_ttf, 'O': n_occupied,
          'V': n_virtual}


def operand_slices(xs: np.ndarray, x: np.ndarray, y: np.ndarray,
                   z: np.ndarray, t: np.ndarray, u: np.ndarray,
                   v: np.ndarray, t1: np.ndarray, fock: np.ndarray,
                   occupied: Sequence[int], virtual: Sequence[int],
                   target: int) -> Dict[str, np.ndarray]:
  """Named inputs of the plans for one step."""
  occupied = np.asarray(occupied, dtype=int)
  virtual = np.asarray(virtual, dtype=int)
  return {
      'Xs': xs, 'X': x,
      'Yo': y[occupied], 'Yv': y[virtual], 'YN': y[target],
      'Zo': z[occupied], 'Zv': z[virtual], 'ZN': z[target],
      'T': t, 'U': u, 'V': v, 't1': t1,
      'fN': fock[target, occupied],
      'fvv': fock[np.ix_(virtual, virtual)],
      'fvN': fock[virtual, target],
  }


def dense_references(g: np.ndarray, fock: np.ndarray, t1: np.ndarray,
                     t2m: np.ndarray, occupied: Sequence[int],
                     virtual: Sequence[int],
                     target: int) -> Dict[str, np.ndarray]:
  """The same eleven terms evaluated on the dense chemist tensor g."""
  o = np.asarray(occupied, dtype=int)
  v = np.asarray(virtual, dtype=int)
  n = target
  g_oonno = g[np.ix_(o, [n], [n], o)][:, 0, 0, :]
  return {
      'E1': fock[n, o].copy(),
      'E2': np.einsum('ji,j->i', g_oonno, t1),
      'E3': np.einsum('jik,j,k->i', g[np.ix_(o, o, o, [n])][..., 0], t1, t1),
      'E4': np.einsum('kila,akl->i', g[np.ix_(o, o, o, v)], t2m),
      'E5': np.einsum('kcl,l,cik->i', g[np.ix_(o, v, o, [n])][..., 0], t1,
                      t2m),
      'E6': g[np.ix_(v, o, [n], o)][:, :, 0, :].copy(),
      'E7': np.einsum('kilj,akl->aij', g[np.ix_(o, o, o, o)], t2m),
      'E8': np.einsum(
          'ab,bij->aij',
          fock[np.ix_(v, v)] + g[np.ix_(v, [n], [n], v)][:, 0, 0, :], t2m),
      'E9': np.einsum('abk,k,bij->aij', g[np.ix_(v, v, o, [n])][..., 0], t1,
                      t2m),
      'E10': np.einsum('a,i,j->aij',
                       fock[v, n] + g[np.ix_(v, [n], [n], [n])][:, 0, 0, 0],
                       t1, t1),
      'E11': np.einsum('kcl,cil,akj->aij', g[np.ix_(o, v, o, [n])][..., 0],
                       t2m, t2m),
  }
