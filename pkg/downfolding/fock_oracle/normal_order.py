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
"""Vacuum normal ordering of fermionic ladder strings.

A NormalOrderedOperator is a linear combination of canonical strings

  a+_{c1} ... a+_{ck} a_{ak} ... a_{a1},   c1 < ... < ck, a1 < ... < ak,

keyed by (creators, annihilators), both ascending. The canonical string
maps the determinant of the modes a1..ak onto the determinant of c1..ck
with sign +1, so coefficients read off Fock-space matrix elements carry
no extra sign.
"""

import collections
import functools
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from downfolding.fock_oracle import fock_space

Key = Tuple[Tuple[int, ...], Tuple[int, ...]]

# Coefficients below this magnitude are dropped after every product.
PRUNE_ATOL = 1e-15


def _sort_sign(values: Sequence[int],
               descending: bool = False) -> Tuple[int, Tuple[int, ...]]:
  """Permutation sign and sorted values; sign 0 on a repeated value."""
  values = list(values)
  if len(set(values)) != len(values):
    return 0, ()
  inversions = 0
  for i in range(len(values)):
    for j in range(i + 1, len(values)):
      if (values[i] > values[j]) != descending:
        inversions += 1
  return (-1)**inversions, tuple(sorted(values))


def canonical_key(creators: Sequence[int],
                  annihilators: Sequence[int]) -> Tuple[int, Key]:
  """Sign and key of a+_{creators...} a_{annihilators...} as written."""
  sign_c, c = _sort_sign(creators)
  sign_a, a = _sort_sign(annihilators, descending=True)
  return sign_c * sign_a, (c, a)


def key_ops(key: Key) -> Tuple[fock_space.LadderOp, ...]:
  creators, annihilators = key
  return (tuple((True, k) for k in creators) +
          tuple((False, k) for k in reversed(annihilators)))


@functools.lru_cache(maxsize=None)
def normal_order(
    ops: Tuple[fock_space.LadderOp, ...]) -> Tuple[Tuple[Key, int], ...]:
  """Expands a ladder string into canonical strings with integer weights."""
  for k in range(len(ops) - 1):
    if not ops[k][0] and ops[k + 1][0]:
      break
  else:
    creators = [m for creation, m in ops if creation]
    annihilators = [m for creation, m in ops if not creation]
    sign, key = canonical_key(creators, annihilators)
    return ((key, sign),) if sign else ()

  # a_p a+_q = delta_pq - a+_q a_p
  terms = collections.Counter()
  if ops[k][1] == ops[k + 1][1]:
    for key, weight in normal_order(ops[:k] + ops[k + 2:]):
      terms[key] += weight
  for key, weight in normal_order(ops[:k] + (ops[k + 1], ops[k]) +
                                  ops[k + 2:]):
    terms[key] -= weight
  return tuple((key, w) for key, w in terms.items() if w)


class NormalOrderedOperator:
  """Sparse linear combination of canonical ladder strings."""

  def __init__(self, terms: Optional[Dict[Key, float]] = None):
    self.terms = dict(terms or {})

  @classmethod
  def identity(cls) -> 'NormalOrderedOperator':
    return cls({((), ()): 1.0})

  @classmethod
  def from_string(cls, ops: Sequence[fock_space.LadderOp],
                  coefficient: float = 1.0) -> 'NormalOrderedOperator':
    result = cls()
    result._add_ordered(tuple(ops), coefficient)
    return result

  @classmethod
  def number(cls, k: int) -> 'NormalOrderedOperator':
    return cls({((k,), (k,)): 1.0})

  def _add_ordered(self, ops, coefficient: float) -> None:
    for key, weight in normal_order(ops):
      self.terms[key] = self.terms.get(key, 0.0) + weight * coefficient

  def __add__(self, other: 'NormalOrderedOperator') -> 'NormalOrderedOperator':
    terms = dict(self.terms)
    for key, value in other.terms.items():
      terms[key] = terms.get(key, 0.0) + value
    return NormalOrderedOperator(terms)

  def __neg__(self) -> 'NormalOrderedOperator':
    return NormalOrderedOperator({k: -v for k, v in self.terms.items()})

  def __sub__(self, other: 'NormalOrderedOperator') -> 'NormalOrderedOperator':
    return self + (-other)

  def scale(self, factor: float) -> 'NormalOrderedOperator':
    return NormalOrderedOperator(
        {k: factor * v for k, v in self.terms.items()})

  def __matmul__(self,
                 other: 'NormalOrderedOperator') -> 'NormalOrderedOperator':
    result = NormalOrderedOperator()
    for left, a in self.terms.items():
      left_ops = key_ops(left)
      for right, b in other.terms.items():
        result._add_ordered(left_ops + key_ops(right), a * b)
    return result.pruned()

  def pruned(self, atol: float = PRUNE_ATOL) -> 'NormalOrderedOperator':
    return NormalOrderedOperator(
        {k: v for k, v in self.terms.items() if abs(v) > atol})

  def without_annihilators(self,
                           modes: Iterable[int]) -> 'NormalOrderedOperator':
    """Drops strings that annihilate any of `modes`."""
    modes = set(modes)
    return NormalOrderedOperator({
        k: v for k, v in self.terms.items() if not modes.intersection(k[1])
    })

  def coefficient(self, creators: Sequence[int],
                  annihilators: Sequence[int]) -> float:
    """Coefficient of a+_{creators...} a_{annihilators...} as written."""
    sign, key = canonical_key(creators, annihilators)
    if not sign:
      return 0.0
    return sign * self.terms.get(key, 0.0)

  def max_rank(self) -> int:
    return max((len(k[0]) for k in self.terms), default=0)

  def __len__(self) -> int:
    return len(self.terms)


def one_body(h1: np.ndarray) -> NormalOrderedOperator:
  n = h1.shape[0]
  terms = {}
  for s in (fock_space.UP, fock_space.DOWN):
    for a in range(n):
      for b in range(n):
        if h1[a, b] != 0.0:
          terms[((fock_space.mode(a, s),),
                 (fock_space.mode(b, s),))] = float(h1[a, b])
  return NormalOrderedOperator(terms)


def two_body(h2: np.ndarray) -> NormalOrderedOperator:
  """1/2 sum h2[a,b,c,d] a+_s b+_t c_t d_s."""
  result = NormalOrderedOperator()
  for s in (fock_space.UP, fock_space.DOWN):
    for t in (fock_space.UP, fock_space.DOWN):
      for a, b, c, d in zip(*(x.tolist() for x in np.nonzero(h2))):
        ops = ((True, fock_space.mode(a, s)), (True, fock_space.mode(b, t)),
               (False, fock_space.mode(c, t)), (False, fock_space.mode(d, s)))
        result._add_ordered(ops, 0.5 * float(h2[a, b, c, d]))
  return result.pruned()


def hamiltonian(h1: np.ndarray, h2: np.ndarray) -> NormalOrderedOperator:
  return one_body(h1) + two_body(h2)
