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
"""Multireference downfolding equations with singles and paired doubles.

The generator of the step that decouples the last orbital N is

  eta = sum_{i,s} t1[s,i] (1 - n_{N,-s}) a+_{Ns} a_{is}
      + sum_{i,j} t2[i,j] a+_{N up} a+_{N dn} a_{i dn} a_{j up},

with i, j over every other orbital, occupied or not. Since eta = Q eta P,

  Q (1 - eta) H (1 + eta) P = (Q - eta) H (1 + eta) P.

Normal ordering this operator against the vacuum and keeping the strings
that do not annihilate N (the others vanish on the primary space) leaves

  A[s,i]           a+_{Ns} a_{is}
  B[s,v,i,j,k]     a+_{Ns} a+_{iv} a_{jv} a_{ks}
  C[i,j]           a+_{N up} a+_{N dn} a_{i dn} a_{j up}
  D[s,i,j,k,l]     a+_{N up} a+_{N dn} a+_{is} a_{js} a_{k dn} a_{l up}

plus higher strings. The reported tensors are the coefficients of minus the
Bloch operator, so with zero amplitudes A = -h1[i,N] and C = -h2[N,N,i,j].
For equal spins the B and D strings are antisymmetric in their annihilator
pair and the tensors hold that antisymmetric form.
"""

import dataclasses
from typing import Tuple

from absl import logging
import numpy as np

from downfolding.fock_oracle import fock_space
from downfolding.fock_oracle import normal_order

UP, DOWN = fock_space.UP, fock_space.DOWN


@dataclasses.dataclass
class MRCoefficients:
  """Coefficient tensors over the m = n - 1 orbitals other than N."""
  singles: np.ndarray  # A[s, i]
  doubles: np.ndarray  # B[s, v, i, j, k]
  paired: np.ndarray  # C[i, j]
  paired_triples: np.ndarray  # D[s, i, j, k, l]

  def as_tuple(self) -> Tuple[np.ndarray, ...]:
    return (self.singles, self.doubles, self.paired, self.paired_triples)

  def max_abs(self) -> float:
    return max(float(np.max(np.abs(x), initial=0.0)) for x in self.as_tuple())


def _spin_singles(t1: np.ndarray, m: int) -> np.ndarray:
  t1 = np.asarray(t1, dtype=np.float64)
  if t1.shape == (m,):
    return np.stack([t1, t1])
  if t1.shape != (2, m):
    raise ValueError(f'Singles must have shape ({m},) or (2, {m}), got '
                     f'{t1.shape}.')
  return t1


def generator(t1: np.ndarray, t2: np.ndarray,
              n_spatial: int) -> normal_order.NormalOrderedOperator:
  """eta for the last orbital, including its number-operator factors."""
  m = n_spatial - 1
  t1 = _spin_singles(t1, m)
  target = m
  identity = normal_order.NormalOrderedOperator.identity()
  eta = normal_order.NormalOrderedOperator()
  for s in (UP, DOWN):
    blocker = identity - normal_order.NormalOrderedOperator.number(
        fock_space.mode(target, 1 - s))
    excitation = normal_order.NormalOrderedOperator()
    for i in range(m):
      excitation = excitation + normal_order.NormalOrderedOperator.from_string(
          ((True, fock_space.mode(target, s)), (False, fock_space.mode(i, s))),
          float(t1[s, i]))
    eta = eta + blocker @ excitation
  for i in range(m):
    for j in range(m):
      eta = eta + normal_order.NormalOrderedOperator.from_string(
          ((True, fock_space.mode(target, UP)),
           (True, fock_space.mode(target, DOWN)),
           (False, fock_space.mode(i, DOWN)), (False, fock_space.mode(j, UP))),
          float(t2[i, j]))
  return eta.pruned()


def secondary_projector(n_spatial: int) -> normal_order.NormalOrderedOperator:
  """Q = n_up + n_dn - n_up n_dn of the last orbital."""
  up = normal_order.NormalOrderedOperator.number(
      fock_space.mode(n_spatial - 1, UP))
  down = normal_order.NormalOrderedOperator.number(
      fock_space.mode(n_spatial - 1, DOWN))
  return up + down - up @ down


def bloch_operator(h1: np.ndarray, h2: np.ndarray, t1: np.ndarray,
                   t2: np.ndarray) -> normal_order.NormalOrderedOperator:
  """Normal-ordered Q S^-1 H S P without the strings that annihilate N."""
  n = h1.shape[0]
  fock_space.check_size(n)
  target_modes = (fock_space.mode(n - 1, UP), fock_space.mode(n - 1, DOWN))
  eta = generator(t1, t2, n)
  left = secondary_projector(n) - eta
  right = (normal_order.NormalOrderedOperator.identity() +
           eta.without_annihilators(target_modes))
  # Strings annihilating N still contract with the N creators of eta.
  transformed = left @ normal_order.hamiltonian(h1, h2)
  result = (transformed @ right).without_annihilators(target_modes)
  logging.vlog(1, 'Bloch operator over %d orbitals has %d strings.', n,
               len(result))
  return result


def coefficient_tensors(bloch: normal_order.NormalOrderedOperator,
                        n_spatial: int) -> MRCoefficients:
  """Reads A, B, C and D off a Bloch operator."""
  m = n_spatial - 1
  nu, nd = fock_space.mode(m, UP), fock_space.mode(m, DOWN)
  target = (nu, nd)

  def coeff(creators, annihilators):
    return -bloch.coefficient(creators, annihilators)

  def so(i, s):
    return fock_space.mode(i, s)

  singles = np.zeros((2, m))
  doubles = np.zeros((2, 2, m, m, m))
  paired = np.zeros((m, m))
  paired_triples = np.zeros((2, m, m, m, m))
  for s in (UP, DOWN):
    for i in range(m):
      singles[s, i] = coeff((target[s],), (so(i, s),))
  for s in (UP, DOWN):
    for v in (UP, DOWN):
      for i in range(m):
        for j in range(m):
          for k in range(m):
            doubles[s, v, i, j, k] = coeff((target[s], so(i, v)),
                                           (so(j, v), so(k, s)))
  for i in range(m):
    for j in range(m):
      paired[i, j] = coeff((nu, nd), (so(i, DOWN), so(j, UP)))
  for s in (UP, DOWN):
    for i in range(m):
      for j in range(m):
        for k in range(m):
          for l in range(m):
            paired_triples[s, i, j, k, l] = coeff(
                (nu, nd, so(i, s)), (so(j, s), so(k, DOWN), so(l, UP)))
  return MRCoefficients(singles, doubles, paired, paired_triples)


def evaluate_mr_coefficients(h1: np.ndarray, h2: np.ndarray, t1: np.ndarray,
                             t2: np.ndarray) -> MRCoefficients:
  """Coefficients of the normal-ordered downfolding equations.

  Args:
    h1: One-body tensor; the last orbital is decoupled.
    h2: Two-body tensor in operator ordering.
    t1: Singles t1[i] or spin-resolved t1[s, i] over the other orbitals.
    t2: Paired doubles t2[i, j] over the other orbitals.

  Returns:
    The A, B, C and D tensors; all vanish at a solution.
  """
  n = h1.shape[0]
  return coefficient_tensors(bloch_operator(h1, h2, t1, t2), n)


def singles_closed_form(h1: np.ndarray, t1: np.ndarray) -> np.ndarray:
  """A[s,i] = sum_k t[k] (h[k,N] t[i] + h[k,i]) - h[N,N] t[i] - h[N,i]."""
  m = h1.shape[0] - 1
  t1 = _spin_singles(t1, m)
  h_kn = h1[:m, m]
  h_ki = h1[:m, :m]
  return (np.outer(t1 @ h_kn, np.ones(m)) * t1 + t1 @ h_ki -
          h1[m, m] * t1 - h1[m, :m][None, :])
