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
"""Amplitude and residual containers for one downfolding step.

At a step the target orbital N is the last orbital of the current basis.
For a virtual target the excitations are

  singles        t1[i]      f+_{N s} f_{i s}
  mixed doubles  t2m[b,i,j] f+_{N s} f+_{b s'} f_{j s'} f_{i s}
  paired doubles t3[i,j]    f+_{N up} f+_{N dn} f_{j dn} f_{i up}

summed over the spins s, s'. i and j run over the occupied orbitals and b
over the remaining virtual orbitals, so t2m has shape (n_v, n_o, n_o) with
n_v excluding N.
"""

import dataclasses
import enum
from typing import Optional

import numpy as np


@enum.unique
class T2Interpretation(enum.Enum):
  """How the aN and Nb mixed-doubles blocks relate.

  SPIN_ADAPTED: t2_{aNij} is the image t2_{Nbji} of the single tensor t2m.
  INDEPENDENT: t2_{aNij} is a second unknown, t2m_an[a,i,j]; only the sum
    t2m + t2m_an.transpose(0, 2, 1) enters the equations.
  """
  SPIN_ADAPTED = 'spin_adapted'
  INDEPENDENT = 'independent'


@dataclasses.dataclass(frozen=True)
class StepSpace:
  """Orbital partition of one downfolding step."""
  n_orbitals: int
  n_occupied: int

  def __post_init__(self):
    if not 0 <= self.n_occupied <= self.n_orbitals:
      raise ValueError(
          f'Invalid partition: {self.n_occupied} occupied of '
          f'{self.n_orbitals} orbitals.')

  @property
  def target(self) -> int:
    return self.n_orbitals - 1

  @property
  def target_is_virtual(self) -> bool:
    return self.target >= self.n_occupied

  @property
  def n_o(self) -> int:
    return self.n_occupied

  @property
  def n_v(self) -> int:
    """Virtual orbitals other than the target."""
    return max(self.n_orbitals - self.n_occupied - 1, 0)

  @property
  def occupied(self) -> np.ndarray:
    return np.arange(self.n_occupied)

  @property
  def virtual(self) -> np.ndarray:
    return np.arange(self.n_occupied, self.n_occupied + self.n_v)


@dataclasses.dataclass
class AmplitudeSet:
  """Singles, mixed doubles and paired doubles of one step."""
  t1: np.ndarray
  t2m: np.ndarray
  t3: np.ndarray
  t2m_an: Optional[np.ndarray] = None

  @classmethod
  def zeros(
      cls,
      space: StepSpace,
      interpretation: T2Interpretation = T2Interpretation.SPIN_ADAPTED
  ) -> 'AmplitudeSet':
    n_o, n_v = space.n_o, space.n_v
    companion = (
        np.zeros((n_v, n_o, n_o))
        if interpretation is T2Interpretation.INDEPENDENT else None)
    return cls(
        t1=np.zeros(n_o),
        t2m=np.zeros((n_v, n_o, n_o)),
        t3=np.zeros((n_o, n_o)),
        t2m_an=companion)

  @property
  def interpretation(self) -> T2Interpretation:
    if self.t2m_an is None:
      return T2Interpretation.SPIN_ADAPTED
    return T2Interpretation.INDEPENDENT

  def effective_t2m(self) -> np.ndarray:
    """The mixed doubles that enter the equations."""
    if self.t2m_an is None:
      return self.t2m
    return self.t2m + self.t2m_an.transpose(0, 2, 1)

  def an_view(self) -> np.ndarray:
    """t2_{aNij} as seen by the equations, indexed [a, i, j]."""
    return self.effective_t2m().transpose(0, 2, 1)

  def is_finite(self) -> bool:
    return all(np.all(np.isfinite(x)) for x in self._blocks())

  def _blocks(self):
    blocks = [self.t1, self.t2m, self.t3]
    if self.t2m_an is not None:
      blocks.append(self.t2m_an)
    return blocks

  def pack(self) -> np.ndarray:
    return np.concatenate([x.ravel() for x in self._blocks()])

  def unpack(self, vector: np.ndarray) -> 'AmplitudeSet':
    """Returns a new set shaped like this one holding `vector`."""
    blocks = []
    offset = 0
    for x in self._blocks():
      blocks.append(vector[offset:offset + x.size].reshape(x.shape).copy())
      offset += x.size
    if offset != vector.size:
      raise ValueError(f'Expected {offset} amplitudes, got {vector.size}.')
    return AmplitudeSet(*blocks)

  def max_abs(self) -> float:
    return max((float(np.max(np.abs(x), initial=0.0)) for x in self._blocks()),
               default=0.0)


@dataclasses.dataclass
class ResidualSet:
  """Residuals with the shapes of an AmplitudeSet."""
  r1: np.ndarray
  r2: np.ndarray
  r2p: np.ndarray
  r2_an: Optional[np.ndarray] = None

  def _blocks(self):
    blocks = [self.r1, self.r2, self.r2p]
    if self.r2_an is not None:
      blocks.append(self.r2_an)
    return blocks

  def norm(self) -> float:
    """Infinity norm over all blocks; NaN if any entry is NaN."""
    return float(
        np.max([np.max(np.abs(x), initial=0.0) for x in self._blocks()]))

  def pack(self) -> np.ndarray:
    return np.concatenate([x.ravel() for x in self._blocks()])
