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
"""Qubit registers of the downfolding block-encoding circuits.

Index registers take ceil(log2(dim)) qubits for the dimension they run
over. Two registers are shared by every circuit: the one-qubit selector
`Ahat` and the twelve-qubit data register `Dhat` whose qubits receive the
block-encoder rotations.
"""

import dataclasses
from typing import Any, Dict, Iterable, Mapping, Tuple

ANCILLA = 'Ahat'
DATA = 'Dhat'
DATA_QUBITS = 12

# Index register name -> the dimension it runs over.
INDEX_REGISTERS = (
    ('P', 'n_htf'), ('Q', 'n_htf'),
    ('R', 'n_ttf'), ('S', 'n_ttf'),
    ('I', 'n_o'), ('J', 'n_o'), ('K', 'n_o'), ('L', 'n_o'),
    ('A', 'n_v'), ('B', 'n_v'), ('C', 'n_v'), ('D', 'n_v'),
    ('X', 'n_aux'),
)


def ceil_log2(n: int) -> int:
  """Qubits needed to index `n` values."""
  if n < 1:
    raise ValueError(f'Register dimension must be positive, got {n}.')
  return (int(n) - 1).bit_length()


@dataclasses.dataclass(frozen=True)
class Dimensions:
  """Sizes the downfolding expressions run over.

  Attributes:
    n_o: Occupied orbitals.
    n_v: Virtual orbitals.
    n_aux: Cholesky vectors.
    n_htf: CP rank of the Cholesky factors.
    n_ttf: CP rank of the mixed doubles; 0 selects max(n_v, 2 n_o).
  """
  n_o: int
  n_v: int
  n_aux: int
  n_htf: int
  n_ttf: int = 0

  def __post_init__(self):
    if not self.n_ttf:
      object.__setattr__(self, 'n_ttf', max(self.n_v, 2 * self.n_o))
    for field in dataclasses.fields(self):
      value = getattr(self, field.name)
      if int(value) != value or value < 1:
        raise ValueError(
            f'{field.name} must be a positive integer, got {value}.')

  def as_dict(self) -> Dict[str, int]:
    return dataclasses.asdict(self)

  @classmethod
  def from_dict(cls, values: Mapping[str, Any]) -> 'Dimensions':
    try:
      return cls(**{
          f.name: int(values[f.name])
          for f in dataclasses.fields(cls)
          if f.name in values or f.name != 'n_ttf'
      })
    except KeyError as e:
      raise ValueError(f'Missing dimension {e.args[0]!r}.') from e


@dataclasses.dataclass(frozen=True)
class Register:
  name: str
  dim: int
  width: int


@dataclasses.dataclass(frozen=True)
class RegisterLayout:
  """Every register of the downfolding circuits, in allocation order."""
  registers: Tuple[Register, ...]

  @classmethod
  def from_dimensions(cls, dims: Dimensions) -> 'RegisterLayout':
    registers = []
    for name, field in INDEX_REGISTERS:
      dim = getattr(dims, field)
      registers.append(Register(name, dim, ceil_log2(dim)))
    registers.append(Register(ANCILLA, 2, 1))
    registers.append(Register(DATA, 2**DATA_QUBITS, DATA_QUBITS))
    return cls(tuple(registers))

  def __getitem__(self, name: str) -> Register:
    for register in self.registers:
      if register.name == name:
        return register
    raise KeyError(f'Unknown register {name!r}.')

  def width(self, name: str) -> int:
    return self[name].width

  @property
  def total_qubits(self) -> int:
    return sum(r.width for r in self.registers)

  def live_qubits(self, names: Iterable[str]) -> int:
    """Qubits of the named index registers plus the shared registers."""
    live = set(names) - {ANCILLA, DATA}
    return (sum(self.width(name) for name in live) + self.width(ANCILLA) +
            self.width(DATA))

  def widths(self) -> Dict[str, int]:
    return {r.name: r.width for r in self.registers}

  def as_dict(self) -> Dict[str, Any]:
    return {
        'registers': [dataclasses.asdict(r) for r in self.registers],
        'total_qubits': self.total_qubits,
    }
