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
"""Gate-level representation of the block-encoding circuits.

Qubit 0 is the most significant bit of a basis index, and a register is
a contiguous run of qubits read as a big-endian integer. A `UCRY` gate is
a multiplexed Y rotation: its k controls, read as an integer v, select
the angle params[v] applied to its single target.
"""

import collections
import dataclasses
import json
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple

from absl import logging
import numpy as np

from downfolding.qres import registers as registers_lib

SINGLE_QUBIT_GATES = ('H', 'X', 'Z', 'S', 'SDG', 'T', 'TDG')
GATE_NAMES = SINGLE_QUBIT_GATES + ('RY', 'CNOT', 'UCRY', 'REFLECT')
_INVERSES = {'S': 'SDG', 'SDG': 'S', 'T': 'TDG', 'TDG': 'T'}

# Largest entry of a loaded matrix beyond 1 still treated as 1.
NORMALIZATION_ATOL = 1e-12


class NormalizationError(ValueError):
  """A loaded matrix has an entry outside [-1, 1]."""


class InvalidGateError(ValueError):
  """A gate is malformed or acts outside the circuit."""


@dataclasses.dataclass(frozen=True)
class Gate:
  """One gate of the IR.

  Attributes:
    name: One of GATE_NAMES.
    targets: Target qubits. REFLECT reflects about the basis state
      params[0] of its targets, 2|s><s| - 1.
    controls: Control qubits of CNOT and UCRY.
    params: Rotation angles, or the reflection state.
    label: Free-form tag, e.g. the tensor a block encoder loads.
  """
  name: str
  targets: Tuple[int, ...]
  controls: Tuple[int, ...] = ()
  params: Tuple[float, ...] = ()
  label: str = ''

  def __post_init__(self):
    object.__setattr__(self, 'targets', tuple(int(q) for q in self.targets))
    object.__setattr__(self, 'controls', tuple(int(q) for q in self.controls))
    object.__setattr__(self, 'params', tuple(float(p) for p in self.params))
    if self.name not in GATE_NAMES:
      raise InvalidGateError(f'Unknown gate {self.name!r}.')
    qubits = self.qubits
    if len(set(qubits)) != len(qubits):
      raise InvalidGateError(f'{self.name} repeats a qubit: {qubits}.')
    if self.name == 'REFLECT':
      ok = (self.targets and not self.controls and len(self.params) == 1 and
            0 <= self.params[0] < 2**len(self.targets))
    elif self.name == 'UCRY':
      ok = (len(self.targets) == 1 and
            len(self.params) == 2**len(self.controls))
    elif self.name == 'CNOT':
      ok = (len(self.targets) == 1 and len(self.controls) == 1 and
            not self.params)
    elif self.name == 'RY':
      ok = (len(self.targets) == 1 and not self.controls and
            len(self.params) == 1)
    else:
      ok = len(self.targets) == 1 and not self.controls and not self.params
    if not ok:
      raise InvalidGateError(
          f'Malformed {self.name}: targets {self.targets}, controls '
          f'{self.controls}, {len(self.params)} parameters.')

  @property
  def qubits(self) -> Tuple[int, ...]:
    return self.controls + self.targets

  def inverse(self) -> 'Gate':
    if self.name in ('RY', 'UCRY'):
      return dataclasses.replace(self, params=tuple(-p for p in self.params))
    return dataclasses.replace(self, name=_INVERSES.get(self.name, self.name))

  def as_dict(self) -> Dict[str, Any]:
    return {
        'name': self.name,
        'targets': list(self.targets),
        'controls': list(self.controls),
        'params': list(self.params),
        'label': self.label,
    }

  @classmethod
  def from_dict(cls, values: Mapping[str, Any]) -> 'Gate':
    return cls(
        name=values['name'],
        targets=tuple(values['targets']),
        controls=tuple(values.get('controls', ())),
        params=tuple(values.get('params', ())),
        label=values.get('label', ''))


@dataclasses.dataclass(frozen=True)
class GateIR:
  """An immutable circuit over named registers.

  Attributes:
    n_qubits: Circuit width.
    registers: (name, qubits) pairs in allocation order.
    gates: Gates in application order.
  """
  n_qubits: int
  registers: Tuple[Tuple[str, Tuple[int, ...]], ...]
  gates: Tuple[Gate, ...] = ()

  def __post_init__(self):
    seen = set()
    for name, qubits in self.registers:
      for q in qubits:
        if not 0 <= q < self.n_qubits or q in seen:
          raise InvalidGateError(
              f'Register {name} has an invalid qubit {q} in a '
              f'{self.n_qubits}-qubit circuit.')
        seen.add(q)
    for gate in self.gates:
      bad = [q for q in gate.qubits if not 0 <= q < self.n_qubits]
      if bad:
        raise InvalidGateError(
            f'{gate.name} acts on qubits {bad} outside the '
            f'{self.n_qubits}-qubit circuit.')

  def register(self, name: str) -> Tuple[int, ...]:
    for register_name, qubits in self.registers:
      if register_name == name:
        return qubits
    raise KeyError(f'Unknown register {name!r}.')

  def basis_index(self, values: Mapping[str, int]) -> int:
    """Basis index with the named registers set, all other qubits 0."""
    index = 0
    for name, value in values.items():
      qubits = self.register(name)
      if not 0 <= value < 2**len(qubits):
        raise ValueError(
            f'Value {value} does not fit register {name} of '
            f'{len(qubits)} qubits.')
      for k, q in enumerate(qubits):
        if (value >> (len(qubits) - 1 - k)) & 1:
          index |= 1 << (self.n_qubits - 1 - q)
    return index

  def then(self, other: 'GateIR') -> 'GateIR':
    """This circuit followed by `other` on the same registers."""
    if (other.n_qubits, other.registers) != (self.n_qubits, self.registers):
      raise InvalidGateError('Circuits have different registers.')
    return dataclasses.replace(self, gates=self.gates + other.gates)

  def dagger(self) -> 'GateIR':
    return dataclasses.replace(
        self, gates=tuple(g.inverse() for g in reversed(self.gates)))

  def gate_counts(self) -> Dict[str, int]:
    return dict(collections.Counter(g.name for g in self.gates))

  def synthesized_counts(self) -> Dict[str, int]:
    """Rotation and CNOT counts once multiplexors are decomposed.

    A multiplexor with k controls costs 2**k CNOTs and 2**k single-qubit
    rotations. Other gates count as themselves.
    """
    counts = collections.Counter()
    for gate in self.gates:
      if gate.name == 'UCRY':
        branches = 2**len(gate.controls)
        counts['RY'] += branches
        if gate.controls:
          counts['CNOT'] += branches
      else:
        counts[gate.name] += 1
    return dict(counts)

  def as_dict(self) -> Dict[str, Any]:
    return {
        'n_qubits': self.n_qubits,
        'registers': [[name, list(qubits)] for name, qubits in self.registers],
        'gates': [g.as_dict() for g in self.gates],
    }

  def to_json(self) -> str:
    return json.dumps(self.as_dict(), sort_keys=True)

  @classmethod
  def from_json(cls, text: str) -> 'GateIR':
    values = json.loads(text)
    return cls(
        n_qubits=values['n_qubits'],
        registers=tuple(
            (name, tuple(qubits)) for name, qubits in values['registers']),
        gates=tuple(Gate.from_dict(g) for g in values['gates']))


class CircuitBuilder:
  """Allocates registers and appends gates, then freezes a GateIR."""

  def __init__(self):
    self._registers: List[Tuple[str, Tuple[int, ...]]] = []
    self._gates: List[Gate] = []
    self._n_qubits = 0

  def add_register(self, name: str, width: int) -> Tuple[int, ...]:
    if any(name == existing for existing, _ in self._registers):
      raise ValueError(f'Register {name!r} already exists.')
    qubits = tuple(range(self._n_qubits, self._n_qubits + width))
    self._registers.append((name, qubits))
    self._n_qubits += width
    return qubits

  def qubits(self, *names: str) -> Tuple[int, ...]:
    registers = dict(self._registers)
    return tuple(q for name in names for q in registers[name])

  def append(self, gate: Gate) -> None:
    self._gates.append(gate)

  def h(self, *names: str) -> None:
    """A Hadamard layer on every qubit of the named registers."""
    for q in self.qubits(*names):
      self._gates.append(Gate('H', (q,)))

  def reflect(self, names: Sequence[str], value: int = 0) -> None:
    self._gates.append(Gate('REFLECT', self.qubits(*names), params=(value,)))

  def block_encoder(self,
                    matrix: np.ndarray,
                    rows: str,
                    cols: str,
                    data: int,
                    selector: int = 0,
                    ancilla: str = registers_lib.ANCILLA,
                    label: str = '') -> None:
    """Appends V^a over registers (rows, cols, ancilla) onto qubit `data`."""
    self._gates.append(
        block_encoder_gate(matrix, self.qubits(rows), self.qubits(cols),
                           self.qubits(ancilla)[0], data, selector, label))

  def build(self) -> GateIR:
    return GateIR(self._n_qubits, tuple(self._registers), tuple(self._gates))


def pad_to(matrix: np.ndarray, shape: Tuple[int, int]) -> np.ndarray:
  """Zero-pads `matrix` up to `shape`."""
  matrix = np.asarray(matrix, dtype=float)
  if matrix.ndim != 2 or any(m > s for m, s in zip(matrix.shape, shape)):
    raise ValueError(
        f'Matrix of shape {matrix.shape} does not fit registers of shape '
        f'{shape}.')
  padded = np.zeros(shape)
  padded[:matrix.shape[0], :matrix.shape[1]] = matrix
  return padded


def padded_shape(shape: Iterable[int]) -> Tuple[int, ...]:
  return tuple(2**registers_lib.ceil_log2(n) for n in shape)


def rotation_angles(matrix: np.ndarray) -> np.ndarray:
  """Angles theta with RY(theta) = [[A, s], [-s, A]], s = sqrt(1 - A**2).

  Raises:
    NormalizationError: An entry lies outside [-1, 1].
  """
  matrix = np.asarray(matrix, dtype=float)
  largest = float(np.max(np.abs(matrix), initial=0.0))
  if not np.isfinite(largest) or largest > 1.0 + NORMALIZATION_ATOL:
    raise NormalizationError(
        f'Block-encoded entries must lie in [-1, 1]; largest is {largest}.')
  return -2.0 * np.arccos(np.clip(matrix, -1.0, 1.0))


def block_encoder_gate(matrix: np.ndarray,
                       rows: Sequence[int],
                       cols: Sequence[int],
                       ancilla: int,
                       data: int,
                       selector: int = 0,
                       label: str = '') -> Gate:
  """The block encoder V^a as one multiplexed rotation.

  On |i, j, a> the data qubit is rotated by the entry (i, j) of `matrix`
  for a = 0, or of its transpose for a = 1; the branch 1 - a is left
  alone. Entries beyond the matrix shape encode 0.

  Args:
    matrix: Entries in [-1, 1].
    rows: Qubits of the row register.
    cols: Qubits of the column register.
    ancilla: The selector qubit.
    data: Qubit receiving the rotation.
    selector: The active selector value a.
    label: Tag stored on the gate.

  Returns:
    A UCRY gate controlled on rows, cols and the selector.

  Raises:
    NormalizationError: An entry lies outside [-1, 1].
  """
  if selector not in (0, 1):
    raise ValueError(f'Selector must be 0 or 1, got {selector}.')
  loaded = np.asarray(matrix, dtype=float)
  if loaded.ndim == 1:
    loaded = loaded[:, None]
  if selector:
    loaded = loaded.T
  angles = rotation_angles(pad_to(loaded, (2**len(rows), 2**len(cols))))
  branches = np.zeros((angles.size, 2))
  branches[:, selector] = angles.reshape(-1)
  logging.vlog(1, 'Block encoder %s: %d x %d entries, selector %d.', label,
               loaded.shape[0], loaded.shape[1], selector)
  return Gate(
      'UCRY', (data,),
      controls=tuple(rows) + tuple(cols) + (ancilla,),
      params=tuple(branches.reshape(-1)),
      label=label)


def build_block_encoder(matrix: np.ndarray,
                        selector: int = 0,
                        label: str = 'A') -> GateIR:
  """A standalone block encoder over registers I, J, Ahat and one data qubit.

  Register widths follow the loaded matrix, the transpose for selector 1.
  """
  matrix = np.asarray(matrix, dtype=float)
  if matrix.ndim == 1:
    matrix = matrix[:, None]
  shape = matrix.shape if not selector else matrix.shape[::-1]
  builder = CircuitBuilder()
  builder.add_register('I', registers_lib.ceil_log2(shape[0]))
  builder.add_register('J', registers_lib.ceil_log2(shape[1]))
  builder.add_register(registers_lib.ANCILLA, 1)
  (data,) = builder.add_register(registers_lib.DATA, 1)
  builder.block_encoder(matrix, 'I', 'J', data, selector, label=label)
  return builder.build()
