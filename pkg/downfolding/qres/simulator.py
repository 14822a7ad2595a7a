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
"""Dense state-vector simulation of a GateIR."""

import math
from typing import Optional, Sequence

import numpy as np

from downfolding.qres import gate_ir

# Dense unitaries are built column by column up to this width.
MAX_UNITARY_QUBITS = 12

_SQRT2_INV = 1 / math.sqrt(2)
_T = np.exp(1j * math.pi / 4)
_SINGLE_QUBIT = {
    'H': np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    'X': np.array([[0, 1], [1, 0]], dtype=complex),
    'Z': np.array([[1, 0], [0, -1]], dtype=complex),
    'S': np.array([[1, 0], [0, 1j]], dtype=complex),
    'SDG': np.array([[1, 0], [0, -1j]], dtype=complex),
    'T': np.array([[1, 0], [0, _T]], dtype=complex),
    'TDG': np.array([[1, 0], [0, np.conj(_T)]], dtype=complex),
}
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def ry(theta: float) -> np.ndarray:
  c, s = math.cos(theta / 2), math.sin(theta / 2)
  return np.array([[c, -s], [s, c]], dtype=complex)


class StateVector:
  """Amplitudes of an n-qubit register, qubit 0 most significant."""

  def __init__(self, n_qubits: int, amplitudes: Optional[np.ndarray] = None):
    self.n_qubits = n_qubits
    if amplitudes is None:
      amplitudes = np.zeros(2**n_qubits, dtype=complex)
      amplitudes[0] = 1.0
    amplitudes = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if amplitudes.size != 2**n_qubits:
      raise ValueError(
          f'Expected {2**n_qubits} amplitudes, got {amplitudes.size}.')
    self._state = amplitudes.copy()

  @classmethod
  def basis(cls, n_qubits: int, index: int) -> 'StateVector':
    amplitudes = np.zeros(2**n_qubits, dtype=complex)
    amplitudes[index] = 1.0
    return cls(n_qubits, amplitudes)

  @property
  def amplitudes(self) -> np.ndarray:
    return self._state.copy()

  def amplitude(self, index: int) -> complex:
    return complex(self._state[index])

  def _split(self, qubits: Sequence[int]) -> np.ndarray:
    """View with `qubits` moved last and flattened, shape (-1, 2**k)."""
    tensor = self._state.reshape([2] * self.n_qubits)
    tensor = np.moveaxis(tensor, list(qubits), list(
        range(self.n_qubits - len(qubits), self.n_qubits)))
    return tensor.reshape(-1, 2**len(qubits))

  def _merge(self, flat: np.ndarray, qubits: Sequence[int]) -> None:
    k = len(qubits)
    tensor = flat.reshape([2] * self.n_qubits)
    tensor = np.moveaxis(tensor, list(range(self.n_qubits - k, self.n_qubits)),
                         list(qubits))
    self._state = np.ascontiguousarray(tensor).reshape(-1)

  def apply_matrix(self, matrix: np.ndarray, qubits: Sequence[int]) -> None:
    """Applies a 2**k x 2**k unitary to `qubits`, the first most significant."""
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (2**len(qubits),) * 2:
      raise ValueError(
          f'Matrix of shape {matrix.shape} does not act on {len(qubits)} '
          'qubits.')
    self._merge(self._split(qubits) @ matrix.T, qubits)

  def apply(self, gate: gate_ir.Gate) -> None:
    if gate.name in _SINGLE_QUBIT:
      self.apply_matrix(_SINGLE_QUBIT[gate.name], gate.targets)
    elif gate.name == 'RY':
      self.apply_matrix(ry(gate.params[0]), gate.targets)
    elif gate.name == 'CNOT':
      self.apply_matrix(_CNOT, gate.controls + gate.targets)
    elif gate.name == 'UCRY':
      qubits = gate.controls + gate.targets
      flat = self._split(qubits).reshape(-1, len(gate.params), 2)
      rotations = np.stack([ry(theta) for theta in gate.params])
      flat = np.einsum('nvb,vab->nva', flat, rotations)
      self._merge(flat.reshape(-1, 2 * len(gate.params)), qubits)
    elif gate.name == 'REFLECT':
      flat = -self._split(gate.targets)
      value = int(gate.params[0])
      flat[:, value] *= -1
      self._merge(flat, gate.targets)
    else:
      raise gate_ir.InvalidGateError(f'Cannot simulate {gate.name}.')

  def run(self, circuit: gate_ir.GateIR) -> 'StateVector':
    if circuit.n_qubits != self.n_qubits:
      raise ValueError(
          f'A {circuit.n_qubits}-qubit circuit cannot run on '
          f'{self.n_qubits} qubits.')
    for gate in circuit.gates:
      self.apply(gate)
    return self


def simulate(circuit: gate_ir.GateIR, initial_index: int = 0) -> np.ndarray:
  """Final amplitudes of `circuit` started in a basis state."""
  return StateVector.basis(circuit.n_qubits,
                           initial_index).run(circuit).amplitudes


def unitary(circuit: gate_ir.GateIR) -> np.ndarray:
  """The dense matrix of `circuit`."""
  if circuit.n_qubits > MAX_UNITARY_QUBITS:
    raise ValueError(
        f'Dense unitaries are limited to {MAX_UNITARY_QUBITS} qubits, got '
        f'{circuit.n_qubits}.')
  dim = 2**circuit.n_qubits
  return np.stack([simulate(circuit, k) for k in range(dim)], axis=1)
