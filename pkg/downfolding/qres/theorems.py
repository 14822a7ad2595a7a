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
"""Block-encoding circuits for tensor operations, checked by simulation.

Each circuit loads its operands with block encoders on the data register
and reads the result off a single amplitude. `verify_*` builds the
circuit, simulates it and returns the read-out next to the closed form
it must equal. All dimensions are padded to powers of two, and the
normalizations use the padded sizes.

Tensor product, contraction, dot and Hadamard circuits load their
operands as given, so every entry must lie in [-1, 1]. The matrix
products rescale by the largest absolute entry.
"""

import dataclasses
import enum
from typing import List, Optional, Tuple

from absl import logging
import numpy as np

from downfolding.qres import gate_ir
from downfolding.qres import registers as registers_lib
from downfolding.qres import simulator

ANCILLA = registers_lib.ANCILLA
DATA = registers_lib.DATA


class ShapeMismatchError(ValueError):
  """Operand shapes do not agree on a shared index."""


@enum.unique
class MatmulVariant(enum.Enum):
  ISOMETRY = 'isometry'
  UNITARY_ONLY = 'unitary-only'


@dataclasses.dataclass
class Verification:
  """Simulated read-out of a circuit against its closed form."""
  name: str
  overlaps: np.ndarray
  expected: np.ndarray
  n_qubits: int

  @property
  def max_error(self) -> float:
    return float(np.max(np.abs(self.overlaps - self.expected), initial=0.0))

  def passed(self, atol: float = 1e-10) -> bool:
    return self.max_error <= atol

  def as_dict(self):
    return {
        'name': self.name,
        'shape': list(self.expected.shape),
        'n_qubits': self.n_qubits,
        'max_error': self.max_error,
    }


def _matrix(a: np.ndarray) -> np.ndarray:
  a = np.asarray(a, dtype=float)
  if a.ndim != 2:
    raise ShapeMismatchError(f'Expected a matrix, got shape {a.shape}.')
  return a


def _width(n: int) -> int:
  return registers_lib.ceil_log2(n)


def max_abs_norm(a: np.ndarray) -> float:
  """Largest absolute entry, 1 for an all-zero matrix."""
  norm = float(np.max(np.abs(a), initial=0.0))
  return norm if norm > 0 else 1.0


def _read(circuit: gate_ir.GateIR, initial: int,
          indices: List[Tuple[int, ...]], names: Tuple[str, ...],
          shape: Tuple[int, ...]) -> np.ndarray:
  """Amplitudes at the basis states naming `indices`, as an array."""
  final = simulator.simulate(circuit, initial)
  values = np.array([
      final[circuit.basis_index(dict(zip(names, index)))] for index in indices
  ])
  return values.real.reshape(shape)


def _all_indices(shape: Tuple[int, ...]) -> List[Tuple[int, ...]]:
  return [tuple(int(v) for v in index) for index in np.ndindex(*shape)]


def matmul_circuit(a: np.ndarray, b: np.ndarray) -> gate_ir.GateIR:
  """U(A, B) = H_C V_A^dag R V_B H_C without isometries.

  Registers: C over the shared index, R over rows of A and columns of B,
  the selector and one data qubit. V_A loads A'[r, c] on selector 0 and
  V_B loads B'[c, r] on selector 1, with A' and B' rescaled to a largest
  entry of 1. R reflects about H|0> on (R, selector) and |0> on the data
  qubit.
  """
  a, b = _matrix(a), _matrix(b)
  if a.shape[1] != b.shape[0]:
    raise ShapeMismatchError(
        f'Cannot multiply shapes {a.shape} and {b.shape}.')
  builder = gate_ir.CircuitBuilder()
  builder.add_register('C', _width(a.shape[1]))
  builder.add_register('R', max(_width(a.shape[0]), _width(b.shape[1])))
  builder.add_register(ANCILLA, 1)
  (data,) = builder.add_register(DATA, 1)
  builder.h('C')
  builder.block_encoder(b.T / max_abs_norm(b), 'C', 'R', data, selector=1,
                        label='B')
  builder.h('R', ANCILLA)
  builder.reflect(('R', ANCILLA, DATA))
  builder.h('R', ANCILLA)
  v_a = gate_ir.block_encoder_gate(
      a.T / max_abs_norm(a), builder.qubits('C'), builder.qubits('R'),
      builder.qubits(ANCILLA)[0], data, selector=0, label='A')
  builder.append(v_a.inverse())
  builder.h('C')
  return builder.build()


def isometry_reflection(a: np.ndarray, b: np.ndarray) -> np.ndarray:
  """W = 2 T T^dag - 1 for the isometry T(A, B), over (C, R, a1, a2).

  Column c of T is |c> (x) sum_r |r> (x) [A'_rc |00> + sqrt(1 - A'^2) |01>
  + B'_cr |10> + sqrt(1 - B'^2) |11>] / sqrt(2 M), M the padded row count.
  """
  a, b = _matrix(a), _matrix(b)
  p = 2**_width(a.shape[1])
  m = 2**max(_width(a.shape[0]), _width(b.shape[1]))
  a_loaded = gate_ir.pad_to(a / max_abs_norm(a), (m, p))
  b_loaded = gate_ir.pad_to(b / max_abs_norm(b), (p, m))
  iso = np.zeros((p, m, 2, 2, p))
  for c in range(p):
    column = a_loaded[:, c]
    row = b_loaded[c, :]
    iso[c, :, 0, 0, c] = column
    iso[c, :, 0, 1, c] = np.sqrt(1 - column**2)
    iso[c, :, 1, 0, c] = row
    iso[c, :, 1, 1, c] = np.sqrt(1 - row**2)
  iso = iso.reshape(-1, p) / np.sqrt(2 * m)
  return 2 * iso @ iso.T - np.eye(iso.shape[0])


def verify_matmul(
    a: np.ndarray,
    b: np.ndarray,
    variant: MatmulVariant = MatmulVariant.UNITARY_ONLY) -> Verification:
  """Checks <0,i,0,0|U(A,B)|0,j,1,0> = (AB)_ij / (P M ||A|| ||B||).

  P is the padded shared dimension, M the padded larger of the outer
  dimensions and ||.|| the largest absolute entry. For square operands
  P = M and the denominator is P**2 ||A|| ||B||.

  Raises:
    ShapeMismatchError: The inner dimensions differ.
  """
  variant = MatmulVariant(variant)
  a, b = _matrix(a), _matrix(b)
  circuit = matmul_circuit(a, b)
  n, m = a.shape[0], b.shape[1]
  p = 2**len(circuit.register('C'))
  rows = 2**len(circuit.register('R'))
  hadamards = gate_ir.GateIR(
      circuit.n_qubits, circuit.registers,
      tuple(gate_ir.Gate('H', (q,)) for q in circuit.register('C')))
  reflection = None
  if variant is MatmulVariant.ISOMETRY:
    reflection = isometry_reflection(a, b)
  overlaps = np.zeros((n, m))
  for j in range(m):
    initial = circuit.basis_index({'R': j, ANCILLA: 1})
    if reflection is None:
      final = simulator.simulate(circuit, initial)
    else:
      state = simulator.StateVector.basis(circuit.n_qubits, initial)
      state.run(hadamards)
      state.apply_matrix(reflection, tuple(range(circuit.n_qubits)))
      final = state.run(hadamards).amplitudes
    for i in range(n):
      overlaps[i, j] = final[circuit.basis_index({'R': i})].real
  expected = (a @ b) / (p * rows * max_abs_norm(a) * max_abs_norm(b))
  logging.vlog(1, 'Matmul %s %s x %s on %d qubits.', variant.value,
               a.shape, b.shape, circuit.n_qubits)
  return Verification(f'matmul/{variant.value}', overlaps, expected,
                      circuit.n_qubits)


def tensor_product_circuit(*tensors: np.ndarray) -> gate_ir.GateIR:
  """V(A) V(B) [V(C)] H on every index register.

  Operand k uses index registers (I_k, J_k) and data qubit k.
  """
  if len(tensors) not in (2, 3):
    raise ValueError(f'Expected 2 or 3 operands, got {len(tensors)}.')
  tensors = [_matrix(t) for t in tensors]
  builder = gate_ir.CircuitBuilder()
  names = []
  for k, t in enumerate(tensors):
    names.append((f'I{k}', f'J{k}'))
    builder.add_register(f'I{k}', _width(t.shape[0]))
    builder.add_register(f'J{k}', _width(t.shape[1]))
  builder.add_register(ANCILLA, 1)
  data = builder.add_register(DATA, len(tensors))
  builder.h(*[name for pair in names for name in pair])
  for k in reversed(range(len(tensors))):
    builder.block_encoder(tensors[k], names[k][0], names[k][1], data[k],
                          label=chr(ord('A') + k))
  return builder.build()


def verify_tensor_product(a: np.ndarray,
                          b: np.ndarray,
                          c: Optional[np.ndarray] = None) -> Verification:
  """Checks <i,j,k,l,0,0|U|0> = A_ij B_kl / sqrt(MNQR).

  With a third operand the read-out is A_ij B_kl C_ef / sqrt(MNQRPS).

  Raises:
    gate_ir.NormalizationError: An entry lies outside [-1, 1].
  """
  tensors = [_matrix(t) for t in (a, b, c) if t is not None]
  circuit = tensor_product_circuit(*tensors)
  shape = tuple(n for t in tensors for n in t.shape)
  names = tuple(f'{r}{k}' for k in range(len(tensors)) for r in 'IJ')
  overlaps = _read(circuit, 0, _all_indices(shape), names, shape)
  subscripts = ','.join(['ab', 'cd', 'ef'][:len(tensors)])
  expected = np.einsum(f'{subscripts}->{subscripts.replace(",", "")}',
                       *tensors)
  expected /= np.sqrt(np.prod(gate_ir.padded_shape(shape)))
  return Verification(f'tensor_product/{len(tensors)}', overlaps, expected,
                      circuit.n_qubits)


def contraction_circuit(*tensors: np.ndarray) -> gate_ir.GateIR:
  """H_I V_IJ(A) V_IK(B) [V_IL(C)] H_I H_J H_K [H_L]."""
  if len(tensors) not in (2, 3):
    raise ValueError(f'Expected 2 or 3 operands, got {len(tensors)}.')
  tensors = [_matrix(t) for t in tensors]
  if len({t.shape[0] for t in tensors}) != 1:
    raise ShapeMismatchError(
        'Contracted operands need the same first dimension, got '
        f'{[t.shape for t in tensors]}.')
  outer = ('J', 'K', 'L')[:len(tensors)]
  builder = gate_ir.CircuitBuilder()
  builder.add_register('I', _width(tensors[0].shape[0]))
  for name, t in zip(outer, tensors):
    builder.add_register(name, _width(t.shape[1]))
  builder.add_register(ANCILLA, 1)
  data = builder.add_register(DATA, len(tensors))
  builder.h('I', *outer)
  for k in reversed(range(len(tensors))):
    builder.block_encoder(tensors[k], 'I', outer[k], data[k],
                          label=chr(ord('A') + k))
  builder.h('I')
  return builder.build()


def verify_tensor_contraction(a: np.ndarray,
                              b: np.ndarray,
                              c: Optional[np.ndarray] = None) -> Verification:
  """Checks <0,j,k,0,0|U|0> = sum_i A_ij B_ik / (M sqrt(QR)).

  With a third operand the read-out is sum_i A_ij B_ik C_il /
  (M sqrt(QRS)).

  Raises:
    ShapeMismatchError: The first dimensions differ.
    gate_ir.NormalizationError: An entry lies outside [-1, 1].
  """
  tensors = [_matrix(t) for t in (a, b, c) if t is not None]
  circuit = contraction_circuit(*tensors)
  shape = tuple(t.shape[1] for t in tensors)
  names = ('J', 'K', 'L')[:len(tensors)]
  overlaps = _read(circuit, 0, _all_indices(shape), names, shape)
  subscripts = ','.join(f'i{x}' for x in 'jkl'[:len(tensors)])
  expected = np.einsum(f'{subscripts}->{"jkl"[:len(tensors)]}', *tensors)
  padded = gate_ir.padded_shape((tensors[0].shape[0],) + shape)
  expected /= padded[0] * np.sqrt(np.prod(padded[1:]))
  return Verification(f'tensor_contraction/{len(tensors)}', overlaps,
                      expected, circuit.n_qubits)


def dot_product_circuit(a: np.ndarray, b: np.ndarray) -> gate_ir.GateIR:
  """H_K V_IK(A) V_JK(B) H_I H_J H_K."""
  a, b = _matrix(a), _matrix(b)
  if a.shape[1] != b.shape[1]:
    raise ShapeMismatchError(
        f'Dot product needs the same second dimension, got {a.shape} and '
        f'{b.shape}.')
  builder = gate_ir.CircuitBuilder()
  builder.add_register('I', _width(a.shape[0]))
  builder.add_register('J', _width(b.shape[0]))
  builder.add_register('K', _width(a.shape[1]))
  builder.add_register(ANCILLA, 1)
  data = builder.add_register(DATA, 2)
  builder.h('I', 'J', 'K')
  builder.block_encoder(b, 'J', 'K', data[1], label='B')
  builder.block_encoder(a, 'I', 'K', data[0], label='A')
  builder.h('K')
  return builder.build()


def verify_dot_product(a: np.ndarray, b: np.ndarray) -> Verification:
  """Checks <i,j,0,0,0|U|0> = sum_x A_ix B_jx / sqrt(2**(m + n + 2x))."""
  a, b = _matrix(a), _matrix(b)
  circuit = dot_product_circuit(a, b)
  shape = (a.shape[0], b.shape[0])
  overlaps = _read(circuit, 0, _all_indices(shape), ('I', 'J'), shape)
  m, n, x = gate_ir.padded_shape((a.shape[0], b.shape[0], a.shape[1]))
  expected = (a @ b.T) / np.sqrt(m * n * x * x)
  return Verification('dot_product', overlaps, expected, circuit.n_qubits)


def hadamard_product_circuit(a: np.ndarray, b: np.ndarray) -> gate_ir.GateIR:
  """V_IX(A) V_IX(B) H_I H_X."""
  a, b = _matrix(a), _matrix(b)
  if a.shape != b.shape:
    raise ShapeMismatchError(
        f'Hadamard product needs equal shapes, got {a.shape} and {b.shape}.')
  builder = gate_ir.CircuitBuilder()
  builder.add_register('I', _width(a.shape[0]))
  builder.add_register('X', _width(a.shape[1]))
  builder.add_register(ANCILLA, 1)
  data = builder.add_register(DATA, 2)
  builder.h('I', 'X')
  builder.block_encoder(b, 'I', 'X', data[1], label='B')
  builder.block_encoder(a, 'I', 'X', data[0], label='A')
  return builder.build()


def verify_hadamard_product(a: np.ndarray, b: np.ndarray) -> Verification:
  """Checks <i,x,0,0|U|0> = A_ix B_ix / sqrt(2**(m + x))."""
  a, b = _matrix(a), _matrix(b)
  circuit = hadamard_product_circuit(a, b)
  overlaps = _read(circuit, 0, _all_indices(a.shape), ('I', 'X'), a.shape)
  expected = a * b / np.sqrt(np.prod(gate_ir.padded_shape(a.shape)))
  return Verification('hadamard_product', overlaps, expected,
                      circuit.n_qubits)


def random_suite(seed: int, size: int = 4) -> List[Verification]:
  """Every verifier once on random operands of at most `size` rows.

  Matrix products draw unnormalized entries; the other circuits draw
  entries in [-1, 1]. Three-operand circuits use at most 4 rows so the
  state stays small.
  """
  if size < 1:
    raise ValueError(f'size must be positive, got {size}.')
  rng = np.random.default_rng(seed)

  def dim(limit=size):
    return int(rng.integers(1, limit + 1))

  def unit(*shape):
    return rng.uniform(-1.0, 1.0, size=shape)

  n, p, m = dim(), dim(), dim()
  a, b = rng.normal(size=(n, p)), rng.normal(size=(p, m))
  small = min(size, 4)
  rows = dim()
  rows3 = dim(small)
  results = [
      verify_matmul(a, b, MatmulVariant.UNITARY_ONLY),
      verify_matmul(a, b, MatmulVariant.ISOMETRY),
      verify_tensor_product(unit(dim(), dim()), unit(dim(), dim())),
      verify_tensor_product(
          unit(dim(2), dim(2)), unit(dim(2), dim(2)), unit(dim(2), dim(2))),
      verify_tensor_contraction(unit(rows, dim()), unit(rows, dim())),
      verify_tensor_contraction(
          unit(rows3, dim(small)), unit(rows3, dim(small)),
          unit(rows3, dim(small))),
  ]
  x = dim()
  results.append(verify_dot_product(unit(dim(), x), unit(dim(), x)))
  shape = (dim(), dim())
  results.append(verify_hadamard_product(unit(*shape), unit(*shape)))
  return results
