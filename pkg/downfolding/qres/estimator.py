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
"""Qubit and depth estimates for the eleven downfolding expressions.

Each expression circuit is a sequence of block encoders. An encoder over
index registers with dimensions (d1, d2, ...) is a multiplexor with
d1 * d2 * ... branches, so it costs that many CNOTs and as many
single-qubit rotations. Every encoder is applied twice, once to prepare
and once to unprepare, and every rotation is synthesized to precision
eps at a fixed T-depth:

  Diophantine:      ceil(log2(1/eps))
  Solovay-Kitaev:   ceil(ceil(log2(1/eps))**3.97 / 3)

Both units are relative to the three T gates per log factor of the
Diophantine synthesis, so switching models only rescales depths.
Qubits are the registers live in the widest expression plus the
selector and data registers.
"""

import dataclasses
import enum
import math
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from absl import logging
import gin

from downfolding.qres import registers as registers_lib

SOLOVAY_KITAEV_EXPONENT = 3.97


class UnknownExpressionError(ValueError):
  """No expression circuit has the requested id."""


@enum.unique
class CostModel(enum.Enum):
  DIOPHANTINE = 'diophantine'
  SOLOVAY_KITAEV = 'solovay_kitaev'


@enum.unique
class Aggregation(enum.Enum):
  SUM = 'sum'
  MAX = 'max'


@dataclasses.dataclass(frozen=True)
class ExpressionCircuit:
  """Block encoders of one expression.

  Attributes:
    expr_id: 1 .. 11.
    residual: 'r1' or 'r2'.
    loads: Index registers of each encoder, e.g. 'XP' for a tensor over
      the Cholesky and CP directions.
  """
  expr_id: int
  residual: str
  loads: Tuple[str, ...]

  @property
  def name(self) -> str:
    return f'E{self.expr_id}'

  @property
  def registers(self) -> Tuple[str, ...]:
    return tuple(sorted(set(''.join(self.loads))))

  def polynomial(self, dims: registers_lib.Dimensions) -> int:
    """Multiplexor branches summed over the encoders."""
    sizes = _register_dims(dims)
    return sum(math.prod(sizes[r] for r in load) for load in self.loads)


EXPRESSIONS = (
    ExpressionCircuit(1, 'r1', ('I',)),
    ExpressionCircuit(2, 'r1', ('XP', 'JP', 'P', 'XQ', 'Q', 'IQ', 'J')),
    ExpressionCircuit(3, 'r1',
                      ('XP', 'JP', 'IP', 'XQ', 'KQ', 'Q', 'J', 'K')),
    ExpressionCircuit(
        4, 'r1', ('XP', 'KP', 'IP', 'XQ', 'LQ', 'AQ', 'AR', 'KR', 'LR')),
    ExpressionCircuit(
        5, 'r1',
        ('XP', 'KP', 'CP', 'XQ', 'LQ', 'Q', 'L', 'CR', 'IR', 'KR')),
    ExpressionCircuit(6, 'r2', ('XP', 'AP', 'IP', 'XQ', 'Q', 'JQ')),
    ExpressionCircuit(
        7, 'r2', ('XP', 'KP', 'IP', 'XQ', 'LQ', 'JQ', 'AR', 'KR', 'LR')),
    ExpressionCircuit(
        8, 'r2', ('XP', 'AP', 'P', 'XQ', 'Q', 'BQ', 'BR', 'IR', 'JR')),
    ExpressionCircuit(
        9, 'r2',
        ('XP', 'AP', 'BP', 'XQ', 'KQ', 'Q', 'BR', 'IR', 'JR', 'K')),
    ExpressionCircuit(10, 'r2', ('XP', 'AP', 'P', 'XQ', 'Q', 'Q', 'I', 'J')),
    ExpressionCircuit(
        11, 'r2', ('XP', 'KP', 'CP', 'XQ', 'LQ', 'Q', 'CR', 'IR', 'LR', 'AS',
                   'KS', 'JS')),
)


@dataclasses.dataclass(frozen=True)
class PublishedRow:
  """A published estimate: sizes, qubits and depth per precision."""
  n_o: int
  n_v: int
  n_aux: int
  qubits: int
  depths: Tuple[Tuple[float, float], ...]

  def dimensions(self) -> registers_lib.Dimensions:
    return registers_lib.Dimensions(
        n_o=self.n_o, n_v=self.n_v, n_aux=self.n_aux, n_htf=self.n_aux)

  def depth(self, epsilon: float) -> Optional[float]:
    for eps, depth in self.depths:
      if math.isclose(eps, epsilon, rel_tol=1e-9):
        return depth
    return None


_PRECISIONS = (1e-2, 1e-3, 1e-4, 1e-5)

# Retinol at 1e-5 is kept as printed.
PUBLISHED_ROWS = {
    'beta_carotene': PublishedRow(
        148, 692, 6816, 117,
        tuple(zip(_PRECISIONS, (6.71e8, 1.01e9, 1.34e9, 1.67e9)))),
    'retinol': PublishedRow(
        79, 992, 2496, 108,
        tuple(zip(_PRECISIONS, (1.17e8, 1.75e8, 2.34e8, 2.92e9)))),
    'c60': PublishedRow(
        180, 660, 6360, 117,
        tuple(zip(_PRECISIONS, (5.89e8, 8.84e8, 1.18e9, 1.47e9)))),
    'co_heme': PublishedRow(
        185, 840, 4431, 117,
        tuple(zip(_PRECISIONS, (3.1e8, 4.65e8, 6.2e8, 7.75e8)))),
}


@gin.configurable
@dataclasses.dataclass
class EstimatorConfig:
  """Settings of a resource estimate.

  Attributes:
    epsilon: Synthesis precision per rotation, in (0, 1).
    cost_model: 'diophantine' or 'solovay_kitaev'.
    aggregation: 'sum' adds the expression depths, 'max' keeps the
      deepest.
  """
  epsilon: float = 1e-3
  cost_model: Union[str, CostModel] = 'diophantine'
  aggregation: Union[str, Aggregation] = 'sum'

  def __post_init__(self):
    if not 0 < self.epsilon < 1:
      raise ValueError(f'epsilon must lie in (0, 1), got {self.epsilon}.')
    self.cost_model = CostModel(self.cost_model)
    self.aggregation = Aggregation(self.aggregation)


@dataclasses.dataclass(frozen=True)
class ExpressionEstimate:
  name: str
  registers: Tuple[str, ...]
  live_qubits: int
  polynomial: int
  rotations: int
  cnot_depth: int
  t_depth: int


@dataclasses.dataclass(frozen=True)
class ResourceEstimate:
  """Totals and the per-expression breakdown they aggregate.

  Attributes:
    qubits: Sum of every register of the layout.
    live_qubits: Live qubits of the widest expression.
    t_depth: Aggregated T-depth.
    cnot_depth: Aggregated CNOT depth.
    cost_model: Rotation synthesis model.
    aggregation: How expression depths combine.
    epsilon: Synthesis precision.
    widest: Expression with the most live qubits.
    layout: Every register, including those no expression keeps live
      at the same time.
    breakdown: One entry per expression.
  """
  qubits: int
  live_qubits: int
  t_depth: int
  cnot_depth: int
  cost_model: CostModel
  aggregation: Aggregation
  epsilon: float
  widest: str
  layout: registers_lib.RegisterLayout
  breakdown: Tuple[ExpressionEstimate, ...]

  def register_deltas(self) -> Dict[str, int]:
    """Widths of the registers the widest expression leaves idle.

    They sum to qubits - live_qubits.
    """
    widest = next(e for e in self.breakdown if e.name == self.widest)
    live = set(widest.registers) | {registers_lib.ANCILLA, registers_lib.DATA}
    return {
        r.name: r.width for r in self.layout.registers if r.name not in live
    }

  def as_dict(self) -> Dict[str, Any]:
    return {
        'qubits': self.qubits,
        'live_qubits': self.live_qubits,
        'register_deltas': self.register_deltas(),
        't_depth': self.t_depth,
        'cnot_depth': self.cnot_depth,
        'cost_model': self.cost_model.value,
        'aggregation': self.aggregation.value,
        'epsilon': self.epsilon,
        'widest': self.widest,
        'registers': self.layout.widths(),
        'expressions': [dataclasses.asdict(e) for e in self.breakdown],
    }


def _register_dims(dims: registers_lib.Dimensions) -> Dict[str, int]:
  return {
      name: getattr(dims, field)
      for name, field in registers_lib.INDEX_REGISTERS
  }


def log_factor(epsilon: float) -> int:
  """ceil(log2(1/eps))."""
  if not 0 < epsilon < 1:
    raise ValueError(f'epsilon must lie in (0, 1), got {epsilon}.')
  return max(1, math.ceil(-math.log2(epsilon)))


def rotation_depth(epsilon: float,
                   cost_model: Union[str, CostModel]) -> int:
  """T-depth unit of one synthesized rotation."""
  factor = log_factor(epsilon)
  if CostModel(cost_model) is CostModel.DIOPHANTINE:
    return factor
  return math.ceil(factor**SOLOVAY_KITAEV_EXPONENT / 3)


def expression(expr_id: int) -> ExpressionCircuit:
  for circuit in EXPRESSIONS:
    if circuit.expr_id == expr_id:
      return circuit
  raise UnknownExpressionError(
      f'Unknown expression {expr_id}; expected 1 .. {len(EXPRESSIONS)}.')


def estimate_expression(
    expr_id: int,
    dims: registers_lib.Dimensions,
    epsilon: float,
    cost_model: Union[str, CostModel] = CostModel.DIOPHANTINE) -> int:
  """T-depth of one expression: 2 * branches * rotation unit.

  Raises:
    UnknownExpressionError: `expr_id` is not 1 .. 11.
  """
  return (2 * expression(expr_id).polynomial(dims) *
          rotation_depth(epsilon, cost_model))


def _expression_estimate(circuit: ExpressionCircuit,
                         dims: registers_lib.Dimensions,
                         layout: registers_lib.RegisterLayout,
                         unit: int) -> ExpressionEstimate:
  polynomial = circuit.polynomial(dims)
  return ExpressionEstimate(
      name=circuit.name,
      registers=circuit.registers,
      live_qubits=layout.live_qubits(circuit.registers),
      polynomial=polynomial,
      rotations=2 * polynomial,
      cnot_depth=2 * polynomial,
      t_depth=2 * polynomial * unit)


def estimate_total(
    dims: registers_lib.Dimensions,
    config: Optional[EstimatorConfig] = None) -> ResourceEstimate:
  """Qubits and depth of the eleven expressions at `dims`."""
  config = config or EstimatorConfig()
  layout = registers_lib.RegisterLayout.from_dimensions(dims)
  unit = rotation_depth(config.epsilon, config.cost_model)
  breakdown = tuple(
      _expression_estimate(c, dims, layout, unit) for c in EXPRESSIONS)
  widest = max(breakdown, key=lambda e: e.live_qubits)
  combine = sum if config.aggregation is Aggregation.SUM else max
  estimate = ResourceEstimate(
      qubits=layout.total_qubits,
      live_qubits=widest.live_qubits,
      t_depth=combine(e.t_depth for e in breakdown),
      cnot_depth=combine(e.cnot_depth for e in breakdown),
      cost_model=config.cost_model,
      aggregation=config.aggregation,
      epsilon=config.epsilon,
      widest=widest.name,
      layout=layout,
      breakdown=breakdown)
  logging.info('Estimated %d qubits (%d live in %s), T-depth %d (%s, %s).',
               estimate.qubits, estimate.live_qubits, estimate.widest,
               estimate.t_depth, config.cost_model.value,
               config.aggregation.value)
  return estimate


def compare_to_published(
    name: str,
    config: Optional[EstimatorConfig] = None,
    dims: Optional[registers_lib.Dimensions] = None) -> Dict[str, Any]:
  """Side-by-side estimate for a published row.

  The estimate uses the dimensions of the row unless `dims` are given.

  Raises:
    KeyError: `name` is not in PUBLISHED_ROWS.
  """
  if name not in PUBLISHED_ROWS:
    raise KeyError(
        f'Unknown reference row {name!r}; expected one of '
        f'{sorted(PUBLISHED_ROWS)}.')
  row = PUBLISHED_ROWS[name]
  dims = dims or row.dimensions()
  estimate = estimate_total(dims, config)
  reference_depth = row.depth(estimate.epsilon)
  return {
      'name': name,
      'dimensions': dims.as_dict(),
      'estimate': estimate.as_dict(),
      'published_reference': {
          'qubits': row.qubits,
          'depth': reference_depth,
      },
      'qubit_delta': estimate.qubits - row.qubits,
      'qubit_ratio': estimate.qubits / row.qubits,
      'depth_ratio': (estimate.t_depth / reference_depth
                      if reference_depth else None),
      'expression_depth_ratios': {
          e.name: (e.t_depth / reference_depth if reference_depth else None)
          for e in estimate.breakdown
      },
  }
