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
"""Settings of a `downfold` invocation and the config file they load from.

The config file is plain `key = value` lines; `#` starts a comment and a
leading `[section]` header is optional. Keys are RunConfig field names.
"""

import configparser
import dataclasses
import os
from typing import Any, Dict, Mapping, Optional

from downfolding.qres import estimator
from downfolding.rhd import downfold_lib
from downfolding.rhd import solver
from downfolding.tensorfactor import factorization

_DEFAULT_SECTION = 'downfold'


class ConfigError(ValueError):
  """A setting is missing, unknown or out of range."""


@dataclasses.dataclass
class RunConfig:
  """Everything a command needs besides its positional arguments.

  Attributes:
    fcidump: Input integral file.
    out: Output directory.
    tol: Amplitude convergence threshold.
    max_iterations: Solver cap per step.
    htf_mult: N_htf = ceil(htf_mult * N_aux).
    ttf_rank: N_ttf override; 0 selects max(N_v, 2 N_o).
    delta: Cholesky tolerance.
    seed: Seed of CP-ALS and of the verification suites.
    mode: 'dense' or 'factorized' residuals.
    stop_at: Orbitals left when the recursion stops.
    epsilon: Rotation synthesis precision of resource estimates.
    cost_model: 'diophantine' or 'solovay_kitaev'.
    aggregation: 'sum' or 'max' over expression depths.
  """
  fcidump: str = ''
  out: str = 'downfold_out'
  tol: float = 1e-8
  max_iterations: int = 200
  htf_mult: float = 2.0
  ttf_rank: int = 0
  delta: float = 1e-6
  seed: int = 0
  mode: str = 'dense'
  stop_at: int = 1
  epsilon: float = 1e-3
  cost_model: str = 'diophantine'
  aggregation: str = 'sum'

  def __post_init__(self):
    if self.tol <= 0 or self.delta <= 0:
      raise ConfigError(
          f'Tolerances must be positive, got tol={self.tol}, '
          f'delta={self.delta}.')
    if self.htf_mult < 0.5:
      raise ConfigError(f'htf_mult must be >= 0.5, got {self.htf_mult}.')
    if self.ttf_rank < 0:
      raise ConfigError(f'ttf_rank must be >= 0, got {self.ttf_rank}.')
    if self.max_iterations < 1 or self.stop_at < 1:
      raise ConfigError(
          f'max_iterations and stop_at must be positive, got '
          f'{self.max_iterations} and {self.stop_at}.')
    if self.mode not in ('dense', 'factorized'):
      raise ConfigError(f'Unknown mode {self.mode!r}.')
    try:
      estimator.EstimatorConfig(self.epsilon, self.cost_model,
                                self.aggregation)
    except ValueError as e:
      raise ConfigError(str(e)) from e

  def solver_config(self) -> solver.SolverConfig:
    return solver.SolverConfig(
        tol=self.tol, max_iterations=self.max_iterations)

  def factorization_config(self) -> factorization.FactorizationConfig:
    return factorization.FactorizationConfig(
        delta=self.delta,
        htf_mult=self.htf_mult,
        ttf_rank=self.ttf_rank,
        seed=self.seed)

  def downfold_config(self) -> downfold_lib.DownfoldConfig:
    return downfold_lib.DownfoldConfig(
        stop_at=self.stop_at,
        mode=self.mode,
        solver_config=self.solver_config(),
        factorization_config=self.factorization_config())

  def estimator_config(self) -> estimator.EstimatorConfig:
    return estimator.EstimatorConfig(self.epsilon, self.cost_model,
                                     self.aggregation)

  def as_dict(self) -> Dict[str, Any]:
    return dataclasses.asdict(self)


def _coerce(name: str, value: str, kind: type) -> Any:
  value = value.strip()
  if len(value) >= 2 and value[0] == value[-1] and value[0] in '"\'':
    value = value[1:-1]
  try:
    return kind(value)
  except ValueError as e:
    raise ConfigError(
        f'Config key {name!r} expects {kind.__name__}, got {value!r}.') from e


def parse_config_text(text: str) -> Dict[str, Any]:
  """Typed settings from `key = value` text."""
  parser = configparser.ConfigParser(
      inline_comment_prefixes=('#',), interpolation=None)
  if not text.lstrip().startswith('['):
    text = f'[{_DEFAULT_SECTION}]\n{text}'
  try:
    parser.read_string(text)
  except configparser.Error as e:
    raise ConfigError(f'Malformed config file: {e}') from e
  kinds = {f.name: f.type for f in dataclasses.fields(RunConfig)}
  kinds = {k: {'str': str, 'int': int, 'float': float}.get(v, v)
           for k, v in kinds.items()}
  values = {}
  for section in parser.sections():
    for key, raw in parser.items(section):
      if key not in kinds:
        raise ConfigError(f'Unknown config key {key!r}.')
      values[key] = _coerce(key, raw, kinds[key])
  return values


def read_config_file(path: str) -> Dict[str, Any]:
  if not os.path.exists(path):
    raise FileNotFoundError(f'Config file not found: {path}')
  with open(path) as f:
    return parse_config_text(f.read())


def build_config(file_values: Optional[Mapping[str, Any]] = None,
                 overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
  """RunConfig from defaults, then file values, then explicit overrides."""
  values = dict(file_values or {})
  values.update(overrides or {})
  return RunConfig(**values)
