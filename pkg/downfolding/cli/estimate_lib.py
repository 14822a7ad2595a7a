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
"""The `estimate` command."""

import json
import os
from typing import Any, Dict, Mapping, Optional

from absl import logging

from downfolding.cli import run_lib
from downfolding.qres import estimator
from downfolding.qres import registers


class MissingDimensionsError(ValueError):
  pass


def dims_from_run(run_dir: str) -> registers.Dimensions:
  """Dimensions recorded in the summary of a finished run.

  Raises:
    run_lib.InputNotFoundError: The run has no summary.
    MissingDimensionsError: The summary has no complete dimensions block.
  """
  path = os.path.join(run_dir, run_lib.SUMMARY_FILE)
  if not os.path.isfile(path):
    raise run_lib.InputNotFoundError(f'input not found: {path!r}')
  with open(path) as f:
    summary = json.load(f)
  try:
    return registers.Dimensions.from_dict(summary.get('dimensions') or {})
  except ValueError as e:
    raise MissingDimensionsError(f'{path}: {e}') from e


def dims_from_values(values: Mapping[str, Optional[int]]
                    ) -> registers.Dimensions:
  present = {k: v for k, v in values.items() if v is not None}
  try:
    return registers.Dimensions.from_dict(present)
  except ValueError as e:
    raise MissingDimensionsError(str(e)) from e


def matching_row(dims: registers.Dimensions) -> Optional[str]:
  """Name of the published row with these orbital and auxiliary sizes."""
  for name, row in estimator.PUBLISHED_ROWS.items():
    if (row.n_o, row.n_v, row.n_aux) == (dims.n_o, dims.n_v, dims.n_aux):
      return name
  return None


def cmd_estimate(dims: Optional[registers.Dimensions],
                 config: estimator.EstimatorConfig,
                 published_row: Optional[str] = None) -> Dict[str, Any]:
  """Resource report for `dims`, or for the dimensions of `published_row`.

  Dimensions equal to a published row add that row's reference numbers,
  as does naming the row.

  Raises:
    MissingDimensionsError: Neither dimensions nor a row were given.
    KeyError: `published_row` names no published row.
  """
  if dims is None and published_row is None:
    raise MissingDimensionsError(
        'Pass dimensions, a run directory or a reference row.')
  if dims is not None:
    published_row = published_row or matching_row(dims)
  if published_row is None:
    payload = estimator.estimate_total(dims, config).as_dict()
    payload['dimensions'] = dims.as_dict()
    return payload
  comparison = estimator.compare_to_published(published_row, config, dims)
  payload = dict(comparison.pop('estimate'))
  payload['dimensions'] = comparison.pop('dimensions')
  payload['published_reference'] = dict(
      comparison.pop('published_reference'), name=comparison.pop('name'))
  payload.update(comparison)
  logging.info('%s: %d qubits against %d published.', published_row,
               payload['qubits'], payload['published_reference']['qubits'])
  return payload
