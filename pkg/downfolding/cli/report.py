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
"""Machine-readable outputs of the `downfold` commands.

Floats are written with 12 significant digits and keys are sorted, so the
same inputs give the same bytes. Anything run-dependent (timings, host,
start time) goes under the `metadata` key.
"""

import datetime
import enum
import json
import math
import os
import platform
from typing import Any, Dict, Mapping, Optional

import numpy as np

from downfolding import version

FLOAT_FORMAT = '%.12g'


@enum.unique
class ExitCode(enum.IntEnum):
  OK = 0
  NUMERICAL_FAILURE = 1
  USAGE_ERROR = 2


def normalize(value: Any) -> Any:
  """Plain JSON values with floats rounded to 12 significant digits."""
  if isinstance(value, Mapping):
    return {str(k): normalize(v) for k, v in value.items()}
  if isinstance(value, (list, tuple)):
    return [normalize(v) for v in value]
  if isinstance(value, np.ndarray):
    return normalize(value.tolist())
  if isinstance(value, enum.Enum):
    return normalize(value.value)
  if isinstance(value, (bool, np.bool_)):
    return bool(value)
  if isinstance(value, (int, np.integer)):
    return int(value)
  if isinstance(value, (float, np.floating)):
    value = float(value)
    if not math.isfinite(value):
      return None
    return float(FLOAT_FORMAT % value)
  return value


def dumps(payload: Mapping[str, Any]) -> str:
  return json.dumps(normalize(payload), indent=2, sort_keys=True) + '\n'


def metadata(**extra: Any) -> Dict[str, Any]:
  return {
      'version': version.__version__,
      'python': platform.python_version(),
      'created': datetime.datetime.now(datetime.timezone.utc).isoformat(),
      **extra,
  }


def write_json(path: str,
               payload: Mapping[str, Any],
               extra_metadata: Optional[Mapping[str, Any]] = None) -> str:
  """Writes `payload` plus a metadata block; returns the path."""
  payload = dict(payload)
  payload['metadata'] = metadata(**(extra_metadata or {}))
  directory = os.path.dirname(path)
  if directory:
    os.makedirs(directory, exist_ok=True)
  with open(path, 'w') as f:
    f.write(dumps(payload))
  return path


def error_object(error: BaseException, **details: Any) -> Dict[str, Any]:
  """{"error": {"type", "message", ...}} for a failed command."""
  body = {'type': type(error).__name__, 'message': str(error)}
  body.update(details)
  return {'error': body}
