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
"""Binary and CSV containers for factor tensors.

Binary layout, all integers little-endian int64:

  magic b'DFFACTR1'
  number of arrays
  per array: name length, UTF-8 name, ndim, shape[ndim],
             row-major little-endian float64 data
"""

import csv
import itertools
from typing import BinaryIO, Dict

from absl import logging
import numpy as np

MAGIC = b'DFFACTR1'

_INT = np.dtype('<i8')
_FLOAT = np.dtype('<f8')


class FactorFileError(ValueError):
  pass


def _write_ints(f: BinaryIO, *values: int) -> None:
  f.write(np.array(values, dtype=_INT).tobytes())


def _read_ints(f: BinaryIO, count: int) -> np.ndarray:
  raw = f.read(count * _INT.itemsize)
  if len(raw) != count * _INT.itemsize:
    raise FactorFileError('Truncated factor file.')
  return np.frombuffer(raw, dtype=_INT)


def save_factors(path: str, arrays: Dict[str, np.ndarray]) -> None:
  """Writes named float arrays to the binary container."""
  with open(path, 'wb') as f:
    f.write(MAGIC)
    _write_ints(f, len(arrays))
    for name, array in arrays.items():
      array = np.ascontiguousarray(array, dtype=_FLOAT)
      encoded = name.encode('utf-8')
      _write_ints(f, len(encoded))
      f.write(encoded)
      _write_ints(f, array.ndim, *array.shape)
      f.write(array.tobytes())
  logging.info('Wrote %d factor arrays to %s.', len(arrays), path)


def load_factors(path: str) -> Dict[str, np.ndarray]:
  """Reads the arrays written by `save_factors`."""
  arrays = {}
  with open(path, 'rb') as f:
    if f.read(len(MAGIC)) != MAGIC:
      raise FactorFileError(f'{path} is not a factor file.')
    (count,) = _read_ints(f, 1)
    for _ in range(count):
      (name_length,) = _read_ints(f, 1)
      name = f.read(int(name_length)).decode('utf-8')
      (ndim,) = _read_ints(f, 1)
      shape = tuple(int(d) for d in _read_ints(f, int(ndim)))
      size = int(np.prod(shape, dtype=np.int64))
      raw = f.read(size * _FLOAT.itemsize)
      if len(raw) != size * _FLOAT.itemsize:
        raise FactorFileError(f'Truncated data for {name} in {path}.')
      arrays[name] = np.frombuffer(raw, dtype=_FLOAT).reshape(shape).copy()
  return arrays


def write_csv(path: str, array: np.ndarray) -> None:
  """Writes one row per entry: the indices followed by the value."""
  array = np.asarray(array)
  with open(path, 'w', newline='') as f:
    writer = csv.writer(f)
    writer.writerow([f'i{k}' for k in range(array.ndim)] + ['value'])
    for index in itertools.product(*[range(d) for d in array.shape]):
      writer.writerow(list(index) + ['%.17g' % array[index]])
