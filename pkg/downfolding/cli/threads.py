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
"""Thread cap of the numerical libraries.

BLAS and OpenMP read their variables when they load, so the cap is
applied on import of `downfolding.cli`, before numpy.
"""

import os
from typing import MutableMapping, Optional

THREADS_ENV = 'DOWNFOLD_THREADS'
THREAD_VARIABLES = ('OMP_NUM_THREADS', 'OPENBLAS_NUM_THREADS',
                    'MKL_NUM_THREADS')


def apply_thread_limit(
    environ: Optional[MutableMapping[str, str]] = None) -> int:
  """Copies DOWNFOLD_THREADS into the BLAS and OpenMP variables.

  Returns:
    The thread cap, or 0 when the variable is unset or not a positive
    integer.
  """
  environ = os.environ if environ is None else environ
  raw = environ.get(THREADS_ENV, '')
  threads = int(raw) if raw.strip().isdigit() else 0
  if threads < 1:
    return 0
  for name in THREAD_VARIABLES:
    environ[name] = str(threads)
  return threads
