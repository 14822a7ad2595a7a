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
"""Pytest fixtures."""
import sys

from absl import flags
import pytest


@pytest.fixture(scope='session', autouse=True)
def parse_flags():
  """Parses absl flags once, so tests can read and override them.

  pytest's own arguments are not absl flags, only the program name is
  passed on.
  """
  if not flags.FLAGS.is_parsed():
    flags.FLAGS(sys.argv[:1])
