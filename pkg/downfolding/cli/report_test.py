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
"""Tests for downfolding.cli.report."""

import enum
import json
import os

import numpy as np

from downfolding import version
from downfolding.cli import report
from downfolding.utils import test_utils


class _Color(enum.Enum):
  RED = 'red'


class NormalizeTest(test_utils.TestCase):

  def test_rounds_to_twelve_digits(self):
    self.assertEqual(report.normalize(1.0 / 3.0), 0.333333333333)
    self.assertEqual(report.normalize(-1.1372849999999999), -1.137285)

  def test_non_finite_becomes_null(self):
    self.assertEqual(
        report.normalize([np.nan, np.inf, 1.0]), [None, None, 1.0])

  def test_containers(self):
    value = {
        1: (np.int64(2), np.float32(0.5)),
        'array': np.eye(2),
        'flag': np.bool_(True),
        'color': _Color.RED,
    }
    self.assertEqual(
        report.normalize(value), {
            '1': [2, 0.5],
            'array': [[1.0, 0.0], [0.0, 1.0]],
            'flag': True,
            'color': 'red',
        })
    self.assertIsInstance(report.normalize(np.bool_(False)), bool)


class WriteJsonTest(test_utils.TestCase):

  def test_dumps_is_sorted(self):
    text = report.dumps({'b': 1, 'a': 2.0})
    self.assertTrue(text.endswith('\n'))
    self.assertLess(text.index('"a"'), text.index('"b"'))

  def test_write_adds_metadata(self):
    path = os.path.join(self.create_tempdir().full_path, 'nested', 'r.json')
    report.write_json(path, {'energy': -1.0}, {'wall_ms': 3.5})
    with open(path) as f:
      payload = json.load(f)
    self.assertEqual(payload['energy'], -1.0)
    self.assertEqual(payload['metadata']['version'], version.__version__)
    self.assertEqual(payload['metadata']['wall_ms'], 3.5)
    self.assertIn('created', payload['metadata'])

  def test_error_object(self):
    error = report.error_object(ValueError('bad input'), path='x')
    self.assertEqual(error, {
        'error': {
            'type': 'ValueError',
            'message': 'bad input',
            'path': 'x'
        }
    })

  def test_exit_codes(self):
    self.assertEqual(int(report.ExitCode.OK), 0)
    self.assertEqual(int(report.ExitCode.NUMERICAL_FAILURE), 1)
    self.assertEqual(int(report.ExitCode.USAGE_ERROR), 2)


if __name__ == '__main__':
  test_utils.main()
