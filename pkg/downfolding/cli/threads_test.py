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
"""Tests for downfolding.cli.threads."""

from absl.testing import parameterized

from downfolding.cli import threads
from downfolding.utils import test_utils


class ThreadLimitTest(test_utils.TestCase, parameterized.TestCase):

  def test_copies_cap(self):
    environ = {threads.THREADS_ENV: '3'}
    self.assertEqual(threads.apply_thread_limit(environ), 3)
    for name in threads.THREAD_VARIABLES:
      self.assertEqual(environ[name], '3')

  @parameterized.parameters('', '0', 'four', '-2', '1.5')
  def test_ignores_invalid(self, raw):
    environ = {threads.THREADS_ENV: raw, 'OMP_NUM_THREADS': '8'}
    self.assertEqual(threads.apply_thread_limit(environ), 0)
    self.assertEqual(environ['OMP_NUM_THREADS'], '8')

  def test_unset(self):
    environ = {}
    self.assertEqual(threads.apply_thread_limit(environ), 0)
    self.assertEmpty(environ)


if __name__ == '__main__':
  test_utils.main()
