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
"""Tests for downfolding.rhd.diis."""

import numpy as np

from downfolding.rhd import diis
from downfolding.utils import test_utils


class DIISTest(test_utils.TestCase):

  def test_first_vector_passes_through(self):
    accelerator = diis.DIIS()
    x = np.array([1.0, 2.0])
    self.assertAllClose(accelerator.extrapolate(x, np.array([0.1, 0.0])), x)
    self.assertLen(accelerator, 1)

  def test_orthogonal_errors_average(self):
    accelerator = diis.DIIS()
    s1 = np.array([1.0, 0.0, 3.0])
    s2 = np.array([0.0, 2.0, 1.0])
    accelerator.extrapolate(s1, np.array([1.0, 0.0]))
    result = accelerator.extrapolate(s2, np.array([0.0, 1.0]))
    self.assertAllClose(result, 0.5 * (s1 + s2), atol=1e-12)

  def test_weights_favor_smaller_error(self):
    accelerator = diis.DIIS()
    accelerator.extrapolate(np.array([0.0]), np.array([2.0, 0.0]))
    result = accelerator.extrapolate(np.array([1.0]), np.array([0.0, 1.0]))
    # Weights are proportional to 1 / |e|^2.
    self.assertAllClose(result, [0.8], atol=1e-12)

  def test_start_iteration_delays_extrapolation(self):
    accelerator = diis.DIIS(start_iteration=2)
    accelerator.extrapolate(np.array([1.0]), np.array([1.0, 0.0]))
    s2 = np.array([5.0])
    self.assertAllClose(
        accelerator.extrapolate(s2, np.array([0.0, 1.0])), s2)

  def test_max_vectors_caps_history(self):
    accelerator = diis.DIIS(max_vectors=3)
    rng = np.random.default_rng(0)
    for _ in range(6):
      accelerator.extrapolate(rng.normal(size=4), rng.normal(size=4))
    self.assertLen(accelerator, 3)

  def test_reset(self):
    accelerator = diis.DIIS()
    accelerator.extrapolate(np.ones(2), np.ones(2))
    accelerator.reset()
    self.assertEmpty(accelerator)

  def test_invalid_max_vectors(self):
    with self.assertRaises(ValueError):
      diis.DIIS(max_vectors=0)


if __name__ == '__main__':
  test_utils.main()
