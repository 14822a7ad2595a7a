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
"""Build, test, and install downfolding."""
import argparse
import codecs
import datetime
import os
import sys

from setuptools import find_packages
from setuptools import setup

# Enables importing version.py directly by adding its path to sys.path.
version_path = os.path.join(os.path.dirname(__file__), 'downfolding')
sys.path.append(version_path)
import version as downfolding_version  # pylint: disable=g-import-not-at-top

REQUIRED_PACKAGES = [
    'absl-py',
    'gin-config',
    'numpy',
    'opt_einsum',
    'scipy',
    'sortedcontainers',
]
TEST_PACKAGES = ['pytest', 'pyscf']


class SetupToolsHelper(object):
  """Helper to execute `setuptools.setup()`."""

  def __init__(self, release=True):
    """Initialize SetupToolsHelper class.

    Args:
      release: True to do a release build. False for a nightly build.
    """
    self.release = release

  def _get_version(self):
    """Returns the version and project name to associate with the build."""
    if self.release:
      return downfolding_version.__rel_version__, 'downfolding'
    version = downfolding_version.__dev_version__
    version += datetime.datetime.now().strftime('%Y%m%d')
    return version, 'downfolding-nightly'

  def run_setup(self):
    root_path = os.path.abspath(os.path.dirname(__file__))
    with codecs.open(os.path.join(root_path, 'README.md'),
                     encoding='utf-8') as f:
      long_description = f.read()

    version, project_name = self._get_version()
    setup(
        name=project_name,
        version=version,
        description=('Tensor-factorized recursive Hamiltonian downfolding'),
        long_description=long_description,
        long_description_content_type='text/markdown',
        license='Apache 2.0',
        packages=find_packages(include=['downfolding', 'downfolding.*']),
        package_data={'downfolding': ['integrals/testdata/*.fcidump']},
        include_package_data=True,
        install_requires=REQUIRED_PACKAGES,
        extras_require={
            'testing': REQUIRED_PACKAGES + TEST_PACKAGES,
        },
        entry_points={
            'console_scripts': [
                'downfold=downfolding.cli.downfold_main:run_main',
            ],
        },
        python_requires='>=3.8',
        classifiers=[
            'Development Status :: 3 - Alpha',
            'Intended Audience :: Science/Research',
            'License :: OSI Approved :: Apache Software License',
            'Programming Language :: Python :: 3.8',
            'Programming Language :: Python :: 3.9',
            'Programming Language :: Python :: 3.10',
            'Topic :: Scientific/Engineering :: Chemistry',
            'Topic :: Scientific/Engineering :: Physics',
        ],
        keywords='quantum chemistry coupled cluster downfolding '
        'tensor factorization block encoding',
    )


if __name__ == '__main__':
  # Hide argparse help so `setuptools.setup` help prints.
  parser = argparse.ArgumentParser(add_help=False)
  parser.add_argument(
      '--release',
      action='store_true',
      help='Pass as true to do a release build')

  FLAGS, unparsed = parser.parse_known_args()
  # Go forward with only non-custom flags.
  sys.argv.clear()
  # Downstream `setuptools.setup` expects args to start at the second element.
  unparsed.insert(0, 'foo')
  sys.argv.extend(unparsed)
  SetupToolsHelper(release=FLAGS.release).run_setup()
