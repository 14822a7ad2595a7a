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
"""Version of the downfolding package."""

_MAJOR_VERSION = '0'
_MINOR_VERSION = '1'
_PATCH_VERSION = '0'

# Release branches carry a candidate suffix ('rc0', 'rc1', then '');
# everything else builds as a development version.
_DEV_SUFFIX = 'dev'
_REL_SUFFIX = 'rc0'

__version__ = f'{_MAJOR_VERSION}.{_MINOR_VERSION}.{_PATCH_VERSION}'
__dev_version__ = f'{__version__}.{_DEV_SUFFIX}'
__rel_version__ = f'{__version__}{_REL_SUFFIX}'
