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
"""Reads and writes integrals in the FCIDUMP text format.

The file starts with a namelist header

  &FCI NORB=4,NELEC=4,MS2=0,
   ORBSYM=1,1,1,1,
   ISYM=1,
  &END

followed by one record per line, "value i j k l", with 1-based indices:
  * i j k l > 0: chemist integral (ij|kl),
  * i j > 0, k = l = 0: one-electron integral h1[i,j],
  * i > 0, j = k = l = 0: orbital energy of orbital i,
  * i = j = k = l = 0: core energy.
"""

import dataclasses
import re
from typing import Dict, Optional, TextIO, Tuple, Union

from absl import logging
import numpy as np

from downfolding.integrals import molecular_system

_HEADER_RE = re.compile(r'&FCI(?P<body>.*?)(?:&END|/)',
                        re.IGNORECASE | re.DOTALL)
_KEY_RE = re.compile(r'([A-Za-z_][A-Za-z0-9_]*)\s*=')


class FcidumpFormatError(ValueError):
  """Raised when an FCIDUMP stream cannot be parsed."""
  pass


@dataclasses.dataclass
class Integrals:
  """Everything an FCIDUMP file carries, in the internal convention."""
  system: molecular_system.MolecularSystem
  h1: np.ndarray
  h2: np.ndarray
  core_energy: float

  def __iter__(self):
    return iter((self.system, self.h1, self.h2, self.core_energy))


def _parse_header(header: str) -> Dict[str, Optional[Tuple[int, ...]]]:
  """Parses the namelist body into integer tuples keyed by upper-case name.

  Keys whose values are not integers map to None.
  """
  keys = list(_KEY_RE.finditer(header))
  if not keys:
    raise FcidumpFormatError('Empty FCIDUMP namelist header.')
  values = {}
  for n, match in enumerate(keys):
    end = keys[n + 1].start() if n + 1 < len(keys) else len(header)
    raw = header[match.end():end].replace(',', ' ').split()
    try:
      values[match.group(1).upper()] = tuple(int(v) for v in raw)
    except ValueError:
      # Logicals such as UHF=.FALSE. and string-valued keys.
      logging.vlog(1, 'Skipping non-integer header key %s=%s.',
                   match.group(1), ' '.join(raw))
      values[match.group(1).upper()] = None
  return values


def _scalar(values: Dict[str, Optional[Tuple[int, ...]]],
            key: str,
            default: Optional[int] = None) -> int:
  if key not in values:
    if default is None:
      raise FcidumpFormatError(f'FCIDUMP header is missing {key}.')
    return default
  if values[key] is None:
    raise FcidumpFormatError(f'{key} must be an integer.')
  if len(values[key]) != 1:
    raise FcidumpFormatError(f'{key} must be a single integer.')
  return values[key][0]


def parse_fcidump(stream: Union[str, TextIO]) -> Integrals:
  """Parses FCIDUMP text into the internal integral convention.

  Args:
    stream: The FCIDUMP contents, as a string or a readable text stream.

  Returns:
    An `Integrals` record; unpacks as (system, h1, h2, core_energy). h2 is
    in operator ordering, see `molecular_system`.

  Raises:
    FcidumpFormatError: On a malformed header or record, an index outside
      [1, NORB], MS2 != 0 or an odd NELEC.
  """
  text = stream if isinstance(stream, str) else stream.read()
  match = _HEADER_RE.search(text)
  if match is None:
    raise FcidumpFormatError('Missing "&FCI ... &END" namelist header.')
  header = _parse_header(match.group('body'))
  norb = _scalar(header, 'NORB')
  nelec = _scalar(header, 'NELEC')
  ms2 = _scalar(header, 'MS2', 0)
  if norb <= 0:
    raise FcidumpFormatError(f'NORB must be positive, got {norb}.')
  if ms2 != 0:
    raise FcidumpFormatError(
        f'MS2={ms2} is unsupported; only closed-shell systems are handled.')
  if nelec > 2 * norb or nelec < 0:
    raise FcidumpFormatError(f'NELEC={nelec} does not fit in {norb} orbitals.')
  if nelec % 2:
    raise FcidumpFormatError(
        f'NELEC={nelec} is odd; only closed-shell systems are handled.')

  h1 = np.zeros((norb, norb))
  g = np.zeros((norb,) * 4)
  energies = np.full(norb, np.nan)
  core = 0.0
  n_records = 0
  for lineno, line in enumerate(text[match.end():].splitlines(), start=1):
    fields = line.split()
    if not fields:
      continue
    if len(fields) != 5:
      raise FcidumpFormatError(
          f'Record {lineno} must have 5 fields, got {len(fields)}: {line!r}')
    try:
      value = float(fields[0].replace('D', 'E').replace('d', 'e'))
      i, j, k, l = (int(f) for f in fields[1:])
    except ValueError as e:
      raise FcidumpFormatError(f'Malformed record {lineno}: {line!r}') from e
    if any(x < 0 or x > norb for x in (i, j, k, l)):
      raise FcidumpFormatError(
          f'Index out of range [1, {norb}] in record {lineno}: {line!r}')
    n_records += 1
    if i and j and k and l:
      g[i - 1, j - 1, k - 1, l - 1] = value
    elif i and j and not k and not l:
      h1[i - 1, j - 1] = value
      h1[j - 1, i - 1] = value
    elif i and not j and not k and not l:
      energies[i - 1] = value
    elif not (i or j or k or l):
      core = value
    else:
      raise FcidumpFormatError(
          f'Unsupported index pattern in record {lineno}: {line!r}')

  g = molecular_system.symmetrize_chemist(g)
  h2 = molecular_system.from_chemist(g)
  if np.isnan(energies).any():
    occupied = np.arange(nelec // 2)
    coulomb = g[:, :, occupied][:, :, :, occupied]
    exchange = g[:, occupied][:, :, occupied]
    fock = (h1 + 2.0 * np.einsum('pqii->pq', coulomb)
            - np.einsum('piiq->pq', exchange))
    missing = np.isnan(energies)
    energies[missing] = np.diag(fock)[missing]
    logging.info('Took %d orbital energies from the Fock diagonal.',
                 int(missing.sum()))
  orbsym = header.get('ORBSYM') or ()
  try:
    system = molecular_system.MolecularSystem(
        n_spatial=norb,
        n_electrons=nelec,
        mo_energies=energies,
        ms2=ms2,
        orbsym=tuple(orbsym),
        isym=_scalar(header, 'ISYM', 1))
  except FcidumpFormatError:
    raise
  except ValueError as e:
    raise FcidumpFormatError(str(e)) from e
  logging.info('Parsed FCIDUMP: NORB=%d NELEC=%d with %d records.', norb,
               nelec, n_records)
  return Integrals(system=system, h1=h1, h2=h2, core_energy=core)


def read_fcidump(path: str) -> Integrals:
  """Reads an FCIDUMP file from disk."""
  with open(path, 'r') as f:
    return parse_fcidump(f)


def write_fcidump(system: molecular_system.MolecularSystem,
                  h1: np.ndarray,
                  h2: np.ndarray,
                  core_energy: float,
                  threshold: float = 0.0) -> str:
  """Serializes integrals as FCIDUMP text.

  Only symmetry-unique records with |value| > threshold are written, plus
  the orbital energies and the core energy.

  Args:
    system: The molecular system (header fields and orbital energies).
    h1: One-electron integrals.
    h2: Two-electron integrals in operator ordering.
    core_energy: Constant energy shift.
    threshold: Records with |value| <= threshold are skipped.

  Returns:
    The FCIDUMP text.
  """
  n = system.n_spatial
  molecular_system.validate_tensors(h1, h2, n)
  g = molecular_system.to_chemist(h2)
  orbsym = system.orbsym or (1,) * n
  lines = [
      f'&FCI NORB={n},NELEC={system.n_electrons},MS2={system.ms2},',
      ' ORBSYM=' + ','.join(str(s) for s in orbsym) + ',',
      f' ISYM={system.isym},',
      '&END',
  ]
  record = '{:23.16e} {:4d} {:4d} {:4d} {:4d}'
  for i in range(n):
    for j in range(i + 1):
      ij = i * (i + 1) // 2 + j
      for k in range(n):
        for l in range(k + 1):
          if k * (k + 1) // 2 + l > ij:
            continue
          if abs(g[i, j, k, l]) > threshold:
            lines.append(record.format(g[i, j, k, l], i + 1, j + 1, k + 1,
                                       l + 1))
  for i in range(n):
    for j in range(i + 1):
      if abs(h1[i, j]) > threshold:
        lines.append(record.format(h1[i, j], i + 1, j + 1, 0, 0))
  for i, e in enumerate(system.mo_energies):
    lines.append(record.format(e, i + 1, 0, 0, 0))
  lines.append(record.format(core_energy, 0, 0, 0, 0))
  return '\n'.join(lines) + '\n'
