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
"""Seeded synthetic systems and test data paths shared by the tests."""

import functools
import os
import unittest
from typing import Optional

import numpy as np

from downfolding.integrals import fcidump
from downfolding.integrals import molecular_system
from downfolding.integrals import orbitals

_TESTDATA_DIR = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'integrals',
    'testdata')

H2_STO3G = 'h2_sto3g.fcidump'


def testdata_path(name: str) -> str:
  return os.path.join(_TESTDATA_DIR, name)


def random_chemist_eri(n: int,
                       rng: np.random.Generator,
                       n_vectors: Optional[int] = None,
                       scale: float = 0.1) -> np.ndarray:
  """Positive semidefinite chemist ERIs with real 8-fold symmetry."""
  n_vectors = n * (n + 1) // 2 if n_vectors is None else n_vectors
  vectors = rng.uniform(-1.0, 1.0, size=(n_vectors, n, n))
  vectors = 0.5 * (vectors + vectors.transpose(0, 2, 1))
  return scale * np.einsum('xpq,xrs->pqrs', vectors, vectors) / n_vectors


def random_system(n_spatial: int,
                  n_electrons: int = 2,
                  seed: int = 0,
                  scale: float = 0.1,
                  gap: float = 0.5,
                  coupling: float = 0.05) -> fcidump.Integrals:
  """A random closed-shell system with gapped, ascending orbital energies.

  Args:
    n_spatial: Number of spatial orbitals.
    n_electrons: Number of electrons.
    seed: Generator seed.
    scale: Magnitude of the two-electron integrals.
    gap: Spacing of the one-electron diagonal above the lowest orbital.
    coupling: Magnitude of the one-electron off-diagonal elements.

  Returns:
    The integrals, with orbital energies from the Fock diagonal.
  """
  rng = np.random.default_rng(seed)
  diagonal = -1.0 + gap * np.arange(n_spatial, dtype=np.float64)
  diagonal[1:] += 1.0
  off = rng.uniform(-coupling, coupling, size=(n_spatial, n_spatial))
  h1 = np.diag(diagonal) + 0.5 * (off + off.T) * (1 - np.eye(n_spatial))
  g = random_chemist_eri(n_spatial, rng, scale=scale)
  h2 = molecular_system.from_chemist(g)
  fock = orbitals.fock_matrix(h1, h2, np.arange(n_electrons // 2))
  system = molecular_system.MolecularSystem(
      n_spatial=n_spatial,
      n_electrons=n_electrons,
      mo_energies=np.diag(fock).copy())
  return fcidump.Integrals(system=system, h1=h1, h2=h2, core_energy=0.0)


def load_h2() -> fcidump.Integrals:
  return fcidump.read_fcidump(testdata_path(H2_STO3G))


# Water at its experimental geometry, in Angstrom.
H2O_GEOMETRY = ('O 0.000000 0.000000 0.117369; '
                'H 0.756950 0.000000 -0.469476; '
                'H -0.756950 0.000000 -0.469476')

try:
  import pyscf  # pylint: disable=g-import-not-at-top,unused-import
  HAS_PYSCF = True
except ImportError:
  HAS_PYSCF = False

requires_pyscf = unittest.skipUnless(HAS_PYSCF,
                                     'PySCF builds the H2O integrals.')


@functools.lru_cache(maxsize=None)
def _h2o_scf():
  from pyscf import gto  # pylint: disable=g-import-not-at-top
  from pyscf import scf  # pylint: disable=g-import-not-at-top
  mol = gto.M(atom=H2O_GEOMETRY, basis='sto-3g', unit='Angstrom', verbose=0)
  mf = scf.RHF(mol)
  mf.conv_tol = 1e-12
  mf.kernel()
  if not mf.converged:
    raise RuntimeError('RHF for the H2O fixture did not converge.')
  return mf


def load_h2o() -> fcidump.Integrals:
  """H2O/STO-3G in its canonical RHF orbitals.

  The integrals are generated with PySCF, which the testing extras install.
  """
  from pyscf import ao2mo  # pylint: disable=g-import-not-at-top
  mf = _h2o_scf()
  c = mf.mo_coeff
  n = c.shape[1]
  h1 = c.T @ mf.get_hcore() @ c
  g = ao2mo.restore(1, ao2mo.kernel(mf.mol, c), n)
  system = molecular_system.MolecularSystem(
      n_spatial=n,
      n_electrons=mf.mol.nelectron,
      mo_energies=np.array(mf.mo_energy))
  return fcidump.Integrals(
      system=system,
      h1=h1,
      h2=molecular_system.from_chemist(g),
      core_energy=float(mf.mol.energy_nuc()))


def h2o_hf_energy() -> float:
  return float(_h2o_scf().e_tot)


@functools.lru_cache(maxsize=None)
def h2o_ccsd_energy() -> float:
  """Total CCSD energy of the H2O fixture, the reference for its tests."""
  from pyscf import cc  # pylint: disable=g-import-not-at-top
  ccsd = cc.CCSD(_h2o_scf())
  ccsd.conv_tol = 1e-10
  ccsd.kernel()
  if not ccsd.converged:
    raise RuntimeError('CCSD for the H2O fixture did not converge.')
  return float(ccsd.e_tot)
