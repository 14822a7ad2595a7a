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
"""Spin-orbital form of the downfolding amplitude equations.

Spin orbital 2p + s carries spatial orbital p and spin s (0 up, 1 down).
With |Phi> the closed-shell reference and T the excitations of one step,

  (1 + eta)|Phi> = (1 + T)|Phi>,

and projecting Q (1 - eta) H (1 + eta) P |Phi> onto singles and doubles
gives

  R1 = f_vo + L1 - T1 E_T,
  R2 = <ab||ij> + L2 - T2 E_T + P(ab) P(ij) T1[a,i] Z[b,j],

where L1 and L2 are the terms of H_N T linear in T, E_T = <Phi|H_N T|Phi>,
and Z[b,j] = f[b,j] for b in {N up, N dn} and -L1[b,j] otherwise. The last
term collects the disconnected f T1 products and the single excitations
that eta lifts out of the primary space.

The two-body tensor w[p,q,r,s] = <pq||rs> multiplies p+ q+ s r, so creators
are always the leading indices, which keeps the equations valid for the
non-Hermitian tensors produced by earlier steps.
"""

from typing import Tuple

import numpy as np
import opt_einsum as oe

from downfolding.integrals import molecular_system
from downfolding.rhd import amplitudes


def spin_orbital_integrals(h1: np.ndarray,
                           h2: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
  """Returns (h1_so, w) over 2n spin orbitals.

  Args:
    h1: One-body tensor.
    h2: Two-body tensor in operator ordering.

  Returns:
    The spin-orbital one-body tensor and the antisymmetrized two-body
    tensor w[p,q,r,s] = <pq|rs> - <pq|sr>.
  """
  n = h1.shape[0]
  spin = np.eye(2)
  h1_so = np.kron(h1, spin)
  g = molecular_system.to_chemist(h2)
  g_so = oe.contract('pqrs,ab,cd->paqbrcsd', g, spin,
                     spin).reshape((2 * n,) * 4)
  phys = g_so.transpose(0, 2, 1, 3)
  return h1_so, phys - phys.transpose(0, 1, 3, 2)


def spin_orbital_fock(h1_so: np.ndarray, w: np.ndarray,
                      n_occupied_so: int) -> np.ndarray:
  o = slice(0, n_occupied_so)
  return h1_so + np.einsum('pkqk->pq', w[:, o, :, o])


def _add_pair(t2: np.ndarray, a, b, i, j, value: np.ndarray) -> None:
  """Adds value * a+ b+ j i to the antisymmetric tensor t2[a,b,i,j]."""
  t2[a, b, i, j] += value
  t2[b, a, i, j] -= value
  t2[a, b, j, i] -= value
  t2[b, a, j, i] += value


def to_spin_orbital(
    amps: amplitudes.AmplitudeSet,
    space: amplitudes.StepSpace) -> Tuple[np.ndarray, np.ndarray]:
  """Spin-orbital T1[a,i] and antisymmetric T2[a,b,i,j] over (virt, occ).

  Virtual spin orbitals are numbered from the first virtual orbital, so the
  target sits at 2 n_v (up) and 2 n_v + 1 (down).
  """
  n_o, n_v = space.n_o, space.n_v
  nv_so, no_so = 2 * (n_v + 1), 2 * n_o
  t1 = np.zeros((nv_so, no_so))
  t2 = np.zeros((nv_so, nv_so, no_so, no_so))
  target = 2 * n_v
  occ = np.arange(n_o)
  vir = np.arange(n_v)
  for s in range(2):
    t1[target + s, 2 * occ + s] = amps.t1
  t2m = amps.effective_t2m()
  for s in range(2):
    for sp in range(2):
      _add_pair(t2, target + s, (2 * vir + sp)[:, None, None],
                (2 * occ + s)[None, :, None], (2 * occ + sp)[None, None, :],
                t2m)
  _add_pair(t2, target, target + 1, (2 * occ)[:, None],
            (2 * occ + 1)[None, :], amps.t3)
  return t1, t2


def _swap_ab(x):
  return x.transpose(1, 0, 2, 3)


def _swap_ij(x):
  return x.transpose(0, 1, 3, 2)


def spin_orbital_residuals(
    h1: np.ndarray, h2: np.ndarray, amps: amplitudes.AmplitudeSet,
    space: amplitudes.StepSpace) -> Tuple[np.ndarray, np.ndarray, float]:
  """Evaluates R1[a,i], R2[a,b,i,j] and E_T for a virtual target.

  Args:
    h1: One-body tensor of the step.
    h2: Two-body tensor of the step, operator ordering.
    amps: Step amplitudes.
    space: Orbital partition; the target must be virtual.

  Returns:
    The full spin-orbital residual blocks and the energy E_T.
  """
  if not space.target_is_virtual:
    raise ValueError('Amplitude equations need a virtual target orbital.')
  h1_so, w = spin_orbital_integrals(h1, h2)
  no_so = 2 * space.n_o
  f = spin_orbital_fock(h1_so, w, no_so)
  o = slice(0, no_so)
  v = slice(no_so, f.shape[0])
  t1, t2 = to_spin_orbital(amps, space)

  f_oo, f_ov, f_vo, f_vv = f[o, o], f[o, v], f[v, o], f[v, v]
  l1 = (f_vv @ t1 - t1 @ f_oo +
        oe.contract('akic,ck->ai', w[v, o, o, v], t1) +
        oe.contract('kc,acik->ai', f_ov, t2) +
        0.5 * oe.contract('akcd,cdik->ai', w[v, o, v, v], t2) -
        0.5 * oe.contract('klic,ackl->ai', w[o, o, o, v], t2))

  x = oe.contract('bc,acij->abij', f_vv, t2)
  l2 = x - _swap_ab(x)
  x = oe.contract('kj,abik->abij', f_oo, t2)
  l2 -= x - _swap_ij(x)
  l2 += 0.5 * oe.contract('klij,abkl->abij', w[o, o, o, o], t2)
  l2 += 0.5 * oe.contract('abcd,cdij->abij', w[v, v, v, v], t2)
  x = oe.contract('kbcj,acik->abij', w[o, v, v, o], t2)
  x = x - _swap_ij(x)
  l2 += x - _swap_ab(x)
  x = oe.contract('abcj,ci->abij', w[v, v, v, o], t1)
  l2 += x - _swap_ij(x)
  x = oe.contract('kbij,ak->abij', w[o, v, o, o], t1)
  l2 -= x - _swap_ab(x)

  e_t = float(
      np.einsum('ia,ai->', f_ov, t1) +
      0.25 * oe.contract('ijab,abij->', w[o, o, v, v], t2))

  target = 2 * space.n_v
  z = -l1
  z[target:target + 2] = f_vo[target:target + 2]
  x = oe.contract('ai,bj->abij', t1, z)
  x = x - _swap_ij(x)
  r1 = f_vo + l1 - t1 * e_t
  r2 = w[v, v, o, o] + l2 - t2 * e_t + x - _swap_ab(x)
  return r1, r2, e_t


def extract_residuals(
    r1: np.ndarray, r2: np.ndarray,
    space: amplitudes.StepSpace) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
  """Reads r1[i], r2[b,i,j] and r2p[i,j] off the spin-orbital blocks."""
  target = 2 * space.n_v
  r1_i = r1[target, 0::2].copy()
  r2_bij = r2[target, 1:target:2][:, 0::2][:, :, 1::2].copy()
  r2p_ij = r2[target, target + 1, 0::2, 1::2].copy()
  return r1_i, r2_bij, r2p_ij
