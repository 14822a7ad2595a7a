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
"""Closed-shell residuals as tables of named terms.

The singles table has eleven terms and the doubles table thirteen. Both
follow the spin-summed closed-shell forms of the amplitude equations,
written with physicist integrals h[p, q, r, s] = <pq|rs> and
w[p, q, r, s] = 2 h[p, q, r, s] - h[p, q, s, r]. They are diagnostics and
differ from the spin-orbital residual in known places:

  * singles, one-body Hamiltonian: the difference is exactly T6, so the
    two agree when f[k, N] vanishes for every occupied k;
  * doubles, one-body Hamiltonian without singles or paired amplitudes:
    both blocks agree;
  * doubles, singles only: the table omits the disconnected products
    f[b, N] t_i t_j of the mixed block and f[N, i] t_j + f[N, j] t_i of
    the paired block;
  * doubles, zero amplitudes: the paired block carries the source
    <ij|NN> from both halves, twice the spin-orbital value.

Doubles terms are tensors X[A, B, i, j] over the extended virtual set
(the virtual orbitals followed by the target N). A summand whose free
virtual index sits in the first slot is stored at X[a, N], one with the
free index in the second slot at X[N, b], and one without a free virtual
index is added to every X[N, b]. Terms marked P in the table are passed
through `residuals.permute_pair`. The mixed block is read from X[N, b]
and the paired block from X[N, N].
"""

import collections
import functools
from typing import Dict, Tuple, Union

import numpy as np

from downfolding.rhd import amplitudes
from downfolding.rhd import effective_hamiltonian
from downfolding.rhd import residuals

TERM_NAMES = tuple(f'T{k}' for k in range(1, 12))
DOUBLES_TERM_NAMES = tuple(f'T{k}' for k in range(1, 14))

_Index = Union[int, np.ndarray]


def physicist(h2: np.ndarray) -> np.ndarray:
  """<pq|rs> from operator-ordered integrals h2[a, b, c, d] = <ab|dc>."""
  return h2.transpose(0, 1, 3, 2)


def _block(tensor: np.ndarray, *axes: _Index) -> np.ndarray:
  """Sub-block of `tensor`; integer axes are dropped from the result."""
  out = tensor[np.ix_(*(np.atleast_1d(a) for a in axes))]
  dropped = tuple(k for k, a in enumerate(axes) if np.ndim(a) == 0)
  return np.squeeze(out, axis=dropped) if dropped else out


def _require_virtual_target(space: amplitudes.StepSpace, table: str):
  if not space.target_is_virtual:
    raise ValueError(f'The {table} table needs a virtual target orbital.')


def printed_t1_terms(
    hamiltonian: effective_hamiltonian.EffectiveHamiltonian,
    amps: amplitudes.AmplitudeSet) -> Dict[str, np.ndarray]:
  """Evaluates every term of the closed-shell singles residual.

  Args:
    hamiltonian: Current Hamiltonian with a virtual target.
    amps: Trial amplitudes.

  Returns:
    Ordered mapping T1..T11 to vectors over the occupied orbitals.
  """
  space = hamiltonian.space
  _require_virtual_target(space, 'singles')
  f = hamiltonian.fock
  w = residuals.w2(physicist(hamiltonian.h2))
  n = space.target
  o = space.occupied
  v = space.virtual
  t = amps.t1
  t3 = amps.t3
  t_nd = amps.effective_t2m()  # [d, k, l]: N d <- k l
  t_cn = amps.an_view()  # [c, i, l]: c N <- i l

  f_kn = f[o, n]
  f_oo = f[np.ix_(o, o)]
  f_ov = f[np.ix_(o, v)]
  w_oonn = w[np.ix_(o, o, [n], [n])][:, :, 0, 0]
  w_oonv = w[np.ix_(o, o, [n], v)][:, :, 0, :]
  w_oovn = w[np.ix_(o, o, v, [n])][:, :, :, 0]
  w_oion = w[np.ix_(o, o, o, [n])][:, :, :, 0]
  w_ooov = w[np.ix_(o, o, o, v)]
  w_non = w[np.ix_([n], o, o, [n])][0, :, :, 0]
  w_novn = w[np.ix_([n], o, v, [n])][0, :, :, 0]
  w_nonv = w[np.ix_([n], o, [n], v)][0, :, 0, :]
  w_nonn = w[np.ix_([n], o, [n], [n])][0, :, 0, 0]

  terms = collections.OrderedDict()
  terms['T1'] = f[n, o].copy()
  terms['T2'] = -2.0 * (f_kn @ t) * t
  terms['T3'] = (f[n, n] - np.einsum('kl,kl->', w_oonn, t3) -
                 np.einsum('kld,dkl->', w_oonv, t_nd)) * t
  terms['T4'] = (-f_oo.T @ t -
                 np.einsum('klc,cil,k->i', w_oovn, t_cn, t) -
                 np.einsum('kld,dil,k->i', w_oonv, t_nd, t))
  terms['T5'] = (2.0 * np.einsum('kc,cki->i', f_ov, t_cn) +
                 2.0 * np.einsum('klc,l,cki->i', w_oovn, t, t_cn) -
                 np.einsum('kc,cik->i', f_ov, t_cn) -
                 np.einsum('klc,l,cik->i', w_oovn, t, t_cn))
  terms['T6'] = (f_kn @ t) * t
  terms['T7'] = w_non.T @ t
  terms['T8'] = (np.einsum('kc,cik->i', w_novn, t_cn) +
                 np.einsum('kd,dik->i', w_nonv, t_nd))
  terms['T9'] = (w_nonn @ t) * t
  terms['T10'] = (-np.einsum('kli,kl->i', w_oion, t3) -
                  np.einsum('klic,ckl->i', w_ooov, t_nd))
  terms['T11'] = -np.einsum('kli,k,l->i', w_oion, t, t)
  return terms


def printed_t1_residual(
    hamiltonian: effective_hamiltonian.EffectiveHamiltonian,
    amps: amplitudes.AmplitudeSet) -> np.ndarray:
  return sum(printed_t1_terms(hamiltonian, amps).values())


def _tau(space: amplitudes.StepSpace,
         amps: amplitudes.AmplitudeSet) -> np.ndarray:
  """Doubles over the extended virtual set, indexed [A, B, i, j]."""
  nv = space.n_v
  tau = np.zeros((nv + 1, nv + 1, space.n_o, space.n_o))
  tau[nv, :nv] = amps.effective_t2m()
  tau[:nv, nv] = amps.an_view()
  tau[nv, nv] = amps.t3
  return tau


def _place(tau: np.ndarray,
           a: Union[float, np.ndarray] = 0.0,
           b: Union[float, np.ndarray] = 0.0,
           z: Union[float, np.ndarray] = 0.0,
           ab: Union[float, np.ndarray] = 0.0,
           pair: bool = False) -> np.ndarray:
  x = np.zeros_like(tau)
  x[:, -1] += a
  x[-1, :] += b + z
  x += ab
  return residuals.permute_pair(x) if pair else x


def printed_t2_terms(
    hamiltonian: effective_hamiltonian.EffectiveHamiltonian,
    amps: amplitudes.AmplitudeSet) -> Dict[str, np.ndarray]:
  """Evaluates every term of the closed-shell doubles residual.

  Args:
    hamiltonian: Current Hamiltonian with a virtual target.
    amps: Trial amplitudes.

  Returns:
    Ordered mapping T1..T13 to tensors X[A, B, i, j] over the extended
    virtual set; see the module docstring for the layout.
  """
  space = hamiltonian.space
  _require_virtual_target(space, 'doubles')
  h = physicist(hamiltonian.h2)
  H = functools.partial(_block, h)
  W = functools.partial(_block, residuals.w2(h))
  F = functools.partial(_block, hamiltonian.fock)
  ein = functools.partial(np.einsum, optimize=True)
  n, o, v = space.target, space.occupied, space.virtual
  ve = np.append(v, n)
  nv = space.n_v
  t = amps.t1
  tau = _tau(space, amps)
  t_an = tau[:, nv]  # [e, k, l]: e N <- k l
  t_nb = tau[nv]  # [e, k, l]: N e <- k l
  t_cn = tau[:nv, nv]
  t_nc = tau[nv, :nv]
  p = tau[nv, nv]
  tt = np.outer(t, t)
  place = functools.partial(_place, tau)

  def ladder(amp):
    return (ein('klij,ekl->eij', H(o, o, o, o), amp) +
            ein('kli,j,ekl->eij', H(o, o, o, n), t, amp) +
            ein('klj,i,ekl->eij', H(o, o, n, o), t, amp) +
            ein('klc,cij,ekl->eij', H(o, o, v, n), t_cn, amp) +
            ein('klc,cij,ekl->eij', H(o, o, n, v), t_nc, amp))

  def hole(amp):
    return -(ein('ki,ekj->eij', F(o, o), amp) +
             ein('klc,cil,ekj->eij', W(o, o, v, n), t_cn, amp) +
             ein('kld,dil,ekj->eij', W(o, o, n, v), t_nc, amp) +
             ein('k,i,ekj->eij', F(o, n), t, amp) +
             ein('kli,l,ekj->eij', W(o, o, o, n), t, amp))

  s_nn = ein('kl,kl->', W(o, o, n, n), p)
  s_nd = ein('kld,dkl->', W(o, o, n, v), t_nc)
  s_f = F(o, n) @ t
  s_w = W(n, o, n, n) @ t

  terms = collections.OrderedDict()
  terms['T1'] = place(a=H(o, o, ve, n).transpose(2, 0, 1),
                      b=H(o, o, n, ve).transpose(2, 0, 1))
  terms['T2'] = place(a=ladder(t_an), b=ladder(t_nb))
  terms['T3'] = place(z=ein('klij,k,l->ij', H(o, o, o, o), t, t))
  terms['T4'] = place(
      a=(ein('ec,cij->eij', H(ve, n, v, n), t_cn) +
         ein('ed,dij->eij', H(ve, n, n, v), t_nc) -
         ein('ekc,k,cij->eij', H(ve, o, v, n), t, t_cn) -
         ein('ekd,k,dij->eij', H(ve, o, n, v), t, t_nc)),
      b=(ein('ec,cij->eij', H(n, ve, v, n), t_cn) +
         ein('ed,dij->eij', H(n, ve, n, v), t_nc) -
         ein('kec,k,cij->eij', H(o, ve, v, n), t, t_cn) -
         ein('ked,k,dij->eij', H(o, ve, n, v), t, t_nc)))
  terms['T5'] = place(a=H(ve, n, n, n)[:, None, None] * tt,
                      b=H(n, ve, n, n)[:, None, None] * tt)
  terms['T6'] = place(
      a=(ein('ec,cij->eij', F(ve, v), t_cn) -
         ein('klc,ekl,cij->eij', W(o, o, v, n), t_an, t_cn) +
         ein('ekc,k,cij->eij', W(ve, o, v, n), t, t_cn)),
      b=(F(n, n) - s_nn - s_nd - s_f + s_w) * t_nb,
      z=-(s_nd + s_f) * p,
      pair=True)
  terms['T7'] = place(a=hole(t_an), b=hole(t_nb), pair=True)
  terms['T8'] = place(
      a=ein('ei,j->eij', H(ve, n, o, n), t),
      b=(ein('ei,j->eij', H(n, ve, o, n), t) -
         ein('kei,k,j->eij', H(o, ve, o, n), t, t)),
      pair=True)
  terms['T9'] = place(
      a=-(ein('ekij,k->eij', H(ve, o, o, o), t) +
          ein('eki,j,k->eij', H(ve, o, o, n), t, t)),
      pair=True)
  terms['T10'] = place(
      a=(2.0 * ein('ekic,ckj->eij', H(ve, o, o, v), t_cn) +
         2.0 * ein('ekc,i,ckj->eij', H(ve, o, n, v), t, t_cn) -
         ein('lkc,eil,ckj->eij', H(o, o, n, v), t_nb, t_cn) +
         ein('lkc,eil,ckj->eij', W(o, o, n, v), t_an, t_cn)),
      b=(2.0 * ein('ki,ekj->eij', H(n, o, o, n), t_nb) -
         2.0 * ein('lki,l,ekj->eij', H(o, o, o, n), t, t_nb) +
         2.0 * ein('k,i,ekj->eij', H(n, o, n, n), t, t_nb) -
         ein('lkd,dil,ekj->eij', H(o, o, v, n), t_cn, t_nb) +
         ein('lk,il,ekj->eij', W(o, o, n, n), p, t_nb) +
         ein('lkd,dil,ekj->eij', W(o, o, v, n), t_nc, t_nb)),
      z=(-2.0 * ein('lki,l,kj->ij', H(o, o, o, n), t, p) -
         ein('lkc,il,ckj->ij', H(o, o, n, v), p, t_cn) -
         ein('lkd,dil,kj->ij', H(o, o, v, n), t_cn, p) +
         ein('lkd,dil,kj->ij', W(o, o, v, n), t_nc, p)),
      ab=-ein('lk,ail,bkj->abij', H(o, o, n, n), t_nb, t_nb),
      pair=True)
  terms['T11'] = place(
      a=(-ein('eki,kj->eij', H(ve, o, o, n), p) -
         ein('ekic,ckj->eij', H(ve, o, o, v), t_nc) -
         ein('ek,i,kj->eij', H(ve, o, n, n), t, p) -
         ein('ekc,i,ckj->eij', H(ve, o, n, v), t, t_nc) +
         0.5 * ein('lk,eil,kj->eij', H(o, o, n, n), t_nb, p) +
         0.5 * ein('lkc,eil,ckj->eij', H(o, o, n, v), t_nb, t_nc) -
         0.5 * ein('lk,eil,kj->eij', W(o, o, n, n), t_an, p) -
         0.5 * ein('lkc,eil,ckj->eij', W(o, o, n, v), t_an, t_nc)),
      b=(-ein('ki,ekj->eij', H(n, o, o, n), t_an) +
         ein('lki,l,ekj->eij', H(o, o, o, n), t, t_an) -
         ein('k,i,ekj->eij', H(n, o, n, n), t, t_an) +
         0.5 * ein('lkd,dil,ekj->eij', H(o, o, v, n), t_cn, t_an) -
         0.5 * ein('lk,il,ekj->eij', W(o, o, n, n), p, t_an) -
         0.5 * ein('lkd,dil,ekj->eij', W(o, o, v, n), t_nc, t_an)),
      z=(ein('lki,l,kj->ij', H(o, o, o, n), t, p) +
         0.5 * ein('lkd,dil,kj->ij', H(o, o, v, n), t_cn, p) +
         0.5 * ein('lkc,il,ckj->ij', H(o, o, n, v), p, t_nc) -
         0.5 * ein('lkd,dil,kj->ij', W(o, o, v, n), t_nc, p)),
      pair=True)
  terms['T12'] = place(
      a=(-ein('ki,ekj->eij', H(n, o, n, o), t_an) +
         ein('lki,l,ekj->eij', H(o, o, n, o), t, t_an) -
         ein('k,i,ekj->eij', H(n, o, n, n), t, t_an) +
         0.5 * ein('lkd,dil,ekj->eij', H(o, o, n, v), t_cn, t_an)),
      b=(-ein('eki,kj->eij', H(ve, o, n, o), p) -
         ein('ekci,ckj->eij', H(ve, o, v, o), t_nc) -
         ein('ek,i,kj->eij', H(ve, o, n, n), t, p) -
         ein('ekc,i,ckj->eij', H(ve, o, v, n), t, t_nc) +
         0.5 * ein('lk,eil,kj->eij', H(o, o, n, n), t_nb, p) +
         0.5 * ein('lkc,eil,ckj->eij', H(o, o, v, n), t_nb, t_nc)),
      z=0.5 * ein('lkc,il,ckj->ij', H(o, o, v, n), p, t_nc),
      pair=True)
  terms['T13'] = place(
      a=(-ein('ekci,ckj->eij', H(ve, o, v, o), t_cn) -
         ein('ekc,i,ckj->eij', H(ve, o, v, n), t, t_cn) +
         0.5 * ein('lkc,eil,ckj->eij', H(o, o, v, n), t_nb, t_cn)),
      b=(-ein('ki,ekj->eij', H(n, o, n, o), t_nb) +
         ein('lki,l,ekj->eij', H(o, o, n, o), t, t_nb) -
         ein('k,i,ekj->eij', H(n, o, n, n), t, t_nb) +
         0.5 * ein('lkd,dil,ekj->eij', H(o, o, n, v), t_cn, t_nb)),
      z=(ein('lki,l,kj->ij', H(o, o, n, o), t, p) +
         0.5 * ein('lkc,il,ckj->ij', H(o, o, v, n), p, t_cn) +
         0.5 * ein('lkd,dil,kj->ij', H(o, o, n, v), t_cn, p)),
      pair=True)
  return terms


def printed_t2_residual(
    hamiltonian: effective_hamiltonian.EffectiveHamiltonian,
    amps: amplitudes.AmplitudeSet) -> Tuple[np.ndarray, np.ndarray]:
  """Sums the doubles table into (mixed [b, i, j], paired [i, j]) blocks."""
  total = sum(printed_t2_terms(hamiltonian, amps).values())
  return total[-1, :-1], total[-1, -1]
