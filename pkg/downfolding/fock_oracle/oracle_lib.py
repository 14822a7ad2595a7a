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
"""Dense Fock-space checks of the downfolding transformations.

Every operator here is a FockSpaceOperator over the last orbital of the
system as the target N. The primary space of a virtual step holds the
determinants with N empty, P = (1 - n_{N up})(1 - n_{N dn}); an occupied
step keeps N doubly occupied instead.
"""

import dataclasses
import enum
import itertools
from typing import List, Optional, Sequence, Tuple, Union

from absl import logging
import numpy as np
import scipy.sparse
from sortedcontainers import SortedList

from downfolding.fock_oracle import fock_space
from downfolding.fock_oracle import normal_order
from downfolding.rhd import amplitudes
from downfolding.rhd import effective_hamiltonian
from downfolding.rhd import spin_orbital

UP, DOWN = fock_space.UP, fock_space.DOWN

Operator = fock_space.FockSpaceOperator


class BlochThresholdError(ValueError):
  """The Bloch residual is too large for the spectrum to be meaningful."""


@enum.unique
class UnitaryForm(enum.Enum):
  """COLLECTIVE rotates all generators at once; PRODUCT chains them."""
  COLLECTIVE = 'collective'
  PRODUCT = 'product'


def _operator(matrix, n_spatial: int) -> Operator:
  if scipy.sparse.issparse(matrix):
    matrix = matrix.toarray()
  return Operator(matrix=np.asarray(matrix, dtype=np.float64),
                  n_spatial=n_spatial)


def _identity(n_spatial: int) -> np.ndarray:
  return np.eye(4**n_spatial)


def projectors(n_spatial: int,
               occupied: bool = False) -> Tuple[Operator, Operator]:
  """Returns (P, Q) for decoupling the last orbital.

  Args:
    n_spatial: Number of spatial orbitals.
    occupied: Whether the target is occupied in the reference.

  Returns:
    The primary projector and its complement.
  """
  space = fock_space.FockSpace(n_spatial)
  target = n_spatial - 1
  up = space.number(fock_space.mode(target, UP))
  down = space.number(fock_space.mode(target, DOWN))
  if occupied:
    primary = up @ down
  else:
    identity = space.identity()
    primary = (identity - up) @ (identity - down)
  primary = _operator(primary, n_spatial)
  secondary = _operator(_identity(n_spatial) - primary.matrix, n_spatial)
  return primary, secondary


def _spin_orbital_modes(space: amplitudes.StepSpace) -> Tuple[np.ndarray,
                                                              np.ndarray]:
  """Fock modes of the occupied and virtual spin-orbital blocks."""
  occ = np.arange(2 * space.n_o)
  vir = 2 * space.n_o + np.arange(2 * (space.n_v + 1))
  return occ, vir


def excitation_strings(
    amps: amplitudes.AmplitudeSet, space: amplitudes.StepSpace
) -> List[Tuple[float, Tuple[fock_space.LadderOp, ...]]]:
  """Nonzero excitations of the step as (amplitude, ladder string) pairs.

  Singles a+_A a_I and doubles a+_A a+_B a_J a_I (A < B, I < J) over the
  spin orbitals, with A or B the target.
  """
  if not space.target_is_virtual:
    raise ValueError('Excitation generators need a virtual target orbital.')
  t1, t2 = spin_orbital.to_spin_orbital(amps, space)
  occ, vir = _spin_orbital_modes(space)
  strings = []
  for a, i in zip(*np.nonzero(t1)):
    strings.append((float(t1[a, i]), ((True, int(vir[a])),
                                      (False, int(occ[i])))))
  for a, b, i, j in zip(*np.nonzero(t2)):
    if a < b and i < j:
      strings.append((float(t2[a, b, i, j]),
                      ((True, int(vir[a])), (True, int(vir[b])),
                       (False, int(occ[j])), (False, int(occ[i])))))
  return strings


def eta_components(amps: amplitudes.AmplitudeSet,
                   space: amplitudes.StepSpace) -> List[Operator]:
  """One generator t (a+ ... a) P per excitation of the step."""
  fock = fock_space.FockSpace(space.n_orbitals)
  primary, _ = projectors(space.n_orbitals)
  return [
      _operator(value * (fock.string(ops) @ primary.matrix),
                space.n_orbitals)
      for value, ops in excitation_strings(amps, space)
  ]


def build_eta(amps: amplitudes.AmplitudeSet,
              space: amplitudes.StepSpace) -> Operator:
  """eta = T P for the singles and doubles that populate the target.

  Args:
    amps: Step amplitudes.
    space: Orbital partition; the target must be virtual.

  Returns:
    The generator. It maps the primary space into the secondary one, so
    eta squared vanishes.
  """
  eta = np.zeros((4**space.n_orbitals,) * 2)
  for component in eta_components(amps, space):
    eta += component.matrix
  return _operator(eta, space.n_orbitals)


def to_fock(operator: normal_order.NormalOrderedOperator,
            n_spatial: int) -> Operator:
  """Dense matrix of a normal-ordered operator."""
  fock = fock_space.FockSpace(n_spatial)
  matrix = scipy.sparse.csr_matrix((fock.dim, fock.dim))
  for key, value in operator.terms.items():
    matrix = matrix + value * fock.string(normal_order.key_ops(key))
  return _operator(matrix, n_spatial)


def build_similarity(eta: Operator) -> Tuple[Operator, Operator]:
  """S = 1 + eta and its inverse 1 - eta."""
  identity = _identity(eta.n_spatial)
  return (_operator(identity + eta.matrix, eta.n_spatial),
          _operator(identity - eta.matrix, eta.n_spatial))


def transformed_hamiltonian(hamiltonian: Operator, eta: Operator) -> Operator:
  s, s_inv = build_similarity(eta)
  return _operator(s_inv.matrix @ hamiltonian.matrix @ s.matrix,
                   hamiltonian.n_spatial)


def bloch_operator(hamiltonian: Operator, eta: Operator) -> Operator:
  """Q S^-1 H S P for a virtual target."""
  primary, secondary = projectors(hamiltonian.n_spatial)
  transformed = transformed_hamiltonian(hamiltonian, eta)
  return _operator(secondary.matrix @ transformed.matrix @ primary.matrix,
                   hamiltonian.n_spatial)


def bloch_residual_norm(hamiltonian: Operator,
                        eta: Operator,
                        columns: Optional[Sequence[int]] = None) -> float:
  """Frobenius norm of Q S^-1 H S P.

  Args:
    hamiltonian: Hamiltonian of the step.
    eta: Generator of the step.
    columns: Primary basis states to restrict to, for example the reference
      determinant or one particle-number sector. Defaults to all states.

  Returns:
    The norm of the block that the transformation should remove.
  """
  bloch = bloch_operator(hamiltonian, eta).matrix
  if columns is not None:
    bloch = bloch[:, np.asarray(columns, dtype=np.int64)]
  return float(np.linalg.norm(bloch))


def residual_projections(
    hamiltonian: effective_hamiltonian.EffectiveHamiltonian,
    amps: amplitudes.AmplitudeSet) -> amplitudes.ResidualSet:
  """Residuals read off <x| Q S^-1 H S P |Phi> in Fock space.

  The excited determinants are a+_{N up} a_{i up}|Phi>,
  a+_{N up} a+_{b dn} a_{j dn} a_{i up}|Phi> and
  a+_{N up} a+_{N dn} a_{j dn} a_{i up}|Phi>.

  Args:
    hamiltonian: Hamiltonian of the step; its last orbital is the target.
    amps: Trial amplitudes.

  Returns:
    Residuals shaped like `amps`.
  """
  space = hamiltonian.space
  n = space.n_orbitals
  fock_h = fock_space.build_hamiltonian(hamiltonian.h1, hamiltonian.h2)
  bloch = bloch_operator(fock_h, build_eta(amps, space)).matrix
  reference = fock_space.reference_bits(space.n_o)
  column = bloch[:, reference]
  nu, nd = fock_space.mode(n - 1, UP), fock_space.mode(n - 1, DOWN)

  def project(ops):
    image = fock_space.apply_string(ops, reference)
    if image is None:
      return 0.0
    sign, bits = image
    return sign * column[bits]

  occ = range(space.n_o)
  r1 = np.array(
      [project(((True, nu), (False, fock_space.mode(i, UP)))) for i in occ])
  r2 = np.zeros((space.n_v, space.n_o, space.n_o))
  for b, orbital in enumerate(space.virtual):
    for i in occ:
      for j in occ:
        r2[b, i, j] = project(
            ((True, nu), (True, fock_space.mode(int(orbital), DOWN)),
             (False, fock_space.mode(j, DOWN)),
             (False, fock_space.mode(i, UP))))
  r2p = np.zeros((space.n_o, space.n_o))
  for i in occ:
    for j in occ:
      r2p[i, j] = project(((True, nu), (True, nd),
                           (False, fock_space.mode(j, DOWN)),
                           (False, fock_space.mode(i, UP))))
  r2_an = None
  if amps.interpretation is amplitudes.T2Interpretation.INDEPENDENT:
    r2_an = r2.transpose(0, 2, 1).copy()
  return amplitudes.ResidualSet(r1=r1, r2=r2, r2p=r2p, r2_an=r2_an)


@dataclasses.dataclass
class SpectrumReport:
  """Eigenvalues of the primary block of S^-1 H S against those of H.

  Attributes:
    matched: (primary eigenvalue, eigenvalue of H) pairs.
    unmatched: Primary eigenvalues with no partner within tolerance.
    bloch_norm: Bloch residual over the primary states that were checked.
  """
  matched: List[Tuple[float, float]]
  unmatched: List[float]
  bloch_norm: float

  @property
  def is_subset(self) -> bool:
    return not self.unmatched


def match_eigenvalues(values: Sequence[float], reference: Sequence[float],
                      atol: float) -> Tuple[List[Tuple[float, float]],
                                            List[float]]:
  """Greedy nearest-neighbour matching; each reference value is used once."""
  pool = SortedList(reference)
  matched, unmatched = [], []
  for value in sorted(values):
    k = pool.bisect_left(value)
    candidates = [pool[j] for j in (k - 1, k) if 0 <= j < len(pool)]
    if not candidates:
      unmatched.append(value)
      continue
    partner = min(candidates, key=lambda x: abs(x - value))
    if abs(partner - value) <= atol:
      matched.append((value, partner))
      pool.remove(partner)
    else:
      unmatched.append(value)
  return matched, unmatched


def spectrum_check(hamiltonian: Operator,
                   eta: Operator,
                   n_electrons: Optional[int] = None,
                   sz2: Optional[int] = 0,
                   atol: float = 1e-8,
                   bloch_threshold: float = 1e-8,
                   enforce: bool = True) -> SpectrumReport:
  """Checks that the primary block of S^-1 H S keeps eigenvalues of H.

  Args:
    hamiltonian: Hamiltonian of the step.
    eta: Generator of the step.
    n_electrons: Restricts both spectra to this particle number.
    sz2: Twice S_z of the sector, when n_electrons is given.
    atol: Matching tolerance.
    bloch_threshold: Largest Bloch residual for which the check means
      anything.
    enforce: Raise instead of reporting when the threshold is missed.

  Returns:
    The report.

  Raises:
    BlochThresholdError: The Bloch residual exceeds the threshold and
      `enforce` is set.
  """
  n = hamiltonian.n_spatial
  fock = fock_space.FockSpace(n)
  primary, _ = projectors(n)
  if n_electrons is None:
    sector = np.arange(fock.dim)
  else:
    sector = fock.sector(n_electrons, sz2)
  states = sector[np.diag(primary.matrix)[sector] > 0.5]
  bloch_norm = bloch_residual_norm(hamiltonian, eta, columns=states)
  if bloch_norm > bloch_threshold:
    if enforce:
      raise BlochThresholdError(
          f'Bloch residual {bloch_norm:.3e} exceeds {bloch_threshold:.3e}.')
    logging.warning('Bloch residual %.3e exceeds %.3e; checking anyway.',
                    bloch_norm, bloch_threshold)
  block = transformed_hamiltonian(hamiltonian, eta).matrix[np.ix_(
      states, states)]
  values = np.linalg.eigvals(block).real
  reference = np.linalg.eigvalsh(fock_space.sector_block(hamiltonian, sector))
  matched, unmatched = match_eigenvalues(values.tolist(), reference.tolist(),
                                         atol)
  logging.info('Spectrum check: %d of %d primary eigenvalues matched.',
               len(matched), len(values))
  return SpectrumReport(matched=matched, unmatched=unmatched,
                        bloch_norm=bloch_norm)


def _collective_unitary(eta: np.ndarray) -> np.ndarray:
  """(1 + eta - eta^T)(1 + eta^T eta + eta eta^T)^(-1/2)."""
  identity = np.eye(eta.shape[0])
  overlap = eta.T @ eta + eta @ eta.T
  values, vectors = np.linalg.eigh(identity + overlap)
  inv_sqrt = (vectors / np.sqrt(values)) @ vectors.T
  return (identity + eta - eta.T) @ inv_sqrt


def build_unitary(
    generators: Union[Operator, Sequence[Operator]],
    form: UnitaryForm = UnitaryForm.COLLECTIVE) -> Operator:
  """Unitary counterpart of the similarity transformation.

  Args:
    generators: One generator, or the per-excitation pieces of one.
    form: COLLECTIVE rotates the sum of the generators; PRODUCT multiplies
      the rotations of the pieces, first piece leftmost.

  Returns:
    U with U P spanning the same primary image as S P.
  """
  if isinstance(generators, Operator):
    generators = [generators]
  if not generators:
    raise ValueError('Need at least one generator.')
  n = generators[0].n_spatial
  if form is UnitaryForm.COLLECTIVE:
    eta = sum(g.matrix for g in generators)
    return _operator(_collective_unitary(eta), n)
  unitary = _identity(n)
  for g in generators:
    unitary = unitary @ _collective_unitary(g.matrix)
  return _operator(unitary, n)


def _sz2(modes: Sequence[int]) -> int:
  return sum(1 if k % 2 == UP else -1 for k in modes)


def normal_ordered_coefficients(
    operator: Operator,
    max_rank: int = 3) -> normal_order.NormalOrderedOperator:
  """Normal-ordered strings of an operator that create into the last orbital.

  Only strings that create at least one target electron and annihilate
  none are recovered, by peeling lower ranks off the matrix elements
  <C| X |A> between determinants, rank by rank.

  Args:
    operator: X, with every string carrying a target creator.
    max_rank: Highest string rank to recover.

  Returns:
    The recovered strings.
  """
  n = operator.n_spatial
  fock = fock_space.FockSpace(n)
  target = {fock_space.mode(n - 1, UP), fock_space.mode(n - 1, DOWN)}
  others = [k for k in range(fock.n_modes) if k not in target]
  found = normal_order.NormalOrderedOperator()
  for rank in range(1, max_rank + 1):
    current = {}
    for creators in itertools.combinations(range(fock.n_modes), rank):
      if not target.intersection(creators):
        continue
      for annihilators in itertools.combinations(others, rank):
        if _sz2(creators) != _sz2(annihilators):
          continue
        source = fock_space.determinant(annihilators)
        dest = fock_space.determinant(creators)
        value = operator.matrix[dest, source]
        for key, coefficient in found.terms.items():
          image = fock_space.apply_string(normal_order.key_ops(key), source)
          if image is not None and image[1] == dest:
            value -= coefficient * image[0]
        key = (creators, annihilators)
        sign, _ = fock_space.apply_string(normal_order.key_ops(key), source)
        if abs(value) > normal_order.PRUNE_ATOL:
          current[key] = sign * value
    found = found + normal_order.NormalOrderedOperator(current)
  return found
