"""Exact linear algebra over cycle spaces and the small/thin classifiers."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exceptions import DimensionMismatchError, ThresholdOrderError
from .vass import Vass, Vector, add_vectors, path_effect, scc_decompose, sub_vectors

RationalRow = Tuple[Fraction, ...]


@dataclass(frozen=True)
class RationalMatrix:
  """Rows of exact rationals with a fixed column count."""

  rows: Tuple[RationalRow, ...]
  columns: int

  def __post_init__(self) -> None:
    rows = tuple(tuple(Fraction(value) for value in row) for row in self.rows)
    for row in rows:
      if len(row) != self.columns:
        raise DimensionMismatchError(self.columns, len(row), context='row length')
    object.__setattr__(self, 'rows', rows)

  @classmethod
  def from_rows(
    cls, rows: Sequence[Sequence[object]], columns: Optional[int] = None
  ) -> 'RationalMatrix':
    if columns is None:
      columns = len(rows[0]) if rows else 0
    return cls(tuple(tuple(Fraction(value) for value in row) for row in rows), columns)

  def column(self, index: int) -> RationalRow:
    return tuple(row[index] for row in self.rows)

  def __len__(self) -> int:
    return len(self.rows)


def rref(matrix: RationalMatrix) -> Tuple[RationalMatrix, Tuple[int, ...]]:
  """Gauss-Jordan elimination with leftmost pivots; zero rows are dropped."""
  rows: List[List[Fraction]] = [list(row) for row in matrix.rows]
  pivots: List[int] = []
  rank = 0
  for column in range(matrix.columns):
    pivot = next((r for r in range(rank, len(rows)) if rows[r][column] != 0), None)
    if pivot is None:
      continue
    rows[rank], rows[pivot] = rows[pivot], rows[rank]
    lead = rows[rank][column]
    rows[rank] = [value / lead for value in rows[rank]]
    for r in range(len(rows)):
      if r != rank and rows[r][column] != 0:
        factor = rows[r][column]
        rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
    pivots.append(column)
    rank += 1
  reduced = RationalMatrix(tuple(tuple(row) for row in rows[:rank]), matrix.columns)
  return reduced, tuple(pivots)


def rank_of(rows: Sequence[Sequence[object]], columns: int) -> int:
  if not rows:
    return 0
  reduced, _ = rref(RationalMatrix.from_rows(rows, columns))
  return len(reduced)


@dataclass(frozen=True)
class CleanBasis:
  """Basis rows whose columns at ``distinguished`` form the identity."""

  rows: Tuple[RationalRow, ...]
  distinguished: Tuple[int, ...]
  dim: int

  @property
  def rank(self) -> int:
    return len(self.rows)

  def is_clean(self) -> bool:
    if len(self.distinguished) != len(self.rows):
      return False
    for r, row in enumerate(self.rows):
      for s, coordinate in enumerate(self.distinguished):
        if row[coordinate] != (1 if r == s else 0):
          return False
    return True

  def column(self, index: int) -> RationalRow:
    return tuple(row[index] for row in self.rows)

  def combine(self, coefficients: Sequence[object]) -> RationalRow:
    """The vector ``Σ coefficients[r] · rows[r]``."""
    total = [Fraction(0)] * self.dim
    for coefficient, row in zip(coefficients, self.rows):
      for i, value in enumerate(row):
        total[i] += Fraction(coefficient) * value
    return tuple(total)


def clean_basis(generators: Sequence[Sequence[object]], dim: int) -> CleanBasis:
  """Canonical clean basis of the span: the rref rows with pivots as ``K``."""
  for generator in generators:
    if len(generator) != dim:
      raise DimensionMismatchError(dim, len(generator), context='generator arity')
  if not generators:
    return CleanBasis((), (), dim)
  reduced, pivots = rref(RationalMatrix.from_rows(generators, dim))
  basis = CleanBasis(reduced.rows, pivots, dim)
  assert basis.is_clean()
  return basis


def rebase(basis: CleanBasis, distinguished: Sequence[int]) -> CleanBasis:
  """Change of basis so the columns at ``distinguished`` form the identity."""
  chosen = tuple(sorted(distinguished))
  rest = [i for i in range(basis.dim) if i not in chosen]
  order = list(chosen) + rest
  permuted = RationalMatrix(
    tuple(tuple(row[i] for i in order) for row in basis.rows), basis.dim
  )
  reduced, pivots = rref(permuted)
  if pivots != tuple(range(len(chosen))) or len(chosen) != basis.rank:
    raise ValueError(f'columns {list(chosen)} are not a distinguished set')
  rows: List[RationalRow] = []
  for row in reduced.rows:
    unpermuted = [Fraction(0)] * basis.dim
    for position, coordinate in enumerate(order):
      unpermuted[coordinate] = row[position]
    rows.append(tuple(unpermuted))
  rebased = CleanBasis(tuple(rows), chosen, basis.dim)
  assert rebased.is_clean()
  return rebased


@dataclass(frozen=True)
class CycleCertificate:
  """Two cycles through the SCC base whose effects differ by ``generator``."""

  transition: int
  with_edge: Tuple[int, ...]
  without_edge: Tuple[int, ...]
  generator: Vector


@dataclass(frozen=True)
class ComponentCycles:
  states: Tuple[str, ...]
  base: str
  generators: Tuple[Vector, ...]
  certificates: Tuple[CycleCertificate, ...]
  rank: int


@dataclass(frozen=True)
class CycleSpace:
  """Span of cycle effects, per SCC and globally."""

  dim: int
  components: Tuple[ComponentCycles, ...]
  generators: Tuple[Vector, ...]
  basis: CleanBasis

  @property
  def rank(self) -> int:
    return self.basis.rank

  @property
  def scc_ranks(self) -> Tuple[int, ...]:
    return tuple(component.rank for component in self.components)

  @property
  def scc_rank(self) -> int:
    return max(self.scc_ranks, default=0)

  @classmethod
  def spanned_by(cls, generators: Sequence[Sequence[int]], dim: int) -> 'CycleSpace':
    """A space given directly by generators, as a single pseudo-component."""
    vectors = tuple(tuple(int(value) for value in g) for g in generators)
    basis = clean_basis(vectors, dim)
    component = ComponentCycles((), '', vectors, (), basis.rank)
    return cls(dim, (component,), vectors, basis)


def _tree_paths(
  vass: Vass, base: str, internal: Sequence[int], forward: bool
) -> Dict[str, Tuple[int, ...]]:
  # forward: base -> p; backward: p -> base
  edges: Dict[str, List[int]] = {}
  for index in sorted(internal):
    transition = vass.transitions[index]
    key = transition.source if forward else transition.target
    edges.setdefault(key, []).append(index)

  paths: Dict[str, Tuple[int, ...]] = {base: ()}
  queue = deque([base])
  while queue:
    state = queue.popleft()
    for index in edges.get(state, []):
      transition = vass.transitions[index]
      neighbour = transition.target if forward else transition.source
      if neighbour in paths:
        continue
      if forward:
        paths[neighbour] = paths[state] + (index,)
      else:
        paths[neighbour] = (index,) + paths[state]
      queue.append(neighbour)
  return paths


def cycle_space(vass: Vass) -> CycleSpace:
  """Generators of every SCC's cycle space from BFS tree-path differences."""
  decomposition = scc_decompose(vass)
  components: List[ComponentCycles] = []
  all_generators: List[Vector] = []

  for states, internal in zip(decomposition.components, decomposition.internal):
    base = states[0]
    to_state = _tree_paths(vass, base, internal, forward=True)
    to_base = _tree_paths(vass, base, internal, forward=False)
    offsets = {state: path_effect(vass, path) for state, path in to_state.items()}

    generators: List[Vector] = []
    certificates: List[CycleCertificate] = []
    for index in internal:
      transition = vass.transitions[index]
      generator = sub_vectors(
        add_vectors(offsets[transition.source], transition.effect),
        offsets[transition.target],
      )
      if not any(generator):
        continue
      generators.append(generator)
      certificates.append(
        CycleCertificate(
          transition=index,
          with_edge=to_state[transition.source] + (index,) + to_base[transition.target],
          without_edge=to_state[transition.target] + to_base[transition.target],
          generator=generator,
        )
      )
    components.append(
      ComponentCycles(
        states=states,
        base=base,
        generators=tuple(generators),
        certificates=tuple(certificates),
        rank=rank_of(generators, vass.dim),
      )
    )
    all_generators.extend(generators)

  return CycleSpace(
    dim=vass.dim,
    components=tuple(components),
    generators=tuple(all_generators),
    basis=clean_basis(all_generators, vass.dim),
  )


def geometric_dimension(vass: Vass) -> int:
  return cycle_space(vass).rank


def scc_dimension(vass: Vass) -> int:
  return cycle_space(vass).scc_rank


def _check_vector(space: CycleSpace, vector: Sequence[int]) -> None:
  if len(vector) != space.dim:
    raise DimensionMismatchError(space.dim, len(vector), context='vector arity')


def _independent(basis: CleanBasis, coordinates: Sequence[int]) -> bool:
  columns = [basis.column(i) for i in coordinates]
  return rank_of(columns, basis.rank) == len(columns)


def greedy_distinguished(
  space: CycleSpace, vector: Sequence[int]
) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
  """Pick the distinguished set with the smallest sorted value profile.

  Coordinates are tried in order of ``(vector[i], i)`` and kept while the
  chosen basis columns stay independent.

  Returns:
    The chosen coordinates (ascending) and their values sorted ascending.
  """
  _check_vector(space, vector)
  basis = space.basis
  chosen: List[int] = []
  for coordinate in sorted(range(space.dim), key=lambda i: (vector[i], i)):
    if len(chosen) == basis.rank:
      break
    if _independent(basis, chosen + [coordinate]):
      chosen.append(coordinate)
  profile = tuple(sorted(vector[i] for i in chosen))
  return tuple(sorted(chosen)), profile


def distinguished_sets(space: CycleSpace) -> List[Tuple[int, ...]]:
  """Every coordinate set whose basis columns are invertible."""
  basis = space.basis
  return [
    combination
    for combination in itertools.combinations(range(space.dim), basis.rank)
    if _independent(basis, combination)
  ]


class Verdict(str, Enum):
  SMALL = 'small'
  LARGE = 'large'
  THIN = 'thin'
  THICK = 'thick'


@dataclass(frozen=True)
class Classification:
  verdict: Verdict
  basis: Optional[CleanBasis]
  distinguished: Tuple[int, ...]
  profile: Tuple[int, ...]

  @property
  def holds(self) -> bool:
    return self.verdict in (Verdict.SMALL, Verdict.THIN)


def classify_small(
  space: CycleSpace, vector: Sequence[int], bound: int
) -> Classification:
  """Small when some clean basis has every distinguished value below ``bound``."""
  chosen, profile = greedy_distinguished(space, vector)
  if all(value < bound for value in profile):
    return Classification(Verdict.SMALL, rebase(space.basis, chosen), chosen, profile)
  return Classification(Verdict.LARGE, None, chosen, profile)


def classify_thin(
  space: CycleSpace, vector: Sequence[int], thresholds: Sequence[int]
) -> Classification:
  """Thin when the j-th smallest distinguished value stays below ``thresholds[j]``.

  Raises:
    ThresholdOrderError: ``thresholds`` is unsorted or not of length ``g``.
  """
  if len(thresholds) != space.rank:
    raise ThresholdOrderError(thresholds, f'expected {space.rank} entries')
  if any(a > b for a, b in zip(thresholds, thresholds[1:])):
    raise ThresholdOrderError(thresholds)
  chosen, profile = greedy_distinguished(space, vector)
  if all(value < limit for value, limit in zip(profile, thresholds)):
    return Classification(Verdict.THIN, rebase(space.basis, chosen), chosen, profile)
  return Classification(Verdict.THICK, None, chosen, profile)
