"""Small nonnegative solutions of integer linear systems."""

from __future__ import annotations

import logging
from typing import List, Optional, Sequence, Tuple

import z3

from .config import Limits, resolve_limits
from .exceptions import DimensionMismatchError, InvalidSystemError, ResourceCeilingError
from .geometry import rank_of

logger = logging.getLogger(__name__)

Matrix = Sequence[Sequence[int]]
Solution = Tuple[int, ...]


def _shape(matrix: Matrix, rhs: Sequence[int]) -> int:
  if len(rhs) != len(matrix):
    raise DimensionMismatchError(
      len(matrix), len(rhs), context='right-hand side length'
    )
  columns = len(matrix[0]) if matrix else 0
  for row in matrix:
    if len(row) != columns:
      raise DimensionMismatchError(columns, len(row), context='row length')
  return columns


def largest_entry(matrix: Matrix, rhs: Sequence[int]) -> int:
  entries = [abs(value) for row in matrix for value in row]
  entries.extend(abs(value) for value in rhs)
  return max(entries, default=0)


def inequality_solution_bound(matrix: Matrix, rhs: Sequence[int]) -> int:
  """``(r+1)(rN)^r`` with ``r`` the rank of the matrix and ``N`` its largest entry."""
  columns = _shape(matrix, rhs)
  rank = rank_of(matrix, columns)
  return (rank + 1) * (rank * largest_entry(matrix, rhs)) ** rank


def equation_solution_cap(matrix: Matrix, rhs: Sequence[int]) -> int:
  """``(nN+1)^d·(d+1)`` for ``d`` equations over ``n`` unknowns."""
  columns = _shape(matrix, rhs)
  rows = len(matrix)
  return (columns * max(largest_entry(matrix, rhs), 1) + 1) ** rows * (rows + 1)


def _solve(
  matrix: Matrix,
  rhs: Sequence[int],
  cap: int,
  equality: bool,
  limits: Optional[Limits],
) -> Optional[Solution]:
  columns = _shape(matrix, rhs)
  if cap < 1:
    raise InvalidSystemError(f'cap must be at least 1, got {cap}')

  if columns == 0:
    satisfied = all(value == 0 if equality else value <= 0 for value in rhs)
    return () if satisfied else None

  timeout = resolve_limits(limits).solver_timeout_ms
  optimizer = z3.Optimize()
  optimizer.set('timeout', timeout)
  unknowns = [z3.Int(f'x{j}') for j in range(columns)]
  for unknown in unknowns:
    optimizer.add(unknown >= 0, unknown <= cap)

  for row, value in zip(matrix, rhs):
    terms = [
      coefficient * unknown
      for coefficient, unknown in zip(row, unknowns)
      if coefficient
    ]
    lhs = z3.Sum(terms) if terms else z3.IntVal(0)
    optimizer.add(lhs == value if equality else lhs >= value)

  # lexicographic objectives: total first, then each unknown in order
  optimizer.minimize(z3.Sum(unknowns))
  for unknown in unknowns:
    optimizer.minimize(unknown)

  result = optimizer.check()
  if result == z3.unsat:
    return None
  if result != z3.sat:
    raise ResourceCeilingError('solver time (ms)', timeout)
  model = optimizer.model()
  return tuple(_model_int(model, unknown) for unknown in unknowns)


def _model_int(model: z3.ModelRef, unknown: z3.ArithRef) -> int:
  return model.eval(unknown, model_completion=True).as_long()


def small_solution_eq(
  matrix: Matrix, rhs: Sequence[int], cap: int, limits: Optional[Limits] = None
) -> Optional[Solution]:
  """Least nonnegative ``x`` with ``Ax = b`` and ``∥x∥∞ ≤ cap``.

  Among solutions within the cap the one with the smallest sum is returned,
  ties broken lexicographically.

  Raises:
    DimensionMismatchError: The matrix is ragged or ``b`` has the wrong length.
    ResourceCeilingError: The solver timed out.
  """
  solution = _solve(matrix, rhs, cap, True, limits)
  logger.debug('eq system cap=%s -> %s', cap, solution)
  return solution


def small_solution_ineq(
  matrix: Matrix, rhs: Sequence[int], cap: int, limits: Optional[Limits] = None
) -> Optional[Solution]:
  """Least nonnegative ``x`` with ``Ax ≥ b`` and ``∥x∥∞ ≤ cap`` for ``b ≥ 0``.

  Raises:
    InvalidSystemError: Some entry of ``b`` is negative.
  """
  negative: List[int] = [value for value in rhs if value < 0]
  if negative:
    raise InvalidSystemError(f'right-hand side must be nonnegative, got {list(rhs)}')
  solution = _solve(matrix, rhs, cap, False, limits)
  logger.debug('ineq system cap=%s -> %s', cap, solution)
  return solution
