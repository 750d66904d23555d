"""Custom exceptions for vass-geometry."""

from typing import Optional, Sequence


class VassGeometryError(Exception):
  """Base exception for vass-geometry errors."""

  pass


def _located(message: str, line_number: Optional[int]) -> str:
  if line_number is None:
    return message
  return f'line {line_number}: {message}'


class VassSyntaxError(VassGeometryError):
  """Raised when VASS text cannot be parsed."""

  def __init__(self, message: str, line_number: Optional[int] = None):
    self.line_number = line_number
    super().__init__(_located(message, line_number))


class DimensionMismatchError(VassGeometryError):
  """Raised when a vector has the wrong number of components."""

  def __init__(
    self,
    expected: int,
    actual: int,
    context: str = 'effect arity',
    line_number: Optional[int] = None,
  ):
    self.expected = expected
    self.actual = actual
    self.line_number = line_number
    super().__init__(_located(f'{context} {actual} != dim {expected}', line_number))


class UndeclaredStateError(VassGeometryError):
  """Raised when a transition or configuration names an unknown state."""

  def __init__(self, state: str, line_number: Optional[int] = None):
    self.state = state
    self.line_number = line_number
    super().__init__(_located(f'undeclared state: {state}', line_number))


class UnknownTransitionError(VassGeometryError):
  """Raised when a transition index is out of range."""

  def __init__(self, index: int, count: int):
    self.index = index
    self.count = count
    super().__init__(f'transition {index} out of range (have {count})')


class StateMismatchError(VassGeometryError):
  """Raised when a transition is fired from a state it does not leave."""

  def __init__(self, expected: str, actual: str):
    self.expected = expected
    self.actual = actual
    super().__init__(f'transition leaves {expected}, configuration is in {actual}')


class CounterUnderflowError(VassGeometryError):
  """Raised when a step would drive a counter below zero."""

  def __init__(self, state: str, counter: int, value: int):
    self.state = state
    self.counter = counter
    self.value = value
    super().__init__(f'counter {counter} would become {value} leaving {state}')


class DisconnectedPathError(VassGeometryError):
  """Raised when consecutive transitions of a path do not meet."""

  def __init__(self, position: int, expected: str, actual: str):
    self.position = position
    self.expected = expected
    self.actual = actual
    super().__init__(
      f'path breaks at step {position}: expected source {expected}, got {actual}'
    )


class CoordinateError(VassGeometryError):
  """Raised when a coordinate lies outside the counter range."""

  def __init__(self, coordinate: int, dim: int):
    self.coordinate = coordinate
    self.dim = dim
    super().__init__(f'coordinate {coordinate} outside [0, {dim})')


class ThresholdOrderError(VassGeometryError):
  """Raised when a threshold vector is not non-decreasing or has the wrong size."""

  def __init__(self, thresholds: Sequence[int], message: str = 'not sorted'):
    self.thresholds = tuple(thresholds)
    super().__init__(f'invalid thresholds {list(self.thresholds)}: {message}')


class InvalidSystemError(VassGeometryError):
  """Raised when a linear system or a limit value is malformed."""

  pass


class ResourceCeilingError(VassGeometryError):
  """Raised when a search or solver gives up before reaching an answer."""

  def __init__(self, resource: str, limit: object):
    self.resource = resource
    self.limit = limit
    super().__init__(f'{resource} ceiling reached ({limit}); result inconclusive')


class BoundOverflowError(ResourceCeilingError):
  """Raised when a bound recurrence outgrows the configured bit ceiling."""

  def __init__(self, family: str, limit: int):
    self.family = family
    super().__init__(f'{family} bound bit length', limit)


class ProgramError(VassGeometryError):
  """Raised when a counter program is malformed."""

  def __init__(self, message: str, line_number: Optional[int] = None):
    self.line_number = line_number
    super().__init__(_located(message, line_number))


class CompensationError(ProgramError):
  """Raised when an update cannot be balanced against its multiplication triple."""

  def __init__(self, counter: str, triple: str):
    self.counter = counter
    self.triple = triple
    super().__init__(
      f'update on {counter} cannot be compensated by the triple sensed by {triple}'
    )


class NameCollisionError(ProgramError):
  """Raised when generated counter names clash."""

  def __init__(self, names: Sequence[str]):
    self.names = tuple(sorted(set(names)))
    super().__init__(f'counter names used twice: {", ".join(self.names)}')
