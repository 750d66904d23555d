"""Length bounds for coverability, boundedness and simultaneous unboundedness."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, Optional, Tuple

from .config import Limits, resolve_limits
from .exceptions import BoundOverflowError, InvalidSystemError

COVER = 'cover'
THIN = 'thin'
SIMUB = 'simub'
BOUNDED = 'bounded'
ZRUN = 'zrun'
FAMILIES: Tuple[str, ...] = (COVER, THIN, SIMUB, BOUNDED, ZRUN)


@dataclass(frozen=True)
class BoundParameters:
  """Instance parameters the recurrences depend on.

  ``target_norm`` is ``∥y∥∞`` of the coverability target, ``threshold`` the
  uniform target ``G`` and ``scale`` the Z-run scale ``max(size, ∥s∥, ∥t∥)``.
  """

  d: int
  n: int
  M: int
  g: int
  threshold: int = 0
  target_norm: int = 0
  scale: Optional[int] = None

  def __post_init__(self) -> None:
    if not 0 <= self.g <= self.d:
      raise InvalidSystemError(f'need d >= g >= 0, got d={self.d} g={self.g}')
    if self.n < 1:
      raise InvalidSystemError(f'need n >= 1, got {self.n}')
    if self.M < 0 or self.threshold < 0 or self.target_norm < 0:
      raise InvalidSystemError('M, G and the target norm must be nonnegative')
    if self.scale is not None and self.scale < 1:
      raise InvalidSystemError(f'scale must be positive, got {self.scale}')


@dataclass(frozen=True)
class ClosedForm:
  """``base ** exponent`` kept unexpanded."""

  base: int
  exponent: int

  def dominates(self, value: int, max_bits: int = 1 << 22) -> bool:
    """Whether ``value <= base ** exponent``, decided from bit lengths when possible."""
    if value <= 0:
      return True
    if self.base <= 1 or self.exponent == 0:
      return value <= self.base**self.exponent
    width = self.base.bit_length()
    if value.bit_length() <= self.exponent * (width - 1):
      return True
    if value.bit_length() > self.exponent * width:
      return False
    if self.exponent * width > max_bits:
      raise BoundOverflowError('closed form', max_bits)
    return value <= self.base**self.exponent


@dataclass(frozen=True)
class BoundTable:
  """Every sequence up to index ``g``; ``None`` marks a family not requested."""

  parameters: BoundParameters
  cover: Optional[Tuple[int, ...]] = None
  thin: Optional[Tuple[int, ...]] = None
  simub_c: Optional[Tuple[int, ...]] = None
  simub_h: Optional[Tuple[int, ...]] = None
  simub_l: Optional[Tuple[int, ...]] = None
  bounded_base: Optional[int] = None
  bounded: Optional[Tuple[int, ...]] = None
  zrun: Optional[int] = None
  closed_forms: Dict[str, ClosedForm] = field(default_factory=dict, compare=False)

  def sequences(self) -> Dict[str, Tuple[int, ...]]:
    named = {
      'cover.L': self.cover,
      'thin.K': self.thin,
      'simub.C': self.simub_c,
      'simub.H': self.simub_h,
      'simub.L': self.simub_l,
      'bounded.L': self.bounded,
    }
    return {name: values for name, values in named.items() if values is not None}

  def closed_form_checks(self, max_bits: int = 1 << 22) -> Dict[str, bool]:
    finals = {
      COVER: self.cover,
      THIN: self.thin,
      SIMUB: self.simub_l,
      BOUNDED: self.bounded,
    }
    return {
      family: form.dominates(finals[family][-1], max_bits)
      for family, form in self.closed_forms.items()
      if finals.get(family) is not None
    }


def _checked_power(base: int, exponent: int, family: str, max_bits: int) -> int:
  if base > 1 and base.bit_length() * exponent > max_bits:
    raise BoundOverflowError(family, max_bits)
  return base**exponent


def _checked(value: int, family: str, max_bits: int) -> int:
  if value.bit_length() > max_bits:
    raise BoundOverflowError(family, max_bits)
  return value


def cover_sequence(p: BoundParameters, max_bits: int) -> Tuple[int, ...]:
  """``L_0 = n-1``, ``L_i = n(d(y + M·L_{i-1}))^i + L_{i-1}``."""
  values = [p.n - 1]
  for i in range(1, p.g + 1):
    base = p.d * (p.target_norm + p.M * values[-1])
    term = p.n * _checked_power(base, i, COVER, max_bits)
    values.append(_checked(term + values[-1], COVER, max_bits))
  return tuple(values)


def thin_sequence(p: BoundParameters, max_bits: int) -> Tuple[int, ...]:
  """``K_0 = n-1``, ``K_i = n·d^i·Π_{j<i}(y + M·K_j) + K_{i-1}``."""
  values = [p.n - 1]
  product = 1
  for i in range(1, p.g + 1):
    product = _checked(product * (p.target_norm + p.M * values[-1]), THIN, max_bits)
    term = p.n * _checked_power(p.d, i, THIN, max_bits) * product
    values.append(_checked(term + values[-1], THIN, max_bits))
  return tuple(values)


def simub_sequences(
  p: BoundParameters, max_bits: int
) -> Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]:
  """The ``(C_i, H_i, L_i)`` triple of recurrences for uniform targets."""
  c_values = [0]
  h_values = [p.n * (p.d + 1) * p.M + p.threshold]
  l_values = [p.n * (p.d + 1)]
  for i in range(1, p.g + 1):
    c = p.M * l_values[-1] + p.threshold
    power = _checked_power(p.d * c, i, SIMUB, max_bits)
    c_values.append(c)
    h_values.append(_checked(p.n * p.M * power + h_values[-1], SIMUB, max_bits))
    l_values.append(_checked(p.n * power + l_values[-1], SIMUB, max_bits))
  return tuple(c_values), tuple(h_values), tuple(l_values)


def bounded_sequence(p: BoundParameters, max_bits: int) -> Tuple[int, Tuple[int, ...]]:
  """``D = (5d²n²M)²``, ``L_0 = D^{g+1}``.

  ``L_i = (D(dM·L_{i-1})^{4i})^{g+1} + L_{i-1}``.
  """
  base = (5 * p.d * p.d * p.n * p.n * p.M) ** 2
  values = [_checked_power(base, p.g + 1, BOUNDED, max_bits)]
  for i in range(1, p.g + 1):
    inner = base * _checked_power(p.d * p.M * values[-1], 4 * i, BOUNDED, max_bits)
    term = _checked_power(inner, p.g + 1, BOUNDED, max_bits)
    values.append(_checked(term + values[-1], BOUNDED, max_bits))
  return base, tuple(values)


def zrun_bound(scale: int, g: int, max_bits: int = 1 << 22) -> int:
  """Length bound ``scale^{6g+1}`` for shortest Z-runs."""
  return _checked_power(scale, 6 * g + 1, ZRUN, max_bits)


def _closed_forms(p: BoundParameters) -> Dict[str, ClosedForm]:
  grow = (p.g + 1) ** (p.g + 1)
  cover_base = 4 * p.n * p.d * p.M * (p.target_norm + 1)
  bounded_base = (5 * p.d * p.d * p.n * p.n * p.M) ** 2
  return {
    COVER: ClosedForm(cover_base, grow),
    THIN: ClosedForm(cover_base, 2 ** (p.g + 1) - 1),
    SIMUB: ClosedForm(2 * p.n * (p.d + 1) * p.M * (p.threshold + 1), grow),
    BOUNDED: ClosedForm(2 * bounded_base * p.d * p.M, (4 * p.g + 2) ** (2 * p.g + 1)),
  }


@lru_cache(maxsize=256)
def _compute(
  parameters: BoundParameters, families: Tuple[str, ...], max_bits: int
) -> BoundTable:
  values: Dict[str, object] = {}
  if COVER in families:
    values['cover'] = cover_sequence(parameters, max_bits)
  if THIN in families:
    values['thin'] = thin_sequence(parameters, max_bits)
  if SIMUB in families:
    thresholds, heights, lengths = simub_sequences(parameters, max_bits)
    values.update(simub_c=thresholds, simub_h=heights, simub_l=lengths)
  if BOUNDED in families:
    values['bounded_base'], values['bounded'] = bounded_sequence(parameters, max_bits)
  if ZRUN in families and parameters.scale is not None:
    values['zrun'] = zrun_bound(parameters.scale, parameters.g, max_bits)
  return BoundTable(
    parameters=parameters, closed_forms=_closed_forms(parameters), **values
  )


def bounds(
  parameters: BoundParameters,
  families: Iterable[str] = FAMILIES,
  limits: Optional[Limits] = None,
) -> BoundTable:
  """Evaluate the requested recurrence families up to index ``g``.

  Raises:
    BoundOverflowError: A value would exceed ``limits.max_bound_bits`` bits.
  """
  requested = tuple(sorted(set(families)))
  unknown = set(requested) - set(FAMILIES)
  if unknown:
    raise InvalidSystemError(f'unknown bound families: {sorted(unknown)}')
  return _compute(parameters, requested, resolve_limits(limits).max_bound_bits)
