"""Resource limits and logging setup."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, fields, replace
from typing import Dict, Mapping, Optional

from rich.console import Console
from rich.logging import RichHandler

from .exceptions import InvalidSystemError

_ENV_KEYS: Dict[str, str] = {
  'node_budget': 'VASS_GEOMETRY_BUDGET',
  'solver_timeout_ms': 'VASS_GEOMETRY_SOLVER_TIMEOUT_MS',
  'max_bound_bits': 'VASS_GEOMETRY_MAX_BOUND_BITS',
  'max_support_transitions': 'VASS_GEOMETRY_MAX_SUPPORT',
  'zrun_ratio_ceiling': 'VASS_GEOMETRY_RATIO_CEILING',
}


@dataclass(frozen=True)
class Limits:
  """Ceilings shared by every search, solver call and bound computation.

  Hitting one of them raises ``ResourceCeilingError``; no decider turns an
  exhausted budget into a negative answer.
  """

  node_budget: int = 1_000_000
  solver_timeout_ms: int = 60_000
  max_bound_bits: int = 1 << 22
  max_support_transitions: int = 12
  zrun_ratio_ceiling: int = 8

  def __post_init__(self) -> None:
    for field in fields(self):
      value = getattr(self, field.name)
      if not isinstance(value, int) or value < 1:
        raise InvalidSystemError(f'{field.name} must be a positive integer: {value!r}')

  @classmethod
  def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> 'Limits':
    """Build limits from defaults overridden by ``VASS_GEOMETRY_*`` variables."""
    source = os.environ if environ is None else environ
    overrides: Dict[str, int] = {}
    for name, key in _ENV_KEYS.items():
      raw = source.get(key)
      if raw is None or not raw.strip():
        continue
      try:
        overrides[name] = int(raw)
      except ValueError as e:
        raise InvalidSystemError(f'{key} is not an integer: {raw!r}') from e
    return cls(**overrides)

  def with_budget(self, node_budget: Optional[int]) -> 'Limits':
    if node_budget is None:
      return self
    return replace(self, node_budget=node_budget)


def resolve_limits(limits: Optional[Limits]) -> Limits:
  return limits if limits is not None else Limits.from_env()


def configure_logging(verbosity: int = 0) -> None:
  """Route package logs through a rich handler on stderr."""
  if verbosity >= 2:
    level = logging.DEBUG
  elif verbosity == 1:
    level = logging.INFO
  else:
    level = logging.WARNING

  logging.basicConfig(
    level=level,
    format='%(message)s',
    datefmt='[%X]',
    handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
    force=True,
  )
