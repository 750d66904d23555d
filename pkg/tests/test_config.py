"""Tests for limits and logging setup."""

from __future__ import annotations

import logging

import pytest
from rich.logging import RichHandler

from vass_geometry.config import Limits, configure_logging, resolve_limits
from vass_geometry.exceptions import InvalidSystemError


class TestLimits:
  def test_defaults(self) -> None:
    limits = Limits()
    assert limits.node_budget == 1_000_000
    assert limits.max_support_transitions == 12
    assert limits.zrun_ratio_ceiling == 8

  def test_environment_overrides(self) -> None:
    limits = Limits.from_env(
      {'VASS_GEOMETRY_BUDGET': '50', 'VASS_GEOMETRY_MAX_SUPPORT': ' '}
    )
    assert limits.node_budget == 50
    assert limits.max_support_transitions == 12

  def test_environment_must_be_numeric(self) -> None:
    with pytest.raises(InvalidSystemError):
      Limits.from_env({'VASS_GEOMETRY_BUDGET': 'lots'})

  @pytest.mark.parametrize('value', [0, -3])
  def test_limits_are_positive(self, value: int) -> None:
    with pytest.raises(InvalidSystemError):
      Limits(node_budget=value)

  def test_with_budget(self) -> None:
    limits = Limits()
    assert limits.with_budget(None) is limits
    assert limits.with_budget(7).node_budget == 7
    assert limits.with_budget(7).solver_timeout_ms == limits.solver_timeout_ms

  def test_resolve_reads_environment(self, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv('VASS_GEOMETRY_RATIO_CEILING', '3')
    assert resolve_limits(None).zrun_ratio_ceiling == 3
    explicit = Limits(zrun_ratio_ceiling=5)
    assert resolve_limits(explicit) is explicit


@pytest.mark.parametrize(
  'verbosity, level', [(0, logging.WARNING), (1, logging.INFO), (2, logging.DEBUG)]
)
def test_configure_logging(verbosity: int, level: int) -> None:
  configure_logging(verbosity)
  root = logging.getLogger()
  assert root.level == level
  assert any(isinstance(handler, RichHandler) for handler in root.handlers)
