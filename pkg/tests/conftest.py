"""Shared fixtures for vass-geometry tests."""

from __future__ import annotations

import random
from pathlib import Path
from typing import Callable, Optional

import pytest
from click.testing import CliRunner

from vass_geometry.config import Limits
from vass_geometry.corpus import random_vass
from vass_geometry.vass import Vass, serialize_vass

LADDER_THREE = """\
vass ladder3
dim 3
state q1
state q2
state q3
trans q1 q1 1 0 0
trans q1 q2 0 0 0
trans q2 q2 -2 1 0
trans q2 q3 0 0 0
trans q3 q3 0 -2 1
"""


@pytest.fixture
def runner() -> CliRunner:
  return CliRunner()


@pytest.fixture
def limits() -> Limits:
  """Budgets small enough that a runaway search fails fast."""
  return Limits(node_budget=200_000, solver_timeout_ms=20_000)


@pytest.fixture
def vass_file(tmp_path: Path) -> Callable[..., Path]:
  """Factory writing a VASS (or raw text) into the test directory."""

  def _create_file(content, name: Optional[str] = None) -> Path:
    text = content if isinstance(content, str) else serialize_vass(content)
    path = tmp_path / (name or 'system.vass')
    path.write_text(text, encoding='utf-8')
    return path

  return _create_file


@pytest.fixture
def rng() -> random.Random:
  """Seeded generator so every run checks the same instances."""
  return random.Random(20240601)


@pytest.fixture
def random_instance(rng: random.Random) -> Callable[..., Vass]:
  """Factory for small random VASS drawn from the shared seeded generator."""

  def _create_instance(
    max_dim: int = 3, max_states: int = 3, max_transitions: int = 5, max_norm: int = 2
  ) -> Vass:
    return random_vass(
      rng,
      rng.randint(1, max_dim),
      rng.randint(1, max_states),
      rng.randint(1, max_transitions),
      rng.randint(1, max_norm),
    )

  return _create_instance
