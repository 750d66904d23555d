"""Tests for instance families and corpus generation."""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

import pytest

from vass_geometry.corpus import (
  family_summary,
  gen_corpus,
  ladder_vass,
  path_scheme,
)
from vass_geometry.exceptions import InvalidSystemError
from vass_geometry.geometry import cycle_space


class TestFamilies:
  def test_ladder_shape(self) -> None:
    vass = ladder_vass(4)
    assert vass.name == 'ladder4'
    assert vass.states == ('q1', 'q2', 'q3', 'q4')
    assert len(vass.transitions) == 7
    space = cycle_space(vass)
    assert (space.rank, space.scc_rank) == (4, 1)

  def test_path_scheme(self) -> None:
    space = cycle_space(path_scheme(3))
    assert (space.rank, space.scc_rank) == (3, 1)

  @pytest.mark.parametrize('factory', [ladder_vass, path_scheme])
  def test_size_must_be_positive(self, factory) -> None:
    with pytest.raises(InvalidSystemError):
      factory(0)


class TestGenCorpus:
  def test_manifest(self, tmp_path: Path) -> None:
    entries = gen_corpus(tmp_path, 5, {'lps': 2, 'ladder': 1})
    assert [entry.file for entry in entries] == [
      'ladder-0.vass',
      'lps-0.vass',
      'lps-1.vass',
    ]
    assert [(entry.d, entry.g) for entry in entries] == [(2, 2), (1, 1), (2, 2)]
    manifest = json.loads((tmp_path / 'manifest.json').read_text())
    assert manifest == [asdict(entry) for entry in entries]

  def test_reproducible(self, tmp_path: Path) -> None:
    counts = {'random': 4, 'line': 2, 'gscc1': 2}
    first = gen_corpus(tmp_path / 'a', 11, counts)
    second = gen_corpus(tmp_path / 'b', 11, counts)
    assert first == second
    for entry in first:
      assert (tmp_path / 'a' / entry.file).read_text() == (
        tmp_path / 'b' / entry.file
      ).read_text()

  def test_rank_one_family(self, tmp_path: Path) -> None:
    entries = gen_corpus(tmp_path, 3, {'gscc1': 5})
    assert all(entry.g_scc == 1 for entry in entries)

  def test_nothing_requested(self, tmp_path: Path) -> None:
    assert gen_corpus(tmp_path, 0, {}) == []
    assert list(tmp_path.iterdir()) == []

  def test_unknown_family(self, tmp_path: Path) -> None:
    with pytest.raises(InvalidSystemError):
      gen_corpus(tmp_path, 0, {'ladders': 1})

  def test_size_bounds(self, tmp_path: Path) -> None:
    with pytest.raises(InvalidSystemError):
      gen_corpus(tmp_path, 0, {'random': 1}, max_dim=0)


def test_family_summary(tmp_path: Path) -> None:
  entries = gen_corpus(tmp_path, 5, {'lps': 3, 'ladder': 2})
  summary = family_summary(entries)
  assert summary['lps']['count'] == 3
  assert summary['lps']['d'] == 3
  assert summary['ladder'] == {'count': 2, 'd': 3, 'n': 3, 'M': 2, 'g': 3, 'g_scc': 1}
