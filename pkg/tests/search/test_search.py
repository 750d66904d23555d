"""Tests for the bounded witness deciders, cross-checked against the oracles."""

from __future__ import annotations

import random

import pytest

from vass_geometry.bounds import BOUNDED, BoundParameters, bounds
from vass_geometry.config import Limits
from vass_geometry.corpus import ladder_vass, random_vass
from vass_geometry.exceptions import (
  BoundOverflowError,
  InvalidSystemError,
  ResourceCeilingError,
)
from vass_geometry.geometry import geometric_dimension
from vass_geometry.oracles import (
  backward_coverability,
  karp_miller,
  z_unboundedness_search,
)
from vass_geometry.search import (
  NoPumpStatus,
  base_case_unbounded_ilp,
  check_no_pump_property,
  decide_boundedness,
  decide_coverability,
  decide_uniform_cover,
  default_cover_cap,
)
from vass_geometry.vass import (
  Configuration,
  Semantics,
  Vass,
  ZConfiguration,
  parse_vass,
)


def _loops(*effects) -> Vass:
  dim = len(effects[0])
  lines = [f'dim {dim}', 'state q']
  lines.extend('trans q q ' + ' '.join(str(v) for v in effect) for effect in effects)
  return parse_vass('\n'.join(lines) + '\n')


def _zeros(vass: Vass, state: str) -> Configuration:
  return Configuration(state, (0,) * vass.dim)


class TestCoverability:
  def test_source_already_covers(self) -> None:
    vass = ladder_vass(3)
    witness = decide_coverability(vass, _zeros(vass, 'q1'), _zeros(vass, 'q1'))
    assert witness is not None
    assert witness.length == 0

  def test_ladder_witness(self) -> None:
    vass = ladder_vass(3)
    witness = decide_coverability(
      vass, _zeros(vass, 'q1'), Configuration('q3', (0, 0, 1))
    )
    assert witness is not None
    assert witness.run.steps == (0, 0, 0, 0, 1, 2, 2, 3, 4)
    assert witness.run.end.covers(witness.target)

  @pytest.mark.parametrize('d', [2, 3, 4, 5])
  def test_ladder_length_is_exponential(self, d: int) -> None:
    vass = ladder_vass(d)
    target = Configuration(f'q{d}', (0,) * (d - 1) + (1,))
    witness = decide_coverability(vass, _zeros(vass, 'q1'), target)
    assert witness is not None
    assert witness.length == 2**d + d - 2
    basis = backward_coverability(vass, target)
    assert basis.distance(_zeros(vass, 'q1')) == witness.length

  def test_decreasing_loop_cannot_cover(self) -> None:
    vass = _loops((-1,))
    assert default_cover_cap(vass, Configuration('q', (1,))) == 1
    target = Configuration('q', (1,))
    assert decide_coverability(vass, _zeros(vass, 'q'), target) is None

  def test_negative_cap(self) -> None:
    vass = _loops((1,))
    with pytest.raises(InvalidSystemError):
      decide_coverability(vass, _zeros(vass, 'q'), _zeros(vass, 'q'), cap=-1)

  def test_budget_is_not_a_negative_answer(self) -> None:
    vass = parse_vass('dim 1\nstate p q\ntrans p p 1\n')
    with pytest.raises(ResourceCeilingError):
      decide_coverability(
        vass,
        _zeros(vass, 'p'),
        _zeros(vass, 'q'),
        limits=Limits(node_budget=100),
      )

  def test_agrees_with_backward_basis(self) -> None:
    rng = random.Random(17)
    small = Limits(node_budget=5_000)
    decided = 0
    for _ in range(200):
      vass = random_vass(
        rng, rng.randint(1, 4), rng.randint(1, 4), rng.randint(1, 6), rng.randint(1, 2)
      )
      source = Configuration(
        rng.choice(vass.states), tuple(rng.randint(0, 2) for _ in range(vass.dim))
      )
      target = Configuration(
        rng.choice(vass.states), tuple(rng.randint(0, 1) for _ in range(vass.dim))
      )
      try:
        witness = decide_coverability(vass, source, target, limits=small)
        basis = backward_coverability(vass, target, small)
      except ResourceCeilingError:
        continue
      decided += 1
      distance = basis.distance(source)
      assert (witness is None) == (distance is None)
      if witness is None:
        continue
      assert witness.length == distance
      cap = default_cover_cap(vass, target)
      if cap is not None:
        assert witness.length <= cap
      bigger = Configuration(source.state, tuple(v + 1 for v in source.values))
      try:
        again = decide_coverability(vass, bigger, target, limits=small)
      except ResourceCeilingError:
        continue
      assert again is not None and again.length <= witness.length
    assert decided >= 40


class TestBoundedness:
  def test_increasing_loop(self) -> None:
    vass = _loops((1,))
    result = decide_boundedness(vass, _zeros(vass, 'q'))
    assert not result.bounded
    assert result.witness is not None
    assert result.witness.length == 1
    assert result.witness.split == 0
    assert result.witness.is_strict()

  def test_decreasing_loop(self) -> None:
    vass = _loops((-1,))
    result = decide_boundedness(vass, Configuration('q', (5,)))
    assert result.bounded
    assert result.exhausted

  def test_zero_loop_is_bounded(self) -> None:
    vass = _loops((0,))
    result = decide_boundedness(vass, _zeros(vass, 'q'))
    assert result.bounded
    assert result.witness is None

  def test_agrees_with_karp_miller(self) -> None:
    rng = random.Random(23)
    small = Limits(node_budget=20_000)
    decided = 0
    for _ in range(200):
      vass = random_vass(
        rng, rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 5), rng.randint(1, 2)
      )
      source = Configuration(
        vass.states[0], tuple(rng.randint(0, 2) for _ in range(vass.dim))
      )
      tree = karp_miller(vass, source, small)
      if tree.truncated:
        continue
      try:
        result = decide_boundedness(vass, source, limits=small)
      except ResourceCeilingError:
        continue
      decided += 1
      assert result.bounded == tree.is_bounded()
      if result.witness is None:
        continue
      assert result.witness.is_strict()
      parameters = BoundParameters(
        d=vass.dim, n=vass.n, M=vass.max_norm, g=geometric_dimension(vass)
      )
      try:
        table = bounds(parameters, [BOUNDED])
      except BoundOverflowError:
        continue
      assert result.witness.length <= table.bounded[-1]
    assert decided >= 40


class TestUniformCover:
  def test_diagonal_loop(self) -> None:
    vass = _loops((1, 1))
    witness = decide_uniform_cover(vass, _zeros(vass, 'q'), 'q', 2)
    assert witness is not None and witness.length == 2

  def test_two_axis_loops(self) -> None:
    vass = _loops((1, 0), (0, 1))
    witness = decide_uniform_cover(vass, _zeros(vass, 'q'), 'q', 1)
    assert witness is not None and witness.length == 2

  def test_stuck_counter(self) -> None:
    vass = _loops((1, 0))
    assert decide_uniform_cover(vass, _zeros(vass, 'q'), 'q', 1) is None

  def test_negative_threshold(self) -> None:
    vass = _loops((1, 0))
    with pytest.raises(InvalidSystemError):
      decide_uniform_cover(vass, _zeros(vass, 'q'), 'q', -1)


class TestNoPump:
  def test_pumping_every_counter_is_confirmed(self) -> None:
    vass = _loops((1, 1))
    report = check_no_pump_property(vass, _zeros(vass, 'q'), 1)
    assert report.status is NoPumpStatus.CONFIRMED
    assert report.conclusions['q'] is not None
    assert report.conclusions['q'].length == 1

  def test_decreasing_loop_is_vacuous(self) -> None:
    vass = _loops((-1,))
    report = check_no_pump_property(vass, _zeros(vass, 'q'), 1)
    assert report.status is NoPumpStatus.VACUOUS

  def test_never_violated(self) -> None:
    rng = random.Random(29)
    small = Limits(node_budget=5_000)
    decided = 0
    for _ in range(100):
      vass = random_vass(
        rng, rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 5), 1
      )
      source = _zeros(vass, vass.states[0])
      report = check_no_pump_property(vass, source, rng.randint(0, 2), limits=small)
      assert report.status is not NoPumpStatus.VIOLATED
      decided += report.status in (NoPumpStatus.CONFIRMED, NoPumpStatus.VACUOUS)
    assert decided > 0


class TestIntegerUnboundedness:
  def test_single_increasing_loop(self) -> None:
    vass = _loops((1,))
    witness = base_case_unbounded_ilp(vass, ZConfiguration('q', (0,)))
    assert witness is not None
    assert witness.length == 1
    assert witness.run.semantics is Semantics.INTEGER

  def test_zero_loop(self) -> None:
    vass = _loops((0,))
    assert base_case_unbounded_ilp(vass, ZConfiguration('q', (0,))) is None

  def test_opposing_loops_combine(self) -> None:
    vass = _loops((1, -1), (-1, 2))
    witness = base_case_unbounded_ilp(vass, ZConfiguration('q', (0, 0)))
    assert witness is not None
    assert witness.is_strict()
    assert witness.run.steps == (1, 0)
    assert z_unboundedness_search(vass, ZConfiguration('q', (0, 0)), 4) is not None

  def test_agrees_with_exhaustive_search(self) -> None:
    rng = random.Random(31)
    for _ in range(100):
      vass = random_vass(
        rng, rng.randint(1, 2), rng.randint(1, 2), rng.randint(1, 4), 1
      )
      source = ZConfiguration(vass.states[0], (0,) * vass.dim)
      witness = base_case_unbounded_ilp(vass, source)
      shallow = z_unboundedness_search(vass, source, 6)
      if shallow is not None:
        assert witness is not None
      if witness is not None:
        assert witness.is_strict()
        assert z_unboundedness_search(vass, source, len(witness.run)) is not None
