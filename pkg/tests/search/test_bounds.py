"""Tests for the length-bound recurrences."""

from __future__ import annotations

import pytest

from vass_geometry.bounds import (
  BOUNDED,
  COVER,
  FAMILIES,
  SIMUB,
  THIN,
  ZRUN,
  BoundParameters,
  ClosedForm,
  bounds,
  zrun_bound,
)
from vass_geometry.config import Limits
from vass_geometry.exceptions import (
  BoundOverflowError,
  InvalidSystemError,
  ResourceCeilingError,
)


class TestCoverSequences:
  def test_one_dimension(self) -> None:
    table = bounds(BoundParameters(d=1, n=2, M=1, g=1, target_norm=1), [COVER, THIN])
    assert table.cover == (1, 5)
    assert table.thin == (1, 5)

  def test_two_dimensions(self) -> None:
    table = bounds(BoundParameters(d=2, n=2, M=1, g=2), [COVER, THIN])
    assert table.cover == (1, 5, 205)
    assert table.thin == (1, 5, 45)

  def test_thin_never_exceeds_cover(self) -> None:
    for g in range(4):
      parameters = BoundParameters(d=3, n=2, M=2, g=g, target_norm=1)
      table = bounds(parameters, [COVER, THIN])
      assert all(k <= lg for k, lg in zip(table.thin, table.cover))

  def test_only_requested_families(self) -> None:
    table = bounds(BoundParameters(d=1, n=1, M=1, g=1), [COVER])
    assert table.thin is None
    assert set(table.sequences()) == {'cover.L'}


class TestUniformSequences:
  def test_small_instance(self) -> None:
    table = bounds(BoundParameters(d=1, n=1, M=1, g=1, threshold=1), [SIMUB])
    assert table.simub_c == (0, 3)
    assert table.simub_h == (3, 6)
    assert table.simub_l == (2, 5)


class TestBoundedSequences:
  def test_dimension_zero(self) -> None:
    table = bounds(BoundParameters(d=1, n=1, M=1, g=0), [BOUNDED])
    assert table.bounded_base == 25
    assert table.bounded == (25,)

  def test_dimension_one(self) -> None:
    table = bounds(BoundParameters(d=1, n=1, M=1, g=1), [BOUNDED])
    assert table.bounded == (625, (25 * 625**4) ** 2 + 625)


class TestZRunBound:
  def test_value(self) -> None:
    assert zrun_bound(3, 1) == 2187

  def test_needs_a_scale(self) -> None:
    assert bounds(BoundParameters(d=1, n=1, M=1, g=1), [ZRUN]).zrun is None
    scaled = BoundParameters(d=1, n=1, M=1, g=1, scale=3)
    assert bounds(scaled, [ZRUN]).zrun == 2187


class TestCeilings:
  def test_bit_ceiling(self) -> None:
    parameters = BoundParameters(d=2, n=2, M=1, g=2)
    with pytest.raises(BoundOverflowError) as excinfo:
      bounds(parameters, [COVER], Limits(max_bound_bits=4))
    assert excinfo.value.family == COVER

  def test_overflow_is_a_resource_ceiling(self) -> None:
    with pytest.raises(ResourceCeilingError):
      zrun_bound(1 << 20, 4, max_bits=64)


class TestClosedForms:
  def test_power_of_two(self) -> None:
    assert ClosedForm(2, 10).dominates(1024)
    assert not ClosedForm(2, 10).dominates(1025)

  def test_odd_base(self) -> None:
    assert ClosedForm(3, 4).dominates(81)
    assert not ClosedForm(3, 4).dominates(82)

  def test_recurrences_stay_below_closed_forms(self) -> None:
    parameters = BoundParameters(d=1, n=2, M=1, g=1, target_norm=1)
    checks = bounds(parameters).closed_form_checks()
    assert set(checks) == {COVER, THIN, SIMUB, BOUNDED}
    assert all(checks.values())


class TestParameters:
  @pytest.mark.parametrize(
    'kwargs',
    [
      {'d': 1, 'n': 1, 'M': 1, 'g': 2},
      {'d': 1, 'n': 0, 'M': 1, 'g': 1},
      {'d': 1, 'n': 1, 'M': -1, 'g': 1},
      {'d': 1, 'n': 1, 'M': 1, 'g': 1, 'scale': 0},
    ],
  )
  def test_invalid(self, kwargs) -> None:
    with pytest.raises(InvalidSystemError):
      BoundParameters(**kwargs)

  def test_unknown_family(self) -> None:
    with pytest.raises(InvalidSystemError):
      bounds(BoundParameters(d=1, n=1, M=1, g=1), ['cover', 'bogus'])

  def test_family_names(self) -> None:
    assert FAMILIES == ('cover', 'thin', 'simub', 'bounded', 'zrun')
