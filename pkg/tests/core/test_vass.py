"""Tests for the core model: parsing, stepping, runs and SCCs."""

from __future__ import annotations

import pytest

from vass_geometry.corpus import ladder_vass
from vass_geometry.exceptions import (
  CoordinateError,
  CounterUnderflowError,
  DimensionMismatchError,
  DisconnectedPathError,
  StateMismatchError,
  UndeclaredStateError,
  UnknownTransitionError,
  VassSyntaxError,
)
from vass_geometry.vass import (
  Configuration,
  Semantics,
  ZConfiguration,
  parse_configuration,
  parse_vass,
  path_effect,
  project_counters,
  replay,
  scc_decompose,
  serialize_vass,
  simple_cycles,
  step,
)

from conftest import LADDER_THREE


class TestTextFormat:
  """Parsing and canonical serialization."""

  def test_ladder_text_is_canonical(self) -> None:
    assert serialize_vass(parse_vass(LADDER_THREE)) == LADDER_THREE
    assert serialize_vass(ladder_vass(3)) == LADDER_THREE

  def test_comments_and_state_lists(self) -> None:
    vass = parse_vass('vass t\ndim 2\nstate p q # two states\ntrans p q 1 -1\n')
    assert vass.states == ('p', 'q')
    assert vass.transitions[0].effect == (1, -1)

  def test_dimension_zero(self) -> None:
    vass = parse_vass('vass z\ndim 0\nstate p\ntrans p p\n')
    assert vass.transitions[0].effect == ()
    assert serialize_vass(vass).endswith('trans p p\n')

  def test_missing_name_defaults(self) -> None:
    assert parse_vass('dim 1\nstate p\n').name == 'vass'

  def test_effect_arity_error_names_line(self) -> None:
    with pytest.raises(DimensionMismatchError) as excinfo:
      parse_vass('dim 2\nstate p\ntrans p p 1\n')
    assert excinfo.value.line_number == 3
    assert str(excinfo.value) == 'line 3: effect arity 1 != dim 2'

  def test_undeclared_state(self) -> None:
    with pytest.raises(UndeclaredStateError) as excinfo:
      parse_vass('dim 1\nstate p\ntrans p r 1\n')
    assert excinfo.value.state == 'r'
    assert excinfo.value.line_number == 3

  @pytest.mark.parametrize(
    'text',
    [
      'dim 1\nstate p\nfoo p\n',
      'state p\n',
      'dim x\n',
      'dim 1\nstate p p\n',
      'dim 1\ndim 2\n',
      'trans p p 1\ndim 1\n',
      'dim 1\nstate p\ntrans p p one\n',
    ],
  )
  def test_syntax_errors(self, text: str) -> None:
    with pytest.raises(VassSyntaxError):
      parse_vass(text)


class TestSemantics:
  """Stepping under both counter semantics."""

  def test_step_adds_effect(self) -> None:
    vass = ladder_vass(3)
    after = step(Configuration('q1', (0, 0, 0)), 0, vass)
    assert after == Configuration('q1', (1, 0, 0))

  def test_step_from_wrong_state(self) -> None:
    with pytest.raises(StateMismatchError):
      step(Configuration('q1', (5, 0, 0)), 2, ladder_vass(3))

  def test_underflow_only_under_nonnegative_semantics(self) -> None:
    vass = ladder_vass(3)
    start = Configuration('q2', (1, 0, 0))
    with pytest.raises(CounterUnderflowError) as excinfo:
      step(start, 2, vass)
    assert excinfo.value.counter == 0
    assert excinfo.value.value == -1
    after = step(start, 2, vass, Semantics.INTEGER)
    assert after == ZConfiguration('q2', (-1, 1, 0))

  def test_unknown_transition(self) -> None:
    with pytest.raises(UnknownTransitionError):
      ladder_vass(3).transition(99)

  def test_configurations_reject_negative_values(self) -> None:
    with pytest.raises(CounterUnderflowError):
      Configuration('p', (-1,))
    assert ZConfiguration('p', (-1,)).values == (-1,)

  def test_equality_across_configuration_kinds(self) -> None:
    assert Configuration('p', (1,)) == ZConfiguration('p', (1,))
    assert len({Configuration('p', (1,)), ZConfiguration('p', (1,))}) == 1
    assert Configuration('p', (2, 1)).covers(ZConfiguration('p', (1, 1)))
    assert not Configuration('p', (2, 1)).covers(ZConfiguration('q', (1, 1)))


class TestRuns:
  def test_ladder_cover_run(self) -> None:
    vass = ladder_vass(3)
    run = replay(vass, Configuration('q1', (0, 0, 0)), [0, 0, 0, 0, 1, 2, 2, 3, 4])
    assert len(run) == 9
    assert run.end == Configuration('q3', (0, 0, 1))
    assert run.effect == (0, 0, 1)
    assert len(run.trace) == 10

  def test_path_effect(self) -> None:
    assert path_effect(ladder_vass(3), [0, 1, 2]) == (-1, 1, 0)

  def test_path_effect_rejects_gaps(self) -> None:
    with pytest.raises(DisconnectedPathError) as excinfo:
      path_effect(ladder_vass(3), [0, 2])
    assert excinfo.value.position == 1


class TestStructure:
  """Derived quantities, SCCs, projection and cycles."""

  def test_size_and_norm(self) -> None:
    vass = ladder_vass(3)
    assert vass.max_norm == 2
    assert vass.size == 3 + 5 * 3 * 3
    assert vass.outgoing['q1'] == (0, 1)

  def test_ladder_is_a_line(self) -> None:
    decomposition = scc_decompose(ladder_vass(3))
    assert decomposition.components == (('q1',), ('q2',), ('q3',))
    assert decomposition.internal == ((0,), (2,), (4,))
    assert decomposition.bridges == (1, 3)
    assert decomposition.line

  def test_branching_is_not_a_line(self) -> None:
    vass = parse_vass('dim 1\nstate p q r\ntrans p q 1\ntrans p r 1\n')
    decomposition = scc_decompose(vass)
    assert decomposition.components == (('p',), ('q',), ('r',))
    assert not decomposition.line

  def test_parallel_bridges_are_not_a_line(self) -> None:
    vass = parse_vass('dim 1\nstate a b c\ntrans a b 0\ntrans a b 1\n')
    decomposition = scc_decompose(vass)
    assert decomposition.components == (('a',), ('b',), ('c',))
    assert decomposition.bridges == (0, 1)
    assert decomposition.line is False

  def test_skipping_bridge_is_not_a_line(self) -> None:
    vass = parse_vass('dim 1\nstate p q r\ntrans p q 0\ntrans q r 0\ntrans p r 0\n')
    assert scc_decompose(vass).line is False

  def test_cycle_components_are_merged(self) -> None:
    vass = parse_vass('dim 1\nstate p q r\ntrans q r 0\ntrans r q 0\ntrans p q 0\n')
    decomposition = scc_decompose(vass)
    assert decomposition.components == (('p',), ('q', 'r'))
    assert decomposition.line

  def test_project_counters(self) -> None:
    projected = project_counters(ladder_vass(3), [2, 0])
    assert projected.dim == 2
    assert projected.transitions[2].effect == (-2, 0)
    with pytest.raises(CoordinateError):
      project_counters(ladder_vass(3), [3])

  def test_simple_cycles_keep_parallel_transitions(self) -> None:
    vass = parse_vass(
      'dim 1\nstate p q\ntrans p q 1\ntrans p q 2\ntrans q p 0\ntrans p p 5\n'
    )
    assert simple_cycles(vass) == [(3,), (0, 2), (1, 2)]


class TestConfigurationLiterals:
  def test_parse(self) -> None:
    vass = ladder_vass(3)
    assert parse_configuration('q1:1,0,0', vass) == Configuration('q1', (1, 0, 0))

  def test_negative_values_need_integer_semantics(self) -> None:
    vass = ladder_vass(3)
    with pytest.raises(CounterUnderflowError):
      parse_configuration('q1:-1,0,0', vass)
    parsed = parse_configuration('q1:-1,0,0', vass, Semantics.INTEGER)
    assert parsed.values == (-1, 0, 0)

  @pytest.mark.parametrize(
    'literal, error',
    [
      ('q1', VassSyntaxError),
      ('q9:0,0,0', UndeclaredStateError),
      ('q1:1,2', DimensionMismatchError),
      ('q1:a,0,0', VassSyntaxError),
    ],
  )
  def test_malformed(self, literal: str, error: type) -> None:
    with pytest.raises(error):
      parse_configuration(literal, ladder_vass(3))
