"""Core model: VASS, configurations, runs and the text format."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from .exceptions import (
  CoordinateError,
  CounterUnderflowError,
  DimensionMismatchError,
  DisconnectedPathError,
  StateMismatchError,
  UndeclaredStateError,
  UnknownTransitionError,
  VassSyntaxError,
)

Vector = Tuple[int, ...]


def zero_vector(dim: int) -> Vector:
  return (0,) * dim


def add_vectors(left: Sequence[int], right: Sequence[int]) -> Vector:
  return tuple(a + b for a, b in zip(left, right))


def sub_vectors(left: Sequence[int], right: Sequence[int]) -> Vector:
  return tuple(a - b for a, b in zip(left, right))


def dominates(left: Sequence[int], right: Sequence[int]) -> bool:
  """True when ``left`` is componentwise at least ``right``."""
  return all(a >= b for a, b in zip(left, right))


def max_norm(vector: Sequence[int]) -> int:
  return max((abs(value) for value in vector), default=0)


@dataclass(frozen=True)
class Transition:
  """A transition ``source --effect--> target``."""

  source: str
  target: str
  effect: Vector

  def describe(self) -> str:
    return f'{self.source} -{list(self.effect)}-> {self.target}'


@dataclass(frozen=True)
class Vass:
  """A vector addition system with states.

  Transitions are identified by their position in ``transitions``; duplicates
  are allowed and stay distinct.
  """

  name: str
  dim: int
  states: Tuple[str, ...]
  transitions: Tuple[Transition, ...] = ()

  def __post_init__(self) -> None:
    object.__setattr__(self, 'states', tuple(self.states))
    object.__setattr__(
      self,
      'transitions',
      tuple(
        Transition(t.source, t.target, tuple(int(a) for a in t.effect))
        for t in self.transitions
      ),
    )
    if self.dim < 0:
      raise DimensionMismatchError(0, self.dim, context='dimension')
    if len(set(self.states)) != len(self.states):
      raise VassSyntaxError('duplicate state declaration')
    declared = set(self.states)
    for transition in self.transitions:
      for endpoint in (transition.source, transition.target):
        if endpoint not in declared:
          raise UndeclaredStateError(endpoint)
      if len(transition.effect) != self.dim:
        raise DimensionMismatchError(self.dim, len(transition.effect))

  @property
  def n(self) -> int:
    return len(self.states)

  @cached_property
  def max_norm(self) -> int:
    """Largest absolute effect entry over all transitions (M)."""
    return max((max_norm(t.effect) for t in self.transitions), default=0)

  @cached_property
  def size(self) -> int:
    """Unary size ``|Q| + |T|·d·(M+1)``."""
    return self.n + len(self.transitions) * self.dim * (self.max_norm + 1)

  @cached_property
  def state_index(self) -> Dict[str, int]:
    return {state: index for index, state in enumerate(self.states)}

  @cached_property
  def outgoing(self) -> Dict[str, Tuple[int, ...]]:
    """Transition indices leaving each state, in declaration order."""
    table: Dict[str, List[int]] = {state: [] for state in self.states}
    for index, transition in enumerate(self.transitions):
      table[transition.source].append(index)
    return {state: tuple(indices) for state, indices in table.items()}

  def transition(self, index: int) -> Transition:
    if not 0 <= index < len(self.transitions):
      raise UnknownTransitionError(index, len(self.transitions))
    return self.transitions[index]

  def require_state(self, state: str) -> None:
    if state not in self.state_index:
      raise UndeclaredStateError(state)

  def require_vector(
    self, values: Sequence[int], context: str = 'vector arity'
  ) -> None:
    if len(values) != self.dim:
      raise DimensionMismatchError(self.dim, len(values), context=context)


class Semantics(str, Enum):
  """How counters behave: clamped at zero or free over the integers."""

  NONNEGATIVE = 'nonnegative'
  INTEGER = 'integer'


@dataclass(frozen=True, eq=False)
class ZConfiguration:
  """A state paired with an integer vector."""

  state: str
  values: Vector

  def __post_init__(self) -> None:
    object.__setattr__(self, 'values', tuple(int(value) for value in self.values))

  def __eq__(self, other: object) -> bool:
    if not isinstance(other, ZConfiguration):
      return NotImplemented
    return self.state == other.state and self.values == other.values

  def __hash__(self) -> int:
    return hash((self.state, self.values))

  def covers(self, other: 'ZConfiguration') -> bool:
    """Same state and componentwise at least ``other``."""
    return self.state == other.state and dominates(self.values, other.values)

  def sort_key(self) -> Tuple[str, Vector]:
    return (self.state, self.values)

  def __str__(self) -> str:
    return f'{self.state}({",".join(str(v) for v in self.values)})'


@dataclass(frozen=True, eq=False)
class Configuration(ZConfiguration):
  """A state paired with a nonnegative vector."""

  def __post_init__(self) -> None:
    super().__post_init__()
    for counter, value in enumerate(self.values):
      if value < 0:
        raise CounterUnderflowError(self.state, counter, value)


AnyConfiguration = Union[Configuration, ZConfiguration]


def make_configuration(
  state: str, values: Sequence[int], semantics: Semantics
) -> AnyConfiguration:
  if semantics is Semantics.NONNEGATIVE:
    return Configuration(state, tuple(values))
  return ZConfiguration(state, tuple(values))


def step(
  configuration: AnyConfiguration,
  index: int,
  vass: Vass,
  semantics: Semantics = Semantics.NONNEGATIVE,
) -> AnyConfiguration:
  """Fire transition ``index`` from ``configuration``.

  Raises:
    StateMismatchError: The transition does not leave the configuration's state.
    CounterUnderflowError: A counter would turn negative under nonnegative semantics.
  """
  transition = vass.transition(index)
  if transition.source != configuration.state:
    raise StateMismatchError(transition.source, configuration.state)
  values = add_vectors(configuration.values, transition.effect)
  if semantics is Semantics.NONNEGATIVE:
    for counter, value in enumerate(values):
      if value < 0:
        raise CounterUnderflowError(configuration.state, counter, value)
    return Configuration(transition.target, values)
  return ZConfiguration(transition.target, values)


def enabled(configuration: AnyConfiguration, index: int, vass: Vass) -> bool:
  """Whether transition ``index`` can fire under nonnegative semantics."""
  transition = vass.transitions[index]
  return transition.source == configuration.state and all(
    value + delta >= 0 for value, delta in zip(configuration.values, transition.effect)
  )


def path_effect(vass: Vass, steps: Sequence[int]) -> Vector:
  """Sum of the effects along a connected sequence of transitions."""
  total = zero_vector(vass.dim)
  previous: Optional[Transition] = None
  for position, index in enumerate(steps):
    transition = vass.transition(index)
    if previous is not None and previous.target != transition.source:
      raise DisconnectedPathError(position, previous.target, transition.source)
    total = add_vectors(total, transition.effect)
    previous = transition
  return total


@dataclass(frozen=True)
class Run:
  """A replayed sequence of transitions together with its trace."""

  start: ZConfiguration
  steps: Tuple[int, ...]
  trace: Tuple[ZConfiguration, ...]
  semantics: Semantics = Semantics.NONNEGATIVE

  @property
  def end(self) -> ZConfiguration:
    return self.trace[-1]

  def __len__(self) -> int:
    return len(self.steps)

  @property
  def effect(self) -> Vector:
    return sub_vectors(self.end.values, self.start.values)


def replay(
  vass: Vass,
  start: AnyConfiguration,
  steps: Iterable[int],
  semantics: Semantics = Semantics.NONNEGATIVE,
) -> Run:
  """Execute ``steps`` from ``start`` and record every visited configuration."""
  vass.require_state(start.state)
  vass.require_vector(start.values, context='configuration arity')
  current = make_configuration(start.state, start.values, semantics)
  trace = [current]
  step_list = tuple(steps)
  for index in step_list:
    current = step(current, index, vass, semantics)
    trace.append(current)
  return Run(trace[0], step_list, tuple(trace), semantics)


@dataclass(frozen=True)
class SccDecomposition:
  """Strongly connected components in topological order of the condensation."""

  components: Tuple[Tuple[str, ...], ...]
  component_of: Dict[str, int] = field(compare=False)
  internal: Tuple[Tuple[int, ...], ...]
  bridges: Tuple[int, ...]
  line: bool

  def component_states(self, state: str) -> Tuple[str, ...]:
    return self.components[self.component_of[state]]


def _state_graph(vass: Vass) -> nx.DiGraph:
  graph = nx.DiGraph()
  graph.add_nodes_from(vass.states)
  for transition in vass.transitions:
    graph.add_edge(transition.source, transition.target)
  return graph


def scc_decompose(vass: Vass) -> SccDecomposition:
  """Split the states into SCCs, ordered topologically with ties by declaration."""
  graph = _state_graph(vass)
  condensed = nx.condensation(graph)
  order = vass.state_index

  def first_index(node: int) -> int:
    return min(order[state] for state in condensed.nodes[node]['members'])

  ordered = list(nx.lexicographical_topological_sort(condensed, key=first_index))
  components = tuple(
    tuple(sorted(condensed.nodes[node]['members'], key=order.__getitem__))
    for node in ordered
  )
  component_of = {
    state: position for position, states in enumerate(components) for state in states
  }

  internal: List[List[int]] = [[] for _ in components]
  bridges: List[int] = []
  pairs: Counter = Counter()
  for index, transition in enumerate(vass.transitions):
    source_component = component_of[transition.source]
    target_component = component_of[transition.target]
    if source_component == target_component:
      internal[source_component].append(index)
    else:
      bridges.append(index)
      pairs[source_component, target_component] += 1

  # exactly one bridge from each component to the next, and no others
  line = pairs == Counter((k, k + 1) for k in range(len(components) - 1))
  return SccDecomposition(
    components=components,
    component_of=component_of,
    internal=tuple(tuple(indices) for indices in internal),
    bridges=tuple(bridges),
    line=line,
  )


def project_counters(vass: Vass, keep: Iterable[int]) -> Vass:
  """Restrict every effect to the coordinates in ``keep`` (sorted, deduplicated)."""
  coordinates = sorted(set(keep))
  for coordinate in coordinates:
    if not 0 <= coordinate < vass.dim:
      raise CoordinateError(coordinate, vass.dim)
  return Vass(
    name=vass.name,
    dim=len(coordinates),
    states=vass.states,
    transitions=tuple(
      Transition(t.source, t.target, tuple(t.effect[i] for i in coordinates))
      for t in vass.transitions
    ),
  )


def simple_cycles(vass: Vass) -> List[Tuple[int, ...]]:
  """All simple cycles as transition-index sequences.

  Parallel transitions yield distinct cycles. Each cycle starts at its
  lowest-declared state; the list is sorted for reproducibility.
  """
  parallel: Dict[Tuple[str, str], List[int]] = {}
  for index, transition in enumerate(vass.transitions):
    parallel.setdefault((transition.source, transition.target), []).append(index)

  order = vass.state_index
  cycles: List[Tuple[int, ...]] = []
  for nodes in nx.simple_cycles(_state_graph(vass)):
    pivot = min(range(len(nodes)), key=lambda k: order[nodes[k]])
    rotated = nodes[pivot:] + nodes[:pivot]
    hops = [
      parallel[(rotated[k], rotated[(k + 1) % len(rotated)])]
      for k in range(len(rotated))
    ]
    cycles.extend(tuple(choice) for choice in itertools.product(*hops))
  cycles.sort(key=lambda cycle: (len(cycle), cycle))
  return cycles


def _strip_comment(line: str) -> str:
  return line.split('#', 1)[0].strip()


def parse_vass(text: str) -> Vass:
  """Parse the line-oriented VASS text format.

  Raises:
    VassSyntaxError: Unknown keyword, missing header or malformed number.
    DimensionMismatchError: A transition effect does not have ``dim`` entries.
    UndeclaredStateError: A transition names a state never declared.
  """
  name: Optional[str] = None
  dim: Optional[int] = None
  states: List[str] = []
  seen_states: Dict[str, int] = {}
  transitions: List[Tuple[int, Transition]] = []

  for line_number, raw_line in enumerate(text.splitlines(), start=1):
    line = _strip_comment(raw_line)
    if not line:
      continue
    keyword, *tokens = line.split()

    if keyword == 'vass':
      if name is not None:
        raise VassSyntaxError('duplicate vass header', line_number)
      if len(tokens) != 1:
        raise VassSyntaxError('expected: vass <name>', line_number)
      name = tokens[0]
    elif keyword == 'dim':
      if dim is not None:
        raise VassSyntaxError('duplicate dim declaration', line_number)
      if len(tokens) != 1:
        raise VassSyntaxError('expected: dim <d>', line_number)
      dim = _parse_int(tokens[0], line_number)
      if dim < 0:
        raise VassSyntaxError(f'negative dimension {dim}', line_number)
    elif keyword == 'state':
      if not tokens:
        raise VassSyntaxError('expected: state <id>...', line_number)
      for state in tokens:
        if state in seen_states:
          raise VassSyntaxError(f'duplicate state {state}', line_number)
        seen_states[state] = line_number
        states.append(state)
    elif keyword == 'trans':
      if dim is None:
        raise VassSyntaxError('trans before dim', line_number)
      if len(tokens) < 2:
        raise VassSyntaxError('expected: trans <src> <dst> <a1> ... <ad>', line_number)
      source, target, *raw_effect = tokens
      if len(raw_effect) != dim:
        raise DimensionMismatchError(dim, len(raw_effect), line_number=line_number)
      effect = tuple(_parse_int(token, line_number) for token in raw_effect)
      transitions.append((line_number, Transition(source, target, effect)))
    else:
      raise VassSyntaxError(f'unknown keyword {keyword!r}', line_number)

  if dim is None:
    raise VassSyntaxError('missing dim declaration')

  for line_number, transition in transitions:
    for endpoint in (transition.source, transition.target):
      if endpoint not in seen_states:
        raise UndeclaredStateError(endpoint, line_number)

  return Vass(
    name=name or 'vass',
    dim=dim,
    states=tuple(states),
    transitions=tuple(transition for _, transition in transitions),
  )


def _parse_int(token: str, line_number: Optional[int]) -> int:
  try:
    return int(token)
  except ValueError as e:
    raise VassSyntaxError(f'not an integer: {token!r}', line_number) from e


def serialize_vass(vass: Vass) -> str:
  """Canonical text: header, one state per line, transitions in stored order."""
  lines = [f'vass {vass.name}', f'dim {vass.dim}']
  lines.extend(f'state {state}' for state in vass.states)
  for transition in vass.transitions:
    effect = ' '.join(str(value) for value in transition.effect)
    lines.append(f'trans {transition.source} {transition.target} {effect}'.rstrip())
  return '\n'.join(lines) + '\n'


def load_vass(path: Union[str, Path]) -> Vass:
  with open(path, 'r', encoding='utf-8') as handle:
    return parse_vass(handle.read())


def parse_configuration(
  literal: str, vass: Vass, semantics: Semantics = Semantics.NONNEGATIVE
) -> AnyConfiguration:
  """Parse ``state:v1,v2,...`` against ``vass``."""
  state, separator, raw_values = literal.strip().rpartition(':')
  if not separator or not state:
    raise VassSyntaxError(f'expected state:v1,...,vd, got {literal!r}')
  tokens = [token for token in raw_values.split(',') if token.strip()]
  values = tuple(_parse_int(token.strip(), None) for token in tokens)
  vass.require_state(state)
  vass.require_vector(values, context='configuration arity')
  return make_configuration(state, values, semantics)
