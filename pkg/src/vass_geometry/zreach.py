"""Integer reachability through Euler flows, and short Z-run probes."""

from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from .config import Limits, resolve_limits
from .exceptions import InvalidSystemError, ResourceCeilingError
from .geometry import geometric_dimension
from .solutions import equation_solution_cap, small_solution_eq
from .vass import (
  Run,
  Semantics,
  Vass,
  ZConfiguration,
  add_vectors,
  max_norm,
  replay,
  sub_vectors,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowSolution:
  """Transition multiplicities forming an Euler path from ``source`` to ``target``."""

  support: Tuple[int, ...]
  multiplicities: Dict[int, int]
  source: str
  target: str

  @property
  def size(self) -> int:
    return sum(self.multiplicities.values())

  def as_pairs(self) -> List[Tuple[int, int]]:
    return [(index, self.multiplicities[index]) for index in self.support]


def _validate(vass: Vass, configuration: ZConfiguration) -> None:
  vass.require_state(configuration.state)
  vass.require_vector(configuration.values, context='configuration arity')


def _connected_support(
  vass: Vass, support: Sequence[int], source: str, target: str
) -> Optional[List[str]]:
  """Support states, if connected around ``source`` and touching ``target``."""
  graph = nx.MultiGraph()
  graph.add_node(source)
  for index in support:
    transition = vass.transitions[index]
    graph.add_edge(transition.source, transition.target)
  if target not in graph or not nx.is_connected(graph):
    return None
  return sorted(graph.nodes, key=vass.state_index.__getitem__)


def _flow_system(
  vass: Vass,
  support: Sequence[int],
  states: Sequence[str],
  source: ZConfiguration,
  target: ZConfiguration,
) -> Tuple[List[List[int]], List[int]]:
  """Rows over ``y`` where each multiplicity is ``1 + y``."""
  matrix: List[List[int]] = []
  rhs: List[int] = []
  for state in states:
    row = []
    for index in support:
      transition = vass.transitions[index]
      row.append(int(transition.target == state) - int(transition.source == state))
    demand = int(state == target.state) - int(state == source.state)
    matrix.append(row)
    rhs.append(demand - sum(row))
  displacement = sub_vectors(target.values, source.values)
  for counter in range(vass.dim):
    row = [vass.transitions[index].effect[counter] for index in support]
    matrix.append(row)
    rhs.append(displacement[counter] - sum(row))
  return matrix, rhs


def euler_walk(vass: Vass, flow: FlowSolution) -> Tuple[int, ...]:
  """Hierholzer's walk using every transition exactly its multiplicity.

  Edges leave each state in transition-index order.
  """
  pending: Dict[str, deque] = {}
  for index in flow.support:
    source = vass.transitions[index].source
    pending.setdefault(source, deque()).extend([index] * flow.multiplicities[index])

  stack: List[Tuple[str, Optional[int]]] = [(flow.source, None)]
  walk: List[int] = []
  while stack:
    state, edge = stack[-1]
    edges = pending.get(state)
    if edges:
      index = edges.popleft()
      stack.append((vass.transitions[index].target, index))
    else:
      stack.pop()
      if edge is not None:
        walk.append(edge)
  walk.reverse()
  if len(walk) != flow.size:
    raise InvalidSystemError('flow is not connected')
  return tuple(walk)


def find_flow(
  vass: Vass,
  source: ZConfiguration,
  target: ZConfiguration,
  cap: Optional[int] = None,
  shortest: bool = False,
  limits: Optional[Limits] = None,
) -> Optional[FlowSolution]:
  """Flow on a connected support that moves ``source`` to ``target``.

  Supports are tried by size, then lexicographically. With ``shortest`` every
  support is solved and the flow of least total size wins, which makes the
  resulting Z-run a shortest one.

  Raises:
    ResourceCeilingError: The VASS has more transitions than the support
      enumeration allows, or the solver timed out.
  """
  settings = resolve_limits(limits)
  _validate(vass, source)
  _validate(vass, target)
  if cap is not None and cap < 1:
    raise InvalidSystemError(f'cap must be at least 1, got {cap}')
  if source == target:
    return FlowSolution((), {}, source.state, target.state)
  count = len(vass.transitions)
  if count > settings.max_support_transitions:
    raise ResourceCeilingError('support transitions', settings.max_support_transitions)

  best: Optional[FlowSolution] = None
  systems = 0
  for size in range(1, count + 1):
    if best is not None and size >= best.size:
      break
    for support in itertools.combinations(range(count), size):
      states = _connected_support(vass, support, source.state, target.state)
      if states is None:
        continue
      matrix, rhs = _flow_system(vass, support, states, source, target)
      systems += 1
      bound = cap if cap is not None else equation_solution_cap(matrix, rhs)
      solution = small_solution_eq(matrix, rhs, bound, settings)
      if solution is None:
        continue
      flow = FlowSolution(
        support,
        {index: 1 + extra for index, extra in zip(support, solution)},
        source.state,
        target.state,
      )
      if not shortest:
        logger.debug('flow of size %d after %d systems', flow.size, systems)
        return flow
      if best is None or (flow.size, flow.support) < (best.size, best.support):
        best = flow
  logger.debug('flow search over %d systems -> %s', systems, best)
  return best


def decide_zreach(
  vass: Vass,
  source: ZConfiguration,
  target: ZConfiguration,
  cap: Optional[int] = None,
  shortest: bool = False,
  limits: Optional[Limits] = None,
) -> Optional[Run]:
  """A Z-run from ``source`` to ``target``, or ``None`` when none exists.

  Args:
    cap: Per-support multiplicity cap; defaults to ``(nN+1)^d·(d+1)`` of the
      support's system.
    shortest: Solve every support and return a shortest Z-run.
  """
  flow = find_flow(vass, source, target, cap=cap, shortest=shortest, limits=limits)
  if flow is None:
    return None
  run = replay(vass, source, euler_walk(vass, flow), Semantics.INTEGER)
  assert run.end == target
  return run


def shortest_zrun(
  vass: Vass,
  source: ZConfiguration,
  target: ZConfiguration,
  cap: int,
  limits: Optional[Limits] = None,
) -> Optional[Run]:
  """Breadth-first search over Z-configurations up to ``cap`` steps.

  Raises:
    ResourceCeilingError: The node budget ran out before an answer.
  """
  settings = resolve_limits(limits)
  _validate(vass, source)
  _validate(vass, target)
  if cap < 0:
    raise InvalidSystemError(f'cap must be nonnegative, got {cap}')
  start = ZConfiguration(source.state, source.values)
  goal = ZConfiguration(target.state, target.values)
  if start == goal:
    return replay(vass, start, (), Semantics.INTEGER)

  parents: Dict[ZConfiguration, Tuple[ZConfiguration, int]] = {}
  seen = {start}
  frontier = [start]
  for _ in range(cap):
    next_frontier: List[ZConfiguration] = []
    for configuration in frontier:
      for index in vass.outgoing[configuration.state]:
        transition = vass.transitions[index]
        child = ZConfiguration(
          transition.target, add_vectors(configuration.values, transition.effect)
        )
        if child in seen:
          continue
        seen.add(child)
        parents[child] = (configuration, index)
        if len(seen) > settings.node_budget:
          raise ResourceCeilingError('Z-configurations', settings.node_budget)
        if child == goal:
          steps: List[int] = []
          while child != start:
            child, step_index = parents[child]
            steps.append(step_index)
          return replay(vass, start, reversed(steps), Semantics.INTEGER)
        next_frontier.append(child)
    frontier = next_frontier
  return None


@dataclass(frozen=True)
class ZRunProbe:
  """Shortest Z-run length measured against ``scale^{6g+1}``."""

  run: Optional[Run]
  scale: int
  g: int
  ratio: Optional[Fraction]
  ceiling: int

  @property
  def length(self) -> Optional[int]:
    return None if self.run is None else len(self.run)

  @property
  def within_ceiling(self) -> bool:
    return self.ratio is None or self.ratio <= self.ceiling


def probe_zrun(
  vass: Vass,
  source: ZConfiguration,
  target: ZConfiguration,
  cap: Optional[int] = None,
  limits: Optional[Limits] = None,
) -> ZRunProbe:
  """Measure the shortest Z-run; BFS up to ``cap``, else the shortest flow."""
  settings = resolve_limits(limits)
  if cap is None:
    run = decide_zreach(vass, source, target, shortest=True, limits=settings)
  else:
    run = shortest_zrun(vass, source, target, cap, limits=settings)
  scale = max(vass.size, max_norm(source.values), max_norm(target.values))
  g = geometric_dimension(vass)
  ratio = None if run is None else Fraction(len(run), scale ** (6 * g + 1))
  return ZRunProbe(run, scale, g, ratio, settings.zrun_ratio_ceiling)
