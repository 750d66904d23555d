"""Naive ground-truth engines: exhaustive BFS, backward coverability, Karp-Miller."""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union

from .config import Limits, resolve_limits
from .exceptions import InvalidSystemError, ResourceCeilingError
from .vass import (
  Configuration,
  Run,
  Semantics,
  Vass,
  Vector,
  ZConfiguration,
  add_vectors,
  dominates,
  enabled,
  replay,
  zero_vector,
)

logger = logging.getLogger(__name__)

OMEGA = math.inf
OmegaValue = Union[int, float]
OmegaVector = Tuple[OmegaValue, ...]


@dataclass
class ReachResult:
  """Configurations reached within a box and depth cap, with BFS distances."""

  source: Configuration
  distances: Dict[Configuration, int]
  parents: Dict[Configuration, Tuple[Configuration, int]]
  truncated: bool = False

  def path_to(self, configuration: Configuration) -> Tuple[int, ...]:
    steps: List[int] = []
    while configuration != self.source:
      configuration, index = self.parents[configuration]
      steps.append(index)
    return tuple(reversed(steps))

  def distance_to_cover(self, target: ZConfiguration) -> Optional[int]:
    distances = [
      distance
      for configuration, distance in self.distances.items()
      if configuration.covers(target)
    ]
    return min(distances, default=None)


def bfs_reach(
  vass: Vass,
  source: Configuration,
  box: Union[int, Sequence[int]],
  depth: Optional[int] = None,
  limits: Optional[Limits] = None,
) -> ReachResult:
  """Every configuration reachable inside ``box`` in at most ``depth`` steps.

  Successors leaving the box are not recorded; ``truncated`` is set whenever
  the box or the depth cap cut something off.
  """
  settings = resolve_limits(limits)
  ceiling = (box,) * vass.dim if isinstance(box, int) else tuple(box)
  vass.require_vector(ceiling, context='box arity')
  start = Configuration(source.state, source.values)
  result = ReachResult(start, {start: 0}, {})
  if not dominates(ceiling, start.values):
    result.truncated = True
    return result

  queue = deque([start])
  while queue:
    configuration = queue.popleft()
    distance = result.distances[configuration]
    for index in vass.outgoing[configuration.state]:
      if not enabled(configuration, index, vass):
        continue
      if depth is not None and distance >= depth:
        result.truncated = True
        break
      transition = vass.transitions[index]
      values = add_vectors(configuration.values, transition.effect)
      if not dominates(ceiling, values):
        result.truncated = True
        continue
      child = Configuration(transition.target, values)
      if child in result.distances:
        continue
      result.distances[child] = distance + 1
      result.parents[child] = (configuration, index)
      if len(result.distances) > settings.node_budget:
        raise ResourceCeilingError('reachable configurations', settings.node_budget)
      queue.append(child)
  return result


@dataclass
class UpwardBasis:
  """Minimal elements, per state, of the configurations that can cover a target.

  ``layers[k]`` is the basis of the configurations that cover within ``k``
  steps; the last layer is the fixpoint.
  """

  target: Configuration
  layers: List[Dict[str, FrozenSet[Vector]]] = field(default_factory=list)

  @property
  def elements(self) -> Dict[str, FrozenSet[Vector]]:
    return self.layers[-1]

  def covers(self, configuration: ZConfiguration) -> bool:
    return self.distance(configuration) is not None

  def distance(self, configuration: ZConfiguration) -> Optional[int]:
    """Length of the shortest covering run from ``configuration``."""
    for steps, layer in enumerate(self.layers):
      if any(
        dominates(configuration.values, minimal)
        for minimal in layer.get(configuration.state, ())
      ):
        return steps
    return None


def _minimise(vectors: List[Vector]) -> FrozenSet[Vector]:
  unique = sorted(set(vectors))
  return frozenset(
    v for v in unique if not any(w != v and dominates(v, w) for w in unique)
  )


def backward_coverability(
  vass: Vass, target: Configuration, limits: Optional[Limits] = None
) -> UpwardBasis:
  """Predecessor-basis iteration up to its fixpoint."""
  settings = resolve_limits(limits)
  vass.require_state(target.state)
  vass.require_vector(target.values, context='configuration arity')
  current: Dict[str, FrozenSet[Vector]] = {target.state: frozenset([target.values])}
  basis = UpwardBasis(target, [current])
  work = 0
  while True:
    candidates: Dict[str, List[Vector]] = {
      state: list(vectors) for state, vectors in current.items()
    }
    for transition in vass.transitions:
      for minimal in current.get(transition.target, ()):
        predecessor = tuple(
          max(value - delta, 0) for value, delta in zip(minimal, transition.effect)
        )
        candidates.setdefault(transition.source, []).append(predecessor)
        work += 1
    if work > settings.node_budget:
      raise ResourceCeilingError('backward basis work', settings.node_budget)
    following = {state: _minimise(vectors) for state, vectors in candidates.items()}
    if following == current:
      logger.debug('backward coverability fixpoint after %d layers', len(basis.layers))
      return basis
    basis.layers.append(following)
    current = following


@dataclass(frozen=True)
class KarpMillerNode:
  index: int
  parent: Optional[int]
  transition: Optional[int]
  state: str
  values: OmegaVector


@dataclass
class KarpMillerTree:
  """Karp-Miller coverability tree; ``truncated`` when the node budget ran out."""

  nodes: List[KarpMillerNode]
  truncated: bool = False

  def _require_complete(self) -> None:
    if self.truncated:
      raise ResourceCeilingError('Karp-Miller nodes', len(self.nodes))

  def is_bounded(self) -> bool:
    self._require_complete()
    return not any(OMEGA in node.values for node in self.nodes)

  def counter_bounded(self, counter: int) -> bool:
    self._require_complete()
    return all(node.values[counter] != OMEGA for node in self.nodes)

  def simultaneous_omega(self, state: str) -> bool:
    """Whether some node at ``state`` has every component equal to ω."""
    self._require_complete()
    return any(
      node.state == state and all(value == OMEGA for value in node.values)
      for node in self.nodes
    )

  def max_values(self) -> Vector:
    """Largest finite value seen per counter."""
    self._require_complete()
    dim = len(self.nodes[0].values)
    finite = [
      [int(node.values[i]) for node in self.nodes if node.values[i] != OMEGA]
      for i in range(dim)
    ]
    return tuple(max(values, default=0) for values in finite)

  def dump(self) -> List[Dict[str, object]]:
    return [
      {
        'index': node.index,
        'parent': node.parent,
        'transition': node.transition,
        'state': node.state,
        'values': ['w' if value == OMEGA else int(value) for value in node.values],
      }
      for node in self.nodes
    ]


def _ancestors(
  nodes: List[KarpMillerNode], index: Optional[int]
) -> Iterator[KarpMillerNode]:
  while index is not None:
    yield nodes[index]
    index = nodes[index].parent


def karp_miller(
  vass: Vass, source: Configuration, limits: Optional[Limits] = None
) -> KarpMillerTree:
  """Breadth-first Karp-Miller construction with ω-acceleration."""
  settings = resolve_limits(limits)
  vass.require_state(source.state)
  vass.require_vector(source.values, context='configuration arity')
  root = KarpMillerNode(0, None, None, source.state, tuple(source.values))
  tree = KarpMillerTree([root])
  queue = deque([0])
  while queue:
    node = tree.nodes[queue.popleft()]
    if any(
      ancestor.state == node.state and ancestor.values == node.values
      for ancestor in _ancestors(tree.nodes, node.parent)
    ):
      continue
    for index in vass.outgoing[node.state]:
      transition = vass.transitions[index]
      if any(value + delta < 0 for value, delta in zip(node.values, transition.effect)):
        continue
      values = list(add_vectors(node.values, transition.effect))
      for ancestor in _ancestors(tree.nodes, node.index):
        if ancestor.state != transition.target:
          continue
        if all(a <= v for a, v in zip(ancestor.values, values)):
          values = [OMEGA if a < v else v for a, v in zip(ancestor.values, values)]
      if len(tree.nodes) >= settings.node_budget:
        tree.truncated = True
        logger.debug('Karp-Miller truncated at %d nodes', len(tree.nodes))
        return tree
      child = KarpMillerNode(
        len(tree.nodes), node.index, index, transition.target, tuple(values)
      )
      tree.nodes.append(child)
      queue.append(child.index)
  return tree


def z_unboundedness_search(
  vass: Vass, source: ZConfiguration, depth: int
) -> Optional[Run]:
  """Exhaustive search for a path followed by a closed walk of positive effect.

  Counters are integers, so only states constrain the prefix; the closed
  walk is searched over (state, effect) pairs with at most ``depth`` steps.
  """
  if depth < 0:
    raise InvalidSystemError(f'depth must be nonnegative, got {depth}')
  prefixes: Dict[str, Tuple[int, ...]] = {source.state: ()}
  queue = deque([source.state])
  while queue:
    state = queue.popleft()
    for index in vass.outgoing[state]:
      target = vass.transitions[index].target
      if target not in prefixes:
        prefixes[target] = prefixes[state] + (index,)
        queue.append(target)

  zero = zero_vector(vass.dim)
  for base, prefix in prefixes.items():
    seen = {(base, zero)}
    frontier: List[Tuple[str, Vector, Tuple[int, ...]]] = [(base, zero, ())]
    for _ in range(depth):
      next_frontier = []
      for state, effect, walk in frontier:
        for index in vass.outgoing[state]:
          transition = vass.transitions[index]
          total = add_vectors(effect, transition.effect)
          extended = walk + (index,)
          if transition.target == base and dominates(total, zero) and any(total):
            return replay(vass, source, prefix + extended, Semantics.INTEGER)
          if (transition.target, total) not in seen:
            seen.add((transition.target, total))
            next_frontier.append((transition.target, total, extended))
      frontier = next_frontier
  return None
