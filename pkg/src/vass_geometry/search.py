"""Bounded witness search: coverability, boundedness, uniform targets."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

from .bounds import (
  BOUNDED,
  COVER,
  SIMUB,
  THIN,
  BoundParameters,
  BoundTable,
  bounds,
)
from .config import Limits, resolve_limits
from .exceptions import BoundOverflowError, InvalidSystemError, ResourceCeilingError
from .geometry import geometric_dimension
from .solutions import inequality_solution_bound, small_solution_ineq
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
  max_norm,
  path_effect,
  replay,
  scc_decompose,
  simple_cycles,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchStatistics:
  nodes: int
  depth: int
  cap: Optional[int]


@dataclass(frozen=True)
class CoverWitness:
  """A run from the source whose last configuration covers ``target``."""

  run: Run
  target: Configuration
  statistics: SearchStatistics

  @property
  def length(self) -> int:
    return len(self.run)


@dataclass(frozen=True)
class SelfCoveringWitness:
  """A run with ``trace[split] < trace[end]`` in the same state."""

  run: Run
  split: int
  statistics: SearchStatistics

  @property
  def length(self) -> int:
    return len(self.run)

  def is_strict(self) -> bool:
    anchor, end = self.run.trace[self.split], self.run.end
    return (
      self.split < len(self.run)
      and anchor.state == end.state
      and dominates(end.values, anchor.values)
      and end.values != anchor.values
    )


@dataclass(frozen=True)
class BoundednessResult:
  bounded: bool
  witness: Optional[SelfCoveringWitness]
  exhausted: bool
  statistics: SearchStatistics


class NoPumpStatus(str, Enum):
  VACUOUS = 'vacuous'
  CONFIRMED = 'confirmed'
  VIOLATED = 'violated'
  INCONCLUSIVE = 'inconclusive'


@dataclass(frozen=True)
class NoPumpReport:
  """Outcome of checking that pumping every counter forces a uniform cover."""

  status: NoPumpStatus
  threshold: int
  height: Optional[int]
  length: Optional[int]
  horizon: Optional[int]
  premises: Dict[str, Run] = field(default_factory=dict)
  conclusions: Dict[str, Optional[CoverWitness]] = field(default_factory=dict)
  nodes: int = 0
  reason: str = ''


def _validate(vass: Vass, configuration: ZConfiguration) -> None:
  vass.require_state(configuration.state)
  vass.require_vector(configuration.values, context='configuration arity')


def _parameters(
  vass: Vass, target_norm: int = 0, threshold: int = 0
) -> BoundParameters:
  return BoundParameters(
    d=vass.dim,
    n=vass.n,
    M=vass.max_norm,
    g=geometric_dimension(vass),
    threshold=threshold,
    target_norm=target_norm,
  )


def _table(
  parameters: BoundParameters, families: Sequence[str], limits: Limits
) -> Optional[BoundTable]:
  try:
    return bounds(parameters, families, limits)
  except BoundOverflowError:
    logger.debug('bounds %s overflow for %s; searching uncapped', families, parameters)
    return None


def default_cover_cap(
  vass: Vass, target: ZConfiguration, limits: Optional[Limits] = None
) -> Optional[int]:
  """``min(L_g, K_g)``; ``None`` when neither fits under the bit ceiling."""
  settings = resolve_limits(limits)
  parameters = _parameters(vass, target_norm=max_norm(target.values))
  caps = []
  for family in (COVER, THIN):
    table = _table(parameters, [family], settings)
    if table is not None:
      caps.append((table.cover or table.thin)[-1])
  return min(caps) if caps else None


def default_uniform_cap(
  vass: Vass, threshold: int, limits: Optional[Limits] = None
) -> Optional[int]:
  parameters = _parameters(vass, threshold=threshold)
  table = _table(parameters, [SIMUB], resolve_limits(limits))
  return table.simub_l[-1] if table is not None else None


def default_boundedness_cap(
  vass: Vass, limits: Optional[Limits] = None
) -> Optional[int]:
  table = _table(_parameters(vass), [BOUNDED], resolve_limits(limits))
  return table.bounded[-1] if table is not None else None


# (anchor, current configuration, path, split index)
_AnchoredNode = Tuple[Optional[Configuration], Configuration, Tuple[int, ...], int]


class _Budget:
  def __init__(self, limit: int):
    self.limit = limit
    self.used = 0

  def spend(self, amount: int = 1) -> None:
    self.used += amount
    if self.used > self.limit:
      raise ResourceCeilingError('search nodes', self.limit)


def _strictly_covers(later: Configuration, earlier: Configuration) -> bool:
  return later.covers(earlier) and later.values != earlier.values


def _dominated(antichain: List[Vector], values: Vector) -> bool:
  return any(dominates(kept, values) for kept in antichain)


def _insert_maximal(antichain: List[Vector], values: Vector) -> None:
  antichain[:] = [kept for kept in antichain if not dominates(values, kept)]
  antichain.append(values)


def decide_coverability(
  vass: Vass,
  source: Configuration,
  target: Configuration,
  cap: Optional[int] = None,
  limits: Optional[Limits] = None,
) -> Optional[CoverWitness]:
  """Shortest run from ``source`` covering ``target`` within ``cap`` steps.

  Breadth-first over configurations; a configuration is dropped when an
  earlier one in the same state dominates it. Counters far above the target
  are clamped to ``y_i + M·(cap - depth)``, which no remaining step can
  exhaust. The witness is the lexicographically least transition sequence
  among the shortest ones.

  Args:
    cap: Maximum run length. Defaults to ``min(L_g, K_g)``; when those
      overflow the bit ceiling the search runs without a depth cap.

  Raises:
    ResourceCeilingError: The node budget ran out before an answer.
  """
  settings = resolve_limits(limits)
  _validate(vass, source)
  _validate(vass, target)
  if cap is None:
    cap = default_cover_cap(vass, target, settings)
  elif cap < 0:
    raise InvalidSystemError(f'cap must be nonnegative, got {cap}')
  logger.debug('coverability %s -> %s cap=%s', source, target, cap)

  step_norm = vass.max_norm

  def clamp(values: Vector, depth: int) -> Vector:
    if cap is None:
      return values
    room = step_norm * (cap - depth)
    return tuple(min(v, y + room) for v, y in zip(values, target.values))

  def finish(path: Tuple[int, ...], nodes: int, depth: int) -> CoverWitness:
    run = replay(vass, source, path)
    assert run.end.covers(target)
    logger.debug('coverability witness of length %d after %d nodes', len(path), nodes)
    return CoverWitness(run, target, SearchStatistics(nodes, depth, cap))

  start = clamp(source.values, 0)
  if source.state == target.state and dominates(start, target.values):
    return finish((), 1, 0)

  budget = _Budget(settings.node_budget)
  budget.spend()
  kept: Dict[str, List[Vector]] = {state: [] for state in vass.states}
  kept[source.state].append(start)
  frontier: List[Tuple[Configuration, Tuple[int, ...]]] = [
    (Configuration(source.state, start), ())
  ]
  depth = 0
  while frontier and (cap is None or depth < cap):
    depth += 1
    next_frontier: List[Tuple[Configuration, Tuple[int, ...]]] = []
    for configuration, path in frontier:
      for index in vass.outgoing[configuration.state]:
        if not enabled(configuration, index, vass):
          continue
        transition = vass.transitions[index]
        values = clamp(add_vectors(configuration.values, transition.effect), depth)
        if _dominated(kept[transition.target], values):
          continue
        budget.spend()
        _insert_maximal(kept[transition.target], values)
        child_path = path + (index,)
        if transition.target == target.state and dominates(values, target.values):
          return finish(child_path, budget.used, depth)
        next_frontier.append((Configuration(transition.target, values), child_path))
    frontier = next_frontier

  logger.debug('no covering run within cap %s (%d nodes)', cap, budget.used)
  return None


def decide_uniform_cover(
  vass: Vass,
  source: Configuration,
  state: str,
  threshold: int,
  cap: Optional[int] = None,
  limits: Optional[Limits] = None,
) -> Optional[CoverWitness]:
  """Covering run to ``state`` with every counter at least ``threshold``."""
  if threshold < 0:
    raise InvalidSystemError(f'threshold must be nonnegative, got {threshold}')
  vass.require_state(state)
  if cap is None:
    cap = default_uniform_cap(vass, threshold, limits)
  target = Configuration(state, (threshold,) * vass.dim)
  return decide_coverability(vass, source, target, cap=cap, limits=limits)


def decide_boundedness(
  vass: Vass,
  source: Configuration,
  cap: Optional[int] = None,
  limits: Optional[Limits] = None,
) -> BoundednessResult:
  """Search for a strictly self-covering run from ``source``.

  Nodes pair the current configuration with an optional anchor, the earlier
  configuration the run must strictly cover. Exact values are kept; nodes
  are only deduplicated, never pruned by domination.

  Raises:
    ResourceCeilingError: The node budget ran out before an answer.
  """
  settings = resolve_limits(limits)
  _validate(vass, source)
  if cap is None:
    cap = default_boundedness_cap(vass, settings)
  elif cap < 0:
    raise InvalidSystemError(f'cap must be nonnegative, got {cap}')
  logger.debug('boundedness from %s cap=%s', source, cap)

  budget = _Budget(settings.node_budget)
  start = Configuration(source.state, source.values)
  seen: Set[Tuple[Optional[Configuration], Configuration]] = {
    (None, start),
    (start, start),
  }
  budget.spend(2)
  frontier: List[_AnchoredNode] = [(None, start, (), 0), (start, start, (), 0)]
  depth = 0
  while frontier and (cap is None or depth < cap):
    depth += 1
    next_frontier: List[_AnchoredNode] = []
    for anchor, configuration, path, split in frontier:
      for index in vass.outgoing[configuration.state]:
        if not enabled(configuration, index, vass):
          continue
        transition = vass.transitions[index]
        child = Configuration(
          transition.target, add_vectors(configuration.values, transition.effect)
        )
        child_path = path + (index,)
        if anchor is not None and _strictly_covers(child, anchor):
          run = replay(vass, source, child_path)
          witness = SelfCoveringWitness(
            run, split, SearchStatistics(budget.used, depth, cap)
          )
          assert witness.is_strict()
          logger.debug('unbounded: witness of length %d split %d', depth, split)
          return BoundednessResult(False, witness, False, witness.statistics)
        candidates = [(anchor, child, split)]
        if anchor is None:
          candidates.append((child, child, depth))
        for node_anchor, node_child, node_split in candidates:
          key = (node_anchor, node_child)
          if key in seen:
            continue
          seen.add(key)
          budget.spend()
          next_frontier.append((node_anchor, node_child, child_path, node_split))
    frontier = next_frontier

  exhausted = not frontier
  logger.debug('bounded (exhausted=%s) after %d nodes', exhausted, budget.used)
  statistics = SearchStatistics(budget.used, depth, cap)
  return BoundednessResult(True, None, exhausted, statistics)


def check_no_pump_property(
  vass: Vass,
  source: Configuration,
  threshold: int,
  horizon: Optional[int] = None,
  limits: Optional[Limits] = None,
) -> NoPumpReport:
  """Check that pumping every counter past ``H_g`` implies a short uniform cover.

  Explores runs up to ``horizon`` steps (default ``4·L_g``) tracking which
  counters have reached ``H_g``. For every state where all of them have, a
  covering run to ``(G,...,G)`` of length at most ``L_g`` must exist.
  """
  settings = resolve_limits(limits)
  _validate(vass, source)
  parameters = _parameters(vass, threshold=threshold)
  try:
    table = bounds(parameters, [SIMUB], settings)
  except BoundOverflowError as e:
    return NoPumpReport(
      NoPumpStatus.INCONCLUSIVE, threshold, None, None, horizon, reason=str(e)
    )
  height, length = table.simub_h[-1], table.simub_l[-1]
  if horizon is None:
    horizon = 4 * length
  full = (1 << vass.dim) - 1
  step_norm = vass.max_norm

  def mask_of(values: Vector, mask: int) -> int:
    for counter, value in enumerate(values):
      if value >= height:
        mask |= 1 << counter
    return mask

  def clamp(values: Vector, mask: int, depth: int) -> Vector:
    room = step_norm * (horizon - depth)
    return tuple(
      min(value, max(room, 0)) if mask >> counter & 1 else value
      for counter, value in enumerate(values)
    )

  budget = _Budget(settings.node_budget)
  kept: Dict[str, List[Tuple[Vector, int]]] = {state: [] for state in vass.states}
  premises: Dict[str, Tuple[int, ...]] = {}

  def admit(configuration: Configuration, mask: int) -> bool:
    antichain = kept[configuration.state]
    for values, other in antichain:
      if other & mask == mask and dominates(values, configuration.values):
        return False
    antichain[:] = [
      (values, other)
      for values, other in antichain
      if not (mask & other == other and dominates(configuration.values, values))
    ]
    antichain.append((configuration.values, mask))
    return True

  start_mask = mask_of(source.values, 0)
  start = Configuration(source.state, clamp(source.values, start_mask, 0))
  admit(start, start_mask)
  budget.spend()
  frontier = [(start, start_mask, ())]
  if start_mask == full:
    premises[source.state] = ()

  try:
    depth = 0
    while frontier and depth < horizon:
      depth += 1
      next_frontier = []
      for configuration, mask, path in frontier:
        for index in vass.outgoing[configuration.state]:
          if not enabled(configuration, index, vass):
            continue
          transition = vass.transitions[index]
          raw = add_vectors(configuration.values, transition.effect)
          child_mask = mask_of(raw, mask)
          child = Configuration(transition.target, clamp(raw, child_mask, depth))
          if not admit(child, child_mask):
            continue
          budget.spend()
          child_path = path + (index,)
          if child_mask == full and child.state not in premises:
            premises[child.state] = child_path
          next_frontier.append((child, child_mask, child_path))
      frontier = next_frontier
  except ResourceCeilingError as e:
    return NoPumpReport(
      NoPumpStatus.INCONCLUSIVE,
      threshold,
      height,
      length,
      horizon,
      nodes=budget.used,
      reason=str(e),
    )

  premise_runs = {state: replay(vass, source, path) for state, path in premises.items()}
  if not premises:
    return NoPumpReport(
      NoPumpStatus.VACUOUS, threshold, height, length, horizon, nodes=budget.used
    )

  conclusions: Dict[str, Optional[CoverWitness]] = {}
  status = NoPumpStatus.CONFIRMED
  for state in sorted(premises, key=vass.state_index.__getitem__):
    try:
      witness = decide_uniform_cover(
        vass, source, state, threshold, cap=length, limits=settings
      )
    except ResourceCeilingError as e:
      return NoPumpReport(
        NoPumpStatus.INCONCLUSIVE,
        threshold,
        height,
        length,
        horizon,
        premises=premise_runs,
        conclusions=conclusions,
        nodes=budget.used,
        reason=str(e),
      )
    conclusions[state] = witness
    if witness is None:
      status = NoPumpStatus.VIOLATED
  logger.debug('no-pump check %s over %d premise states', status.value, len(premises))
  return NoPumpReport(
    status,
    threshold,
    height,
    length,
    horizon,
    premises=premise_runs,
    conclusions=conclusions,
    nodes=budget.used,
  )


def _shortest_paths(vass: Vass, origin: str) -> Dict[str, Tuple[int, ...]]:
  paths: Dict[str, Tuple[int, ...]] = {origin: ()}
  queue = deque([origin])
  while queue:
    state = queue.popleft()
    for index in vass.outgoing[state]:
      target = vass.transitions[index].target
      if target not in paths:
        paths[target] = paths[state] + (index,)
        queue.append(target)
  return paths


def _has_removable_cycle(states: Sequence[str]) -> bool:
  """Whether the walk ends with a simple cycle whose states the prefix already saw."""
  last = len(states) - 1
  closing = states[last]
  start = next((i for i in range(last - 1, -1, -1) if states[i] == closing), None)
  if start is None or start == 0:
    return False
  cycle = states[start:last]
  if len(set(cycle)) != len(cycle):
    return False
  return set(cycle) <= set(states[: start + 1])


def _skeletons(vass: Vass, base: str, members: Set[str]) -> Iterator[Tuple[int, ...]]:
  """Closed walks at ``base`` with no removable cycle infix, shortest first."""
  limit = vass.n * vass.n + vass.n
  found: List[Tuple[int, ...]] = []

  def extend(walk: List[int], states: List[str]) -> None:
    if walk and states[-1] == base:
      found.append(tuple(walk))
    if len(walk) == limit:
      return
    for index in vass.outgoing[states[-1]]:
      target = vass.transitions[index].target
      if target not in members:
        continue
      states.append(target)
      if not _has_removable_cycle(states):
        walk.append(index)
        extend(walk, states)
        walk.pop()
      states.pop()

  extend([], [base])
  found.sort(key=lambda walk: (len(walk), walk))
  return iter(found)


def _attach_cycles(
  vass: Vass,
  skeleton: Tuple[int, ...],
  cycles: Sequence[Tuple[int, ...]],
  multiplicities: Sequence[int],
) -> List[int]:
  """Splice ``cycle^k`` into ``skeleton`` at the first visit of one of its states."""
  inserts: Dict[int, List[int]] = {}
  sources = [vass.transitions[index].source for index in skeleton]
  for cycle, count in zip(cycles, multiplicities):
    if not count:
      continue
    cycle_sources = [vass.transitions[index].source for index in cycle]
    position = next(j for j, state in enumerate(sources) if state in cycle_sources)
    offset = cycle_sources.index(sources[position])
    rotated = list(cycle[offset:] + cycle[:offset])
    inserts.setdefault(position, []).extend(rotated * count)
  walk: List[int] = []
  for position, index in enumerate(skeleton):
    walk.extend(inserts.get(position, []))
    walk.append(index)
  return walk


def base_case_unbounded_ilp(
  vass: Vass, source: ZConfiguration, limits: Optional[Limits] = None
) -> Optional[SelfCoveringWitness]:
  """Unboundedness witness when every counter ranges over the integers.

  Such a witness is a path to some state ``p`` followed by a closed walk at
  ``p`` with a nonnegative, nonzero effect. For every reachable ``p`` and
  every short skeleton walk ``σ`` at ``p``, the system

      Σ x_θ·eff(θ) + x_σ·eff(σ) ≥ 0,   Σ_i (same)[i] ≥ 1,   x_σ ≥ 1

  over the simple cycles ``θ`` inside the states ``σ`` visits is solved with
  the rank-based cap, which is complete for the system.
  """
  settings = resolve_limits(limits)
  _validate(vass, source)
  decomposition = scc_decompose(vass)
  all_cycles = simple_cycles(vass)
  systems = 0

  for base, prefix in _shortest_paths(vass, source.state).items():
    members = set(decomposition.component_states(base))
    tried: Set[Tuple[frozenset, Vector]] = set()
    for skeleton in _skeletons(vass, base, members):
      visited = frozenset(vass.transitions[index].source for index in skeleton)
      skeleton_effect = path_effect(vass, skeleton)
      if (visited, skeleton_effect) in tried:
        continue
      tried.add((visited, skeleton_effect))

      cycles = [
        cycle
        for cycle in all_cycles
        if all(vass.transitions[index].source in visited for index in cycle)
      ]
      effects = [path_effect(vass, cycle) for cycle in cycles] + [skeleton_effect]
      matrix = [[effect[i] for effect in effects] for i in range(vass.dim)]
      matrix.append([sum(effect) for effect in effects])
      matrix.append([0] * len(cycles) + [1])
      rhs = [0] * vass.dim + [1, 1]
      systems += 1
      solution = small_solution_ineq(
        matrix, rhs, max(inequality_solution_bound(matrix, rhs), 1), settings
      )
      if solution is None:
        continue

      *counts, repeats = solution
      closed = _attach_cycles(vass, skeleton, cycles, counts) + list(skeleton) * (
        repeats - 1
      )
      run = replay(vass, source, prefix + tuple(closed), Semantics.INTEGER)
      witness = SelfCoveringWitness(
        run, len(prefix), SearchStatistics(systems, len(run), None)
      )
      assert witness.is_strict()
      logger.debug('integer unboundedness witness after %d systems', systems)
      return witness

  logger.debug('no integer unboundedness witness (%d systems)', systems)
  return None
