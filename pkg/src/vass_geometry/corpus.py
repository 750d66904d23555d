"""Instance families and reproducible random corpora."""

from __future__ import annotations

import json
import logging
import random
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Tuple, Union

from .exceptions import InvalidSystemError, ResourceCeilingError
from .geometry import cycle_space
from .vass import Transition, Vass, serialize_vass

logger = logging.getLogger(__name__)

FAMILIES: Tuple[str, ...] = ('random', 'line', 'lps', 'ladder', 'gscc1')
MAX_ATTEMPTS = 1000


def _unit(dim: int, coordinate: int, scale: int = 1) -> List[int]:
  vector = [0] * dim
  vector[coordinate] = scale
  return vector


def ladder_vass(d: int) -> Vass:
  """States ``q1..qd``; ``q1`` adds ``e1`` and ``qi`` turns ``2·e(i-1)`` into ``ei``.

  Covering ``qd`` with ``ed`` from ``q1`` with all counters zero takes
  ``2^d + d - 2`` steps.
  """
  if d < 1:
    raise InvalidSystemError(f'ladder needs d >= 1, got {d}')
  states = tuple(f'q{i}' for i in range(1, d + 1))
  transitions: List[Transition] = [Transition('q1', 'q1', tuple(_unit(d, 0)))]
  for i in range(1, d):
    effect = _unit(d, i)
    effect[i - 1] = -2
    transitions.append(Transition(states[i - 1], states[i], (0,) * d))
    transitions.append(Transition(states[i], states[i], tuple(effect)))
  return Vass(f'ladder{d}', d, states, tuple(transitions))


def path_scheme(k: int) -> Vass:
  """A line of ``k`` self-loops with triangular, hence independent, effects."""
  if k < 1:
    raise InvalidSystemError(f'path scheme needs k >= 1, got {k}')
  states = tuple(f'p{i}' for i in range(1, k + 1))
  transitions: List[Transition] = []
  for i, state in enumerate(states):
    effect = tuple([1] * (i + 1) + [0] * (k - i - 1))
    transitions.append(Transition(state, state, effect))
    if i + 1 < k:
      transitions.append(Transition(state, states[i + 1], (0,) * k))
  return Vass(f'lps{k}', k, states, tuple(transitions))


def _effect(rng: random.Random, dim: int, norm: int) -> Tuple[int, ...]:
  return tuple(rng.randint(-norm, norm) for _ in range(dim))


def random_vass(
  rng: random.Random,
  dim: int,
  states: int,
  transitions: int,
  norm: int,
  name: str = 'random',
) -> Vass:
  """Uniformly random endpoints and effects in ``[-norm, norm]``."""
  names = tuple(f'q{i}' for i in range(states))
  return Vass(
    name,
    dim,
    names,
    tuple(
      Transition(rng.choice(names), rng.choice(names), _effect(rng, dim, norm))
      for _ in range(transitions)
    ),
  )


def random_line_vass(
  rng: random.Random,
  dim: int,
  components: int,
  states_per_component: int,
  extra_transitions: int,
  norm: int,
  name: str = 'line',
) -> Vass:
  """A line of strongly connected components joined by single bridges.

  Each component is a ring plus ``extra_transitions`` random internal
  transitions.
  """
  blocks = [
    [f'c{c}s{s}' for s in range(states_per_component)] for c in range(components)
  ]
  transitions: List[Transition] = []
  for position, block in enumerate(blocks):
    for s, state in enumerate(block):
      following = block[(s + 1) % len(block)]
      transitions.append(Transition(state, following, _effect(rng, dim, norm)))
    for _ in range(extra_transitions):
      source, target = rng.choice(block), rng.choice(block)
      transitions.append(Transition(source, target, _effect(rng, dim, norm)))
    if position + 1 < len(blocks):
      bridge = _effect(rng, dim, norm)
      transitions.append(Transition(block[-1], blocks[position + 1][0], bridge))
  states = tuple(state for block in blocks for state in block)
  return Vass(name, dim, states, tuple(transitions))


def _rank_one_line(rng: random.Random, dim: int, norm: int, name: str) -> Vass:
  """Single-state components whose self-loops share one direction each."""
  states = tuple(f'c{c}' for c in range(rng.randint(1, 3)))
  transitions: List[Transition] = []
  for position, state in enumerate(states):
    direction = (0,) * dim
    while not any(direction):
      direction = _effect(rng, dim, 1)
    for _ in range(rng.randint(1, 2)):
      factor = rng.randint(-norm, norm)
      transitions.append(
        Transition(state, state, tuple(factor * value for value in direction))
      )
    if position + 1 < len(states):
      bridge = _effect(rng, dim, norm)
      transitions.append(Transition(state, states[position + 1], bridge))
  return Vass(name, dim, states, tuple(transitions))


@dataclass(frozen=True)
class CorpusEntry:
  file: str
  family: str
  d: int
  n: int
  M: int
  transitions: int
  g: int
  g_scc: int


def _instance(
  family: str,
  index: int,
  rng: random.Random,
  max_dim: int,
  max_states: int,
  max_transitions: int,
  max_norm: int,
) -> Vass:
  name = f'{family}-{index}'
  dim = rng.randint(1, max_dim)
  if family == 'random':
    return random_vass(
      rng,
      dim,
      rng.randint(1, max_states),
      rng.randint(1, max_transitions),
      rng.randint(1, max_norm),
      name,
    )
  if family == 'line':
    return random_line_vass(
      rng,
      dim,
      rng.randint(1, 3),
      rng.randint(1, max_states),
      rng.randint(0, 1),
      rng.randint(1, max_norm),
      name,
    )
  if family == 'lps':
    vass = path_scheme(1 + index % 5)
    return Vass(name, vass.dim, vass.states, vass.transitions)
  if family == 'ladder':
    vass = ladder_vass(2 + index % 4)
    return Vass(name, vass.dim, vass.states, vass.transitions)
  for _ in range(MAX_ATTEMPTS):
    candidate = _rank_one_line(rng, dim, max_norm, name)
    if cycle_space(candidate).scc_rank == 1:
      return candidate
  raise ResourceCeilingError('g_scc=1 sampling attempts', MAX_ATTEMPTS)


def gen_corpus(
  directory: Union[str, Path],
  seed: int,
  counts: Mapping[str, int],
  max_dim: int = 3,
  max_states: int = 3,
  max_transitions: int = 5,
  max_norm: int = 2,
) -> List[CorpusEntry]:
  """Write ``<family>-<i>.vass`` files plus ``manifest.json`` into ``directory``.

  Each instance draws from its own generator seeded by ``(seed, family, i)``,
  so the same arguments always produce byte-identical files. Nothing is
  written when every count is zero.
  """
  unknown = sorted(set(counts) - set(FAMILIES))
  if unknown:
    raise InvalidSystemError(f'unknown corpus families: {unknown}')
  if min((max_dim, max_states, max_transitions, max_norm)) < 1:
    raise InvalidSystemError('corpus size bounds must be positive')

  target = Path(directory)
  target.mkdir(parents=True, exist_ok=True)
  entries: List[CorpusEntry] = []
  for family in FAMILIES:
    for index in range(counts.get(family, 0)):
      rng = random.Random(f'{seed}:{family}:{index}')
      vass = _instance(
        family, index, rng, max_dim, max_states, max_transitions, max_norm
      )
      space = cycle_space(vass)
      file_name = f'{vass.name}.vass'
      (target / file_name).write_text(serialize_vass(vass), encoding='utf-8')
      entries.append(
        CorpusEntry(
          file=file_name,
          family=family,
          d=vass.dim,
          n=vass.n,
          M=vass.max_norm,
          transitions=len(vass.transitions),
          g=space.rank,
          g_scc=space.scc_rank,
        )
      )

  if entries:
    entries.sort(key=lambda entry: entry.file)
    manifest = [asdict(entry) for entry in entries]
    (target / 'manifest.json').write_text(
      json.dumps(manifest, indent=2, sort_keys=True) + '\n', encoding='utf-8'
    )
  logger.info('wrote %d instances to %s', len(entries), target)
  return entries


def family_summary(entries: List[CorpusEntry]) -> Dict[str, Dict[str, int]]:
  """Per family: instance count and the largest d, n, M, g and g_scc."""
  summary: Dict[str, Dict[str, int]] = {}
  for entry in entries:
    row = summary.setdefault(
      entry.family, {'count': 0, 'd': 0, 'n': 0, 'M': 0, 'g': 0, 'g_scc': 0}
    )
    row['count'] += 1
    for key in ('d', 'n', 'M', 'g', 'g_scc'):
      row[key] = max(row[key], getattr(entry, key))
  return summary
