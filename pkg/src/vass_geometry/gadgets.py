"""Counter programs with multiplication-triple zero tests, compiled to VASS.

A multiplication triple ``(b, c, d)`` starts at ``(B, C, B·C)``. Every update
of a guarded counter is compensated on ``b`` so that ``b`` plus the guarded
counters stays equal to ``B``; a zero test then moves values around a chain
through ``b`` while decrementing the sensor ``d``, and costs ``c`` two units.
``d`` can only reach zero when every zero test moved exactly ``2B``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple, Union

from .config import Limits
from .exceptions import (
  CompensationError,
  NameCollisionError,
  ProgramError,
  ResourceCeilingError,
)
from .geometry import scc_dimension
from .oracles import ReachResult, bfs_reach
from .vass import Configuration, Transition, Vass, project_counters

logger = logging.getLogger(__name__)

MAX_STAGES = 4
PRIMES: Dict[str, int] = {'a': 2, 'b': 3, 'c': 5, 'd': 7}


@dataclass(frozen=True)
class Update:
  """Add constants to counters in one step."""

  effects: Tuple[Tuple[str, int], ...]
  line_number: Optional[int] = field(default=None, compare=False)

  def changes(self) -> Dict[str, int]:
    table: Dict[str, int] = {}
    for counter, delta in self.effects:
      table[counter] = table.get(counter, 0) + delta
    return table


@dataclass(frozen=True)
class Loop:
  """Repeat ``body`` any number of times, possibly zero."""

  body: Tuple['Instruction', ...]
  line_number: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class Choice:
  """Run exactly one of ``branches``."""

  branches: Tuple[Tuple['Instruction', ...], ...]
  line_number: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class ZeroTest:
  """Test ``counter`` for zero with the triple whose sensor is ``sensor``."""

  counter: str
  sensor: str
  line_number: Optional[int] = field(default=None, compare=False)


Instruction = Union[Update, Loop, Choice, ZeroTest]


@dataclass(frozen=True)
class MultiplicationTriple:
  b: str
  c: str
  d: str
  guards: Tuple[str, ...]

  @property
  def roles(self) -> Tuple[str, str, str]:
    return (self.b, self.c, self.d)

  def chain(self, counter: str) -> Tuple[str, ...]:
    """Guards in zero-test order: the tested counter first."""
    return (counter,) + tuple(guard for guard in self.guards if guard != counter)


@dataclass(frozen=True)
class CounterProgram:
  counters: Tuple[str, ...]
  triples: Tuple[MultiplicationTriple, ...] = ()
  instructions: Tuple[Instruction, ...] = ()
  twins: Tuple[Tuple[str, str], ...] = ()

  def triple(
    self, sensor: str, line_number: Optional[int] = None
  ) -> MultiplicationTriple:
    for triple in self.triples:
      if triple.d == sensor:
        return triple
    raise ProgramError(f'no triple with sensor {sensor}', line_number)

  @property
  def sensors(self) -> Tuple[str, ...]:
    return tuple(triple.d for triple in self.triples)

  def validate(self) -> None:
    """Check declarations and every instruction.

    Raises:
      NameCollisionError: A counter is declared twice.
      ProgramError: Undeclared counters, malformed triples or twins, empty
        loops, or zero tests on unguarded counters.
    """
    duplicates = [name for name in self.counters if self.counters.count(name) > 1]
    if duplicates:
      raise NameCollisionError(duplicates)
    declared = set(self.counters)

    def require(name: str, line_number: Optional[int] = None) -> None:
      if name not in declared:
        raise ProgramError(f'undeclared counter {name}', line_number)

    sensors = [triple.d for triple in self.triples]
    if len(set(sensors)) != len(sensors):
      raise ProgramError('two triples share a sensor counter')
    all_roles = {role for triple in self.triples for role in triple.roles}
    for triple in self.triples:
      for name in triple.roles + triple.guards:
        require(name)
      if len(set(triple.roles)) != 3:
        raise ProgramError(f'triple {" ".join(triple.roles)} repeats a counter')
      if len(set(triple.guards)) != len(triple.guards):
        raise ProgramError(f'triple sensed by {triple.d} repeats a guard')
      if set(triple.guards) & all_roles:
        raise ProgramError(f'triple sensed by {triple.d} guards a triple counter')

    copies: Set[str] = set()
    for original, copy in self.twins:
      require(original)
      require(copy)
      if copy == original or copy in copies:
        raise ProgramError(f'twin copy {copy} declared twice')
      if copy in all_roles or any(copy in t.guards for t in self.triples):
        raise ProgramError(f'twin copy {copy} belongs to a triple')
      copies.add(copy)

    def walk(instructions: Sequence[Instruction]) -> None:
      for instruction in instructions:
        line = instruction.line_number
        if isinstance(instruction, Update):
          for counter, _ in instruction.effects:
            require(counter, line)
            if counter in copies:
              raise ProgramError(f'twin copy {counter} is updated directly', line)
        elif isinstance(instruction, Loop):
          if not instruction.body:
            raise ProgramError('empty loop', line)
          walk(instruction.body)
        elif isinstance(instruction, Choice):
          if not instruction.branches:
            raise ProgramError('choice without branches', line)
          for branch in instruction.branches:
            walk(branch)
        else:
          triple = self.triple(instruction.sensor, line)
          if instruction.counter not in triple.guards:
            raise ProgramError(
              f'{instruction.counter} is not guarded by the triple sensed by '
              f'{instruction.sensor}',
              line,
            )

    walk(self.instructions)


def mult(
  counter: str, temporary: str, factor: int, sensor: str
) -> Tuple[Instruction, ...]:
  """Multiply ``counter`` by ``factor`` through ``temporary``."""
  return (
    Loop((Update(((counter, -1), (temporary, 1))),)),
    ZeroTest(counter, sensor),
    Loop((Update(((counter, factor), (temporary, -1))),)),
    ZeroTest(temporary, sensor),
  )


@dataclass(frozen=True)
class _Block:
  kind: str
  line_number: int
  branches: List[List[Instruction]]


def _parse_delta(token: str, line_number: int) -> int:
  try:
    return int(token)
  except ValueError as e:
    raise ProgramError(f'not an integer: {token!r}', line_number) from e


def parse_program(text: str) -> CounterProgram:
  """Parse the counter-program text format.

  ``counter``, ``triple <b> <c> <d> guards <x>...`` and ``twin <a> <copy>``
  declare; ``add <x> <k> ...``, ``ztest <x> using <d>``, ``loop ... end`` and
  ``either ... or ... end`` are instructions. ``#`` starts a comment.
  """
  counters: List[str] = []
  triples: List[MultiplicationTriple] = []
  twins: List[Tuple[str, str]] = []
  stack = [_Block('program', 0, [[]])]

  for line_number, raw_line in enumerate(text.splitlines(), start=1):
    line = raw_line.split('#', 1)[0].strip()
    if not line:
      continue
    keyword, *tokens = line.split()
    body = stack[-1].branches[-1]

    if keyword == 'counter':
      if not tokens:
        raise ProgramError('expected: counter <name>...', line_number)
      counters.extend(tokens)
    elif keyword == 'triple':
      if len(tokens) < 4 or tokens[3] != 'guards':
        raise ProgramError('expected: triple <b> <c> <d> guards <x>...', line_number)
      triples.append(MultiplicationTriple(*tokens[:3], guards=tuple(tokens[4:])))
    elif keyword == 'twin':
      if len(tokens) != 2:
        raise ProgramError('expected: twin <counter> <copy>', line_number)
      twins.append((tokens[0], tokens[1]))
    elif keyword == 'add':
      if not tokens or len(tokens) % 2:
        raise ProgramError('expected: add <counter> <k> ...', line_number)
      effects = tuple(
        (tokens[i], _parse_delta(tokens[i + 1], line_number))
        for i in range(0, len(tokens), 2)
      )
      body.append(Update(effects, line_number))
    elif keyword == 'ztest':
      if len(tokens) != 3 or tokens[1] != 'using':
        raise ProgramError('expected: ztest <counter> using <sensor>', line_number)
      body.append(ZeroTest(tokens[0], tokens[2], line_number))
    elif keyword in ('loop', 'either'):
      if tokens:
        raise ProgramError(f'unexpected tokens after {keyword}', line_number)
      stack.append(_Block(keyword, line_number, [[]]))
    elif keyword == 'or':
      if stack[-1].kind != 'either':
        raise ProgramError("'or' outside either", line_number)
      stack[-1].branches.append([])
    elif keyword == 'end':
      block = stack.pop() if len(stack) > 1 else None
      if block is None:
        raise ProgramError("'end' without an open block", line_number)
      if block.kind == 'loop':
        instruction: Instruction = Loop(tuple(block.branches[0]), block.line_number)
      else:
        instruction = Choice(
          tuple(tuple(branch) for branch in block.branches), block.line_number
        )
      stack[-1].branches[-1].append(instruction)
    else:
      raise ProgramError(f'unknown keyword {keyword!r}', line_number)

  if len(stack) > 1:
    raise ProgramError(f'unclosed {stack[-1].kind}', stack[-1].line_number)
  program = CounterProgram(
    counters=tuple(counters),
    triples=tuple(triples),
    instructions=tuple(stack[0].branches[0]),
    twins=tuple(twins),
  )
  program.validate()
  return program


def format_program(program: CounterProgram) -> str:
  lines = [f'counter {" ".join(program.counters)}']
  for triple in program.triples:
    lines.append(f'triple {" ".join(triple.roles)} guards {" ".join(triple.guards)}')
  lines.extend(f'twin {original} {copy}' for original, copy in program.twins)

  def emit(instructions: Sequence[Instruction], depth: int) -> None:
    pad = '  ' * depth
    for instruction in instructions:
      if isinstance(instruction, Update):
        pairs = ' '.join(f'{name} {delta}' for name, delta in instruction.effects)
        lines.append(f'{pad}add {pairs}')
      elif isinstance(instruction, ZeroTest):
        lines.append(f'{pad}ztest {instruction.counter} using {instruction.sensor}')
      elif isinstance(instruction, Loop):
        lines.append(f'{pad}loop')
        emit(instruction.body, depth + 1)
        lines.append(f'{pad}end')
      else:
        lines.append(f'{pad}either')
        for position, branch in enumerate(instruction.branches):
          if position:
            lines.append(f'{pad}or')
          emit(branch, depth + 1)
        lines.append(f'{pad}end')

  emit(program.instructions, 0)
  return '\n'.join(lines) + '\n'


class _Lowering:
  """Turns instructions into control points and transitions.

  A loop whose body is one update becomes a self-loop; its point is then a
  loop head, and anything that would add another loop there first moves to a
  fresh point over a zero edge.
  """

  def __init__(self, universe: Sequence[str]):
    self.universe = tuple(universe)
    self.index = {name: position for position, name in enumerate(self.universe)}
    self.points: List[str] = []
    self.transitions: List[Transition] = []
    self.heads: Set[str] = set()
    self.program = CounterProgram(counters=self.universe)

  def fresh(self) -> str:
    point = f'p{len(self.points)}'
    self.points.append(point)
    return point

  def vector(self, changes: Mapping[str, int]) -> Tuple[int, ...]:
    table = dict(changes)
    for triple in self.program.triples:
      moved = sum(table.get(guard, 0) for guard in triple.guards)
      if not moved:
        continue
      if triple.b in table:
        if table[triple.b] != -moved:
          raise CompensationError(triple.b, triple.d)
      else:
        table[triple.b] = -moved
    for original, copy in self.program.twins:
      table[copy] = table.get(original, 0)
    effect = [0] * len(self.universe)
    for name, delta in table.items():
      effect[self.index[name]] += delta
    return tuple(effect)

  def edge(self, source: str, target: str, changes: Mapping[str, int]) -> None:
    self.transitions.append(Transition(source, target, self.vector(changes)))

  def leave_head(self, point: str) -> str:
    if point not in self.heads:
      return point
    following = self.fresh()
    self.edge(point, following, {})
    return following

  def self_loop(self, point: str, changes: Mapping[str, int]) -> str:
    point = self.leave_head(point)
    self.edge(point, point, changes)
    self.heads.add(point)
    return point

  def run(self, program: CounterProgram, point: str) -> str:
    missing = [name for name in program.counters if name not in self.index]
    if missing:
      raise ProgramError(f'counters outside the compiled universe: {missing}')
    self.program = program
    return self.lower(program.instructions, point)

  def lower(self, instructions: Sequence[Instruction], point: str) -> str:
    for instruction in instructions:
      point = self.lower_one(instruction, point)
    return point

  def lower_one(self, instruction: Instruction, point: str) -> str:
    if isinstance(instruction, Update):
      following = self.fresh()
      self.edge(point, following, instruction.changes())
      return following

    if isinstance(instruction, Loop):
      body = instruction.body
      if len(body) == 1 and isinstance(body[0], Update):
        return self.self_loop(point, body[0].changes())
      head = self.leave_head(point)
      self.heads.add(head)
      end = self.lower(body, head)
      self.edge(end, head, {})
      exit_point = self.fresh()
      self.edge(head, exit_point, {})
      return exit_point

    if isinstance(instruction, Choice):
      ends = []
      for branch in instruction.branches:
        start = self.fresh()
        self.edge(point, start, {})
        ends.append(self.lower(branch, start))
      join = self.fresh()
      for end in ends:
        self.edge(end, join, {})
      return join

    triple = self.program.triple(instruction.sensor, instruction.line_number)
    chain = triple.chain(instruction.counter)
    moves = [(chain[i + 1], chain[i]) for i in range(len(chain) - 1)]
    moves += [(triple.b, chain[-1]), (chain[-1], triple.b)]
    moves += [(chain[i], chain[i + 1]) for i in reversed(range(len(chain) - 1))]
    for source, target in moves:
      point = self.self_loop(point, {source: -1, target: 1, triple.d: -1})
    following = self.fresh()
    self.edge(point, following, {triple.c: -2})
    return following

  def build(self, name: str) -> Vass:
    return Vass(
      name=name,
      dim=len(self.universe),
      states=tuple(self.points),
      transitions=tuple(self.transitions),
    )


@dataclass(frozen=True)
class CompiledGadget:
  """A compiled program with its counter roles and acceptance condition.

  A run is accepting when it ends in ``final_state`` with every sensor at
  zero; ``target``, when present, is the same condition as one configuration
  after draining every other counter.
  """

  vass: Vass
  counter_index: Dict[str, int]
  sensors: Tuple[int, ...]
  source: Configuration
  final_state: str
  regions: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
  expected_g_scc: Optional[int] = None
  target: Optional[Configuration] = None

  def value(self, configuration: Configuration, counter: str) -> int:
    return configuration.values[self.counter_index[counter]]

  def accepts(self, configuration: Configuration) -> bool:
    return configuration.state == self.final_state and all(
      configuration.values[i] == 0 for i in self.sensors
    )

  def restrict(self, counters: Sequence[str]) -> 'CompiledGadget':
    """The same gadget keeping only ``counters``, in the given order.

    Every run of the gadget is a run of the restriction, so a property of all
    accepting configurations of the restriction holds for the gadget too.

    Raises:
      ProgramError: A name is not a counter of the gadget.
    """
    unknown = [name for name in counters if name not in self.counter_index]
    if unknown:
      raise ProgramError(f'cannot restrict to undeclared counters: {unknown}')
    coordinates = [self.counter_index[name] for name in counters]
    kept = {name: position for position, name in enumerate(counters)}
    names = list(self.counter_index)
    target = None
    if self.target is not None:
      target = Configuration(
        self.target.state, tuple(self.target.values[i] for i in coordinates)
      )
    return CompiledGadget(
      vass=project_counters(self.vass, coordinates),
      counter_index=kept,
      sensors=tuple(kept[names[i]] for i in self.sensors if names[i] in kept),
      source=Configuration(
        self.source.state, tuple(self.source.values[i] for i in coordinates)
      ),
      final_state=self.final_state,
      regions=dict(self.regions),
      target=target,
    )

  def role_map(self) -> Dict[str, object]:
    names = list(self.counter_index)
    return {
      'counters': names,
      'sensors': [names[i] for i in self.sensors],
      'source': str(self.source),
      'final_state': self.final_state,
      'target': None if self.target is None else str(self.target),
      'regions': {region: list(states) for region, states in self.regions.items()},
      'expected_g_scc': self.expected_g_scc,
    }


def _initial(
  universe: Sequence[str], initial: Optional[Mapping[str, int]]
) -> Tuple[int, ...]:
  values = dict(initial or {})
  unknown = sorted(set(values) - set(universe))
  if unknown:
    raise ProgramError(f'initial values for undeclared counters: {unknown}')
  return tuple(values.get(name, 0) for name in universe)


def compile_program(
  program: CounterProgram,
  initial: Optional[Mapping[str, int]] = None,
  name: str = 'program',
  expected_g_scc: Optional[int] = None,
) -> CompiledGadget:
  """Lower ``program`` to a VASS whose states are its control points.

  Raises:
    ProgramError: The program is malformed.
    CompensationError: An update sets a triple's ``b`` inconsistently with
      its guarded counters.
  """
  program.validate()
  lowering = _Lowering(program.counters)
  start = lowering.fresh()
  final = lowering.run(program, start)
  vass = lowering.build(name)
  index = dict(lowering.index)
  logger.debug(
    'compiled %s: %d points, %d transitions', name, vass.n, len(vass.transitions)
  )
  return CompiledGadget(
    vass=vass,
    counter_index=index,
    sensors=tuple(index[sensor] for sensor in program.sensors),
    source=Configuration(start, _initial(program.counters, initial)),
    final_state=final,
    regions={'program': tuple(vass.states)},
    expected_g_scc=expected_g_scc,
  )


def zero_test_program(
  guards: Sequence[str], counter: Optional[str] = None
) -> CounterProgram:
  """A single zero test on ``counter`` with triple ``(b, c, d)`` guarding ``guards``."""
  guards = tuple(guards)
  tested = counter if counter is not None else guards[0]
  collisions = [name for name in guards if name in ('b', 'c', 'd')]
  if collisions:
    raise NameCollisionError(collisions)
  return CounterProgram(
    counters=guards + ('b', 'c', 'd'),
    triples=(MultiplicationTriple('b', 'c', 'd', guards),),
    instructions=(ZeroTest(tested, 'd'),),
  )


@dataclass(frozen=True)
class StageNames:
  """Counter names one amplifier stage reads and writes."""

  first: Tuple[str, str, str]
  second: Tuple[str, str, str]
  output: Tuple[str, str, str]
  copy: Tuple[str, str, str]
  temporaries: Tuple[str, str]

  @classmethod
  def for_stage(cls, stage: int) -> 'StageNames':
    def triple(level: int, copy: int) -> Tuple[str, str, str]:
      return (f'b{level}_{copy}', f'c{level}_{copy}', f'd{level}_{copy}')

    return cls(
      first=triple(stage - 1, 1),
      second=triple(stage - 1, 2),
      output=triple(stage, 1),
      copy=triple(stage, 2),
      temporaries=(f't{stage}_1', f't{stage}_2'),
    )

  def all(self) -> Tuple[str, ...]:
    return self.first + self.second + self.output + self.copy + self.temporaries


def make_amplifier(
  stage: int, names: Optional[StageNames] = None, multiplier_exponent: int = 4
) -> CounterProgram:
  """Amplifier turning two copies of ``(B, C, B·C)`` into ``(2^B, C', 2^B·C')``.

  ``b'`` and ``d'`` are multiplied in separate loops, each zero-testing with
  its own input copy with the roles of ``b`` and ``c`` swapped. The outputs
  are twinned so the next stage again receives two identical triples.

  Raises:
    NameCollisionError: Two roles share a counter name.
  """
  if stage < 1:
    raise ProgramError(f'stage must be positive, got {stage}')
  names = names or StageNames.for_stage(stage)
  everything = names.all()
  duplicates = [name for name in everything if everything.count(name) > 1]
  if duplicates:
    raise NameCollisionError(duplicates)

  (b1, c1, d1), (b2, c2, d2) = names.first, names.second
  b_out, c_out, d_out = names.output
  t1, t2 = names.temporaries
  factor = 2**multiplier_exponent
  return CounterProgram(
    counters=everything,
    triples=(
      MultiplicationTriple(c1, b1, d1, (b_out, t1)),
      MultiplicationTriple(c2, b2, d2, (d_out, t2)),
    ),
    instructions=(
      Update(((b_out, 1),)),
      Loop((Update(((c_out, 1), (d_out, 1))),)),
      Loop(mult(b_out, t1, factor, d1)),
      Loop((Update(((c1, -1),)),)),
      Loop(mult(d_out, t2, factor, d2)),
      Loop((Update(((c2, -1),)),)),
    ),
    twins=tuple(zip(names.output, names.copy)),
  )


def make_old_amplifier(multiplier_exponent: int = 8) -> CounterProgram:
  """Single-triple amplifier multiplying ``b'`` and ``d'`` in the same loop."""
  factor = 2**multiplier_exponent
  return CounterProgram(
    counters=('b', 'c', 'd', 'b_out', 'c_out', 'd_out', 't'),
    triples=(MultiplicationTriple('c', 'b', 'd', ('b_out', 'd_out', 't')),),
    instructions=(
      Update((('b_out', 1),)),
      Loop((Update((('c_out', 1), ('d_out', 1))),)),
      Loop(mult('b_out', 't', factor, 'd') + mult('d_out', 't', factor, 'd')),
      Loop((Update((('c', -1),)),)),
    ),
  )


def _rename(instructions: Sequence[Instruction], table: Mapping[str, str]) -> tuple:
  renamed: List[Instruction] = []
  for instruction in instructions:
    if isinstance(instruction, Update):
      effects = tuple((table.get(n, n), k) for n, k in instruction.effects)
      renamed.append(Update(effects, instruction.line_number))
    elif isinstance(instruction, ZeroTest):
      renamed.append(
        ZeroTest(
          table.get(instruction.counter, instruction.counter),
          table.get(instruction.sensor, instruction.sensor),
          instruction.line_number,
        )
      )
    elif isinstance(instruction, Loop):
      renamed.append(Loop(_rename(instruction.body, table), instruction.line_number))
    else:
      branches = tuple(_rename(branch, table) for branch in instruction.branches)
      renamed.append(Choice(branches, instruction.line_number))
  return tuple(renamed)


def _attach_machine(
  machine: CounterProgram, output: Tuple[str, str, str]
) -> CounterProgram:
  """Rename the machine's single triple onto the last stage's output."""
  if len(machine.triples) > 1:
    raise ProgramError('the simulated machine may use at most one triple')
  if not machine.triples:
    return machine
  triple = machine.triples[0]
  table = dict(zip(triple.roles, output))
  return CounterProgram(
    counters=tuple(table.get(name, name) for name in machine.counters),
    triples=(MultiplicationTriple(*output, guards=triple.guards),),
    instructions=_rename(machine.instructions, table),
    twins=tuple((table.get(a, a), table.get(b, b)) for a, b in machine.twins),
  )


def build_tower_instance(
  n: int,
  machine: Optional[CounterProgram] = None,
  seed: Tuple[int, int] = (4, 2),
  multiplier_exponent: int = 4,
) -> CompiledGadget:
  """Chain ``n`` amplifier stages on fresh counters, then simulate ``machine``.

  The seed triple ``(B, C, B·C)`` is placed twice on the first stage's
  inputs. The target drains every non-sensor counter so acceptance becomes a
  single reachability target.

  Raises:
    ResourceCeilingError: More stages than ``MAX_STAGES``.
    NameCollisionError: A machine counter clashes with a stage counter.
  """
  if n < 1:
    raise ProgramError(f'need at least one stage, got {n}')
  if n > MAX_STAGES:
    raise ResourceCeilingError('amplifier stages', MAX_STAGES)
  seed_b, seed_c = seed
  stages = [
    make_amplifier(k, multiplier_exponent=multiplier_exponent) for k in range(1, n + 1)
  ]
  last = StageNames.for_stage(n)
  machine = _attach_machine(machine or CounterProgram(counters=()), last.output)
  machine.validate()

  universe: List[str] = []
  for program in stages:
    universe.extend(name for name in program.counters if name not in universe)
  clashes = [
    name for name in machine.counters if name in universe and name not in last.output
  ]
  if clashes:
    raise NameCollisionError(clashes)
  universe.extend(name for name in machine.counters if name not in universe)

  lowering = _Lowering(universe)
  start = lowering.fresh()
  point = start
  regions: Dict[str, Tuple[str, ...]] = {}
  sensors: List[str] = []
  parts = [(f'stage{k}', program) for k, program in enumerate(stages, start=1)]
  parts.append(('machine', machine))
  for region, program in parts:
    before = len(lowering.points)
    point = lowering.run(program, point)
    regions[region] = tuple(lowering.points[before:])
    sensors.extend(sensor for sensor in program.sensors if sensor not in sensors)
  regions['stage1'] = (start,) + regions['stage1']
  final = point

  before = len(lowering.points)
  lowering.program = CounterProgram(counters=tuple(universe))
  for name in universe:
    if name not in sensors:
      point = lowering.self_loop(point, {name: -1})
  regions['drain'] = tuple(lowering.points[before:])

  first = StageNames.for_stage(1)
  initial: Dict[str, int] = {}
  for b, c, d in (first.first, first.second):
    initial.update({b: seed_b, c: seed_c, d: seed_b * seed_c})
  vass = lowering.build(f'tower{n}')
  index = dict(lowering.index)
  logger.debug('tower instance n=%d: %d states, dim %d', n, vass.n, vass.dim)
  return CompiledGadget(
    vass=vass,
    counter_index=index,
    sensors=tuple(index[sensor] for sensor in sensors),
    source=Configuration(start, _initial(universe, initial)),
    final_state=final,
    regions=regions,
    expected_g_scc=4,
    target=Configuration(point, (0,) * len(universe)),
  )


def prime_encoding_program(operations: Sequence[Tuple[str, str]]) -> CounterProgram:
  """Two-counter program acting on ``x = 2^a·3^b·5^c·7^d``.

  ``inc`` multiplies ``x`` by the counter's prime, ``dec`` divides by it and
  ``zero`` checks that the prime does not divide ``x``. ``y`` is scratch
  space and both are guarded by the triple ``(b, c, d)``.
  """
  instructions: List[Instruction] = []
  for operation, counter in operations:
    if counter not in PRIMES:
      raise ProgramError(f'unknown encoded counter {counter!r}')
    prime = PRIMES[counter]
    restore = (Loop((Update((('y', -1), ('x', 1))),)), ZeroTest('y', 'd'))
    if operation == 'inc':
      instructions.append(Loop((Update((('x', -1), ('y', prime))),)))
      instructions.append(ZeroTest('x', 'd'))
      instructions.extend(restore)
    elif operation == 'dec':
      instructions.append(Loop((Update((('x', -prime), ('y', 1))),)))
      instructions.append(ZeroTest('x', 'd'))
      instructions.extend(restore)
    elif operation == 'zero':
      branches = tuple(
        (
          Loop((Update((('x', -prime), ('y', prime))),)),
          Update((('x', -remainder), ('y', remainder))),
          ZeroTest('x', 'd'),
        )
        + restore
        for remainder in range(1, prime)
      )
      instructions.append(Choice(branches))
    else:
      raise ProgramError(f'unknown operation {operation!r}')
  return CounterProgram(
    counters=('x', 'y', 'b', 'c', 'd'),
    triples=(MultiplicationTriple('b', 'c', 'd', ('x', 'y')),),
    instructions=tuple(instructions),
  )


def accepting_configurations(
  gadget: CompiledGadget,
  box: Union[int, Sequence[int]],
  limits: Optional[Limits] = None,
) -> List[Configuration]:
  """Every reachable accepting configuration, found exhaustively inside ``box``.

  Raises:
    ResourceCeilingError: Some reachable configuration left the box.
  """
  reach = _reach_in_box(gadget, box, limits)
  accepted = [c for c in reach.distances if gadget.accepts(c)]
  return sorted(accepted, key=lambda c: c.sort_key())


def reaches_target(
  gadget: CompiledGadget,
  box: Union[int, Sequence[int]],
  limits: Optional[Limits] = None,
) -> bool:
  """Whether the drained ``target`` is reachable, searched exhaustively in ``box``.

  Raises:
    ProgramError: The gadget has no target.
    ResourceCeilingError: Some reachable configuration left the box.
  """
  if gadget.target is None:
    raise ProgramError('gadget has no target configuration')
  return gadget.target in _reach_in_box(gadget, box, limits).distances


def _reach_in_box(
  gadget: CompiledGadget,
  box: Union[int, Sequence[int]],
  limits: Optional[Limits],
) -> ReachResult:
  reach = bfs_reach(gadget.vass, gadget.source, box, limits=limits)
  if reach.truncated:
    ceiling = box if isinstance(box, int) else max(box)
    raise ResourceCeilingError('verification box', ceiling)
  return reach


def check_scc_dimension(gadget: CompiledGadget) -> bool:
  """Whether the computed SCC dimension matches the expected one."""
  if gadget.expected_g_scc is None:
    return True
  return scc_dimension(gadget.vass) == gadget.expected_g_scc
