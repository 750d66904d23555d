"""Reports shared by every command: one fact set, a JSON and a rich rendering.

Each ``*_report`` builder calls the analysis modules directly; the command
line only parses its arguments, calls a builder and prints the result.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Union

from rich.console import Console
from rich.table import Table

from .bounds import (
  BOUNDED,
  COVER,
  SIMUB,
  THIN,
  BoundParameters,
  bounds,
  zrun_bound,
)
from .config import Limits, resolve_limits
from .corpus import CorpusEntry, family_summary
from .exceptions import BoundOverflowError, ResourceCeilingError
from .gadgets import CompiledGadget, accepting_configurations
from .geometry import (
  CleanBasis,
  CycleSpace,
  classify_small,
  classify_thin,
  cycle_space,
)
from .oracles import backward_coverability, bfs_reach, karp_miller
from .search import (
  NoPumpStatus,
  check_no_pump_property,
  decide_boundedness,
  decide_coverability,
  decide_uniform_cover,
  default_boundedness_cap,
  default_cover_cap,
  default_uniform_cap,
)
from .vass import Configuration, Run, Vass, ZConfiguration, max_norm, scc_decompose
from .zreach import decide_zreach, probe_zrun

# Integers wider than this are reported by bit length only.
MAX_PRINTED_BITS = 1024


class Status(str, Enum):
  OK = 'ok'
  INCONCLUSIVE = 'inconclusive'
  ERROR = 'error'


def digest(text: Union[str, bytes]) -> str:
  """SHA-256 of the analysed input."""
  data = text.encode('utf-8') if isinstance(text, str) else text
  return hashlib.sha256(data).hexdigest()


def plain(value: object) -> object:
  """Convert analysis values into JSON-compatible data."""
  if isinstance(value, Enum):
    return value.value
  if isinstance(value, bool) or value is None or isinstance(value, (str, float)):
    return value
  if isinstance(value, int):
    if value.bit_length() > MAX_PRINTED_BITS:
      return f'<{value.bit_length()}-bit integer>'
    return value
  if isinstance(value, Fraction):
    return str(value)
  if isinstance(value, Run):
    return {
      'start': str(value.start),
      'steps': list(value.steps),
      'end': str(value.end),
      'length': len(value),
    }
  if isinstance(value, ZConfiguration):
    return str(value)
  if isinstance(value, CleanBasis):
    return {
      'distinguished': list(value.distinguished),
      'rows': [[str(entry) for entry in row] for row in value.rows],
    }
  if isinstance(value, dict):
    return {str(key): plain(item) for key, item in value.items()}
  if isinstance(value, (list, tuple, set, frozenset)):
    items = sorted(value) if isinstance(value, (set, frozenset)) else value
    return [plain(item) for item in items]
  return str(value)


@dataclass
class Report:
  """Everything a command decided, the caps it used and what it cost."""

  command: List[str] = field(default_factory=list)
  digest: str = ''
  status: Status = Status.OK
  verdicts: Dict[str, object] = field(default_factory=dict)
  witnesses: Dict[str, object] = field(default_factory=dict)
  bounds: Dict[str, object] = field(default_factory=dict)
  statistics: Dict[str, object] = field(default_factory=dict)
  reason: str = ''

  def stamp(self, command: Sequence[str], text: Union[str, bytes]) -> 'Report':
    self.command = list(command)
    self.digest = digest(text)
    return self

  @property
  def inconclusive(self) -> bool:
    return self.status is Status.INCONCLUSIVE

  def to_dict(self) -> Dict[str, object]:
    data = {
      'command': list(self.command),
      'digest': self.digest,
      'status': self.status.value,
      'verdicts': plain(self.verdicts),
      'witnesses': plain(self.witnesses),
      'bounds': plain(self.bounds),
      'statistics': plain(self.statistics),
    }
    if self.reason:
      data['reason'] = self.reason
    return data

  def to_json(self) -> str:
    return json.dumps(self.to_dict(), indent=2, sort_keys=True)

  def render(self, console: Console) -> None:
    """Pretty rendering of exactly the facts in ``to_dict``."""
    data = self.to_dict()
    colour = {'ok': 'green', 'inconclusive': 'yellow', 'error': 'red'}[data['status']]
    title = ' '.join(data['command']) or 'report'
    console.print(f'[bold]{title}[/bold]  [{colour}]{data["status"]}[/{colour}]')
    if data['digest']:
      console.print(f'[dim]input sha256 {data["digest"]}[/dim]')
    if 'reason' in data:
      console.print(f'[yellow]{data["reason"]}[/yellow]')
    for section in ('verdicts', 'bounds', 'statistics'):
      if data[section]:
        console.print(_section_table(section, data[section]))
    for name, witness in data['witnesses'].items():
      console.print(f'[bold cyan]{name}[/bold cyan]')
      console.print(json.dumps(witness, indent=2, sort_keys=True), highlight=False)


def _section_table(title: str, values: Dict[str, object]) -> Table:
  table = Table(title=title, show_header=True, header_style='bold blue')
  table.add_column('Field', style='cyan')
  table.add_column('Value', style='white')
  for key in sorted(values):
    value = values[key]
    text = value if isinstance(value, str) else json.dumps(value)
    table.add_row(key, text)
  return table


def _timed(body: Callable[[Report], None]) -> Report:
  """Run ``body`` on a fresh report; a resource ceiling makes it inconclusive."""
  report = Report()
  started = time.perf_counter()
  try:
    body(report)
  except ResourceCeilingError as e:
    report.status = Status.INCONCLUSIVE
    report.reason = str(e)
  report.statistics['seconds'] = round(time.perf_counter() - started, 6)
  return report


def _sequences_or_overflow(
  parameters: BoundParameters, family: str, limits: Limits
) -> Dict[str, object]:
  try:
    table = bounds(parameters, [family], limits)
  except BoundOverflowError as e:
    return {family: f'overflow: {e}'}
  return dict(table.sequences())


def _parameters(
  vass: Vass, target_norm: int = 0, threshold: int = 0
) -> BoundParameters:
  return BoundParameters(
    d=vass.dim,
    n=vass.n,
    M=vass.max_norm,
    g=cycle_space(vass).rank,
    threshold=threshold,
    target_norm=target_norm,
  )


def dimension_report(vass: Vass) -> Report:
  def body(report: Report) -> None:
    space = cycle_space(vass)
    decomposition = scc_decompose(vass)
    report.verdicts.update(
      d=vass.dim,
      n=vass.n,
      M=vass.max_norm,
      size=vass.size,
      g=space.rank,
      g_scc=space.scc_rank,
      scc_ranks=space.scc_ranks,
      line=decomposition.line,
    )
    report.witnesses['basis'] = space.basis
    report.witnesses['components'] = [
      {'states': component.states, 'rank': component.rank}
      for component in space.components
    ]

  return _timed(body)


def cover_report(
  vass: Vass,
  source: Configuration,
  target: Configuration,
  cap: Optional[int] = None,
  limits: Optional[Limits] = None,
) -> Report:
  settings = resolve_limits(limits)

  def body(report: Report) -> None:
    parameters = _parameters(vass, target_norm=max_norm(target.values))
    used = cap if cap is not None else default_cover_cap(vass, target, settings)
    report.bounds['cap'] = used
    for family in (COVER, THIN):
      report.bounds.update(_sequences_or_overflow(parameters, family, settings))
    witness = decide_coverability(vass, source, target, cap=used, limits=settings)
    report.verdicts['coverable'] = witness is not None
    if witness is not None:
      report.verdicts['length'] = witness.length
      report.witnesses['run'] = witness.run
      report.statistics.update(
        nodes=witness.statistics.nodes, depth=witness.statistics.depth
      )

  return _timed(body)


def bounded_report(
  vass: Vass,
  source: Configuration,
  cap: Optional[int] = None,
  limits: Optional[Limits] = None,
) -> Report:
  settings = resolve_limits(limits)

  def body(report: Report) -> None:
    used = cap if cap is not None else default_boundedness_cap(vass, settings)
    report.bounds['cap'] = used
    report.bounds.update(_sequences_or_overflow(_parameters(vass), BOUNDED, settings))
    result = decide_boundedness(vass, source, cap=used, limits=settings)
    report.verdicts.update(bounded=result.bounded, exhausted=result.exhausted)
    if result.witness is not None:
      report.verdicts['length'] = result.witness.length
      report.witnesses['run'] = result.witness.run
      report.witnesses['split'] = result.witness.split
    report.statistics.update(
      nodes=result.statistics.nodes, depth=result.statistics.depth
    )

  return _timed(body)


def simub_report(
  vass: Vass,
  source: Configuration,
  state: str,
  threshold: int,
  cap: Optional[int] = None,
  limits: Optional[Limits] = None,
) -> Report:
  settings = resolve_limits(limits)

  def body(report: Report) -> None:
    parameters = _parameters(vass, threshold=threshold)
    used = cap if cap is not None else default_uniform_cap(vass, threshold, settings)
    report.bounds['cap'] = used
    report.bounds.update(_sequences_or_overflow(parameters, SIMUB, settings))
    witness = decide_uniform_cover(
      vass, source, state, threshold, cap=used, limits=settings
    )
    report.verdicts['coverable'] = witness is not None
    if witness is not None:
      report.verdicts['length'] = witness.length
      report.witnesses['run'] = witness.run
      report.statistics['nodes'] = witness.statistics.nodes

  return _timed(body)


def nopump_report(
  vass: Vass,
  source: Configuration,
  threshold: int,
  horizon: Optional[int] = None,
  limits: Optional[Limits] = None,
) -> Report:
  def body(report: Report) -> None:
    result = check_no_pump_property(vass, source, threshold, horizon, limits)
    report.verdicts['no_pump'] = result.status
    report.bounds.update(
      height=result.height, length=result.length, horizon=result.horizon
    )
    report.witnesses['premises'] = result.premises
    report.witnesses['conclusions'] = {
      state: None if witness is None else witness.run
      for state, witness in result.conclusions.items()
    }
    report.statistics['nodes'] = result.nodes
    if result.status is NoPumpStatus.INCONCLUSIVE:
      report.status = Status.INCONCLUSIVE
      report.reason = result.reason

  return _timed(body)


def zreach_report(
  vass: Vass,
  source: ZConfiguration,
  target: ZConfiguration,
  cap: Optional[int] = None,
  shortest: bool = False,
  limits: Optional[Limits] = None,
) -> Report:
  """Z-reachability; with ``shortest`` the run is a shortest one and is probed.

  In shortest mode ``cap`` bounds the breadth-first run length, otherwise it
  caps the flow multiplicities.
  """
  settings = resolve_limits(limits)

  def body(report: Report) -> None:
    report.bounds['cap'] = cap
    if shortest:
      probe = probe_zrun(vass, source, target, cap=cap, limits=settings)
      run = probe.run
      report.bounds.update(scale=probe.scale, ratio_ceiling=probe.ceiling)
      try:
        bits = settings.max_bound_bits
        report.bounds['zrun'] = zrun_bound(probe.scale, probe.g, bits)
      except BoundOverflowError as e:
        report.bounds['zrun'] = f'overflow: {e}'
      report.verdicts.update(ratio=probe.ratio, within_ceiling=probe.within_ceiling)
    else:
      run = decide_zreach(vass, source, target, cap=cap, limits=settings)
    report.verdicts['reachable'] = run is not None
    if run is not None:
      report.verdicts['length'] = len(run)
      report.witnesses['run'] = run

  return _timed(body)


def bounds_report(
  parameters: BoundParameters,
  families: Sequence[str],
  limits: Optional[Limits] = None,
) -> Report:
  settings = resolve_limits(limits)

  def body(report: Report) -> None:
    report.verdicts.update(
      d=parameters.d,
      n=parameters.n,
      M=parameters.M,
      g=parameters.g,
      G=parameters.threshold,
      ynorm=parameters.target_norm,
    )
    table = bounds(parameters, families, settings)
    report.bounds.update(table.sequences())
    if table.bounded_base is not None:
      report.bounds['bounded.D'] = table.bounded_base
    if table.zrun is not None:
      report.bounds['zrun'] = table.zrun
    report.verdicts['closed_form'] = table.closed_form_checks(settings.max_bound_bits)

  return _timed(body)


def classify_report(
  space: CycleSpace,
  vector: Sequence[int],
  bound: Optional[int] = None,
  thresholds: Optional[Sequence[int]] = None,
) -> Report:
  """Small against ``bound``, or thin against ``thresholds`` when given."""

  def body(report: Report) -> None:
    if thresholds is not None:
      result = classify_thin(space, vector, thresholds)
      report.bounds['Cvec'] = list(thresholds)
    else:
      result = classify_small(space, vector, bound)
      report.bounds['C'] = bound
    report.verdicts.update(
      verdict=result.verdict,
      g=space.rank,
      distinguished=result.distinguished,
      profile=result.profile,
    )
    if result.basis is not None:
      report.witnesses['basis'] = result.basis

  return _timed(body)


def bfs_report(
  vass: Vass,
  source: Configuration,
  box: Union[int, Sequence[int]],
  depth: Optional[int] = None,
  target: Optional[Configuration] = None,
  limits: Optional[Limits] = None,
) -> Report:
  def body(report: Report) -> None:
    result = bfs_reach(vass, source, box, depth=depth, limits=limits)
    report.bounds.update(box=box, depth=depth)
    report.verdicts.update(reached=len(result.distances), truncated=result.truncated)
    if target is not None:
      distance = result.distance_to_cover(target)
      report.verdicts['cover_distance'] = distance
      if distance is not None:
        covering = min(
          (
            c
            for c, steps in result.distances.items()
            if steps == distance and c.covers(target)
          ),
          key=lambda c: c.sort_key(),
        )
        report.witnesses['path'] = list(result.path_to(covering))
    report.statistics['nodes'] = len(result.distances)

  return _timed(body)


def backward_report(
  vass: Vass,
  target: Configuration,
  source: Optional[Configuration] = None,
  limits: Optional[Limits] = None,
) -> Report:
  def body(report: Report) -> None:
    basis = backward_coverability(vass, target, limits)
    report.witnesses['basis'] = {
      state: sorted(vectors) for state, vectors in sorted(basis.elements.items())
    }
    report.statistics['layers'] = len(basis.layers)
    if source is not None:
      distance = basis.distance(source)
      report.verdicts.update(coverable=distance is not None, distance=distance)

  return _timed(body)


def km_report(
  vass: Vass, source: Configuration, limits: Optional[Limits] = None
) -> Report:
  def body(report: Report) -> None:
    tree = karp_miller(vass, source, limits)
    report.statistics['nodes'] = len(tree.nodes)
    if tree.truncated:
      raise ResourceCeilingError('Karp-Miller nodes', len(tree.nodes))
    report.verdicts.update(
      bounded=tree.is_bounded(),
      counter_bounded=[tree.counter_bounded(i) for i in range(vass.dim)],
      max_values=tree.max_values(),
    )
    report.witnesses['tree'] = tree.dump()

  return _timed(body)


def gadget_report(
  gadget: CompiledGadget,
  box: Optional[Union[int, Sequence[int]]] = None,
  limits: Optional[Limits] = None,
) -> Report:
  """Shape of a compiled gadget, optionally with its accepting configurations."""

  def body(report: Report) -> None:
    space = cycle_space(gadget.vass)
    report.verdicts.update(
      d=gadget.vass.dim,
      n=gadget.vass.n,
      transitions=len(gadget.vass.transitions),
      g=space.rank,
      g_scc=space.scc_rank,
    )
    if gadget.expected_g_scc is not None:
      report.verdicts['expected_g_scc'] = gadget.expected_g_scc
      report.verdicts['g_scc_matches'] = space.scc_rank == gadget.expected_g_scc
    report.witnesses['roles'] = gadget.role_map()
    if box is not None:
      report.bounds['box'] = box
      accepted = accepting_configurations(gadget, box, limits)
      report.verdicts['accepting'] = len(accepted)
      report.witnesses['accepting'] = accepted

  return _timed(body)


def corpus_report(entries: Sequence[CorpusEntry], directory: Path) -> Report:
  def body(report: Report) -> None:
    report.verdicts['instances'] = len(entries)
    report.verdicts['directory'] = str(directory)
    report.statistics['families'] = family_summary(list(entries))

  return _timed(body)
