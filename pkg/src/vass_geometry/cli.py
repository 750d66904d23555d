"""CLI interface for vass-geometry."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import click
from rich.console import Console

from . import reports
from .bounds import FAMILIES, BoundParameters
from .config import Limits, configure_logging
from .corpus import FAMILIES as CORPUS_FAMILIES
from .corpus import gen_corpus
from .exceptions import ResourceCeilingError, VassGeometryError
from .gadgets import (
  CompiledGadget,
  StageNames,
  build_tower_instance,
  compile_program,
  format_program,
  make_amplifier,
  make_old_amplifier,
  parse_program,
  prime_encoding_program,
  zero_test_program,
)
from .geometry import CycleSpace, cycle_space
from .vass import Semantics, Vass, parse_configuration, parse_vass, serialize_vass

console = Console()


class InputError(click.ClickException):
  """Malformed input: syntax, arity, undeclared names or unreadable files."""

  exit_code = 2


class InconclusiveError(click.ClickException):
  """A resource ceiling was reached before any report could be built."""

  exit_code = 3


@dataclass(frozen=True)
class GlobalOptions:
  cap: Optional[int]
  budget: Optional[int]
  json: bool
  seed: int

  @property
  def limits(self) -> Limits:
    return Limits.from_env().with_budget(self.budget)


def _fail(error: Exception) -> click.ClickException:
  console.print(f'[red]Error: {error}[/red]')
  if isinstance(error, ResourceCeilingError):
    return InconclusiveError(str(error))
  return InputError(str(error))


def _echo(ctx: click.Context) -> List[str]:
  words = ctx.command_path.split()[1:]
  for name, value in sorted(ctx.params.items()):
    if value is None or value == () or value is False:
      continue
    words.append(f'{name}={value}')
  return words


def _emit(ctx: click.Context, report: reports.Report, text: str) -> None:
  options: GlobalOptions = ctx.obj
  report.stamp(_echo(ctx), text)
  if options.json:
    click.echo(report.to_json())
  else:
    report.render(console)
  if report.inconclusive:
    ctx.exit(3)


def _load(path: str) -> Tuple[Vass, str]:
  text = Path(path).read_text(encoding='utf-8')
  return parse_vass(text), text


def _ints(text: str) -> Tuple[int, ...]:
  try:
    return tuple(int(token) for token in text.split(',') if token.strip())
  except ValueError as e:
    raise InputError(f'expected comma-separated integers, got {text!r}') from e


def _assignments(text: Optional[str]) -> Dict[str, int]:
  values: Dict[str, int] = {}
  for item in (text or '').split(','):
    if not item.strip():
      continue
    name, separator, raw = item.partition('=')
    if not separator:
      raise InputError(f'expected name=value, got {item!r}')
    try:
      values[name.strip()] = int(raw)
    except ValueError as e:
      raise InputError(f'not an integer: {raw!r}') from e
  return values


@click.group(context_settings={'help_option_names': ['-h', '--help']})
@click.version_option()
@click.option('--cap', type=int, help='Override the length or multiplicity cap')
@click.option('--budget', type=int, help='Node budget for searches and trees')
@click.option('--json', 'as_json', is_flag=True, help='Print the report as JSON')
@click.option('--seed', type=int, default=0, show_default=True, help='Random seed')
@click.option('-v', '--verbose', count=True, help='-v for progress, -vv for debug')
@click.pass_context
def main(ctx, cap, budget, as_json, seed, verbose):
  """vass-geometry - geometric dimension, witness search and gadgets for VASS."""
  configure_logging(verbose)
  ctx.obj = GlobalOptions(cap=cap, budget=budget, json=as_json, seed=seed)


def run(argv: Optional[Sequence[str]] = None) -> int:
  """Run the command line and return its exit status."""
  try:
    result = main.main(args=list(argv or []), standalone_mode=False)
  except click.ClickException as e:
    e.show()
    return e.exit_code
  except click.Abort:
    return 1
  return result if isinstance(result, int) else 0


@main.command(name='dim')
@click.argument('file', type=click.Path(dir_okay=False))
@click.pass_context
def dimension(ctx, file):
  """Report d, n, M, g and g_scc with a clean basis."""
  try:
    vass, text = _load(file)
    report = reports.dimension_report(vass)
  except (VassGeometryError, OSError) as e:
    raise _fail(e)
  _emit(ctx, report, text)


@main.command()
@click.argument('file', type=click.Path(dir_okay=False))
@click.option('--source', required=True, help='Source configuration state:v1,...')
@click.option('--target', required=True, help='Target configuration state:v1,...')
@click.pass_context
def cover(ctx, file, source, target):
  """Decide coverability with a shortest witness."""
  options: GlobalOptions = ctx.obj
  try:
    vass, text = _load(file)
    report = reports.cover_report(
      vass,
      parse_configuration(source, vass),
      parse_configuration(target, vass),
      cap=options.cap,
      limits=options.limits,
    )
  except (VassGeometryError, OSError) as e:
    raise _fail(e)
  _emit(ctx, report, text)


@main.command()
@click.argument('file', type=click.Path(dir_okay=False))
@click.option('--source', required=True, help='Source configuration state:v1,...')
@click.pass_context
def bounded(ctx, file, source):
  """Decide boundedness with a self-covering witness."""
  options: GlobalOptions = ctx.obj
  try:
    vass, text = _load(file)
    report = reports.bounded_report(
      vass, parse_configuration(source, vass), cap=options.cap, limits=options.limits
    )
  except (VassGeometryError, OSError) as e:
    raise _fail(e)
  _emit(ctx, report, text)


@main.command()
@click.argument('file', type=click.Path(dir_okay=False))
@click.option('--source', required=True, help='Source configuration state:v1,...')
@click.option('--state', required=True, help='State to reach')
@click.option('--G', 'threshold', type=int, required=True, help='Uniform target G')
@click.pass_context
def simub(ctx, file, source, state, threshold):
  """Cover (G,...,G) at a state."""
  options: GlobalOptions = ctx.obj
  try:
    vass, text = _load(file)
    report = reports.simub_report(
      vass,
      parse_configuration(source, vass),
      state,
      threshold,
      cap=options.cap,
      limits=options.limits,
    )
  except (VassGeometryError, OSError) as e:
    raise _fail(e)
  _emit(ctx, report, text)


@main.command()
@click.argument('file', type=click.Path(dir_okay=False))
@click.option('--source', required=True, help='Source configuration state:v1,...')
@click.option('--G', 'threshold', type=int, required=True, help='Uniform target G')
@click.option('--horizon', type=int, help='Exploration depth (default 4·L_g)')
@click.pass_context
def nopump(ctx, file, source, threshold, horizon):
  """Check that pumping every counter forces a short uniform cover."""
  options: GlobalOptions = ctx.obj
  try:
    vass, text = _load(file)
    report = reports.nopump_report(
      vass,
      parse_configuration(source, vass),
      threshold,
      horizon=horizon,
      limits=options.limits,
    )
  except (VassGeometryError, OSError) as e:
    raise _fail(e)
  _emit(ctx, report, text)


@main.command()
@click.argument('file', type=click.Path(dir_okay=False))
@click.option('--source', required=True, help='Source Z-configuration state:v1,...')
@click.option('--target', required=True, help='Target Z-configuration state:v1,...')
@click.option('--shortest', is_flag=True, help='Find and probe a shortest Z-run')
@click.pass_context
def zreach(ctx, file, source, target, shortest):
  """Decide reachability over the integers."""
  options: GlobalOptions = ctx.obj
  try:
    vass, text = _load(file)
    report = reports.zreach_report(
      vass,
      parse_configuration(source, vass, Semantics.INTEGER),
      parse_configuration(target, vass, Semantics.INTEGER),
      cap=options.cap,
      shortest=shortest,
      limits=options.limits,
    )
  except (VassGeometryError, OSError) as e:
    raise _fail(e)
  _emit(ctx, report, text)


@main.command(name='bounds')
@click.option('--d', 'dim', type=int, required=True, help='Dimension')
@click.option('--n', 'states', type=int, required=True, help='Number of states')
@click.option('--M', 'max_norm', type=int, required=True, help='Largest effect entry')
@click.option('--g', 'rank', type=int, required=True, help='Geometric dimension')
@click.option('--G', 'threshold', type=int, default=0, help='Uniform target')
@click.option('--ynorm', type=int, default=0, help='Norm of the cover target')
@click.option('--scale', type=int, help='Z-run scale for the zrun family')
@click.option(
  '--table',
  'tables',
  type=click.Choice(FAMILIES),
  multiple=True,
  help='Families to evaluate (default: all)',
)
@click.pass_context
def bound_table(ctx, dim, states, max_norm, rank, threshold, ynorm, scale, tables):
  """Evaluate the bound recurrences."""
  options: GlobalOptions = ctx.obj
  try:
    parameters = BoundParameters(
      d=dim,
      n=states,
      M=max_norm,
      g=rank,
      threshold=threshold,
      target_norm=ynorm,
      scale=scale,
    )
    report = reports.bounds_report(
      parameters, tables or FAMILIES, limits=options.limits
    )
  except VassGeometryError as e:
    raise _fail(e)
  _emit(ctx, report, ' '.join(_echo(ctx)))


@main.command()
@click.argument('file', type=click.Path(dir_okay=False), required=False)
@click.option(
  '--generator', 'generators', multiple=True, help='Span generator v1,... (repeatable)'
)
@click.option('--vector', required=True, help='Vector to classify v1,...')
@click.option('--C', 'bound', type=int, help='Smallness bound')
@click.option('--Cvec', 'thresholds', help='Sorted thinness thresholds C1,...,Cg')
@click.pass_context
def classify(ctx, file, generators, vector, bound, thresholds):
  """Classify a vector as small or thin with respect to a cycle space."""
  if (file is None) == (not generators):
    raise _fail(InputError('give either a VASS file or --generator vectors'))
  if (bound is None) == (thresholds is None):
    raise _fail(InputError('give exactly one of --C and --Cvec'))
  try:
    if file is not None:
      vass, text = _load(file)
      space = cycle_space(vass)
    else:
      rows = [_ints(generator) for generator in generators]
      text = '\n'.join(generators)
      space = CycleSpace.spanned_by(rows, len(rows[0]))
    report = reports.classify_report(
      space,
      _ints(vector),
      bound=bound,
      thresholds=None if thresholds is None else _ints(thresholds),
    )
  except (VassGeometryError, OSError) as e:
    raise _fail(e)
  _emit(ctx, report, text)


@main.group()
def oracle():
  """Naive ground-truth engines."""
  pass


@oracle.command(name='bfs')
@click.argument('file', type=click.Path(dir_okay=False))
@click.option('--source', required=True, help='Source configuration state:v1,...')
@click.option('--box', required=True, help='Counter ceiling B or B1,...,Bd')
@click.option('--depth', type=int, help='Step cap')
@click.option('--target', help='Report the distance to cover this configuration')
@click.pass_context
def oracle_bfs(ctx, file, source, box, depth, target):
  """Exhaustive reachability inside a box."""
  options: GlobalOptions = ctx.obj
  try:
    vass, text = _load(file)
    ceiling = _ints(box)
    report = reports.bfs_report(
      vass,
      parse_configuration(source, vass),
      ceiling[0] if len(ceiling) == 1 else ceiling,
      depth=depth,
      target=None if target is None else parse_configuration(target, vass),
      limits=options.limits,
    )
  except (VassGeometryError, OSError) as e:
    raise _fail(e)
  _emit(ctx, report, text)


@oracle.command(name='backward')
@click.argument('file', type=click.Path(dir_okay=False))
@click.option('--target', required=True, help='Target configuration state:v1,...')
@click.option('--source', help='Report the covering distance from this configuration')
@click.pass_context
def oracle_backward(ctx, file, target, source):
  """Backward coverability basis."""
  options: GlobalOptions = ctx.obj
  try:
    vass, text = _load(file)
    report = reports.backward_report(
      vass,
      parse_configuration(target, vass),
      source=None if source is None else parse_configuration(source, vass),
      limits=options.limits,
    )
  except (VassGeometryError, OSError) as e:
    raise _fail(e)
  _emit(ctx, report, text)


@oracle.command(name='km')
@click.argument('file', type=click.Path(dir_okay=False))
@click.option('--source', required=True, help='Source configuration state:v1,...')
@click.pass_context
def oracle_km(ctx, file, source):
  """Karp-Miller coverability tree."""
  options: GlobalOptions = ctx.obj
  try:
    vass, text = _load(file)
    report = reports.km_report(
      vass, parse_configuration(source, vass), limits=options.limits
    )
  except (VassGeometryError, OSError) as e:
    raise _fail(e)
  _emit(ctx, report, text)


@main.group()
def gadget():
  """Compile zero-test and amplifier gadgets."""
  pass


_box_option = click.option(
  '--box', help='Verify acceptance inside this box: B or B1,...'
)
_output_option = click.option(
  '--output', type=click.Path(dir_okay=False), help='Write the VASS and a roles file'
)


def _finish_gadget(
  ctx: click.Context, compiled: CompiledGadget, text: str, box: Optional[str], output
) -> None:
  options: GlobalOptions = ctx.obj
  try:
    ceiling = None
    if box is not None:
      values = _ints(box)
      ceiling = values[0] if len(values) == 1 else values
    if output is not None:
      path = Path(output)
      path.write_text(serialize_vass(compiled.vass), encoding='utf-8')
      roles = path.with_suffix('.roles.json')
      roles.write_text(
        json.dumps(compiled.role_map(), indent=2, sort_keys=True) + '\n',
        encoding='utf-8',
      )
      console.print(f'[green]Wrote {path} and {roles}[/green]', highlight=False)
    report = reports.gadget_report(compiled, box=ceiling, limits=options.limits)
  except (VassGeometryError, OSError) as e:
    raise _fail(e)
  _emit(ctx, report, text)


@gadget.command(name='ztest')
@click.option('--guards', default='x,y', show_default=True, help='Guarded counters')
@click.option('--counter', help='Counter to test (default: the first guard)')
@click.option('--init', help='Initial values name=value,...')
@_box_option
@_output_option
@click.pass_context
def gadget_ztest(ctx, guards, counter, init, box, output):
  """A single chain zero test."""
  try:
    names = tuple(name.strip() for name in guards.split(',') if name.strip())
    program = zero_test_program(names, counter)
    compiled = compile_program(program, _assignments(init), name='ztest')
  except VassGeometryError as e:
    raise _fail(e)
  _finish_gadget(ctx, compiled, format_program(program), box, output)


@gadget.command(name='amplifier')
@click.option('--stage', type=int, default=1, show_default=True, help='Stage index')
@click.option('--B', 'seed_b', type=int, default=4, show_default=True, help='Seed B')
@click.option('--C', 'seed_c', type=int, default=2, show_default=True, help='Seed C')
@click.option('--exponent', type=int, default=4, show_default=True, help='log2 factor')
@_box_option
@_output_option
@click.pass_context
def gadget_amplifier(ctx, stage, seed_b, seed_c, exponent, box, output):
  """One amplifier stage with two multiplication triples."""
  try:
    program = make_amplifier(stage, multiplier_exponent=exponent)
    names = StageNames.for_stage(stage)
    initial: Dict[str, int] = {}
    for b, c, d in (names.first, names.second):
      initial.update({b: seed_b, c: seed_c, d: seed_b * seed_c})
    compiled = compile_program(
      program, initial, name=f'amplifier{stage}', expected_g_scc=4
    )
  except VassGeometryError as e:
    raise _fail(e)
  _finish_gadget(ctx, compiled, format_program(program), box, output)


@gadget.command(name='old-amplifier')
@click.option('--B', 'seed_b', type=int, default=4, show_default=True, help='Seed B')
@click.option('--C', 'seed_c', type=int, default=2, show_default=True, help='Seed C')
@click.option('--exponent', type=int, default=8, show_default=True, help='log2 factor')
@_box_option
@_output_option
@click.pass_context
def gadget_old_amplifier(ctx, seed_b, seed_c, exponent, box, output):
  """Single-triple amplifier whose multiplication loop has rank 5."""
  try:
    program = make_old_amplifier(multiplier_exponent=exponent)
    initial = {'b': seed_b, 'c': seed_c, 'd': seed_b * seed_c}
    compiled = compile_program(
      program, initial, name='old_amplifier', expected_g_scc=5
    )
  except VassGeometryError as e:
    raise _fail(e)
  _finish_gadget(ctx, compiled, format_program(program), box, output)


@gadget.command(name='tower')
@click.option('--n', 'stages', type=int, default=1, show_default=True, help='Stages')
@click.option('--machine', type=click.Path(dir_okay=False), help='Program to simulate')
@click.option('--B', 'seed_b', type=int, default=4, show_default=True, help='Seed B')
@click.option('--C', 'seed_c', type=int, default=2, show_default=True, help='Seed C')
@click.option('--exponent', type=int, default=4, show_default=True, help='log2 factor')
@_output_option
@click.pass_context
def gadget_tower(ctx, stages, machine, seed_b, seed_c, exponent, output):
  """Amplifier chain followed by a simulated counter program."""
  try:
    text = ''
    program = None
    if machine is not None:
      text = Path(machine).read_text(encoding='utf-8')
      program = parse_program(text)
    compiled = build_tower_instance(
      stages, program, seed=(seed_b, seed_c), multiplier_exponent=exponent
    )
  except (VassGeometryError, OSError) as e:
    raise _fail(e)
  _finish_gadget(ctx, compiled, text or f'tower {stages}', None, output)


@gadget.command(name='encode')
@click.option(
  '--ops', required=True, help='Operations like inc:a,dec:b,zero:c on counters a-d'
)
@click.option('--init', help='Initial values name=value,...')
@_box_option
@_output_option
@click.pass_context
def gadget_encode(ctx, ops, init, box, output):
  """Two-counter program on the prime-power encoding."""
  try:
    operations = []
    for item in ops.split(','):
      operation, separator, counter = item.strip().partition(':')
      if not separator:
        raise InputError(f'expected operation:counter, got {item!r}')
      operations.append((operation, counter))
    program = prime_encoding_program(operations)
    compiled = compile_program(program, _assignments(init), name='encoding')
  except VassGeometryError as e:
    raise _fail(e)
  _finish_gadget(ctx, compiled, format_program(program), box, output)


@gadget.command(name='compile')
@click.argument('file', type=click.Path(dir_okay=False))
@click.option('--init', help='Initial values name=value,...')
@_box_option
@_output_option
@click.pass_context
def gadget_compile(ctx, file, init, box, output):
  """Compile a counter program file."""
  try:
    text = Path(file).read_text(encoding='utf-8')
    program = parse_program(text)
    compiled = compile_program(program, _assignments(init), name=Path(file).stem)
  except (VassGeometryError, OSError) as e:
    raise _fail(e)
  _finish_gadget(ctx, compiled, text, box, output)


@main.command()
@click.argument('directory', type=click.Path(file_okay=False))
@click.option(
  '--count',
  'counts',
  multiple=True,
  help=f'family=N, families: {", ".join(CORPUS_FAMILIES)}',
)
@click.option('--max-dim', type=int, default=3, show_default=True)
@click.option('--max-states', type=int, default=3, show_default=True)
@click.option('--max-transitions', type=int, default=5, show_default=True)
@click.option('--max-norm', type=int, default=2, show_default=True)
@click.pass_context
def gen(ctx, directory, counts, max_dim, max_states, max_transitions, max_norm):
  """Generate a reproducible random corpus."""
  options: GlobalOptions = ctx.obj
  try:
    requested: Dict[str, int] = {}
    for item in counts:
      requested.update(_assignments(item))
    entries = gen_corpus(
      directory,
      options.seed,
      requested,
      max_dim=max_dim,
      max_states=max_states,
      max_transitions=max_transitions,
      max_norm=max_norm,
    )
    report = reports.corpus_report(entries, Path(directory))
  except (VassGeometryError, OSError) as e:
    raise _fail(e)
  _emit(ctx, report, f'seed={options.seed} ' + ' '.join(_echo(ctx)))


if __name__ == '__main__':
  main()
