"""CLI test suite."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Callable, Dict, List

import pytest
from click.testing import CliRunner

from vass_geometry import reports
from vass_geometry.cli import main, run
from vass_geometry.config import Limits
from vass_geometry.vass import Configuration, parse_vass

from conftest import LADDER_THREE

PUMP = 'vass pump\ndim 1\nstate p q\ntrans p p 1\n'
UP = 'vass up\ndim 1\nstate q\ntrans q q 1\n'


def _invoke(runner: CliRunner, args: List[str], **kwargs) -> Dict[str, object]:
  result = runner.invoke(main, ['--json'] + args, **kwargs)
  assert result.exit_code in (0, 3), result.output
  return json.loads(result.output)


def _without_timing(data: Dict[str, object]) -> Dict[str, object]:
  data = dict(data)
  data['statistics'] = {
    key: value for key, value in data['statistics'].items() if key != 'seconds'
  }
  return data


def test_main_help(runner: CliRunner) -> None:
  result = runner.invoke(main, ['--help'])
  assert result.exit_code == 0
  assert 'vass-geometry' in result.output
  for command in ('dim', 'cover', 'bounds', 'oracle', 'gadget', 'gen'):
    assert command in result.output


class TestDimension:
  def test_ladder(self, runner: CliRunner, vass_file: Callable[..., Path]) -> None:
    path = vass_file(LADDER_THREE)
    data = _invoke(runner, ['dim', str(path)])
    assert data['status'] == 'ok'
    assert data['verdicts']['d'] == 3
    assert data['verdicts']['size'] == 48
    assert data['verdicts']['g'] == 3
    assert data['verdicts']['g_scc'] == 1
    assert data['verdicts']['line'] is True
    assert data['digest'] == hashlib.sha256(LADDER_THREE.encode()).hexdigest()
    assert data['command'] == ['dim', f'file={path}']

  def test_rich_rendering(
    self, runner: CliRunner, vass_file: Callable[..., Path]
  ) -> None:
    result = runner.invoke(main, ['dim', str(vass_file(LADDER_THREE))])
    assert result.exit_code == 0
    assert 'verdicts' in result.output
    assert 'g_scc' in result.output

  def test_syntax_error(
    self, runner: CliRunner, vass_file: Callable[..., Path]
  ) -> None:
    path = vass_file('dim 2\nstate p\ntrans p p 1\n')
    result = runner.invoke(main, ['dim', str(path)])
    assert result.exit_code == 2
    assert 'line 3' in result.output

  def test_missing_file(self, runner: CliRunner, tmp_path: Path) -> None:
    result = runner.invoke(main, ['dim', str(tmp_path / 'absent.vass')])
    assert result.exit_code == 2


class TestCover:
  def test_ladder(self, runner: CliRunner, vass_file: Callable[..., Path]) -> None:
    path = vass_file(LADDER_THREE)
    data = _invoke(
      runner, ['cover', str(path), '--source', 'q1:0,0,0', '--target', 'q3:0,0,1']
    )
    assert data['verdicts'] == {'coverable': True, 'length': 9}
    assert data['witnesses']['run']['steps'] == [0, 0, 0, 0, 1, 2, 2, 3, 4]
    assert data['bounds']['cover.L'][:2] == [2, 47]

  def test_matches_report_builder(
    self, runner: CliRunner, vass_file: Callable[..., Path]
  ) -> None:
    path = vass_file(LADDER_THREE)
    data = _invoke(
      runner, ['cover', str(path), '--source', 'q1:0,0,0', '--target', 'q3:0,0,1']
    )
    vass = parse_vass(LADDER_THREE)
    expected = reports.cover_report(
      vass,
      Configuration('q1', (0, 0, 0)),
      Configuration('q3', (0, 0, 1)),
      limits=Limits.from_env(),
    ).stamp(data['command'], LADDER_THREE)
    assert _without_timing(data) == _without_timing(expected.to_dict())

  def test_undeclared_state(
    self, runner: CliRunner, vass_file: Callable[..., Path]
  ) -> None:
    path = vass_file(LADDER_THREE)
    result = runner.invoke(
      main, ['cover', str(path), '--source', 'q9:0,0,0', '--target', 'q3:0,0,1']
    )
    assert result.exit_code == 2
    assert 'q9' in result.output

  def test_budget_is_inconclusive(
    self, runner: CliRunner, vass_file: Callable[..., Path]
  ) -> None:
    path = vass_file(PUMP)
    result = runner.invoke(
      main,
      ['--json', '--cap', '1000', '--budget', '10', 'cover', str(path)]
      + ['--source', 'p:0', '--target', 'q:0'],
    )
    assert result.exit_code == 3
    data = json.loads(result.output)
    assert data['status'] == 'inconclusive'
    assert 'search nodes' in data['reason']


class TestOtherDeciders:
  def test_bounded(self, runner: CliRunner, vass_file: Callable[..., Path]) -> None:
    data = _invoke(runner, ['bounded', str(vass_file(UP)), '--source', 'q:0'])
    assert data['verdicts']['bounded'] is False
    assert data['verdicts']['length'] == 1
    assert data['witnesses']['split'] == 0

  def test_simub(self, runner: CliRunner, vass_file: Callable[..., Path]) -> None:
    text = 'dim 2\nstate q\ntrans q q 1 1\n'
    data = _invoke(
      runner, ['simub', str(vass_file(text)), '--source', 'q:0,0', '--state', 'q']
      + ['--G', '2'],
    )
    assert data['verdicts'] == {'coverable': True, 'length': 2}

  def test_nopump(self, runner: CliRunner, vass_file: Callable[..., Path]) -> None:
    text = 'dim 2\nstate q\ntrans q q 1 1\n'
    data = _invoke(
      runner, ['nopump', str(vass_file(text)), '--source', 'q:0,0', '--G', '1']
    )
    assert data['verdicts']['no_pump'] == 'confirmed'

  def test_zreach(self, runner: CliRunner, vass_file: Callable[..., Path]) -> None:
    path = vass_file(UP)
    data = _invoke(runner, ['zreach', str(path), '--source', 'q:0', '--target', 'q:3'])
    assert data['verdicts'] == {'reachable': True, 'length': 3}
    data = _invoke(
      runner,
      ['zreach', str(path), '--source', 'q:0', '--target', 'q:3', '--shortest'],
    )
    assert data['verdicts']['ratio'] == '1/729'
    assert data['verdicts']['within_ceiling'] is True
    assert data['bounds']['zrun'] == 2187

  def test_zreach_negative_values(
    self, runner: CliRunner, vass_file: Callable[..., Path]
  ) -> None:
    text = 'dim 1\nstate q\ntrans q q -1\n'
    data = _invoke(
      runner, ['zreach', str(vass_file(text)), '--source', 'q:0', '--target', 'q:-2']
    )
    assert data['verdicts']['length'] == 2


class TestBounds:
  def test_cover_table(self, runner: CliRunner) -> None:
    data = _invoke(
      runner,
      ['bounds', '--d', '1', '--n', '2', '--M', '1', '--g', '1', '--ynorm', '1']
      + ['--table', 'cover'],
    )
    assert data['bounds'] == {'cover.L': [1, 5]}
    assert data['verdicts']['closed_form'] == {'cover': True}

  def test_overflow_is_inconclusive(self, runner: CliRunner) -> None:
    result = runner.invoke(
      main,
      ['--json', 'bounds', '--d', '4', '--n', '4', '--M', '2', '--g', '4'],
      env={'VASS_GEOMETRY_MAX_BOUND_BITS': '64'},
    )
    assert result.exit_code == 3
    assert json.loads(result.output)['status'] == 'inconclusive'

  def test_invalid_parameters(self, runner: CliRunner) -> None:
    result = runner.invoke(
      main, ['bounds', '--d', '1', '--n', '1', '--M', '1', '--g', '2']
    )
    assert result.exit_code == 2


class TestClassify:
  def test_generators(self, runner: CliRunner) -> None:
    data = _invoke(
      runner,
      ['classify', '--generator', '1,0,0', '--generator', '0,1,0']
      + ['--vector', '5,1,9', '--C', '6'],
    )
    assert data['verdicts']['verdict'] == 'small'
    assert data['verdicts']['distinguished'] == [0, 1]
    assert data['verdicts']['profile'] == [1, 5]

  def test_thin_from_file(
    self, runner: CliRunner, vass_file: Callable[..., Path]
  ) -> None:
    data = _invoke(
      runner,
      ['classify', str(vass_file(LADDER_THREE)), '--vector', '1,2,3']
      + ['--Cvec', '2,3,4'],
    )
    assert data['verdicts']['verdict'] == 'thin'

  @pytest.mark.parametrize(
    'args',
    [
      ['--vector', '1', '--C', '2'],
      ['--generator', '1', '--vector', '1'],
      ['--generator', '1', '--vector', '1', '--C', '2', '--Cvec', '2'],
      ['--generator', '1', '--vector', 'x', '--C', '2'],
    ],
  )
  def test_bad_arguments(self, runner: CliRunner, args: List[str]) -> None:
    assert runner.invoke(main, ['classify'] + args).exit_code == 2


class TestOracles:
  def test_bfs(self, runner: CliRunner, vass_file: Callable[..., Path]) -> None:
    data = _invoke(
      runner,
      ['oracle', 'bfs', str(vass_file(LADDER_THREE)), '--source', 'q1:0,0,0']
      + ['--box', '4', '--target', 'q3:0,0,1'],
    )
    assert data['verdicts']['cover_distance'] == 9
    assert data['verdicts']['truncated'] is True
    assert data['witnesses']['path'] == [0, 0, 0, 0, 1, 2, 2, 3, 4]

  def test_backward(self, runner: CliRunner, vass_file: Callable[..., Path]) -> None:
    data = _invoke(
      runner,
      ['oracle', 'backward', str(vass_file(LADDER_THREE)), '--target', 'q3:0,0,1']
      + ['--source', 'q1:0,0,0'],
    )
    assert data['verdicts'] == {'coverable': True, 'distance': 9}

  def test_karp_miller(self, runner: CliRunner, vass_file: Callable[..., Path]) -> None:
    data = _invoke(runner, ['oracle', 'km', str(vass_file(UP)), '--source', 'q:0'])
    assert data['verdicts']['bounded'] is False
    assert data['verdicts']['counter_bounded'] == [False]

  def test_truncated_tree(
    self, runner: CliRunner, vass_file: Callable[..., Path]
  ) -> None:
    result = runner.invoke(
      main, ['--budget', '2', 'oracle', 'km', str(vass_file(UP)), '--source', 'q:0']
    )
    assert result.exit_code == 3


class TestGadgets:
  def test_zero_test(self, runner: CliRunner) -> None:
    data = _invoke(
      runner, ['gadget', 'ztest', '--init', 'b=2,c=2,d=4', '--box', '12']
    )
    assert data['verdicts']['n'] == 5
    assert data['verdicts']['transitions'] == 8
    assert data['verdicts']['accepting'] == 1
    assert data['witnesses']['roles']['sensors'] == ['d']

  def test_output_files(self, runner: CliRunner, tmp_path: Path) -> None:
    output = tmp_path / 'ztest.vass'
    result = runner.invoke(main, ['gadget', 'ztest', '--output', str(output)])
    assert result.exit_code == 0
    assert parse_vass(output.read_text()).n == 5
    roles = json.loads((tmp_path / 'ztest.roles.json').read_text())
    assert roles['counters'] == ['x', 'y', 'b', 'c', 'd']

  @pytest.mark.parametrize(
    'args, expected',
    [(['amplifier'], 4), (['old-amplifier'], 5), (['tower', '--n', '1'], 4)],
  )
  def test_expected_dimensions(
    self, runner: CliRunner, args: List[str], expected: int
  ) -> None:
    data = _invoke(runner, ['gadget'] + args)
    assert data['verdicts']['g_scc'] == expected
    assert data['verdicts']['g_scc_matches'] is True

  def test_encode(self, runner: CliRunner) -> None:
    data = _invoke(
      runner,
      ['gadget', 'encode', '--ops', 'inc:a', '--init', 'x=1,b=1,c=4,d=8']
      + ['--box', '2,2,2,4,8'],
    )
    assert data['verdicts']['accepting'] == 1

  def test_compile(self, runner: CliRunner, tmp_path: Path) -> None:
    program = tmp_path / 'count.prog'
    program.write_text('counter x\nloop\nadd x 1\nend\n')
    data = _invoke(runner, ['gadget', 'compile', str(program)])
    assert data['verdicts']['g'] == 1

  @pytest.mark.parametrize(
    'args',
    [
      ['encode', '--ops', 'inc'],
      ['encode', '--ops', 'inc:z'],
      ['ztest', '--guards', 'x,b'],
      ['ztest', '--init', 'x=one'],
      ['tower', '--n', '0'],
    ],
  )
  def test_bad_arguments(self, runner: CliRunner, args: List[str]) -> None:
    assert runner.invoke(main, ['gadget'] + args).exit_code == 2

  def test_too_many_stages(self, runner: CliRunner) -> None:
    assert runner.invoke(main, ['gadget', 'tower', '--n', '9']).exit_code == 3


class TestCorpus:
  def test_reproducible(self, runner: CliRunner, tmp_path: Path) -> None:
    args = ['--count', 'random=3', '--count', 'ladder=2', '--count', 'gscc1=1']
    for name in ('first', 'second'):
      result = runner.invoke(main, ['--seed', '7', 'gen', str(tmp_path / name)] + args)
      assert result.exit_code == 0, result.output
    first = sorted(p.name for p in (tmp_path / 'first').iterdir())
    assert len(first) == 7
    assert 'manifest.json' in first
    for name in first:
      assert (tmp_path / 'first' / name).read_bytes() == (
        tmp_path / 'second' / name
      ).read_bytes()

  def test_no_counts_writes_nothing(self, runner: CliRunner, tmp_path: Path) -> None:
    data = _invoke(runner, ['gen', str(tmp_path / 'empty')])
    assert data['verdicts']['instances'] == 0
    assert list((tmp_path / 'empty').iterdir()) == []

  def test_unknown_family(self, runner: CliRunner, tmp_path: Path) -> None:
    result = runner.invoke(main, ['gen', str(tmp_path), '--count', 'bogus=1'])
    assert result.exit_code == 2


class TestRun:
  def test_exit_statuses(self, vass_file: Callable[..., Path], tmp_path: Path) -> None:
    bounds = ['bounds', '--d', '1', '--n', '1', '--M', '1', '--g', '1']
    assert run(['--json'] + bounds) == 0
    assert run(['dim', str(tmp_path / 'absent.vass')]) == 2
    path = vass_file(UP)
    assert run(['--budget', '2', 'oracle', 'km', str(path), '--source', 'q:0']) == 3
