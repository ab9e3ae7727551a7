import json
import math

import pytest

from latticeflow import common
from latticeflow import run


def _main(tmp_path, name, *argv):
  outdir = tmp_path / name
  code = run.main([*argv, '--outdir', str(outdir)])
  return code, outdir


def _json(outdir, name):
  return json.loads((outdir / name).read_text())


def test_decompose(tmp_path):
  code, outdir = _main(tmp_path, 'out', 'rootsys', 'decompose')
  assert code == common.EXIT_OK
  payload = _json(outdir, 'decomposition.json')
  assert payload['verified'] is True
  assert payload['route'] == 'interval'
  assert payload['alpha'] == ['4/3', '1/3', '-5/3']
  assert payload['betas'] == [['0', '1', '-1'], ['1', '0', '-1']]
  assert payload['coeffs'] == ['1/3', '4/3']
  manifest = _json(outdir, 'manifest.json')
  assert manifest['experiment'] == 'rootsys-decompose'
  assert set(manifest['outputs']) == {'decomposition.json', 'summary.json'}


def test_expanding(tmp_path):
  code, outdir = _main(tmp_path, 'out', 'rootsys', 'expanding')
  assert code == common.EXIT_OK
  payload = _json(outdir, 'expanding.json')
  assert payload['P'] == [1, 2]
  assert payload['pairs'] == [[2, 3], [1, 3]]
  assert payload['u_basis'] == [[2, 3], [1, 3]]
  assert payload['coeffs'] == ['1', '2']
  assert payload['verdict']['passed'] is True


def test_cartan_and_orthogonal(tmp_path):
  code, outdir = _main(
      tmp_path, 'cartan', 'rootsys-cartan', '--family', 'B', '--rank', '3')
  assert code == common.EXIT_OK
  payload = _json(outdir, 'cartan.json')
  assert payload['positive'] is True
  assert payload['roots'] == 18
  code, outdir = _main(
      tmp_path, 'orthogonal', 'rootsys-orthogonal', '--family', 'D',
      '--rank', '4')
  assert code == common.EXIT_OK
  payload = _json(outdir, 'orthogonal.json')
  assert len(payload['roots']) == 4
  assert payload['strongly_orthogonal'] is True


def test_blocks(tmp_path):
  code, outdir = _main(tmp_path, 'out', 'rootsys-blocks', '--check', 'True')
  assert code == common.EXIT_OK
  cases = {case['case']: case for case in _json(outdir, 'blocks.json')['cases']}
  assert cases['block-2x2']['passed'] is True
  assert cases['single-E13']['passed'] is False
  assert cases['single-E13']['witness_alignment'] == pytest.approx(1.0)


@pytest.mark.parametrize('argv', [
    ['occupancy', '--T', '0'],
    ['simulate', '--unknown', '1'],
    ['nope'],
    ['simulate', '--configs', 'nope'],
    ['simulate', '--seed', '-1'],
    ['simulate', '--horizons', '1,-1'],
    ['simulate', '--parallel', 'cluster', '--workers', '2'],
    ['largedev', '--process', 'unknown', '--configs', 'debug'],
])
def test_usage_errors(tmp_path, argv):
  code, outdir = _main(tmp_path, 'out', *argv)
  assert code == common.EXIT_USAGE
  assert not outdir.exists()
  assert not list(tmp_path.glob('.*.staging'))


def test_falsified(tmp_path):
  code, outdir = _main(
      tmp_path, 'out', 'return-times', '--configs', 'debug', '--check',
      'True', '--min_gaps', '100000')
  assert code == common.EXIT_FALSIFIED
  assert not outdir.exists()


def test_help(capsys):
  with pytest.raises(SystemExit):
    run.main(['--help'])
  out = capsys.readouterr().out
  assert 'rootsys-decompose' in out
  assert '--samples' in out


def test_simulate_is_deterministic(tmp_path):
  argv = ('simulate', '--configs', 'debug')
  _, first = _main(tmp_path, 'a', *argv)
  _, second = _main(tmp_path, 'b', *argv)
  header = (first / 'trajectory.csv').read_text().splitlines()[0]
  assert header == 'sample_id,t,lambda1,alpha,inK'
  manifest = _json(first, 'manifest.json')
  assert manifest['outputs'] == _json(second, 'manifest.json')['outputs']
  assert manifest['config'] == _json(second, 'manifest.json')['config']
  assert manifest['seed'] == 0
  assert 'trajectory.csv' in manifest['outputs']
  assert (first / 'config.yaml').exists()
  code, replay = _main(
      tmp_path, 'c', '--manifest', str(first / 'manifest.json'))
  assert code == common.EXIT_OK
  assert _json(replay, 'manifest.json')['outputs'] == manifest['outputs']
  _, other = _main(tmp_path, 'd', *argv, '--seed', '1')
  assert _json(other, 'manifest.json')['outputs']['trajectory.csv'] != (
      manifest['outputs']['trajectory.csv'])


def test_outdir_from_environment(tmp_path, monkeypatch):
  monkeypatch.setenv(run.OUTDIR_VARIABLE, str(tmp_path / 'env'))
  assert run.main(['rootsys', 'cartan']) == common.EXIT_OK
  assert (tmp_path / 'env' / 'manifest.json').exists()


def test_text_config_file(tmp_path):
  filename = tmp_path / 'system.txt'
  filename.write_text('# A larger system\nfamily = C\nrank = 3\n')
  code, outdir = _main(
      tmp_path, 'out', 'rootsys', 'cartan', '--file', str(filename))
  assert code == common.EXIT_OK
  payload = _json(outdir, 'cartan.json')
  assert payload['family'] == 'C' and payload['rank'] == 3


def test_flags_override_file(tmp_path):
  filename = tmp_path / 'system.txt'
  filename.write_text('family = C\nrank = 3\n')
  config = run.load_config([
      'rootsys', 'cartan', '--file', str(filename), '--rank', '4'])
  assert config.experiment == 'rootsys-cartan'
  assert (config.family, config.rank) == ('C', 4)


@pytest.mark.parametrize('experiment', [
    'shadowing', 'largedev', 'height-profile', 'return-times', 'occupancy'])
def test_debug_runs(tmp_path, experiment):
  code, outdir = _main(tmp_path, 'out', experiment, '--configs', 'debug')
  assert code == common.EXIT_OK
  manifest = _json(outdir, 'manifest.json')
  assert manifest['experiment'] == experiment
  for name, digest in manifest['outputs'].items():
    assert (outdir / name).exists(), name


def test_debug_summary(tmp_path):
  config = run.load_config([
      'shadowing', '--configs', 'debug', '--outdir', str(tmp_path / 'out')])
  summary = run.run(config)
  assert summary['instances'] == 3
  assert summary['min_margin'] >= -config.tolerance
  assert _json(tmp_path / 'out', 'summary.json') == summary


def _accept(tmp_path, overlay, *argv):
  code, outdir = _main(tmp_path, overlay, '--configs', overlay, *argv)
  assert code == common.EXIT_OK
  return _json(outdir, 'summary.json')


@pytest.mark.slow
def test_equidistribution(tmp_path):
  summary = _accept(tmp_path, 'equidistribution')
  assert summary['oracle'] == pytest.approx(0.75 / math.pi)
  assert summary['fraction_mean'] == pytest.approx(0.2387, abs=0.03)


@pytest.mark.slow
def test_nonescape(tmp_path):
  summary = _accept(tmp_path, 'nonescape')
  assert summary['monotone'] is True
  assert summary['fit']['slope'] < 0


@pytest.mark.slow
def test_gap_tail(tmp_path):
  summary = _accept(tmp_path, 'gaps')
  assert summary['fit']['theta0'] > 0
  assert summary['fit']['r2'] >= 0.9


@pytest.mark.slow
def test_shadowing(tmp_path):
  summary = _accept(tmp_path, 'shadowing')
  assert summary['instances'] == 50
  assert summary['min_margin'] >= -1e-6


@pytest.mark.slow
def test_contraction(tmp_path):
  summary = _accept(tmp_path, 'contraction')
  assert len(summary['log_diffs']) == 3
  assert max(summary['log_diffs']) <= -0.05


@pytest.mark.slow
def test_drift(tmp_path):
  summary = _accept(tmp_path, 'drift')
  assert summary['c'] < 1
  assert math.isfinite(summary['b'])


@pytest.mark.slow
def test_large_deviations(tmp_path):
  summary = _accept(tmp_path, 'largedev')
  assert summary['violations'] == []
  assert summary['constant_failures'] == 0


@pytest.mark.slow
def test_correlation_decay(tmp_path):
  summary = _accept(tmp_path, 'correlations')
  assert summary['fit']['slope'] <= -0.25
  assert summary['fit']['r2'] >= 0.8
  assert summary['lipschitz'] > 0
