import hashlib
import json

import numpy as np
import pytest

from latticeflow import common


def _config():
  return common.Config(
      experiment='simulate', outdir='runs/test', seed=1, T=10.0, N=5,
      check=False, gaps=(1.0, 2.0), bump={'center': 1.0, 'width': 0.25})


def test_config_access_and_update():
  config = _config()
  assert config.T == 10.0
  assert config.bump.center == 1.0
  assert config['bump.width'] == 0.25
  assert config.gaps == (1.0, 2.0)
  updated = config.update(T=20, gaps=[3.0], **{'bump.center': 2})
  assert updated.T == 20.0 and isinstance(updated.T, float)
  assert updated.gaps == (3.0,)
  assert updated.bump.center == 2.0
  assert config.T == 10.0
  with pytest.raises(AttributeError):
    config.T = 1.0
  with pytest.raises(KeyError):
    config.update(unknown=1)
  with pytest.raises(TypeError):
    config.update(N=2.5)
  with pytest.raises(TypeError):
    common.Config(empty=[])


def test_config_without_and_str():
  config = _config()
  assert 'outdir' not in config.without('outdir').flat
  assert 'bump.center:' in str(config)


@pytest.mark.parametrize('suffix', ['.yaml', '.json'])
def test_config_save_and_load(tmp_path, suffix):
  config = _config()
  config.save(tmp_path / f'config{suffix}')
  loaded = common.Config.load(tmp_path / f'config{suffix}')
  assert loaded.flat == config.flat


def test_config_load_text(tmp_path):
  filename = tmp_path / 'overrides.txt'
  filename.write_text(
      '# Overrides\nseed = 3\ngaps = 1.5, 2.5  # two gaps\n\ncheck = True\n')
  config = _config().load_text(filename)
  assert config.seed == 3
  assert config.gaps == (1.5, 2.5)
  assert config.check is True
  filename.write_text('seed 3\n')
  with pytest.raises(ValueError):
    _config().load_text(filename)


def test_flags():
  flags = common.Flags(_config())
  config = flags.parse([
      '--seed', '1e3', '--gaps', '1,5', '--check', 'True', '--bump.width=0.5'])
  assert config.seed == 1000
  assert config.gaps == (1.0, 5.0)
  assert config.check is True
  assert config.bump.width == 0.5
  config = flags.parse(['--gaps', '1', '2', '3'])
  assert config.gaps == (1.0, 2.0, 3.0)
  config, remaining = flags.parse(['--seed', '2', '--other', 'x'], True)
  assert config.seed == 2 and remaining == ['--other', 'x']


@pytest.mark.parametrize('argv', [
    ['--unknown', '1'], ['--seed', '1.5'], ['--check', 'yes'], ['--seed'],
    ['stray'], ['--T', '1', '2']])
def test_flags_reject(argv):
  with pytest.raises(common.UsageError):
    common.Flags(_config()).parse(argv)


def test_flags_help(capsys):
  flags = common.Flags(_config(), usage='Usage: test')
  flags.parse(['--help'], known_only=True)
  assert 'Usage: test' in capsys.readouterr().out
  with pytest.raises(SystemExit):
    flags.parse(['--help'])


def test_split_words():
  assert common.split_words(['rootsys', 'decompose', '--rank', '2']) == (
      ['rootsys', 'decompose'], ['--rank', '2'])
  assert common.split_words(['--seed', '1']) == ([], ['--seed', '1'])
  assert common.split_words(['simulate']) == (['simulate'], [])


def test_config_overlays():
  configs = {
      'defaults': {'seed': 0, 'T': 10.0, 'samples': 50},
      'long': {'T': 100.0},
      'debug': {'T': 1.0, 'samples': 2},
  }
  config = common.Config.from_overlays(configs, ['long', 'debug'])
  assert config.T == 1.0 and config.samples == 2 and config.seed == 0
  assert common.Config.from_overlays(configs, ['debug', 'long']).T == 100.0
  with pytest.raises(common.UsageError):
    common.Config.from_overlays(configs, ['missing'])


def test_counter_every_timer():
  counter = common.Counter()
  counter.increment(3)
  assert int(counter) == 3 and counter == 3 and counter < 4
  every = common.Every(2.0)
  assert [every(s) for s in (0, 1, 2, 3.5, 4, 9)] == [
      True, False, True, False, True, True]
  assert not common.Every(0)(0)
  timer = common.Timer()
  with timer.section('work'):
    pass
  result = timer.result()
  assert result['timer_count_work'] == 1
  assert result['timer_inside_work'] >= 0


def test_driver_marks():

  class Stepper:

    def __init__(self):
      self.value = 0

    def observe(self):
      return self.value

    def step(self):
      self.value += 1

  seen, marks = [], []
  driver = common.Driver(Stepper())
  driver.on_step(lambda step, obs: seen.append((step, obs)))
  driver.on_mark(marks.append)
  driver(4, [2, 4])
  assert seen == [(0, 0), (1, 1), (2, 2), (3, 3)]
  assert marks == [2, 4]


def test_logger_jsonl(tmp_path, capsys):
  logger = common.Logger(common.Counter(5), [
      common.TerminalOutput('test'), common.JSONLOutput(tmp_path)])
  logger.add({'mean': 0.5, 'count': 12}, prefix='occupancy')
  logger.scalar('tiny', 1e-6)
  logger.write()
  lines = (tmp_path / 'metrics.jsonl').read_text().splitlines()
  assert json.loads(lines[0]) == {
      'step': 5, 'occupancy_mean': 0.5, 'occupancy_count': 12.0,
      'tiny': 1e-6}
  assert '[test 5] occupancy_mean 0.5 / occupancy_count 12 / tiny 1e-6' in (
      capsys.readouterr().out)
  with pytest.raises(ValueError):
    logger.add({'vector': [1.0, 2.0]})


def test_manifest_commit(tmp_path):
  outdir = tmp_path / 'run'
  manifest = common.Manifest(outdir, 'simulate', _config(), '0.1.0')
  assert manifest.staging.exists() and not outdir.exists()
  manifest.write_csv('table.csv', [(1, 0.5), (2, 0.25)], ['n', 'value'])
  manifest.write_json('summary.json', {'passed': True})
  digests = manifest.digests()
  filename = manifest.commit()
  assert filename == outdir / 'manifest.json'
  assert not manifest.staging.exists()
  assert (outdir / 'table.csv').read_text() == 'n,value\n1,0.5\n2,0.25\n'
  payload = json.loads(filename.read_text())
  assert payload['experiment'] == 'simulate'
  assert payload['seed'] == 1
  assert payload['version'] == '0.1.0'
  assert 'outdir' not in payload['config']
  assert payload['outputs'] == digests
  assert payload['outputs']['table.csv'] == hashlib.sha256(
      (outdir / 'table.csv').read_bytes()).hexdigest()
  assert common.load_manifest(filename)['config']['bump.center'] == 1.0


def test_manifest_discard(tmp_path):
  outdir = tmp_path / 'run'
  manifest = common.Manifest(outdir, 'simulate', _config(), '0.1.0')
  manifest.write_csv('empty.csv', [], ['a', 'b'])
  manifest.discard()
  assert not manifest.staging.exists()
  assert not outdir.exists()


@pytest.mark.parametrize('strategy, workers', [
    ('none', 1), ('none', 3), ('thread', 3)])
def test_parallel_keeps_order(strategy, workers):
  with common.Parallel(workers, strategy) as parallel:
    assert parallel.map(lambda x: x * x, range(7)) == [
        x * x for x in range(7)]


def test_parallel_raises_worker_errors():

  def fail(x):
    raise ValueError(f'bad {x}')

  with common.Parallel(2, 'thread') as parallel:
    with pytest.raises(ValueError):
      parallel.map(fail, [1, 2])


def test_exit_codes():
  assert common.exit_code(common.FalsifiedError('x')) == common.EXIT_FALSIFIED
  assert common.exit_code(common.NumericError('x')) == common.EXIT_NUMERIC
  assert common.exit_code(
      common.EnumerationBudgetError('x')) == common.EXIT_NUMERIC
  assert common.exit_code(
      np.linalg.LinAlgError('x')) == common.EXIT_NUMERIC
  assert common.exit_code(common.UsageError('x')) == common.EXIT_USAGE
  assert common.exit_code(KeyError('x')) == common.EXIT_USAGE
  assert common.exit_code(RuntimeError('x')) is None


def test_sample_rng():
  first = common.sample_rng(3, 1).random(4)
  np.testing.assert_array_equal(first, common.sample_rng(3, 1).random(4))
  assert not np.array_equal(first, common.sample_rng(3, 2).random(4))
