import os
import pathlib
import sys

from ruamel.yaml import YAML

from . import __version__
from . import common
from . import experiments


OUTDIR_VARIABLE = 'LATTICEFLOW_OUTDIR'

USAGE = f"""\
Usage: latticeflow [EXPERIMENT WORDS] [--configs NAME ...] [--file PATH]
                   [--manifest PATH] [--key value ...]

Experiments: {', '.join(sorted(experiments.EXPERIMENTS))}.
Words are joined with dashes, so `latticeflow rootsys decompose` runs
rootsys-decompose. Precedence: defaults < --configs overlays < --file
(key = value lines) < --manifest < flags. The environment variable
{OUTDIR_VARIABLE} overrides the default output directory."""


def load_config(argv):
  configs = YAML(typ='safe', pure=True).load(
      (pathlib.Path(__file__).parent / 'configs.yaml').read_text())
  parsed, remaining = common.Flags(
      configs=['defaults'], file='', manifest='',
  ).parse([arg for arg in argv if arg != '--help'], known_only=True)
  config = common.Config.from_overlays(configs, parsed.configs)
  if os.environ.get(OUTDIR_VARIABLE):
    config = config.update(outdir=os.environ[OUTDIR_VARIABLE])
  if parsed.file:
    config = config.load_text(parsed.file)
  if parsed.manifest:
    previous = common.load_manifest(parsed.manifest)
    config = config.update(previous['config'])
  words, rest = common.split_words(remaining)
  if words:
    config = config.update(experiment='-'.join(words))
  if '--help' in argv:
    rest.append('--help')
  return common.Flags(config, usage=USAGE).parse(rest)


def validate(config):
  if config.experiment not in experiments.EXPERIMENTS:
    raise common.UsageError(
        f'Unknown experiment {config.experiment}; choose from '
        f'{", ".join(sorted(experiments.EXPERIMENTS))}.')
  if config.seed < 0:
    raise common.UsageError(f'Seed must be nonnegative, got {config.seed}.')
  for key in ('T', 't', 'dt'):
    if config[key] <= 0:
      raise common.UsageError(f'Horizon {key} must be positive.')
  for key in ('horizons', 'times', 'birkhoff_horizons', 'gaps'):
    if min(config[key]) <= 0:
      raise common.UsageError(f'All {key} must be positive.')
  for key in ('samples', 'workers', 'record_every', 'trials', 'n_max'):
    if config[key] < 1:
      raise common.UsageError(f'{key} must be at least one.')
  if config.N < 0:
    raise common.UsageError(f'N must be nonnegative, got {config.N}.')
  if config.parallel not in ('none', 'thread', 'process'):
    raise common.UsageError(f'Unknown parallel strategy {config.parallel}.')


def run(config):
  validate(config)
  outdir = pathlib.Path(config.outdir).expanduser()
  print(config, '\n')
  print('Outdir', outdir)
  manifest = common.Manifest(outdir, config.experiment, config, __version__)
  timer = common.Timer()
  try:
    config.save(manifest.staging / 'config.yaml')
    step = common.Counter()
    logger = common.Logger(step, [
        common.TerminalOutput(config.experiment),
        common.JSONLOutput(manifest.staging),
    ])
    with common.Parallel(config.workers, config.parallel) as parallel:
      ctx = experiments.Context(config, manifest, logger, step, parallel)
      with timer.section(config.experiment):
        summary = experiments.EXPERIMENTS[config.experiment](ctx)
    logger.write()
    if (manifest.staging / 'metrics.jsonl').exists():
      manifest.track('metrics.jsonl')
    manifest.write_json('summary.json', summary)
    filename = manifest.commit()
  except BaseException:
    manifest.discard()
    raise
  for key, value in timer.result().items():
    print(f'{key}: {value:.3g}')
  print('Manifest', filename)
  return summary


def main(argv=None):
  argv = sys.argv[1:] if argv is None else list(argv)
  try:
    run(load_config(argv))
  except Exception as e:
    code = common.exit_code(e)
    if code is None:
      raise
    print(f'latticeflow: {type(e).__name__}: {e}', file=sys.stderr)
    return code
  return common.EXIT_OK


if __name__ == '__main__':
  sys.exit(main())
