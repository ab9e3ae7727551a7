import re
import sys

from . import errors


def split_words(argv):
  """Leading positional words and the flags after them."""
  argv = list(argv)
  count = next(
      (i for i, arg in enumerate(argv) if arg.startswith('--')), len(argv))
  return argv[:count], argv[count:]


def _group(argv):
  # Yields (flag, values) with flag None for values before the first flag.
  flag, values = None, []
  for arg in argv:
    if not arg.startswith('--'):
      values.append(arg)
      continue
    if flag or values:
      yield flag, values
    flag, values = arg, []
    if '=' in arg:
      flag, value = arg.split('=', 1)
      values = [value]
  if flag or values:
    yield flag, values


def _parse_bool(text, key):
  if text not in ('False', 'True'):
    raise errors.UsageError(f"Expected bool but got '{text}' for key '{key}'.")
  return text == 'True'


def _parse_int(text, key):
  try:
    number = float(text)  # Scientific notation like 1e5 is an int.
  except ValueError:
    raise errors.UsageError(f"Expected int but got '{text}' for key '{key}'.")
  if not number.is_integer():
    raise errors.UsageError(
        f"Expected int but got float '{text}' for key '{key}'.")
  return int(number)


class Flags:

  def __init__(self, *args, usage=None, **kwargs):
    from .config import Config
    self._config = Config(*args, **kwargs)
    self._usage = usage

  def parse(self, argv=None, known_only=False, help_exists=None):
    if help_exists is None:
      help_exists = not known_only
    argv = sys.argv[1:] if argv is None else list(argv)
    if '--help' in argv:
      self._print_help()
      if help_exists:
        sys.exit()
    parsed, remaining = {}, []
    for flag, values in _group(argv):
      if flag is None:
        remaining += values
        continue
      keys = self._match(flag[2:])
      if not keys:
        remaining += [flag] + values
        continue
      if not values:
        raise errors.UsageError(f"Flag '{flag}' was not followed by any values.")
      for key in keys:
        parsed[key] = self._parse_value(self._config[key], values, key)
    config = self._config.update(parsed)
    if known_only:
      return config, remaining
    unknown = [arg for arg in remaining if arg.startswith('--')]
    if unknown:
      raise errors.UsageError(
          f"Flag '{unknown[0]}' did not match any config keys.")
    if remaining:
      raise errors.UsageError(
          'Unexpected arguments: ' + ' '.join(f"'{x}'" for x in remaining))
    return config

  def _match(self, name):
    if self._config.IS_PATTERN.match(name):
      pattern = re.compile(name)
      return [k for k in self._config.flat if pattern.match(k)]
    return [name] if name in self._config.flat else []

  def _print_help(self):
    if self._usage:
      print(self._usage)
    print('\nHelp:')
    lines = str(self._config).split('\n')[2:]
    print('\n'.join('--' + re.sub(r'[:,\[\]]', '', x) for x in lines))

  def _parse_value(self, default, values, key):
    if isinstance(default, tuple):
      if len(values) == 1:
        values = values[0].split(',')
      return tuple(self._parse_value(default[0], [x], key) for x in values)
    if len(values) != 1:
      raise errors.UsageError(
          f"Expected a single value for key '{key}' but got {list(values)}.")
    text = values[0].strip()
    if isinstance(default, bool):
      return _parse_bool(text, key)
    if isinstance(default, int):
      return _parse_int(text, key)
    try:
      return type(default)(text)
    except ValueError:
      raise errors.UsageError(
          f"Expected {type(default).__name__} but got '{text}' for key "
          f"'{key}'.")
