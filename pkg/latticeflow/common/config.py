import json
import pathlib
import re

from . import errors


SEP = '.'
IS_PATTERN = re.compile(r'.*[^A-Za-z0-9_.-].*')
TEXT_SUFFIXES = ('.txt', '.cfg', '.conf', '.ini', '')
LEAF_TYPES = (str, float, int, bool)


def flatten(mapping):
  """Dotted keys for nested dicts; keys that are patterns escape the dot."""
  result = {}
  for key, value in mapping.items():
    if not isinstance(value, dict):
      result[key] = value
      continue
    for inner, leaf in flatten(value).items():
      escaped = IS_PATTERN.match(key) or IS_PATTERN.match(inner)
      result[key + ('\\' + SEP if escaped else SEP) + inner] = leaf
  return result


def nest(flat):
  result = {}
  for key, value in flat.items():
    *parents, leaf = key.split(SEP)
    node = result
    for part in parents:
      node = node.setdefault(part, {})
    node[leaf] = value
  return result


def _normalize(flat):
  # JSON round trip turns numpy scalars and tuples into plain values.
  result = json.loads(json.dumps(flat))
  for key, value in result.items():
    assert not IS_PATTERN.match(key), key
    if not isinstance(value, list):
      continue
    if not value:
      raise TypeError(
          f"Empty list for '{key}'; its element type would be unknown.")
    kind = type(value[0])
    if kind not in LEAF_TYPES:
      raise TypeError(
          f"List '{key}' holds {kind.__name__}; only strings, floats, ints "
          f"and bools are allowed.")
    if any(type(x) is not kind for x in value[1:]):
      raise TypeError(f"List '{key}' mixes element types.")
    result[key] = tuple(value)
  return result


def _describe(value):
  if isinstance(value, tuple):
    return '[' + ', '.join(str(x) for x in value) + ']', (
        type(value[0]).__name__ + 's')
  return str(value), type(value).__name__


class Config(dict):
  """Immutable nested run configuration.

  Values are addressed by attribute, by dotted key or by regex pattern in
  `update()`. Updates keep the type of the value they replace, so a config
  loaded from text or flags still holds floats where the defaults do.
  """

  SEP = SEP
  IS_PATTERN = IS_PATTERN

  def __init__(self, *args, **kwargs):
    self._flat = _normalize(flatten(dict(*args, **kwargs)))
    self._nested = nest(self._flat)
    # dict(config) and pickling read the base dict.
    super().__init__(self._nested)

  @classmethod
  def from_overlays(cls, configs, names):
    """Start from `configs['defaults']` and apply the named blocks in order."""
    config = cls(configs['defaults'])
    for name in names:
      if name not in configs:
        raise errors.UsageError(
            f'Unknown config overlay {name}; choose from '
            f'{", ".join(sorted(configs))}.')
      config = config.update(configs[name])
    return config

  @property
  def flat(self):
    return self._flat.copy()

  def without(self, *keys):
    return type(self)({k: v for k, v in self._flat.items() if k not in keys})

  def save(self, filename):
    filename = pathlib.Path(filename)
    plain = json.loads(json.dumps(dict(self)))
    if filename.suffix == '.json':
      filename.write_text(json.dumps(plain, indent=2, sort_keys=True))
    elif filename.suffix in ('.yml', '.yaml'):
      from ruamel.yaml import YAML
      with filename.open('w') as f:
        YAML(typ='safe', pure=True).dump(plain, f)
    else:
      raise NotImplementedError(filename.suffix)

  @classmethod
  def load(cls, filename):
    filename = pathlib.Path(filename)
    if filename.suffix == '.json':
      return cls(json.loads(filename.read_text()))
    elif filename.suffix in ('.yml', '.yaml'):
      from ruamel.yaml import YAML
      return cls(YAML(typ='safe', pure=True).load(filename.read_text()))
    else:
      raise NotImplementedError(filename.suffix)

  def load_text(self, filename):
    """Apply a plain-text file of `key = value` lines on top of this config.

    Values are parsed like command line flags, so `alpha = 1,2` and
    `--alpha 1,2` are equivalent. Text after `#` is ignored.
    """
    filename = pathlib.Path(filename)
    if filename.suffix not in TEXT_SUFFIXES:
      return self.update(type(self).load(filename).flat)
    argv = []
    for number, line in enumerate(filename.read_text().splitlines(), 1):
      line = line.split('#', 1)[0].strip()
      if not line:
        continue
      key, sep, value = line.partition('=')
      if not sep:
        raise errors.UsageError(
            f"Expected 'key = value' in {filename} line {number}: '{line}'.")
      value = ','.join(part.strip() for part in value.split(','))
      argv += [f'--{key.strip()}', value]
    from . import flags
    return flags.Flags(self).parse(argv)

  def __contains__(self, name):
    try:
      self[name]
    except KeyError:
      return False
    return True

  def __getattr__(self, name):
    if name.startswith('_'):
      return super().__getattr__(name)
    try:
      return self[name]
    except KeyError:
      raise AttributeError(name)

  def __getitem__(self, name):
    node = self._nested
    for part in name.split(SEP):
      node = node[part]
    return type(self)(node) if isinstance(node, dict) else node

  def __setattr__(self, key, value):
    if key.startswith('_'):
      return super().__setattr__(key, value)
    raise AttributeError(f"Config is immutable; use update() to set '{key}'.")

  def __setitem__(self, key, value):
    if key.startswith('_'):
      return super().__setitem__(key, value)
    raise AttributeError(f"Config is immutable; use update() to set '{key}'.")

  def __reduce__(self):
    return (type(self), (dict(self),))

  def __str__(self):
    rows = [(key + ':',) + _describe(val) for key, val in self._flat.items()]
    width_key = max((len(row[0]) for row in rows), default=0)
    width_val = max((len(row[1]) for row in rows), default=0)
    lines = ['\nConfig:'] + [
        f'{key.ljust(width_key)}  {val.ljust(width_val)}  ({kind})'
        for key, val, kind in rows]
    return '\n'.join(lines)

  def update(self, *args, **kwargs):
    result = self._flat.copy()
    for key, new in flatten(dict(*args, **kwargs)).items():
      if IS_PATTERN.match(key):
        pattern = re.compile(key)
        targets = [k for k in result if pattern.match(k)]
      else:
        targets = [key] if key in result else []
      if not targets:
        raise KeyError(f'Unknown key or pattern {key}.')
      for target in targets:
        result[target] = self._convert(result[target], new, target)
    return type(self)(result)

  def _convert(self, old, new, key):
    try:
      if isinstance(old, tuple):
        new = new if isinstance(new, (list, tuple)) else (new,)
        return tuple(self._convert(old[0], x, key) for x in new)
      if isinstance(old, bool):
        return bool(new)
      if isinstance(old, int) and isinstance(new, float) and not new.is_integer():
        raise ValueError(new)
      return type(old)(new)
    except (ValueError, TypeError):
      raise TypeError(
          f"Cannot convert '{new}' to {type(old).__name__} for key '{key}' "
          f"(currently '{old}').")
