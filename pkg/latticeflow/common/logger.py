import json
import pathlib

import numpy as np


class Logger:

  def __init__(self, step, outputs):
    self._step = step
    self._outputs = outputs
    self._metrics = []

  def add(self, mapping, prefix=None):
    step = int(self._step)
    for name, value in dict(mapping).items():
      name = f'{prefix}_{name}' if prefix else name
      value = np.array(value, np.float64)
      if value.shape != ():
        raise ValueError(
            f"Shape {value.shape} for name '{name}' is not a scalar.")
      self._metrics.append((step, name, value))

  def scalar(self, name, value):
    self.add({name: value})

  def write(self):
    if not self._metrics:
      return
    for output in self._outputs:
      output(self._metrics)
    self._metrics.clear()


class TerminalOutput:

  def __init__(self, name=None):
    self._name = name

  def __call__(self, summaries):
    step = max(s for s, _, _ in summaries)
    scalars = {k: float(v) for _, k, v in summaries}
    formatted = {k: self._format_value(v) for k, v in scalars.items()}
    prefix = f'[{self._name} {step}]' if self._name else f'[{step}]'
    print(prefix, ' / '.join(f'{k} {v}' for k, v in formatted.items()))

  def _format_value(self, value):
    if value == 0:
      return '0'
    if not np.isfinite(value):
      return str(value)
    if 0.01 < abs(value) < 10000:
      value = f'{value:.2f}'
      value = value.rstrip('0')
      value = value.rstrip('.')
      return value
    value = f'{value:.1e}'
    value = value.replace('.0e', 'e')
    value = value.replace('+0', '')
    value = value.replace('+', '')
    value = value.replace('-0', '-')
    return value


class JSONLOutput:

  def __init__(self, logdir):
    self._logdir = pathlib.Path(logdir).expanduser()

  def __call__(self, summaries):
    by_step = {}
    for step, name, value in summaries:
      by_step.setdefault(step, {})[name] = float(value)
    with (self._logdir / 'metrics.jsonl').open('a') as f:
      for step, scalars in sorted(by_step.items()):
        f.write(json.dumps({'step': step, **scalars}, sort_keys=True) + '\n')
