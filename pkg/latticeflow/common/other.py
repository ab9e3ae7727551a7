import collections
import contextlib
import functools
import time

import numpy as np


@functools.total_ordering
class Counter:

  def __init__(self, initial=0):
    self.value = initial

  def __int__(self):
    return int(self.value)

  def __eq__(self, other):
    return int(self) == other

  def __lt__(self, other):
    return int(self) < other

  def increment(self, amount=1):
    self.value += amount


class Every:
  """Fires on the first call and then whenever the step advanced by `every`.

  Steps may be fractional (simulated time); a falsy `every` never fires.
  """

  def __init__(self, every):
    self._every = every
    self._last = None

  def __call__(self, step):
    step = float(step)
    if not self._every:
      return False
    if self._last is None:
      self._last = step
      return True
    if step >= self._last + self._every:
      skipped = (step - self._last) // self._every
      self._last += skipped * self._every
      return True
    return False


class Timer:

  def __init__(self):
    self._durations = collections.defaultdict(list)
    self._start_times = {}

  @contextlib.contextmanager
  def section(self, name):
    self.start(name)
    try:
      yield
    finally:
      self.end(name)

  def start(self, name):
    self._start_times[name] = time.perf_counter()

  def end(self, name):
    start = self._start_times.pop(name)
    self._durations[name].append(time.perf_counter() - start)

  def result(self):
    metrics = {}
    for key, durations in self._durations.items():
      metrics[f'timer_count_{key}'] = len(durations)
      metrics[f'timer_inside_{key}'] = float(np.sum(durations))
      durations.clear()
    return metrics


def sample_rng(seed, *index):
  return np.random.default_rng([int(seed)] + [int(i) for i in index])
