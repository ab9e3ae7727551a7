import collections
import math
import warnings

import numpy as np
import pandas as pd

from . import common


LDConstants = collections.namedtuple('LDConstants', 'theta, Q, bound')


def _check(C0, theta0, eps):
  if C0 < 1:
    raise ValueError(f'Certificate constant C0 must be >= 1, got {C0}.')
  if theta0 <= 0:
    raise ValueError(f'Certificate rate must be positive, got {theta0}.')
  if not 0 < eps < 1:
    raise ValueError(f'Proportion eps must lie in (0, 1), got {eps}.')


def q_bound(C0, theta0, eps):
  """The real lower bound on the truncation level Q."""
  _check(C0, theta0, eps)
  inner = (math.exp(eps * theta0 / 4) - 1) * (1 - math.exp(-theta0 / 2)) / C0
  return 2 * math.log(inner) / -theta0


def derive_constants(C0, theta0, eps):
  bound = q_bound(C0, theta0, eps)
  return LDConstants(eps * theta0 / 4, max(1, math.ceil(bound)), bound)


def truncate(Q, q):
  assert Q >= 1, Q
  return q if q >= Q else 0


def rhs_base(C0, theta0, Q, eps):
  if min(C0, theta0, Q, eps) <= 0:
    raise ValueError('All parameters must be positive.')
  keep = 1 - math.exp(-theta0 / 2)
  return (keep + C0 * math.exp(-Q * theta0 / 2)) / (
      math.exp(eps * theta0 / 2) * keep)


class GapProcess:
  """Increments xi_i - xi_{i-1} with P(gap >= q | past) <= C0 e^{-q theta0}."""

  C0 = 1.0
  theta0 = 1.0

  def sample(self, rng, trials, steps):
    raise NotImplementedError


class GeometricGaps(GapProcess):

  def __init__(self, theta0=1.0):
    self.C0 = 1.0
    self.theta0 = float(theta0)

  def sample(self, rng, trials, steps):
    return rng.geometric(1 - math.exp(-self.theta0), (trials, steps)) - 1


class DeterministicGaps(GapProcess):

  def __init__(self, gap=1):
    self.gap = int(gap)
    self.C0 = math.e ** self.gap
    self.theta0 = 1.0

  def sample(self, rng, trials, steps):
    return np.full((trials, steps), self.gap, np.int64)


class MarkovGaps(GapProcess):
  """Two-state chain whose state is the parity of the previous gap.

  After an even gap the tail is exactly min(1, C0 e^{-q theta0}); after an
  odd gap it is geometric with twice the rate.
  """

  def __init__(self, C0=2.0, theta0=1.0):
    self.C0 = float(C0)
    self.theta0 = float(theta0)

  def sample(self, rng, trials, steps):
    gaps = np.zeros((trials, steps), np.int64)
    state = np.zeros(trials, bool)
    for k in range(steps):
      uniform = 1 - rng.random(trials)
      saturated = np.floor(np.log(self.C0 / uniform) / self.theta0)
      thin = rng.geometric(1 - math.exp(-2 * self.theta0), trials) - 1
      gaps[:, k] = np.where(state, thin, saturated)
      state = gaps[:, k] % 2 == 1
    return gaps


class TraceGaps(GapProcess):
  """Return gaps of dynamical traces, chained trace after trace."""

  def __init__(self, traces, C0, theta0):
    self.sequences = [t.gaps for t in traces if len(t.gaps)]
    if not self.sequences:
      raise ValueError('No trace has a complete return gap.')
    self.C0 = float(C0)
    self.theta0 = float(theta0)

  def sample(self, rng, trials, steps):
    gaps = np.zeros((trials, steps), np.int64)
    for row in gaps:
      filled = 0
      while filled < steps:
        chosen = self.sequences[rng.integers(len(self.sequences))]
        size = min(len(chosen), steps - filled)
        row[filled:filled + size] = chosen[:size]
        filled += size
    return gaps


def certificate_violations(gaps, C0, theta0):
  """Tail levels q whose empirical tail exceeds the certificate."""
  gaps = np.asarray(gaps, np.int64).ravel()
  return _tail_violations(np.bincount(gaps, minlength=1), C0, theta0)


def _tail_violations(counts, C0, theta0):
  total = counts.sum()
  tails = np.cumsum(counts[::-1])[::-1]
  violations = []
  for q in range(1, len(counts)):
    tail = tails[q] / total
    bound = min(1.0, C0 * math.exp(-q * theta0))
    error = math.sqrt(max(bound * (1 - bound), 1 / total) / total)
    if tail > bound + 4 * error:
      violations.append(q)
  return violations


def _run_trials(proc, constants, eps, n_max, seed, start, stop):
  # Trial k always draws from the stream (seed, k).
  gaps = np.concatenate([
      proc.sample(common.sample_rng(seed, trial), 1, n_max)
      for trial in range(start, stop)])
  truncated = np.where(gaps >= constants.Q, gaps, 0)
  means = np.cumsum(truncated, 1) / np.arange(1, n_max + 1)
  hits = (means >= eps).sum(0)
  return hits, np.bincount(gaps.ravel(), minlength=1)


def empirical_ld(
    proc, eps, n_max, trials, seed=0, chunk=10000, parallel=None):
  """Frequencies of (1/n) sum 1_Q(gap_i) >= eps against e^{-theta n}.

  Every trial has its own seeded stream, so `chunk` only sets the work
  split between workers.
  """
  constants = derive_constants(proc.C0, proc.theta0, eps)
  if n_max < 1 or trials < 1:
    raise ValueError(f'Need n_max, trials >= 1, got {n_max}, {trials}.')
  jobs = [
      (proc, constants, eps, n_max, seed, start, min(start + chunk, trials))
      for start in range(0, trials, chunk)]
  if parallel is None:
    results = [_run_trials(*job) for job in jobs]
  else:
    results = parallel.map(lambda job: _run_trials(*job), jobs)
  hits = sum(result[0] for result in results)
  counts = np.zeros(max(len(result[1]) for result in results), np.int64)
  for _, part in results:
    counts[:len(part)] += part
  violations = _tail_violations(counts, proc.C0, proc.theta0)
  if violations:
    warnings.warn(
        f'Gap process exceeds its certificate (C0={proc.C0}, '
        f'theta0={proc.theta0}) at q = {violations}.')
  ns = np.arange(1, n_max + 1)
  empirical = hits / trials
  return pd.DataFrame({
      'n': ns,
      'empirical': empirical,
      'bound': np.exp(-constants.theta * ns),
      'stderr': np.sqrt(empirical * (1 - empirical) / trials),
  })
