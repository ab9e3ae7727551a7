import collections
import dataclasses
import math

import numpy as np
import scipy.linalg

from . import common
from . import homspace
from . import stats


class Observable:
  """Bounded function of a lattice, evaluated on batches of bases."""

  bound = 1.0
  lipschitz = None

  def __call__(self, bases):
    raise NotImplementedError

  def evaluate(self, x):
    return float(self(x.basis[None])[0])

  @staticmethod
  def constant(value):
    return ConstantObservable(float(value))


@dataclasses.dataclass(frozen=True)
class ConstantObservable(Observable):

  value: float

  @property
  def bound(self):
    return abs(self.value)

  @property
  def lipschitz(self):
    return 0.0

  def __call__(self, bases):
    return np.full(len(bases), self.value)


def _smooth_step(u):
  # C-infinity step from 0 at u <= 0 to 1 at u >= 1.
  u = np.asarray(u, np.float64)
  with np.errstate(divide='ignore'):
    left = np.where(u > 0, np.exp(-1 / np.where(u > 0, u, 1)), 0.0)
    right = np.where(u < 1, np.exp(-1 / np.where(u < 1, 1 - u, 1)), 0.0)
  return left / (left + right)


@dataclasses.dataclass(frozen=True)
class MinimaBump(Observable):
  """Gaussian bump in lambda_1, switched off smoothly towards the cusp.

  The cutoff vanishes for lambda_1 <= cutoff and equals one from twice the
  cutoff on. Unless given, `lipschitz` is the largest slope of the profile
  against log lambda_1, which moves by at most log ||g|| under g.
  """

  center: float = 1.0
  width: float = 0.25
  cutoff: float = 0.1
  lipschitz: float = None

  def __post_init__(self):
    if min(self.center, self.width, self.cutoff) <= 0:
      raise ValueError(
          f'Bump needs positive center, width and cutoff, got {self}.')
    if self.lipschitz is None:
      object.__setattr__(self, 'lipschitz', self._log_slope())

  def profile(self, shortest):
    shortest = np.asarray(shortest, np.float64)
    bump = np.exp(-0.5 * ((shortest - self.center) / self.width) ** 2)
    return bump * _smooth_step((shortest - self.cutoff) / self.cutoff)

  def _log_slope(self, points=20001):
    logs = np.linspace(
        math.log(self.cutoff), math.log(self.center + 12 * self.width), points)
    slopes = np.gradient(self.profile(np.exp(logs)), logs)
    return float(np.abs(slopes).max())

  def __call__(self, bases):
    return self.profile(homspace.shortest_batch(bases))


def calibrate(psi, d, seed=0, pairs=1000, scale=0.05):
  """Lipschitz constant of psi on random near-identity moves, inflated 2x."""
  rng = common.sample_rng(seed, 0)
  ratios = []
  for _ in range(pairs):
    y = homspace.random_lattice(d, rng)
    generator = rng.normal(size=(d, d))
    generator -= np.trace(generator) / d * np.eye(d)
    generator *= scale * rng.uniform() / np.linalg.norm(generator)
    move = scipy.linalg.expm(generator)
    distance = np.linalg.norm(move - np.eye(d))
    if distance == 0:
      continue
    values = psi(np.stack([y.basis, move @ y.basis]))
    ratios.append(abs(values[1] - values[0]) / distance)
  return 2 * float(max(ratios, default=0.0))


def _shift_matrix(spec, s, axis):
  if not 0 <= axis < spec.dim:
    raise ValueError(f'Axis {axis} out of range for {spec.dim} coordinates.')
  w = np.zeros(spec.dim)
  w[axis] = s
  return spec.u(w)


def shifted_values(spec, x, psi, s, axis, t, ws):
  """psi(g_t u(w) x) - psi(u(s e_axis) g_t u(w) x) for a batch of w."""
  shift = _shift_matrix(spec, s, axis)
  bases = homspace.flowed_bases(spec, x, t, ws)
  return psi(bases) - psi(homspace.reduce_batch(shift @ bases))


def psi_shifted(spec, x, psi, s, axis, t, w):
  w = np.atleast_1d(np.asarray(w, np.float64))
  return float(shifted_values(spec, x, psi, s, axis, t, w[None])[0])


def _nodes(spec, axis, t, l, points_per_scale, samples, seed):
  if spec.dim == 1:
    scale = math.exp(spec.weights[axis] * max(t, l))
    count = max(64, math.ceil(points_per_scale * 2 * scale))
    return homspace.box_grid([-1.0], [1.0], [count])
  return homspace.box_quadrature(spec.dim, samples=samples, seed=seed)


def correlation(
    spec, x, psi, s, axis, t, l, points_per_scale=4, samples=100000,
    seed=0, chunk=65536):
  """Quadrature of the box integral of psi_t(w) psi_l(w).

  One chart dimension uses a midpoint rule resolving the faster of the two
  oscillation scales; more dimensions use seeded Monte Carlo.
  """
  if t <= 0 or l <= 0:
    raise ValueError(f'Need t, l > 0, got {t} and {l}.')
  nodes, weights = _nodes(spec, axis, t, l, points_per_scale, samples, seed)
  total = 0.0
  for start in range(0, len(nodes), chunk):
    part = nodes[start: start + chunk]
    first = shifted_values(spec, x, psi, s, axis, t, part)
    second = shifted_values(spec, x, psi, s, axis, l, part)
    total += float(weights[start: start + chunk] @ (first * second))
  return total


DecayFit = collections.namedtuple('DecayFit', 'slope, intercept, r2, dropped')


def decay_fit(gaps, values):
  """Least squares of log |corr| against the gap, zeros dropped."""
  gaps = np.asarray(gaps, np.float64)
  values = np.abs(np.asarray(values, np.float64))
  if len(gaps) < 4:
    raise ValueError(f'Need at least four gaps, got {len(gaps)}.')
  fit = stats.semilog_fit(gaps, values)
  return DecayFit(
      fit.slope, fit.intercept, fit.r2, int(np.sum(values == 0)))


def window_average(
    spec, x, psi, s, axis, t, l, w, points_per_scale=4, chunk=65536):
  """Average of psi_l over the window of half-width e^{-(l+t)b/2} at w."""
  w = np.atleast_1d(np.asarray(w, np.float64))
  weight = spec.weights[axis]
  half = math.exp(-(l + t) * weight / 2)
  count = max(64, math.ceil(
      points_per_scale * 2 * half * math.exp(l * weight)))
  offsets = -half + (np.arange(count) + 0.5) * 2 * half / count
  total = 0.0
  for start in range(0, count, chunk):
    nodes = np.tile(w, (len(offsets[start: start + chunk]), 1))
    nodes[:, axis] += offsets[start: start + chunk]
    total += float(shifted_values(spec, x, psi, s, axis, l, nodes).sum())
  return total / count


def birkhoff_average(spec, x, psi, s, axis, ws, horizons, dt=0.01):
  """Time averages of psi_t(w) over [0, T] for every horizon T.

  Returns an array (horizons, samples) of left Riemann averages.
  """
  horizons = np.atleast_1d(np.asarray(horizons, np.float64))
  if np.any(horizons <= 0):
    raise ValueError(f'Horizons must be positive, got {horizons}.')
  shift = _shift_matrix(spec, s, axis)
  orbit = homspace.Orbit(spec, x, ws, dt)
  marks = [max(1, int(round(T / dt))) for T in horizons]
  total = np.zeros(len(orbit))
  averages = {}

  def accumulate(step, obs):
    nonlocal total
    total = total + psi(obs) - psi(homspace.reduce_batch(shift @ obs))

  driver = common.Driver(orbit)
  driver.on_step(accumulate)
  driver.on_mark(lambda mark: averages.setdefault(mark, total / mark))
  driver(max(marks), marks)
  return np.stack([averages[mark] for mark in marks])
