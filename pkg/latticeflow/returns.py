import collections
import dataclasses

import numpy as np
import pandas as pd

from . import common
from . import height
from . import homspace
from . import stats


# Largest rounding error, in units of the current cell side, that a residual
# read from w may carry; past it the rest of the point is drawn uniformly.
_TOLERANCE = 1e-3


@dataclasses.dataclass(frozen=True)
class BoxIndex:
  """A level-n cell of the nested partition of I^m.

  Axis k of the level-n partition has cells of side e^{-n t b_k} anchored
  at the lower end of the parent cell; the last cell of each parent absorbs
  the remainder. `digits[k]` is the path of cell indices on axis k.
  """

  level: int
  digits: tuple
  lower: tuple
  upper: tuple

  @property
  def volume(self):
    return float(np.prod(np.subtract(self.upper, self.lower)))

  def refines(self, other):
    if self.level < other.level:
      return False
    return all(
        own[:other.level] == theirs
        for own, theirs in zip(self.digits, other.digits))

  def contains(self, w):
    w = np.atleast_1d(w)
    upper = np.array(self.upper)
    inside = (np.array(self.lower) <= w) & (w < upper)
    return bool(np.all(inside | ((w == upper) & (upper >= 1))))


def _check_point(spec, w):
  w = np.atleast_1d(np.asarray(w, np.float64))
  if w.shape != (spec.dim,):
    raise ValueError(f'Chart point needs {spec.dim} coordinates, got {w}.')
  if np.any(np.abs(w) > 1):
    raise ValueError(f'Point {w} lies outside the box [-1, 1]^{spec.dim}.')
  return w


def box_digits(spec, t, w, levels, rng=None):
  """Cell indices of w on levels 1..levels as an int array (levels, m).

  Residuals are tracked in units of the current cell side, so no level is
  out of reach. Once the residual has lost its precision the point is
  completed by uniform draws from `rng` inside its current cell; without an
  rng that raises NumericError.
  """
  w = _check_point(spec, w)
  if t <= 0:
    raise ValueError(f'Time step must be positive, got {t}.')
  growth = np.exp(t * spec.weights)
  residual = w + 1.0
  length = np.full(spec.dim, 2.0)
  amplification = np.ones(spec.dim)
  digits = np.zeros((levels, spec.dim), np.int64)
  for n in range(levels):
    stale = amplification * growth * np.finfo(np.float64).eps > _TOLERANCE
    if stale.any():
      if rng is None:
        raise common.NumericError(
            f'Level {n + 1} cells are below the resolution of w.')
      residual[stale] = rng.uniform(0, length[stale])
      amplification[stale] = 1.0
    scaled = residual * growth
    count = np.maximum(np.floor(length * growth), 1)
    index = np.minimum(np.floor(scaled), count - 1)
    residual = scaled - index
    length = np.where(index == count - 1, length * growth - index, 1.0)
    amplification *= growth
    digits[n] = index
  return digits


def box_of(spec, t, n, w):
  if n < 0:
    raise ValueError(f'Level must be nonnegative, got {n}.')
  digits = box_digits(spec, t, w, n)
  lower = np.full(spec.dim, -1.0)
  length = np.full(spec.dim, 2.0)
  growth = np.exp(t * spec.weights)
  for level, index in enumerate(digits, 1):
    side = np.exp(-level * t * spec.weights)
    count = np.maximum(np.floor(length * growth), 1)
    lower = lower + index * side
    length = np.where(index == count - 1, length * growth - index, 1.0)
  upper = lower + length * np.exp(-n * t * spec.weights)
  return BoxIndex(
      int(n), tuple(tuple(int(j) for j in axis) for axis in digits.T),
      tuple(lower.tolist()), tuple(np.minimum(upper, 1.0).tolist()))


def box_translate(spec, t, n, w, w2):
  """The xi with g_{nt} u(w2) x = u(xi) g_{nt} u(w) x."""
  w = np.atleast_1d(np.asarray(w, np.float64))
  w2 = np.atleast_1d(np.asarray(w2, np.float64))
  return np.exp(n * t * spec.weights) * (w2 - w)


@dataclasses.dataclass(frozen=True)
class Sublevel:
  """The compact set {alpha <= level}."""

  params: height.HeightParams
  level: float

  def __call__(self, y):
    return height.alpha(self.params, y) <= self.level

  def from_minima(self, minima):
    return height.alpha_from_minima(self.params, minima) <= self.level


def sublevel(params, level):
  return Sublevel(params, float(level))


def _members(K, bases):
  if isinstance(K, Sublevel):
    return K.from_minima(homspace.minima_batch(bases))
  return np.array(
      [bool(K(homspace.LatticePoint.normalized(b))) for b in bases])


def membership(spec, x, ws, dt, steps, K):
  """Whether g_{k dt} u(w) x lies in K, as a bool array (samples, steps)."""
  orbit = homspace.Orbit(spec, x, ws, dt)
  inside = []
  driver = common.Driver(orbit)
  driver.on_step(lambda step, obs: inside.append(_members(K, obs)))
  driver(steps)
  return np.stack(inside, 1) if inside else np.zeros((len(orbit), 0), bool)


def occupancy_discrete(spec, x, t, K, n, w):
  if n < 1:
    raise ValueError(f'Need at least one step, got {n}.')
  w = _check_point(spec, w)
  return float(membership(spec, x, w, t, n, K).mean())


def occupancy_continuous(spec, x, T, K, w, dt=0.01):
  if T <= 0:
    raise ValueError(f'Horizon must be positive, got {T}.')
  w = _check_point(spec, w)
  steps = max(1, int(round(T / dt)))
  return float(membership(spec, x, w, dt, steps, K).mean())


def flow_growth(spec, params, s):
  """Bound on alpha(g_s y) / alpha(y) for s >= 0."""
  exponents = np.sort(-spec.exponents)[::-1]
  return float(max(
      np.exp(s * exponents[:i].sum() / params.delta_eta[i - 1])
      for i in range(1, spec.d)))


Occupancy = collections.namedtuple('Occupancy', 'discrete, continuous, holds')


def discrete_to_continuous(spec, params, x, t, level, T, w, eps0, dt=0.01):
  """Discrete occupancy of {alpha <= level} against the continuous one.

  The continuous set is enlarged by the growth of alpha along g_s for
  s <= t, so every discrete visit covers a whole time step.
  """
  if not 0 < eps0 < 0.5:
    raise ValueError(f'Need 0 < eps0 < 1/2, got {eps0}.')
  if T < 2 * t / eps0:
    raise ValueError(f'Horizon {T} is below 2 t / eps0 = {2 * t / eps0}.')
  steps = int(round(t / dt))
  if steps < 1 or abs(steps * dt - t) > 1e-9:
    raise ValueError(f'Time step {t} must be a multiple of dt = {dt}.')
  n = int(np.floor(T / t + 1e-9))
  K0 = sublevel(params, level)
  K = sublevel(params, level * flow_growth(spec, params, t))
  discrete = occupancy_discrete(spec, x, t, K0, n, w)
  continuous = occupancy_continuous(spec, x, T, K, w, dt)
  holds = discrete <= 1 - eps0 or continuous > 1 - 2 * eps0
  return Occupancy(discrete, continuous, holds)


def tail_to_continuous(a0, t, m, eps0):
  if not 0 < a0 < 1:
    raise ValueError(f'Need 0 < a0 < 1, got {a0}.')
  if not 0 < eps0 < 0.5:
    raise ValueError(f'Need 0 < eps0 < 1/2, got {eps0}.')
  if t <= 0 or m < 1:
    raise ValueError(f'Need t > 0 and m >= 1, got {t} and {m}.')
  return a0 ** (1 / t), 2 ** m / a0, 2 * t / eps0


@dataclasses.dataclass(frozen=True)
class ReturnTrace:

  w: tuple
  t: float
  l0: float
  N: int
  sigma: tuple
  heights: tuple = ()

  def __post_init__(self):
    sigma = tuple(int(s) for s in self.sigma)
    assert sigma and sigma[0] == 0, sigma
    assert all(a < b for a, b in zip(sigma, sigma[1:])), sigma
    assert sigma[-1] <= self.N, (sigma, self.N)
    object.__setattr__(self, 'sigma', sigma)

  @property
  def censored(self):
    return self.sigma[-1] < self.N

  @property
  def gaps(self):
    return np.diff(self.sigma)

  def rows(self, sample_id):
    rows = [(sample_id, 0, 0, 0, False)]
    for i, (prev, curr) in enumerate(zip(self.sigma, self.sigma[1:]), 1):
      rows.append((sample_id, i, curr, curr - prev, False))
    if self.censored:
      rows.append((
          sample_id, len(self.sigma), self.N,
          self.N - self.sigma[-1], True))
    return rows


TRACE_COLUMNS = ('sample_id', 'i', 'sigma_i', 'gap', 'censored')


def return_traces(
    spec, params, x, t, l0, N, ws, seed=0, slack=None, offset=0):
  """Return times to {alpha <= l0} for a batch of chart points.

  Level n is tested at the lower corner of the level-n cell of w. Its
  lattice follows the exact recursion y_n = u(j_n) g_t y_{n-1} from
  y_0 = u(-1, ..., -1) x, where j_n are the level-n cell indices. Sample k
  completes its digits from the seed stream offset + k.
  """
  if N < 0:
    raise ValueError(f'Horizon must be nonnegative, got {N}.')
  start = height.alpha(params, x)
  if start > l0:
    raise ValueError(f'Start height {start} exceeds the threshold {l0}.')
  if slack is None:
    slack = height.comparability_constant(spec, params)
  ws = np.asarray(ws, np.float64).reshape(-1, spec.dim)
  digits = np.stack([
      box_digits(spec, t, w, N, common.sample_rng(seed, offset + index))
      for index, w in enumerate(ws)])
  d = spec.d
  bases = np.tile(spec.u(-np.ones(spec.dim)) @ x.basis, (len(ws), 1, 1))
  bases = homspace.reduce_batch(bases)
  heights = [height.alpha_from_minima(params, homspace.minima_batch(bases))]
  step = spec.g(t)
  for n in range(N):
    bases = homspace.reduce_batch(spec.u_batch(digits[:, n]) @ step @ bases)
    bases /= (np.linalg.det(bases) ** (1 / d))[:, None, None]
    heights.append(
        height.alpha_from_minima(params, homspace.minima_batch(bases)))
  heights = np.stack(heights, 1)
  hits = heights <= slack * l0
  hits[:, 0] = True
  return [
      ReturnTrace(
          tuple(w.tolist()), float(t), float(l0), int(N),
          tuple(np.flatnonzero(row).tolist()), tuple(h.tolist()))
      for w, row, h in zip(ws, hits, heights)]


def return_times(spec, params, x, t, l0, N, w, seed=0, slack=None):
  w = _check_point(spec, w)
  return return_traces(spec, params, x, t, l0, N, w, seed, slack)[0]


def gap_statistics(traces, min_gaps=100):
  """Pooled empirical tail P(gap >= q) of the uncensored return gaps."""
  gaps = np.concatenate([trace.gaps for trace in traces] or [np.zeros(0)])
  if len(gaps) < min_gaps:
    raise ValueError(
        f'Need at least {min_gaps} uncensored gaps, got {len(gaps)}.')
  qs = np.arange(1, int(gaps.max()) + 2)
  counts = (gaps[None, :] >= qs[:, None]).sum(1)
  return pd.DataFrame({
      'q': qs, 'tail': counts / len(gaps), 'count': counts,
      'total': len(gaps)})


TailFit = collections.namedtuple('TailFit', 'C0, theta0, r2, points')


def fit_tail(table, min_count=30):
  """Exponential tail fit with a certificate C0 e^{-theta0 q} above it."""
  rows = table[(table['count'] >= min_count) & (table['tail'] > 0)]
  if len(rows) < 2:
    raise ValueError(
        f'Need two tail points with count >= {min_count}, got {len(rows)}.')
  fit = stats.semilog_fit(rows['q'], rows['tail'])
  theta0 = -fit.slope
  C0 = max(1.0, float((rows['tail'] * np.exp(theta0 * rows['q'])).max()))
  return TailFit(C0, theta0, fit.r2, len(rows))


def _aligned_rule(step):
  # Nodes j * step in [-1, 1]; the end nodes absorb the leftover length.
  count = int(np.floor(1 / step + 1e-9))
  assert count >= 1, step
  nodes = np.arange(-count, count + 1) * step
  weights = np.full(len(nodes), step)
  weights[[0, -1]] = step / 2 + (1 - count * step)
  return nodes, weights


def shadowing_check(spec, x, t, n, J, psi, grid=32):
  """Both sides of the shadowing inequality on the cell J at level n.

  `J` is a BoxIndex or a (lower, upper) pair and `psi` maps a batch of
  bases to nonnegative values. The outer integral uses a midpoint rule on
  J. The inner nodes are spaced so that w + e^{-ntb} xi falls on the outer
  grid, hence both sides sample psi at the same points.
  """
  if isinstance(J, BoxIndex):
    lower, upper = np.array(J.lower), np.array(J.upper)
  else:
    lower, upper = (np.atleast_1d(np.asarray(v, np.float64)) for v in J)
  minimum = np.exp(-n * t * spec.weights)
  sides = upper - lower
  if np.any(sides < minimum * (1 - 1e-9)):
    raise ValueError(
        f'Box sides {sides} are below e^(-ntb) = {minimum}.')
  counts = [
      max(grid, int(np.ceil(side / h)) + 1)
      for side, h in zip(sides, minimum)]
  outer, outer_weights = homspace.box_grid(lower, upper, counts)
  rules = [
      _aligned_rule(side / count / h)
      for side, count, h in zip(sides, counts, minimum)]
  inner = np.stack([
      g.ravel() for g in np.meshgrid(*[r[0] for r in rules], indexing='ij')], -1)
  inner_weights = np.prod(np.stack([
      g.ravel() for g in np.meshgrid(*[r[1] for r in rules], indexing='ij')],
      -1), -1)
  direct = homspace.flowed_bases(spec, x, (n + 1) * t, outer)
  lhs = float(outer_weights @ psi(direct))
  middle = homspace.flowed_bases(spec, x, n * t, outer)
  moves = spec.g(t) @ spec.u_batch(inner)
  rhs = 0.0
  for weight, basis in zip(outer_weights, middle):
    values = psi(homspace.reduce_batch(moves @ basis))
    rhs += weight * float(inner_weights @ values)
  return lhs, rhs
