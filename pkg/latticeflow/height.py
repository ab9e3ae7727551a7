import dataclasses
import itertools

import numpy as np

from . import common
from . import expanding
from . import homspace
from . import stats
from . import tensor


@dataclasses.dataclass(frozen=True)
class HeightParams:

  epsilon: float
  delta: tuple
  delta_eta: tuple
  sigma: float
  sigma1: float

  @property
  def d(self):
    return len(self.delta) + 1

  @property
  def powers(self):
    return np.array(self.delta) / np.array(self.delta_eta)

  def scale(self, degree):
    return self.epsilon ** (
        self.delta[degree - 1] / self.delta_eta[degree - 1])


def make_height_params(spec, epsilon):
  if not 0 < epsilon < 1:
    raise ValueError(f'Epsilon must lie in (0, 1), got {epsilon}.')
  d = spec.d
  exponents = np.sort(spec.exponents)[::-1]
  delta = tuple((d - i) * i for i in range(1, d))
  delta_eta = tuple(float(exponents[:i].sum()) for i in range(1, d))
  assert min(delta_eta) > 0, delta_eta
  return HeightParams(
      float(epsilon), delta, delta_eta,
      1 / min(delta_eta), 1 / max(delta_eta))


def phi(params, v):
  degree = v.degree
  if not 0 < degree < params.d or v.dim != params.d:
    raise ValueError(
        f'Need a degree in (0, {params.d}) on R^{params.d}, got '
        f'degree {degree} on R^{v.dim}.')
  norm = v.norm
  if norm == 0:
    return np.inf
  return params.scale(degree) * norm ** (-1 / params.delta_eta[degree - 1])


def alpha_from_minima(params, minima):
  """Heights from minima profiles of shape (..., d - 1)."""
  minima = np.asarray(minima, np.float64)
  eta = np.array(params.delta_eta)
  scales = params.epsilon ** params.powers
  return (scales * minima ** (-1 / eta)).max(-1)


def alpha(params, x):
  if x.dim != params.d:
    raise ValueError(f'Lattice in R^{x.dim} for heights on R^{params.d}.')
  return float(alpha_from_minima(params, homspace.minima_profile(x)))


@dataclasses.dataclass(frozen=True)
class Representation:
  """The exterior power of a degree or the adjoint action on sl_d.

  Both bases diagonalize the flow: lexicographic wedges for exterior
  powers, the Frobenius-orthonormal basis of `expanding.sl_basis` for the
  adjoint action.
  """

  spec: homspace.FlowSpec
  degree: object

  @property
  def dim(self):
    if self.degree == 'adjoint':
      return self.spec.d ** 2 - 1
    return tensor.wedge_dim(self.spec.d, self.degree)

  def __call__(self, matrix):
    return self.batch(np.asarray(matrix)[None])[0]

  def batch(self, matrices):
    matrices = np.asarray(matrices, np.float64)
    if self.degree != 'adjoint':
      return tensor.exterior_action_batch(matrices, self.degree)
    basis = expanding.sl_basis(self.spec.d)
    inverses = np.linalg.inv(matrices)
    conjugated = np.einsum(
        'sij,bjk,skl->sbil', matrices, basis, inverses)
    return np.einsum('aij,sbij->sab', basis, conjugated)

  def expanding_mask(self):
    return np.diag(self(self.spec.g(1.0))) > 1 + 1e-12


def representation(spec, degree):
  if degree != 'adjoint':
    if not isinstance(degree, (int, np.integer)) or not 0 < degree < spec.d:
      raise ValueError(
          f"Degree must be 'adjoint' or lie in (0, {spec.d}), got {degree}.")
    degree = int(degree)
  return Representation(spec, degree)


def _unit_vectors(dim, count, rng):
  samples = rng.normal(size=(count, dim))
  samples /= np.linalg.norm(samples, axis=1, keepdims=True)
  return np.concatenate([np.eye(dim), samples], 0)


def contraction_integral(
    spec, degree, t, theta, grid=64, v_samples=64, samples=10000, seed=0):
  """Estimate of sup over unit v of the integral of |g_t u(w) v|^-theta."""
  if theta <= 0 or t <= 0:
    raise ValueError(f'Need theta > 0 and t > 0, got {theta} and {t}.')
  rep = representation(spec, degree)
  nodes, weights = homspace.box_quadrature(spec.dim, grid, samples, seed)
  matrices = rep.batch(spec.g(t) @ spec.u_batch(nodes))
  vectors = _unit_vectors(rep.dim, v_samples, common.sample_rng(seed, 1))
  best = 0.0
  for chunk in np.array_split(vectors, max(1, len(vectors) // 16)):
    norms = np.linalg.norm(np.einsum('qij,sj->sqi', matrices, chunk), axis=-1)
    best = max(best, float((norms ** -theta @ weights).max()))
  return best


def good_sublevel_measure(spec, degree, v, r, samples=10000, seed=0):
  """Monte Carlo estimate of the normalized measure of D+(v, r)."""
  rep = representation(spec, degree)
  coords = v.coords if isinstance(v, tensor.MultiVector) else np.asarray(v)
  if coords.shape != (rep.dim,):
    raise ValueError(f'Vector needs {rep.dim} coordinates.')
  if abs(np.linalg.norm(coords) - 1) > 1e-9:
    raise ValueError('Vector must have unit norm.')
  if r < 0:
    raise ValueError(f'Radius must be nonnegative, got {r}.')
  rng = common.sample_rng(seed, 0)
  ws = rng.uniform(-1, 1, (samples, spec.dim))
  images = rep.batch(spec.u_batch(ws)) @ coords
  projected = np.linalg.norm(images[:, rep.expanding_mask()], axis=-1)
  return float(np.mean(projected <= r))


def phi_contraction(
    spec, params, v, t, theta, grid=64, samples=10000, seed=0):
  """Normalized integral of phi^theta(g_t u(w) v) over the box."""
  nodes, weights = homspace.box_quadrature(spec.dim, grid, samples, seed)
  actions = tensor.exterior_action_batch(
      spec.g(t) @ spec.u_batch(nodes), v.degree)
  norms = np.linalg.norm(actions @ v.coords, axis=-1)
  eta = params.delta_eta[v.degree - 1]
  values = params.scale(v.degree) * norms ** (-1 / eta)
  return float(weights @ values ** theta / 2 ** spec.dim)


def drift_check(
    spec, params, x, t, grid=64, samples=10000, seed=0, theta=1.0):
  """Normalized integral of alpha^theta(g_t u(w) x) and alpha(x)."""
  nodes, weights = homspace.box_quadrature(spec.dim, grid, samples, seed)
  bases = homspace.flowed_bases(spec, x, t, nodes)
  heights = alpha_from_minima(params, homspace.minima_batch(bases))
  lhs = float(weights @ heights ** theta / 2 ** spec.dim)
  return lhs, alpha(params, x)


def fit_drift(alphas, lhs):
  """Least squares lhs ~ c * alpha + b, returned as (c, b, r2)."""
  fit = stats.linear_fit(alphas, lhs)
  return fit.slope, fit.intercept, fit.r2


def comparability_constant(spec, params):
  """Bound on alpha(u(xi) y) / alpha(y) for xi in [-2, 2]^m.

  Each entry of the exterior powers of u(xi) is affine in every chart
  coordinate separately, so the operator norm peaks at a vertex.
  """
  vertices = np.array(list(itertools.product([-2.0, 2.0], repeat=spec.dim)))
  matrices = spec.u_batch(vertices)
  best = 1.0
  for degree in range(1, spec.d):
    actions = tensor.exterior_action_batch(matrices, degree)
    norm = np.linalg.norm(actions, ord=2, axis=(1, 2)).max()
    best = max(best, norm ** (1 / params.delta_eta[degree - 1]))
  return float(best)
