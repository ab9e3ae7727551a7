import dataclasses
import math

import numpy as np
import scipy.special
import scipy.stats

from . import common
from . import tensor


@dataclasses.dataclass(frozen=True)
class FlowSpec:
  """Diagonal flow g_t = diag(e^{a t}, e^{-b t}) with its block unipotent chart.

  The chart coordinate k = i * n + j is the matrix entry (i, m + j) of u(w);
  conjugation scales it by e^{t * weights[k]} with weights[k] = a_i + b_j.
  """

  a: tuple
  b: tuple

  @property
  def m(self):
    return len(self.a)

  @property
  def n(self):
    return len(self.b)

  @property
  def d(self):
    return self.m + self.n

  @property
  def dim(self):
    return self.m * self.n

  @property
  def exponents(self):
    return np.array(self.a + tuple(-x for x in self.b), np.float64)

  @property
  def weights(self):
    return np.array([ai + bj for ai in self.a for bj in self.b], np.float64)

  @property
  def entries(self):
    return [(i, self.m + j) for i in range(self.m) for j in range(self.n)]

  def g(self, t):
    return np.diag(np.exp(t * self.exponents))

  def u(self, w):
    w = np.atleast_1d(np.asarray(w, np.float64))
    if w.shape != (self.dim,):
      raise ValueError(f'Chart point needs {self.dim} coordinates, got {w}.')
    matrix = np.eye(self.d)
    for value, (row, col) in zip(w, self.entries):
      matrix[row, col] = value
    return matrix

  def u_batch(self, ws):
    ws = np.asarray(ws, np.float64).reshape(-1, self.dim)
    matrices = np.tile(np.eye(self.d), (len(ws), 1, 1))
    for k, (row, col) in enumerate(self.entries):
      matrices[:, row, col] = ws[:, k]
    return matrices


def make_flow(a, b):
  a = tuple(float(x) for x in np.atleast_1d(a))
  b = tuple(float(x) for x in np.atleast_1d(b))
  if not a or not b:
    raise ValueError('Both exponent blocks need at least one entry.')
  if min(a) <= 0 or min(b) <= 0:
    raise ValueError(f'Exponents must be positive, got a={a}, b={b}.')
  if abs(sum(a) - sum(b)) > 1e-12 * max(1.0, sum(a)):
    raise ValueError(f'Trace mismatch: sum(a)={sum(a)} != sum(b)={sum(b)}.')
  return FlowSpec(a, b)


@dataclasses.dataclass(frozen=True, eq=False)
class LatticePoint:
  """The unimodular lattice spanned by the columns of `basis`."""

  basis: np.ndarray

  def __post_init__(self):
    basis = np.array(self.basis, np.float64)
    if basis.ndim != 2 or basis.shape[0] != basis.shape[1]:
      raise ValueError(f'Basis must be square, got shape {basis.shape}.')
    if not np.all(np.isfinite(basis)):
      raise common.NumericError('Basis has non-finite entries.')
    det = np.linalg.det(basis)
    if abs(det - 1) > 1e-6:
      raise ValueError(f'Basis is not unimodular (det = {det}).')
    basis.setflags(write=False)
    object.__setattr__(self, 'basis', basis)

  @classmethod
  def identity(cls, d):
    return cls(np.eye(d))

  @classmethod
  def normalized(cls, basis):
    return cls(renormalize(np.asarray(basis, np.float64)))

  @property
  def dim(self):
    return self.basis.shape[0]

  def reduced(self):
    return LatticePoint.normalized(reduce_basis(self.basis))

  def dual(self):
    return LatticePoint.normalized(np.linalg.inv(self.basis).T)


def renormalize(basis):
  det = np.linalg.det(basis)
  if not np.isfinite(det) or det <= 0:
    raise common.NumericError(f'Cannot renormalize basis with det {det}.')
  return basis / det ** (1 / basis.shape[-1])


def apply_flow(spec, x, t, w, renormalize_det=True):
  limit = abs(t) * max(max(spec.a), max(spec.b))
  if limit > 500:
    raise common.FlowOverflowError(
        f'Flow time {t} exceeds the float range (t * max exponent = {limit}).')
  basis = spec.g(t) @ spec.u(w) @ x.basis
  if renormalize_det:
    return LatticePoint.normalized(basis)
  return LatticePoint(basis)


def gauss_reduce(bases, max_iter=1000):
  """Lagrange-Gauss reduction of a batch of 2x2 column bases."""
  bases = np.asarray(bases, np.float64)
  single = bases.ndim == 2
  bases = bases.reshape(-1, 2, 2)
  b1, b2 = bases[:, :, 0].copy(), bases[:, :, 1].copy()
  for _ in range(max_iter):
    n1 = (b1 * b1).sum(-1)
    n2 = (b2 * b2).sum(-1)
    swap = n2 < n1
    b1[swap], b2[swap] = b2[swap], -b1[swap]
    n1 = np.where(swap, n2, n1)
    q = np.rint((b1 * b2).sum(-1) / n1)
    if not q.any():
      break
    b2 -= q[:, None] * b1
  else:
    raise common.NumericError('Gauss reduction did not converge.')
  result = np.stack([b1, b2], -1)
  return result[0] if single else result


def lll_reduce(basis, delta=0.99, max_iter=100000):
  """LLL reduction of the columns of `basis`."""
  b = np.array(basis, np.float64).T.copy()
  n = len(b)
  k = 1
  for _ in range(max_iter):
    if k >= n:
      return b.T
    mu, norms = _gram_schmidt(b)
    for j in range(k - 1, -1, -1):
      q = np.rint(mu[k, j])
      if q:
        b[k] -= q * b[j]
        mu[k, :j + 1] -= q * mu[j, :j + 1]
    if norms[k] >= (delta - mu[k, k - 1] ** 2) * norms[k - 1]:
      k += 1
    else:
      b[[k - 1, k]] = b[[k, k - 1]]
      b[k] *= -1
      k = max(k - 1, 1)
  raise common.NumericError('LLL reduction did not converge.')


def _gram_schmidt(rows):
  # rows = Q R^T with R upper triangular in the column convention.
  _, r = np.linalg.qr(rows.T)
  diag = np.diag(r)
  mu = (r / diag[:, None]).T
  return mu, diag ** 2


def reduce_basis(basis):
  basis = np.asarray(basis, np.float64)
  if basis.shape[-1] == 2:
    return gauss_reduce(basis)
  return lll_reduce(basis)


def reduce_batch(bases):
  bases = np.asarray(bases, np.float64)
  if bases.shape[-1] == 2:
    return gauss_reduce(bases)
  return np.stack([lll_reduce(basis) for basis in bases])


def enumerate_vectors(basis, radius, budget=2_000_000, halve=False):
  """All nonzero lattice vectors of norm at most `radius`.

  The coefficient box |c_k| <= radius * |row k of basis^-1| contains every
  such vector. Returns integer coefficients, vectors and norms.
  """
  basis = np.asarray(basis, np.float64)
  dim = basis.shape[0]
  inverse = np.linalg.inv(basis)
  bounds = np.floor(radius * np.linalg.norm(inverse, axis=1) + 1e-9)
  bounds = bounds.astype(np.int64)
  count = float(np.prod(2.0 * bounds + 1))
  if count > budget:
    raise common.EnumerationBudgetError(
        f'Enumeration needs {count:.3g} coefficient vectors '
        f'(budget {budget}); the basis is too skew.')
  axes = [np.arange(-k, k + 1) for k in bounds]
  coeffs = np.stack(
      [g.ravel() for g in np.meshgrid(*axes, indexing='ij')], -1)
  coeffs = coeffs[np.any(coeffs != 0, axis=1)]
  if halve:
    first = coeffs[np.arange(len(coeffs)), np.argmax(coeffs != 0, axis=1)]
    coeffs = coeffs[first > 0]
  vectors = coeffs @ basis.T
  norms = np.linalg.norm(vectors, axis=1)
  keep = norms <= radius * (1 + 1e-12)
  assert coeffs.shape[1] == dim
  return coeffs[keep], vectors[keep], norms[keep]


# Powers gamma_i^{i/2} of the Hermite constants: a rank i lattice has a basis
# whose lengths multiply to at most this times its covolume (i <= 4).
_HERMITE_PRODUCT = {1: 1.0, 2: 2 / math.sqrt(3), 3: math.sqrt(2), 4: 2.0}


def _shortest(basis, budget):
  radius = np.linalg.norm(basis, axis=0).min()
  _, _, norms = enumerate_vectors(basis, radius, budget, halve=True)
  return float(norms.min())


def _min_plane(basis, budget, max_vectors=600):
  dim = basis.shape[0]
  shortest = _shortest(basis, budget)
  columns = tensor.exterior_action(basis, 2)
  pairs = tensor.subsets(dim, 2)
  start = min(
      np.linalg.norm(columns[:, pairs.index((i, j))])
      for i, j in pairs)
  radius = _HERMITE_PRODUCT[2] * start / shortest
  coeffs, _, _ = enumerate_vectors(basis, radius, budget, halve=True)
  if len(coeffs) > max_vectors:
    raise common.EnumerationBudgetError(
        f'{len(coeffs)} candidate vectors for the rank 2 search.')
  rows = np.array(pairs)
  cu = coeffs[:, rows]
  wedges = (
      cu[:, None, :, 0] * cu[None, :, :, 1] -
      cu[:, None, :, 1] * cu[None, :, :, 0])
  independent = np.any(wedges != 0, axis=-1)
  values = np.linalg.norm(wedges @ columns.T, axis=-1)
  return float(values[independent].min())


def minima(x, degree, budget=2_000_000):
  """Minimal covolume of a rank `degree` sublattice of x.

  Degrees above d/2 are computed on the dual lattice, where the primitive
  sublattices of complementary rank have the same covolumes.
  """
  d = x.dim
  if not 0 < degree < d:
    raise ValueError(f'Degree {degree} must lie strictly between 0 and {d}.')
  if d > 5:
    raise ValueError(f'Lattice minima are supported for d <= 5, got {d}.')
  if degree > d - degree:
    basis, degree = np.linalg.inv(x.basis).T, d - degree
  else:
    basis = x.basis
  basis = reduce_basis(basis)
  if degree == 1:
    if d == 2:
      return float(np.linalg.norm(basis[:, 0]))
    return _shortest(basis, budget)
  return _min_plane(basis, budget)


def minima_profile(x, budget=2_000_000):
  return np.array([minima(x, i, budget) for i in range(1, x.dim)])


def minima_batch(bases):
  """Minima profiles (samples, d - 1) of a batch of column bases."""
  bases = np.asarray(bases, np.float64)
  if bases.shape[-1] == 2:
    reduced = gauss_reduce(bases.reshape(-1, 2, 2))
    return np.linalg.norm(reduced[:, :, 0], axis=-1)[:, None]
  return np.stack([
      minima_profile(LatticePoint.normalized(basis)) for basis in bases])


def siegel_count(x, radius):
  """Number of primitive nonzero lattice vectors of norm at most `radius`."""
  if radius <= 0:
    raise ValueError(f'Radius must be positive, got {radius}.')
  basis = reduce_basis(x.basis)
  coeffs, _, _ = enumerate_vectors(basis, radius)
  if not len(coeffs):
    return 0
  return int(np.sum(np.gcd.reduce(np.abs(coeffs), axis=1) == 1))


def siegel_mean(d, radius):
  """Haar mean of the primitive count within `radius`: vol(B_r) / zeta(d)."""
  volume = math.pi ** (d / 2) / math.gamma(d / 2 + 1) * radius ** d
  return volume / float(scipy.special.zeta(d))


def short_vector_measure(d, radius):
  """Haar measure of {lambda_1 < radius} where it equals half the Siegel mean.

  Exact for d = 2 and radius <= 1, where at most one pair +-v is that short.
  """
  if d != 2 or radius > 1:
    return None
  return siegel_mean(d, radius) / 2


def random_lattice(d, rng, spread=1.0):
  heights = rng.normal(size=d) * spread
  heights -= heights.mean()
  left = scipy.stats.special_ortho_group.rvs(d, random_state=rng)
  right = scipy.stats.special_ortho_group.rvs(d, random_state=rng)
  basis = left @ np.diag(np.exp(heights)) @ right
  return LatticePoint.normalized(reduce_basis(basis))


def box_quadrature(dim, grid=64, samples=10000, seed=0):
  """Nodes and weights on I^dim = [-1, 1]^dim with weights summing to 2^dim.

  Tensor midpoint rule up to two dimensions, seeded Monte Carlo beyond.
  """
  if dim <= 2:
    return box_grid(-np.ones(dim), np.ones(dim), [grid] * dim)
  rng = np.random.default_rng([seed])
  nodes = rng.uniform(-1, 1, (samples, dim))
  return nodes, np.full(samples, 2.0 ** dim / samples)


def box_grid(lower, upper, counts):
  lower = np.asarray(lower, np.float64)
  upper = np.asarray(upper, np.float64)
  counts = [int(c) for c in counts]
  axes = [
      lo + (np.arange(c) + 0.5) * (hi - lo) / c
      for lo, hi, c in zip(lower, upper, counts)]
  nodes = np.stack(
      [g.ravel() for g in np.meshgrid(*axes, indexing='ij')], -1)
  volume = np.prod([(hi - lo) / c for lo, hi, c in zip(lower, upper, counts)])
  return nodes, np.full(len(nodes), volume)


def flowed_bases(spec, x, t, ws):
  """Reduced bases of g_t u(w) x for a batch of chart points."""
  limit = abs(t) * max(max(spec.a), max(spec.b))
  if limit > 500:
    raise common.FlowOverflowError(
        f'Flow time {t} exceeds the float range (t * max exponent = {limit}).')
  bases = spec.g(t) @ spec.u_batch(ws) @ x.basis
  return reduce_batch(bases)


class Orbit:
  """Trajectories g_{k dt} u(w) x for a batch of chart points w.

  Bases are reduced and renormalized after every step, so the state stays
  bounded for arbitrarily long runs.
  """

  def __init__(self, spec, x, ws, dt):
    ws = np.asarray(ws, np.float64).reshape(-1, spec.dim)
    self.spec = spec
    self.time = 0.0
    self._dt = dt
    self._step_matrix = spec.g(dt)
    self._bases = reduce_batch(spec.u_batch(ws) @ x.basis)

  @property
  def bases(self):
    return self._bases.copy()

  def __len__(self):
    return len(self._bases)

  def step(self):
    bases = reduce_batch(self._step_matrix @ self._bases)
    det = np.linalg.det(bases)
    self._bases = bases / (det ** (1 / bases.shape[-1]))[:, None, None]
    self.time += self._dt

  def minima(self, transform=None):
    bases = self._bases
    if transform is not None:
      bases = transform @ bases
    return minima_batch(bases)

  def observe(self):
    return self.bases


def shortest_batch(bases):
  """First minima lambda_1 of a batch of column bases."""
  bases = np.asarray(bases, np.float64)
  if bases.shape[-1] == 2:
    reduced = gauss_reduce(bases.reshape(-1, 2, 2))
    return np.linalg.norm(reduced[:, :, 0], axis=-1)
  return np.array([
      minima(LatticePoint.normalized(basis), 1) for basis in bases])
