import collections
import dataclasses
import functools
import itertools
from fractions import Fraction

import numpy as np
import sympy

from . import common


FAMILIES = ('A', 'B', 'C', 'D', 'E', 'F', 'G', 'BC')

# Families whose rank many strongly orthogonal roots form a basis.
ORTHOGONAL_TYPES = {
    'B': lambda n: n >= 2, 'C': lambda n: n >= 2,
    'D': lambda n: n % 2 == 0, 'E': lambda n: n in (7, 8),
    'F': lambda n: True, 'G': lambda n: True,
}

ROOT_COUNTS = {
    'A': lambda n: n * (n + 1), 'B': lambda n: 2 * n * n,
    'C': lambda n: 2 * n * n, 'D': lambda n: 2 * n * (n - 1),
    'BC': lambda n: 2 * n * n + 2 * n, 'G': lambda n: 12,
    'F': lambda n: 48, 'E': lambda n: {6: 72, 7: 126, 8: 240}[n],
}

_TOLERANCE = 1e-12


def admissible(family, rank):
  return {
      'A': rank >= 1, 'B': rank >= 2, 'C': rank >= 2, 'D': rank >= 3,
      'BC': rank >= 1, 'G': rank == 2, 'F': rank == 4,
      'E': rank in (6, 7, 8),
  }.get(family, False)


def _vector(values):
  return tuple(Fraction(v) for v in values)


def _unit(dim, index, scale=1):
  return tuple(Fraction(scale) if i == index else Fraction(0) for i in range(dim))


def _add(u, v, scale=1):
  return tuple(a + scale * b for a, b in zip(u, v))


def _dot(u, v):
  return sum(a * b for a, b in zip(u, v))


def _is_exact(values):
  return all(isinstance(v, (int, Fraction)) for v in values)


def _simple_roots(family, rank):
  n = rank
  if family == 'A':
    return [_add(_unit(n + 1, i), _unit(n + 1, i + 1), -1) for i in range(n)]
  chain = [_add(_unit(n, i), _unit(n, i + 1), -1) for i in range(n - 1)]
  if family in ('B', 'BC'):
    return chain + [_unit(n, n - 1)]
  if family == 'C':
    return chain + [_unit(n, n - 1, 2)]
  if family == 'D':
    return chain + [_add(_unit(n, n - 2), _unit(n, n - 1))]
  if family == 'G':
    return [_vector([1, -1, 0]), _vector([-2, 1, 1])]
  if family == 'F':
    half = Fraction(1, 2)
    return [
        _vector([0, 1, -1, 0]), _vector([0, 0, 1, -1]),
        _vector([0, 0, 0, 1]), _vector([half, -half, -half, -half])]
  if family == 'E':
    half = Fraction(1, 2)
    roots = [
        _vector([half] + [-half] * 6 + [half]),
        _add(_unit(8, 0), _unit(8, 1))]
    roots += [_add(_unit(8, i), _unit(8, i - 1), -1) for i in range(1, 7)]
    return roots[:n]
  raise ValueError(family)


def _reflect(vector, root):
  return _add(vector, root, -2 * _dot(vector, root) / _dot(root, root))


def _closure(generators):
  roots = set(generators) | {_add((0,) * len(g), g, -1) for g in generators}
  frontier = list(roots)
  while frontier:
    found = []
    for vector in frontier:
      for mirror in generators:
        image = _reflect(vector, mirror)
        if image not in roots:
          roots.add(image)
          found.append(image)
    frontier = found
  return roots


def _to_fraction(value):
  value = sympy.nsimplify(value)
  return Fraction(int(value.p), int(value.q))


def _exact_inverse(rows):
  matrix = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator)
                          for v in row] for row in rows])
  inverse = matrix.inv()
  return tuple(
      tuple(_to_fraction(inverse[i, j]) for j in range(inverse.shape[1]))
      for i in range(inverse.shape[0]))


@dataclasses.dataclass(frozen=True, eq=False)
class RootSystem:
  """An irreducible root system in orthonormal ambient coordinates."""

  family: str
  rank: int
  simple: tuple
  roots: tuple
  positive: tuple

  @property
  def dim(self):
    return len(self.simple[0])

  @functools.cached_property
  def root_set(self):
    return frozenset(self.roots)

  @functools.cached_property
  def cartan(self):
    return tuple(
        tuple(2 * _dot(a, b) / _dot(b, b) for b in self.simple)
        for a in self.simple)

  @functools.cached_property
  def _gram_inverse(self):
    gram = [[_dot(a, b) for b in self.simple] for a in self.simple]
    return _exact_inverse(gram)

  @functools.cached_property
  def highest_root(self):
    return max(self.positive, key=self.height)

  def inner(self, u, v):
    return _dot(u, v)

  def is_root(self, vector):
    return tuple(Fraction(v) for v in vector) in self.root_set

  def coords(self, vector):
    """Coordinates of a vector of span(roots) in the simple root basis."""
    products = [_dot(vector, a) for a in self.simple]
    return tuple(
        sum(g * p for g, p in zip(row, products))
        for row in self._gram_inverse)

  def from_coords(self, coords):
    vector = (Fraction(0),) * self.dim
    for c, root in zip(coords, self.simple):
      vector = _add(vector, root, c)
    return vector

  def height(self, root):
    return sum(self.coords(root))

  def __repr__(self):
    return f'RootSystem({self.family}{self.rank})'


@functools.lru_cache(maxsize=None)
def build_root_system(family, rank):
  family = str(family).upper()
  rank = int(rank)
  if not admissible(family, rank):
    raise ValueError(f'Inadmissible root system {family}{rank}.')
  simple = _simple_roots(family, rank)
  generators = list(simple)
  if family == 'BC':
    generators.append(_unit(rank, rank - 1, 2))
  roots = _closure(generators)
  zero = (Fraction(0),) * len(simple[0])
  roots.discard(zero)
  system = RootSystem(family, rank, tuple(simple), (), ())
  positive = sorted(
      (r for r in roots if all(c >= 0 for c in system.coords(r))),
      key=lambda r: (system.height(r), r))
  negatives = [tuple(-x for x in r) for r in positive]
  system = RootSystem(
      family, rank, tuple(simple), tuple(positive + negatives),
      tuple(positive))
  assert len(system.roots) == ROOT_COUNTS[family](rank), (
      family, rank, len(system.roots))
  assert len(roots) == len(system.roots)
  return system


def inverse_cartan(system):
  cartan = [list(row) for row in system.cartan]
  inverse = _exact_inverse(cartan)
  assert all(x > 0 for row in inverse for x in row), system
  return inverse


def strongly_orthogonal_pair(system, u, v):
  return (
      u != v and not system.is_root(_add(u, v)) and
      not system.is_root(_add(u, v, -1)))


def _orthogonal_search(system, candidates, size):
  ordered = sorted(
      candidates, key=lambda r: (-system.height(r), tuple(-x for x in r)))

  def search(chosen, start):
    if len(chosen) == size:
      return chosen
    for index in range(start, len(ordered)):
      root = ordered[index]
      if all(strongly_orthogonal_pair(system, root, c) for c in chosen):
        found = search(chosen + [root], index + 1)
        if found:
          return found
    return None

  return search([], 0)


def _reduced_positive(system):
  return [
      r for r in system.positive
      if not system.is_root(tuple(2 * x for x in r))]


def strongly_orthogonal(system):
  """Rank many pairwise strongly orthogonal positive roots."""
  family, rank = system.family, system.rank
  if family == 'BC':
    candidates = _reduced_positive(system)
  elif family in ORTHOGONAL_TYPES and ORTHOGONAL_TYPES[family](rank):
    candidates = list(system.positive)
  else:
    raise ValueError(
        f'{family}{rank} has no strongly orthogonal basis of roots.')
  found = _orthogonal_search(system, candidates, rank)
  if found is None:
    raise common.FalsifiedError(
        f'No strongly orthogonal system of size {rank} in {family}{rank}.')
  return found


@dataclasses.dataclass(frozen=True, eq=False)
class DominatedDecomposition:

  alpha: tuple
  betas: tuple
  coeffs: tuple
  route: str = ''


class Verification(collections.namedtuple('Verification', 'passed, reasons')):

  def __bool__(self):
    return bool(self.passed)


def _close(value, exact):
  return value == 0 if exact else abs(value) <= _TOLERANCE


def is_dominated(system, alpha):
  exact = _is_exact(alpha)
  scale = max([abs(float(x)) for x in alpha] + [1.0])
  for root in system.positive:
    value = _dot(alpha, root)
    if (value < 0) if exact else (value < -_TOLERANCE * scale):
      return False
  return True


def _check_alpha(system, alpha):
  alpha = tuple(
      Fraction(x) if isinstance(x, Fraction) else
      Fraction(int(x)) if isinstance(x, (int, np.integer)) else float(x)
      for x in alpha)
  if len(alpha) != system.dim:
    raise ValueError(
        f'Vector needs {system.dim} ambient coordinates, got {len(alpha)}.')
  residual = _add(alpha, system.from_coords(system.coords(alpha)), -1)
  scale = max([abs(float(x)) for x in alpha] + [1.0])
  if any(abs(float(r)) > 1e-9 * scale for r in residual):
    raise ValueError(f'Vector {alpha} is not in the span of the roots.')
  if not is_dominated(system, alpha):
    raise ValueError(f'Vector {alpha} is not dominated.')
  return alpha


def _interval_route(values):
  """Nested intervals of a chain with the telescoping coefficients.

  Starts at the lowest index maximum of the concave chain values and grows
  towards the larger neighbour (left on ties).
  """
  n = len(values)
  start = max(range(n), key=lambda i: (values[i], -i))
  low = high = start
  order = [start]
  intervals = [(low, high)]
  while len(order) < n:
    left = values[low - 1] if low > 0 else None
    right = values[high + 1] if high < n - 1 else None
    if right is None or (left is not None and left >= right):
      low -= 1
      order.append(low)
    else:
      high += 1
      order.append(high)
    intervals.append((low, high))
  coeffs = [
      values[order[k]] - (values[order[k + 1]] if k + 1 < n else 0)
      for k in range(n)]
  return intervals, coeffs


def _chain_betas(system, chain, alpha):
  coords = system.coords(alpha)
  intervals, coeffs = _interval_route([coords[i] for i in chain])
  betas = []
  for low, high in intervals:
    beta = (Fraction(0),) * system.dim
    for position in range(low, high + 1):
      beta = _add(beta, system.simple[chain[position]])
    betas.append(beta)
  return betas, coeffs


def _orthogonal_route(system, alpha):
  betas = strongly_orthogonal(system)
  coeffs = [_dot(alpha, b) / _dot(b, b) for b in betas]
  return betas, coeffs


def _d_odd_route(system, alpha):
  n = system.rank
  flip = alpha[n - 1] > 0
  x = list(alpha[:n - 1]) + [-alpha[n - 1] if flip else alpha[n - 1]]
  betas, coeffs = [], []
  for i in range(0, n - 3, 2):
    betas += [_add(_unit(n, i), _unit(n, i + 1), -1),
              _add(_unit(n, i), _unit(n, i + 1))]
    coeffs += [(x[i] - x[i + 1]) / 2, (x[i] + x[i + 1]) / 2]
  a, b, c = n - 3, n - 2, n - 1
  y1, y2, y3 = x[a], x[b], x[c]
  if y1 - y2 + y3 >= 0:
    betas += [_add(_unit(n, a), _unit(n, b), -1),
              _add(_unit(n, a), _unit(n, b)),
              _add(_unit(n, a), _unit(n, c), -1)]
    coeffs += [(y1 - y2 + y3) / 2, (y1 + y2 + y3) / 2, -y3]
  else:
    betas += [_add(_unit(n, a), _unit(n, b)),
              _add(_unit(n, a), _unit(n, c), -1),
              _add(_unit(n, b), _unit(n, c), -1)]
    coeffs += [(y1 + y2 + y3) / 2, (y1 - y2 - y3) / 2, (y2 - y1 - y3) / 2]
  if flip:
    betas = [beta[:n - 1] + (-beta[n - 1],) for beta in betas]
  return betas, coeffs


def _e6_route(system, alpha):
  top = system.highest_root
  weight = _dot(alpha, top) / _dot(top, top)
  rest = _add(alpha, top, -weight)
  # Nodes 1-3-4-5-6 of the diagram form the A5 chain orthogonal to top.
  chain = [0, 2, 3, 4, 5]
  assert _close(system.coords(rest)[1], _is_exact(rest)), rest
  betas, coeffs = _chain_betas(system, chain, rest)
  return [top] + betas, [weight] + coeffs


def decompose_dominated(system, alpha):
  """Write a dominated vector as a nonnegative combination of roots.

  The roots form a basis and no sum of two of them (a root with itself
  included) is a root.
  """
  alpha = _check_alpha(system, alpha)
  family, rank = system.family, system.rank
  if family == 'A':
    route = 'interval'
    betas, coeffs = _chain_betas(system, list(range(rank)), alpha)
  elif family == 'D' and rank % 2 == 1:
    route = 'd-odd'
    betas, coeffs = _d_odd_route(system, alpha)
  elif family == 'E' and rank == 6:
    route = 'e6'
    betas, coeffs = _e6_route(system, alpha)
  else:
    route = 'strongly-orthogonal'
    betas, coeffs = _orthogonal_route(system, alpha)
  decomposition = DominatedDecomposition(
      alpha, tuple(betas), tuple(coeffs), route)
  verdict = verify_decomposition(system, decomposition)
  if not verdict:
    raise common.FalsifiedError(
        f'The {route} route failed on {family}{rank}: '
        + '; '.join(verdict.reasons))
  return decomposition


def verify_decomposition(system, dec):
  reasons = []
  betas = [tuple(Fraction(x) for x in beta) for beta in dec.betas]
  positive = set(system.positive)
  for index, beta in enumerate(betas):
    if beta not in positive:
      reasons.append(f'beta {index} is not a positive root')
  if len(betas) != system.rank or len(dec.coeffs) != system.rank:
    reasons.append(f'expected {system.rank} roots and coefficients')
  elif betas:
    rank = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator)
                          for x in beta] for beta in betas]).rank()
    if rank != system.rank:
      reasons.append('roots are linearly dependent')
  exact = _is_exact(dec.alpha) and _is_exact(dec.coeffs)
  combination = (Fraction(0),) * system.dim
  for c, beta in zip(dec.coeffs, betas):
    combination = _add(combination, beta, c)
  error = max(
      [abs(float(x)) for x in _add(dec.alpha, combination, -1)] + [0.0])
  if (error != 0) if exact else (error > 1e-10):
    reasons.append(f'reconstruction error {error:.3g}')
  if any(c < (0 if exact else -_TOLERANCE) for c in dec.coeffs):
    reasons.append('negative coefficient')
  for i, j in itertools.combinations_with_replacement(range(len(betas)), 2):
    if system.is_root(_add(betas[i], betas[j])):
      reasons.append(f'beta {i} + beta {j} is a root')
  return Verification(not reasons, tuple(reasons))


def dominant_from_weights(system, weights):
  """Ambient vector with the given fundamental weight coordinates."""
  if len(weights) != system.rank:
    raise ValueError(f'Need {system.rank} weights, got {len(weights)}.')
  inverse = inverse_cartan(system)
  coords = [
      sum(inverse[j][i] * w for j, w in enumerate(weights))
      for i in range(system.rank)]
  return system.from_coords(coords)


def random_weights(rank, rng, exact=True):
  if exact:
    return tuple(Fraction(int(k)) for k in rng.integers(0, 6, rank))
  return tuple(float(v) for v in rng.uniform(0, 5, rank))


def feasible_subsets(system, alpha):
  """Exhaustive search for any valid decomposition (small ranks only)."""
  assert system.rank <= 3, system
  alpha = _check_alpha(system, alpha)
  for betas in itertools.combinations(system.positive, system.rank):
    if any(
        system.is_root(_add(u, v))
        for u, v in itertools.combinations_with_replacement(betas, 2)):
      continue
    matrix = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator)
                            for x in beta] for beta in betas]).T
    if matrix.rank() != system.rank:
      continue
    target = sympy.Matrix([sympy.nsimplify(x) for x in alpha])
    solution, params = matrix.gauss_jordan_solve(target)
    if params.shape[0]:
      continue
    coeffs = [_to_fraction(v) for v in solution]
    if all(c >= 0 for c in coeffs):
      return DominatedDecomposition(alpha, betas, tuple(coeffs), 'search')
  return None
