import dataclasses
import functools
import itertools

import numpy as np
import scipy.special


@functools.lru_cache(maxsize=None)
def subsets(dim, degree):
  """Index subsets of range(dim) of the given size in lexicographic order."""
  if not 0 <= degree <= dim:
    raise ValueError(f'Degree {degree} out of range for dimension {dim}.')
  return tuple(itertools.combinations(range(dim), degree))


def wedge_dim(dim, degree):
  return int(scipy.special.comb(dim, degree, exact=True))


def exterior_action(matrix, degree):
  """Matrix of the degree-th exterior power in the lexicographic wedge basis.

  Entry (I, J) is the minor of `matrix` with rows I and columns J.
  """
  matrix = np.asarray(matrix, np.float64)
  assert matrix.ndim == 2 and matrix.shape[0] == matrix.shape[1], matrix.shape
  dim = matrix.shape[0]
  index = subsets(dim, degree)
  if degree == 0:
    return np.ones((1, 1))
  rows = np.array(index)
  # minors[a, b] = matrix[rows[a]][:, rows[b]]
  blocks = matrix[rows[:, None, :, None], rows[None, :, None, :]]
  return np.linalg.det(blocks)


def exterior_action_batch(matrices, degree):
  matrices = np.asarray(matrices, np.float64)
  dim = matrices.shape[-1]
  if degree == 0:
    return np.ones(matrices.shape[:-2] + (1, 1))
  rows = np.array(subsets(dim, degree))
  blocks = matrices[
      ..., rows[:, None, :, None], rows[None, :, None, :]]
  return np.linalg.det(blocks)


@dataclasses.dataclass(frozen=True, eq=False)
class MultiVector:

  dim: int
  degree: int
  coords: np.ndarray

  def __post_init__(self):
    coords = np.asarray(self.coords, np.float64).reshape(-1)
    if not 0 <= self.degree <= self.dim:
      raise ValueError(
          f'Degree {self.degree} out of range for dimension {self.dim}.')
    if len(coords) != wedge_dim(self.dim, self.degree):
      raise ValueError(
          f'Expected {wedge_dim(self.dim, self.degree)} coordinates for '
          f'degree {self.degree} in dimension {self.dim}, got {len(coords)}.')
    coords.setflags(write=False)
    object.__setattr__(self, 'coords', coords)

  @classmethod
  def basis(cls, dim, index):
    index = tuple(sorted(index))
    coords = np.zeros(wedge_dim(dim, len(index)))
    coords[subsets(dim, len(index)).index(index)] = 1.0
    return cls(dim, len(index), coords)

  @classmethod
  def vector(cls, coords):
    coords = np.asarray(coords, np.float64)
    return cls(len(coords), 1, coords)

  @classmethod
  def from_vectors(cls, vectors):
    """The monomial v_1 ∧ ... ∧ v_i of the columns of a d×i array."""
    vectors = np.asarray(vectors, np.float64)
    if vectors.ndim == 1:
      vectors = vectors[:, None]
    dim, degree = vectors.shape
    rows = np.array(subsets(dim, degree))
    if degree == 0:
      return cls(dim, 0, np.ones(1))
    return cls(dim, degree, np.linalg.det(vectors[rows]))

  @property
  def norm(self):
    return float(np.linalg.norm(self.coords))

  def normalized(self):
    return self * (1.0 / self.norm)

  def transform(self, matrix):
    return MultiVector(
        self.dim, self.degree, exterior_action(matrix, self.degree) @ self.coords)

  def __add__(self, other):
    self._check_compatible(other)
    return MultiVector(self.dim, self.degree, self.coords + other.coords)

  def __sub__(self, other):
    self._check_compatible(other)
    return MultiVector(self.dim, self.degree, self.coords - other.coords)

  def __mul__(self, scalar):
    return MultiVector(self.dim, self.degree, float(scalar) * self.coords)

  __rmul__ = __mul__

  def __neg__(self):
    return self * -1.0

  def __xor__(self, other):
    return wedge(self, other)

  def _check_compatible(self, other):
    if (self.dim, self.degree) != (other.dim, other.degree):
      raise ValueError(
          f'Incompatible multivectors {(self.dim, self.degree)} and '
          f'{(other.dim, other.degree)}.')


def _merge_sign(left, right):
  inversions = sum(1 for a in left for b in right if a > b)
  return -1.0 if inversions % 2 else 1.0


@functools.lru_cache(maxsize=None)
def _wedge_table(dim, left, right):
  table = []
  target = {index: k for k, index in enumerate(subsets(dim, left + right))}
  for a, I in enumerate(subsets(dim, left)):
    for b, J in enumerate(subsets(dim, right)):
      if set(I) & set(J):
        continue
      table.append((a, b, target[tuple(sorted(I + J))], _merge_sign(I, J)))
  return tuple(table)


def wedge(u, v):
  if u.dim != v.dim:
    raise ValueError(f'Dimension mismatch {u.dim} != {v.dim}.')
  if u.degree + v.degree > u.dim:
    raise ValueError(
        f'Degree overflow {u.degree} + {v.degree} > {u.dim}.')
  coords = np.zeros(wedge_dim(u.dim, u.degree + v.degree))
  for a, b, target, sign in _wedge_table(u.dim, u.degree, v.degree):
    coords[target] += sign * u.coords[a] * v.coords[b]
  return MultiVector(u.dim, u.degree + v.degree, coords)
