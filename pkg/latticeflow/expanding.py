import collections
import dataclasses
import functools
from fractions import Fraction

import numpy as np
import scipy.linalg

from . import common
from . import rootsys


@functools.lru_cache(maxsize=None)
def _sl_basis(d):
  basis = []
  for j in range(d):
    for k in range(d):
      if j != k:
        matrix = np.zeros((d, d))
        matrix[j, k] = 1
        basis.append(matrix)
  for k in range(1, d):
    matrix = np.zeros((d, d))
    matrix[np.arange(k), np.arange(k)] = 1
    matrix[k, k] = -k
    basis.append(matrix / np.sqrt(k * (k + 1)))
  basis = np.stack(basis)
  basis.setflags(write=False)
  return basis


def sl_basis(d):
  """Frobenius-orthonormal basis of sl_d: the E_jk, then traceless diagonals."""
  return _sl_basis(int(d))


def elementary(d, j, k):
  matrix = np.zeros((d, d))
  matrix[j, k] = 1
  return matrix


def bracket(x, y):
  return x @ y - y @ x


def adjoint_operators(basis, elements):
  """Matrices of ad(x) on span(basis) for an orthonormal basis."""
  basis = np.asarray(basis, np.float64)
  elements = np.asarray(elements, np.float64)
  images = (
      np.einsum('xij,bjk->xbik', elements, basis) -
      np.einsum('bij,xjk->xbik', basis, elements))
  return np.einsum('aij,xbij->xab', basis, images)


def _span(matrices, tol=1e-10):
  flat = np.asarray(matrices, np.float64).reshape(len(matrices), -1).T
  columns = scipy.linalg.orth(flat, rcond=tol)
  d = int(round(np.sqrt(flat.shape[0])))
  return columns.T.reshape(-1, d, d)


def lie_closure(matrices, max_rounds=50):
  """Orthonormal basis of the Lie algebra generated by the matrices."""
  basis = _span(matrices)
  for _ in range(max_rounds):
    products = [bracket(x, y) for i, x in enumerate(basis) for y in basis[i + 1:]]
    grown = _span(list(basis) + products)
    if len(grown) == len(basis):
      return grown
    basis = grown
  raise common.NumericError('Lie closure did not stabilize.')


def killing_form(basis):
  ad = adjoint_operators(basis, basis)
  return np.einsum('aij,bji->ab', ad, ad)


def killing_singular_values(basis):
  return np.linalg.svd(killing_form(basis), compute_uv=False)


@dataclasses.dataclass(frozen=True, eq=False)
class ExpandingConstruction:
  """sl_2 triples from the decomposition of z, and the expanding algebra.

  Indices are 0-based: `pairs[i] = (j, k)` names the root vector E_jk of
  the i-th triple in the original (unsorted) coordinates of z.
  """

  d: int
  z: np.ndarray
  decomposition: rootsys.DominatedDecomposition
  pairs: tuple
  coeffs: tuple
  P: tuple

  @property
  def z_parts(self):
    return np.stack([
        elementary(self.d, j, j) - elementary(self.d, k, k)
        for j, k in self.pairs])

  @property
  def w(self):
    return np.stack([elementary(self.d, j, k) for j, k in self.pairs])

  @property
  def theta_w(self):
    return -np.transpose(self.w, (0, 2, 1))

  @property
  def u_basis(self):
    return self.w[list(self.P)]

  @property
  def triples(self):
    return [
        (self.z_parts[i], self.w[i], self.theta_w[i]) for i in self.P]

  def algebra(self):
    """Orthonormal basis of the algebra generated by the triples in P."""
    return lie_closure([m for triple in self.triples for m in triple])


def _diagonal(z):
  z = np.asarray(z)
  if z.ndim == 2:
    if np.any(z - np.diag(np.diag(z))):
      raise ValueError('Matrix z must be diagonal.')
    z = np.diag(z)
  return [
      v if isinstance(v, Fraction) else
      Fraction(int(v)) if isinstance(v, (int, np.integer)) else float(v)
      for v in z.tolist()]


def build_expanding(d, z, fixup=True):
  entries = _diagonal(z)
  if len(entries) != d or d < 2:
    raise ValueError(f'Need {d} >= 2 diagonal entries, got {len(entries)}.')
  if abs(float(sum(entries))) > 1e-12 * max(1.0, max(abs(float(e)) for e in entries)):
    raise ValueError(f'Diagonal {entries} is not traceless.')
  if all(e == 0 for e in entries):
    raise ValueError('Diagonal z must be nonzero.')
  order = np.argsort([-float(e) for e in entries], kind='stable')
  if list(order) != list(range(d)) and not fixup:
    raise ValueError(f'Diagonal {entries} is not sorted nonincreasingly.')
  system = rootsys.build_root_system('A', d - 1)
  alpha = [entries[i] for i in order]
  decomposition = rootsys.decompose_dominated(system, alpha)
  pairs = []
  for beta in decomposition.betas:
    j = next(i for i, x in enumerate(beta) if x > 0)
    k = next(i for i, x in enumerate(beta) if x < 0)
    pairs.append((int(order[j]), int(order[k])))
  coeffs = tuple(float(c) for c in decomposition.coeffs)
  P = tuple(i for i, c in enumerate(decomposition.coeffs) if c > 0)
  construction = ExpandingConstruction(
      d, np.diag([float(e) for e in entries]), decomposition,
      tuple(pairs), coeffs, P)
  _check_construction(construction)
  return construction


def _check_construction(construction):
  zs, ws, thetas = construction.z_parts, construction.w, construction.theta_w
  rebuilt = sum(construction.coeffs[i] * zs[i] for i in construction.P)
  error = np.abs(construction.z - rebuilt).max()
  if error > 1e-10:
    raise common.NumericError(f'Triples reconstruct z only to {error:.3g}.')
  for i in construction.P:
    if not (
        np.allclose(bracket(zs[i], ws[i]), 2 * ws[i]) and
        np.allclose(bracket(zs[i], thetas[i]), -2 * thetas[i]) and
        np.allclose(bracket(ws[i], thetas[i]), -zs[i])):
      raise common.NumericError(f'Triple {i} is not an sl_2 triple.')
    for j in construction.P:
      if np.any(bracket(ws[i], ws[j])):
        raise common.NumericError(f'Root vectors {i} and {j} do not commute.')


Verdict = collections.namedtuple('Verdict', 'passed, residual, witness')


def _check_square(ops, size, name):
  ops = np.asarray(ops, np.float64)
  if ops.ndim == 2:
    ops = ops[None]
  if ops.ndim != 3 or ops.shape[1:] != (size, size):
    raise ValueError(f'{name} must be {size}x{size} operators, got {ops.shape}.')
  return ops


def expanding_check(z_op, generator_ops, algebra_ops, tol=1e-8):
  """Whether the U-fixed vectors outside the fixed vectors are expanded.

  V+ is spanned by eigenvectors of z with positive eigenvalue, V^U is the
  joint kernel of the generators and the fixed space is the joint kernel of
  the whole algebra. The witness is the direction of V^U, orthogonal to the
  fixed space, furthest from V+.
  """
  z_op = np.asarray(z_op, np.float64)
  if z_op.ndim != 2 or z_op.shape[0] != z_op.shape[1]:
    raise ValueError(f'Operator of z must be square, got {z_op.shape}.')
  size = len(z_op)
  generator_ops = _check_square(generator_ops, size, 'Generators')
  algebra_ops = _check_square(algebra_ops, size, 'Algebra operators')
  if np.allclose(z_op, z_op.T):
    values, vectors = np.linalg.eigh(z_op)
  else:
    values, vectors = np.linalg.eig(z_op)
  positive = np.real(vectors[:, np.real(values) > tol])
  expanded = scipy.linalg.orth(positive) if positive.size else np.zeros((size, 0))
  invariant = scipy.linalg.null_space(np.concatenate(list(generator_ops)), rcond=tol)
  fixed = scipy.linalg.null_space(np.concatenate(list(algebra_ops)), rcond=tol)
  moving = invariant - fixed @ (fixed.T @ invariant)
  if moving.size:
    moving = scipy.linalg.orth(moving, rcond=1e-6)
  if not moving.size:
    return Verdict(True, 0.0, np.zeros(size))
  outside = moving - expanded @ (expanded.T @ moving)
  left, singular, _ = np.linalg.svd(outside)
  residual = float(singular[0])
  return Verdict(residual <= tol, residual, left[:, 0])
