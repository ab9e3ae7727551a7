import math

import numpy as np
import pytest

from latticeflow import tensor


def test_subsets_are_lexicographic():
  assert tensor.subsets(4, 2) == (
      (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
  assert tensor.wedge_dim(5, 2) == 10
  with pytest.raises(ValueError):
    tensor.subsets(3, 4)


def test_wedge_of_basis_vectors():
  e1 = tensor.MultiVector.basis(3, (0,))
  e2 = tensor.MultiVector.basis(3, (1,))
  e12 = e1 ^ e2
  assert e12.degree == 2
  np.testing.assert_allclose(e12.coords, [1, 0, 0])
  np.testing.assert_allclose((e2 ^ e1).coords, -e12.coords)


def test_wedge_is_alternating(rng):
  u = tensor.MultiVector.vector(rng.normal(size=4))
  v = tensor.MultiVector.vector(rng.normal(size=4))
  np.testing.assert_allclose((u ^ u).coords, 0, atol=1e-12)
  np.testing.assert_allclose((u ^ v).coords, -(v ^ u).coords)


def test_from_vectors_matches_wedge(rng):
  vectors = rng.normal(size=(4, 3))
  monomial = tensor.MultiVector.from_vectors(vectors)
  expected = tensor.MultiVector.vector(vectors[:, 0])
  for k in range(1, 3):
    expected = expected ^ tensor.MultiVector.vector(vectors[:, k])
  np.testing.assert_allclose(monomial.coords, expected.coords, atol=1e-12)


def test_exterior_action_is_multiplicative(rng):
  a = rng.normal(size=(4, 4))
  b = rng.normal(size=(4, 4))
  for degree in range(1, 4):
    np.testing.assert_allclose(
        tensor.exterior_action(a @ b, degree),
        tensor.exterior_action(a, degree) @ tensor.exterior_action(b, degree),
        atol=1e-10)
  np.testing.assert_allclose(
      tensor.exterior_action(a, 4), [[np.linalg.det(a)]])


def test_transform_commutes_with_wedge(rng):
  matrix = rng.normal(size=(3, 3))
  u = tensor.MultiVector.vector(rng.normal(size=3))
  v = tensor.MultiVector.vector(rng.normal(size=3))
  left = u.transform(matrix) ^ v.transform(matrix)
  right = (u ^ v).transform(matrix)
  np.testing.assert_allclose(left.coords, right.coords, atol=1e-12)


def test_batch_matches_single(rng):
  matrices = rng.normal(size=(5, 3, 3))
  batch = tensor.exterior_action_batch(matrices, 2)
  for matrix, action in zip(matrices, batch):
    np.testing.assert_allclose(action, tensor.exterior_action(matrix, 2))


def test_arithmetic_and_norm():
  u = tensor.MultiVector.vector([3.0, 4.0])
  assert u.norm == pytest.approx(5.0)
  assert u.normalized().norm == pytest.approx(1.0)
  np.testing.assert_allclose((2 * u - u).coords, u.coords)
  np.testing.assert_allclose((-u).coords, [-3.0, -4.0])


def test_invalid_multivectors():
  with pytest.raises(ValueError):
    tensor.MultiVector(3, 2, np.zeros(2))
  u = tensor.MultiVector.vector([1.0, 0.0, 0.0])
  with pytest.raises(ValueError):
    u + tensor.MultiVector.basis(3, (0, 1))
  with pytest.raises(ValueError):
    tensor.MultiVector.basis(3, (0, 1)) ^ tensor.MultiVector.basis(3, (1, 2))


@pytest.mark.parametrize('dim', [3, 4])
def test_exterior_determinant(dim, rng):
  matrix = rng.normal(size=(dim, dim))
  det = np.linalg.det(matrix)
  for degree in range(1, dim):
    power = math.comb(dim - 1, degree - 1)
    assert np.linalg.det(tensor.exterior_action(matrix, degree)) == (
        pytest.approx(det ** power, rel=1e-8))


def test_wedge_norm_is_rotation_invariant(rng):
  rotation, _ = np.linalg.qr(rng.normal(size=(4, 4)))
  for degree in (1, 2, 3):
    vectors = rng.normal(size=(4, degree))
    monomial = tensor.MultiVector.from_vectors(vectors)
    rotated = tensor.MultiVector.from_vectors(rotation @ vectors)
    assert rotated.norm == pytest.approx(monomial.norm)
    assert monomial.transform(rotation).norm == pytest.approx(monomial.norm)
