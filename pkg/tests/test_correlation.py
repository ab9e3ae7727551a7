import numpy as np
import pytest

from latticeflow import correlation


def test_smooth_step():
  values = correlation._smooth_step([-1.0, 0.0, 0.5, 1.0, 2.0])
  np.testing.assert_allclose(values, [0.0, 0.0, 0.5, 1.0, 1.0])
  grid = correlation._smooth_step(np.linspace(0, 1, 50))
  assert np.all(np.diff(grid) >= 0)


def test_minima_bump():
  psi = correlation.MinimaBump()
  bases = np.stack([
      np.eye(2), np.diag([0.1, 10.0]), np.diag([0.15, 1 / 0.15]),
      np.diag([2.0, 0.5])])
  values = psi(bases)
  assert values[0] == pytest.approx(1.0)
  assert values[1] == pytest.approx(0.0)
  assert 0 < values[2] < 1
  assert values[3] == pytest.approx(np.exp(-2.0))
  assert np.all(values >= 0) and np.all(values <= psi.bound)


def test_constant_observable(flow, lattice):
  psi = correlation.Observable.constant(2.0)
  assert psi.bound == 2.0 and psi.lipschitz == 0.0
  assert psi.evaluate(lattice) == 2.0
  assert correlation.psi_shifted(flow, lattice, psi, 0.3, 0, 1.0, [0.2]) == 0.0
  assert correlation.correlation(flow, lattice, psi, 0.3, 0, 0.5, 0.5) == 0.0
  assert correlation.window_average(
      flow, lattice, psi, 0.3, 0, 0.5, 0.5, [0.1]) == 0.0
  assert correlation.calibrate(psi, 2, pairs=10) == 0.0


def test_calibrate_bump_is_positive():
  lipschitz = correlation.calibrate(correlation.MinimaBump(), 2, pairs=50)
  assert 0 < lipschitz < np.inf


def test_bump_declares_lipschitz():
  psi = correlation.MinimaBump()
  assert 0 < psi.lipschitz < np.inf
  assert correlation.MinimaBump(width=0.1).lipschitz > psi.lipschitz
  assert correlation.MinimaBump(lipschitz=3.0).lipschitz == 3.0
  # Random near-identity moves never beat the declared constant by much.
  assert correlation.calibrate(psi, 2, pairs=50) <= 2.2 * psi.lipschitz
  with pytest.raises(ValueError):
    correlation.MinimaBump(width=0.0)


def test_correlation_is_symmetric(flow, lattice):
  psi = correlation.MinimaBump()
  forward = correlation.correlation(flow, lattice, psi, 0.3, 0, 0.5, 0.8)
  backward = correlation.correlation(flow, lattice, psi, 0.3, 0, 0.8, 0.5)
  assert forward == pytest.approx(backward)
  assert abs(forward) <= 2 * (2 * psi.bound) ** 2


def test_correlation_rejects(flow, lattice):
  psi = correlation.MinimaBump()
  with pytest.raises(ValueError):
    correlation.correlation(flow, lattice, psi, 0.3, 0, 0.0, 1.0)
  with pytest.raises(ValueError):
    correlation.shifted_values(flow, lattice, psi, 0.3, 1, 1.0, [[0.0]])


def test_decay_fit():
  gaps = np.arange(1.0, 6.0)
  fit = correlation.decay_fit(gaps, -0.5 * np.exp(-gaps))
  assert fit.slope == pytest.approx(-1.0)
  assert fit.intercept == pytest.approx(np.log(0.5))
  assert fit.dropped == 0
  values = np.exp(-gaps)
  values[-1] = 0.0
  assert correlation.decay_fit(gaps, values).dropped == 1
  with pytest.raises(ValueError):
    correlation.decay_fit(gaps[:3], values[:3])


def test_birkhoff_average(flow, lattice):
  ws = [[0.1], [-0.3], [0.7]]
  constant = correlation.Observable.constant(1.0)
  averages = correlation.birkhoff_average(
      flow, lattice, constant, 0.3, 0, ws, [0.5, 1.0], dt=0.1)
  assert averages.shape == (2, 3)
  np.testing.assert_allclose(averages, 0.0)
  bump = correlation.MinimaBump()
  averages = correlation.birkhoff_average(
      flow, lattice, bump, 0.3, 0, ws, [0.5, 1.0], dt=0.1)
  assert np.all(np.abs(averages) <= 1.0)
  with pytest.raises(ValueError):
    correlation.birkhoff_average(flow, lattice, bump, 0.3, 0, ws, [0.0])
