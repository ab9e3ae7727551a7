import math

import numpy as np
import pandas as pd
import pytest

from latticeflow import common
from latticeflow import correlation
from latticeflow import height
from latticeflow import homspace
from latticeflow import returns


def test_box_of_first_level(flow):
  left = returns.box_of(flow, 0.5, 1, [-0.9])
  assert left.digits == ((0,),)
  assert left.lower[0] == pytest.approx(-1.0)
  assert left.upper[0] == pytest.approx(-1 + math.exp(-1))
  right = returns.box_of(flow, 0.5, 1, [0.9])
  assert right.digits == ((4,),)
  assert right.lower[0] == pytest.approx(-1 + 4 * math.exp(-1))
  assert right.upper[0] == pytest.approx(1.0)
  whole = returns.box_of(flow, 0.5, 0, [0.3])
  assert (whole.lower, whole.upper, whole.volume) == ((-1.0,), (1.0,), 2.0)


def test_boxes_nest_and_contain_the_point(flow3, rng):
  t = 0.3
  for _ in range(20):
    w = rng.uniform(-1, 1, 2)
    coarse = returns.box_of(flow3, t, 1, w)
    fine = returns.box_of(flow3, t, 3, w)
    assert coarse.contains(w) and fine.contains(w)
    assert fine.refines(coarse) and not coarse.refines(fine)
    sides = np.subtract(fine.upper, fine.lower)
    assert np.all(sides >= np.exp(-3 * t * flow3.weights) * (1 - 1e-9))
    assert fine.volume <= coarse.volume


def test_points_of_a_cell_are_comparable(flow3, rng):
  t, n = 0.3, 3
  params = height.make_height_params(flow3, 0.1)
  slack = height.comparability_constant(flow3, params)
  x = homspace.LatticePoint.identity(3)
  for _ in range(10):
    w = rng.uniform(-1, 1, 2)
    cell = returns.box_of(flow3, t, n, w)
    lower, upper = np.array(cell.lower), np.array(cell.upper)
    w2 = lower + (upper - lower) * rng.uniform(size=2)
    xi = returns.box_translate(flow3, t, n, w, w2)
    assert np.abs(xi).max() <= 2
    ratio = height.alpha(
        params, homspace.apply_flow(flow3, x, n * t, w2)) / height.alpha(
            params, homspace.apply_flow(flow3, x, n * t, w))
    assert 1 / slack <= ratio * (1 + 1e-9) and ratio <= slack * (1 + 1e-9)


def test_box_digits_resolution(flow):
  with pytest.raises(common.NumericError):
    returns.box_digits(flow, 1.0, [0.3], 20)
  digits = returns.box_digits(flow, 1.0, [0.3], 20, np.random.default_rng(0))
  assert digits.shape == (20, 1)
  assert np.all(digits >= 0)
  with pytest.raises(ValueError):
    returns.box_digits(flow, 1.0, [1.5], 2)


def test_deep_cells_are_read_from_the_point(flow):
  cell = returns.box_of(flow, 2.0, 6, [0.1])
  assert cell.contains([0.1])
  assert cell.refines(returns.box_of(flow, 2.0, 5, [0.1]))
  side = cell.upper[0] - cell.lower[0]
  assert math.exp(-24.0) * (1 - 1e-4) <= side < 2 * math.exp(-24.0)


def test_return_trace_follows_the_orbit(flow, params, lattice):
  trace = returns.return_times(flow, params, lattice, 2.0, 1e6, 6, [0.1])
  for n, value in enumerate(trace.heights):
    corner = returns.box_of(flow, 2.0, n, [0.1]).lower
    direct = homspace.apply_flow(flow, lattice, 2.0 * n, corner)
    assert value == pytest.approx(height.alpha(params, direct), rel=1e-3)


def test_box_translate(flow3, rng):
  w, w2 = rng.uniform(-1, 1, (2, 2))
  t, n = 0.4, 2
  xi = returns.box_translate(flow3, t, n, w, w2)
  g = flow3.g(n * t)
  np.testing.assert_allclose(
      g @ flow3.u(w2), flow3.u(xi) @ g @ flow3.u(w), atol=1e-9)


def test_sublevel_and_membership(flow, params, lattice):
  assert returns.sublevel(params, 1.0)(lattice)
  assert not returns.sublevel(params, 0.05)(lattice)
  inside = returns.membership(
      flow, lattice, [[0.2], [-0.4]], 0.1, 5, returns.sublevel(params, 1e6))
  assert inside.shape == (2, 5) and inside.all()


def test_occupancy(flow, params, lattice):
  everything = returns.sublevel(params, 1e6)
  nothing = returns.sublevel(params, 1e-6)
  assert returns.occupancy_continuous(
      flow, lattice, 1.0, everything, [0.1], 0.1) == 1.0
  assert returns.occupancy_continuous(
      flow, lattice, 1.0, nothing, [0.1], 0.1) == 0.0
  assert returns.occupancy_discrete(
      flow, lattice, 0.5, everything, 4, [0.1]) == 1.0
  with pytest.raises(ValueError):
    returns.occupancy_continuous(flow, lattice, 0.0, everything, [0.1])


def test_discrete_to_continuous(flow, params, lattice):
  result = returns.discrete_to_continuous(
      flow, params, lattice, 0.5, 1e6, 5.0, [0.1], 0.25, 0.1)
  assert result.discrete == 1.0 and result.continuous == 1.0
  assert result.holds
  with pytest.raises(ValueError):
    returns.discrete_to_continuous(
        flow, params, lattice, 0.5, 1e6, 3.0, [0.1], 0.25, 0.1)
  with pytest.raises(ValueError):
    returns.discrete_to_continuous(
        flow, params, lattice, 0.55, 1e6, 5.0, [0.1], 0.25, 0.1)


def test_flow_growth_is_at_least_one(flow, params):
  assert returns.flow_growth(flow, params, 0.0) == pytest.approx(1.0)
  assert returns.flow_growth(flow, params, 1.0) == pytest.approx(math.e)


def test_tail_to_continuous():
  a, C, T0 = returns.tail_to_continuous(0.5, 2.0, 1, 0.2)
  assert a == pytest.approx(math.sqrt(0.5))
  assert C == pytest.approx(4.0)
  assert T0 == pytest.approx(20.0)
  with pytest.raises(ValueError):
    returns.tail_to_continuous(1.5, 2.0, 1, 0.2)


def test_return_trace_rows():
  trace = returns.ReturnTrace((0.1,), 1.0, 1.0, 8, (0, 3, 5))
  assert trace.censored
  np.testing.assert_array_equal(trace.gaps, [3, 2])
  assert trace.rows(7) == [
      (7, 0, 0, 0, False), (7, 1, 3, 3, False), (7, 2, 5, 2, False),
      (7, 3, 8, 3, True)]
  complete = returns.ReturnTrace((0.1,), 1.0, 1.0, 8, (0, 3, 8))
  assert not complete.censored
  assert len(complete.rows(0)) == 3
  with pytest.raises(AssertionError):
    returns.ReturnTrace((0.1,), 1.0, 1.0, 8, (1, 3))


def test_return_traces(flow, params, lattice, rng):
  ws = rng.uniform(-1, 1, (3, 1))
  always = returns.return_traces(flow, params, lattice, 0.5, 1e6, 10, ws)
  for trace in always:
    assert trace.sigma == tuple(range(11))
    assert not trace.censored
  with pytest.raises(ValueError):
    returns.return_traces(flow, params, lattice, 0.5, 0.05, 10, ws)
  full = returns.return_traces(flow, params, lattice, 0.5, 0.2, 30, ws, 3)
  part = returns.return_traces(
      flow, params, lattice, 0.5, 0.2, 30, ws[1:], 3, offset=1)
  assert [t.sigma for t in full[1:]] == [t.sigma for t in part]
  single = returns.return_times(flow, params, lattice, 0.5, 0.2, 30, ws[0], 3)
  assert single.sigma == full[0].sigma


def test_gap_statistics():
  trace = returns.ReturnTrace((0.0,), 1.0, 1.0, 10, (0, 1, 2, 4, 7))
  table = returns.gap_statistics([trace], min_gaps=4)
  assert table['q'].tolist() == [1, 2, 3, 4]
  assert table['count'].tolist() == [4, 2, 1, 0]
  np.testing.assert_allclose(table['tail'], [1.0, 0.5, 0.25, 0.0])
  with pytest.raises(ValueError):
    returns.gap_statistics([trace], min_gaps=5)


def test_fit_tail():
  qs = np.arange(1, 6)
  table = pd.DataFrame({
      'q': qs, 'tail': 0.8 * np.exp(-0.5 * qs), 'count': 1000, 'total': 5000})
  fit = returns.fit_tail(table)
  assert fit.theta0 == pytest.approx(0.5)
  assert fit.C0 == pytest.approx(1.0)
  assert fit.r2 == pytest.approx(1.0)
  assert fit.points == 5
  with pytest.raises(ValueError):
    returns.fit_tail(table.iloc[:1])


def test_shadowing_with_constants(flow, lattice):
  cell = returns.box_of(flow, 1.0, 2, [0.3])
  lhs, rhs = returns.shadowing_check(
      flow, lattice, 1.0, 2, cell, correlation.Observable.constant(1.0), 8)
  assert lhs == pytest.approx(cell.volume)
  assert rhs == pytest.approx(2 * cell.volume)
  lhs, rhs = returns.shadowing_check(
      flow, lattice, 1.0, 2, cell, correlation.Observable.constant(0.0), 8)
  assert lhs == rhs == 0.0


@pytest.mark.parametrize('w', [-0.7, 0.05, 0.3, 0.95])
def test_shadowing_inequality(flow, lattice, w):
  cell = returns.box_of(flow, 1.0, 2, [w])
  lhs, rhs = returns.shadowing_check(
      flow, lattice, 1.0, 2, cell, correlation.MinimaBump(), 16)
  assert lhs <= rhs + 1e-6


def test_shadowing_box_too_small(flow, lattice):
  with pytest.raises(ValueError):
    returns.shadowing_check(
        flow, lattice, 1.0, 2, ([0.0], [1e-6]), correlation.MinimaBump())
