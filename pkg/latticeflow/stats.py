import collections

import numpy as np
import scipy.stats


Fit = collections.namedtuple('Fit', 'slope, intercept, r2, count')


def linear_fit(x, y):
  x = np.asarray(x, np.float64).ravel()
  y = np.asarray(y, np.float64).ravel()
  if len(x) != len(y):
    raise ValueError(f'Length mismatch: {len(x)} != {len(y)}.')
  if len(x) < 2:
    raise ValueError(f'Need at least two points to fit, got {len(x)}.')
  if np.ptp(x) == 0:
    raise ValueError('Cannot fit a line through identical abscissae.')
  if np.ptp(y) == 0:
    return Fit(0.0, float(y[0]), 1.0, len(x))
  result = scipy.stats.linregress(x, y)
  return Fit(
      float(result.slope), float(result.intercept),
      float(result.rvalue ** 2), len(x))


def semilog_fit(x, y, min_count=2):
  """Fit log y = slope * x + intercept over the positive values of y.

  When every value is zero the decay is faster than any exponential and the
  slope is minus infinity.
  """
  x = np.asarray(x, np.float64).ravel()
  y = np.abs(np.asarray(y, np.float64).ravel())
  keep = y > 0
  if not keep.any():
    return Fit(-np.inf, -np.inf, 1.0, 0)
  if keep.sum() < min_count:
    raise ValueError(
        f'Need {min_count} nonzero values to fit, got {keep.sum()}.')
  return linear_fit(x[keep], np.log(y[keep]))


def loglog_fit(x, y, min_count=2):
  x = np.asarray(x, np.float64).ravel()
  y = np.asarray(y, np.float64).ravel()
  keep = (x > 0) & (y > 0)
  if keep.sum() < min_count:
    raise ValueError(
        f'Need {min_count} positive pairs to fit, got {keep.sum()}.')
  return linear_fit(np.log(x[keep]), np.log(y[keep]))
