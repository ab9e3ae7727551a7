import collections
import math
import warnings
from fractions import Fraction

import numpy as np

from . import common
from . import correlation
from . import expanding
from . import height
from . import homspace
from . import largedev
from . import returns
from . import rootsys
from . import stats
from . import tensor


Context = collections.namedtuple(
    'Context', 'config, manifest, logger, step, parallel')

EXPERIMENTS = {}


def experiment(name):
  def register(fn):
    EXPERIMENTS[name] = fn
    return fn
  return register


def _flow(config):
  return homspace.make_flow(config.a, config.b)


def _params(config, spec):
  return height.make_height_params(spec, config.epsilon)


def _points(config, spec, count=None, stream=0):
  rng = common.sample_rng(config.seed, stream)
  return rng.uniform(-1, 1, (count or config.samples, spec.dim))


def _check(config, passed, message):
  if config.check and not passed:
    raise common.FalsifiedError(message)


def _exact(value):
  if isinstance(value, Fraction):
    return str(value)
  return float(value)


def _w_columns(spec):
  return ['w'] if spec.dim == 1 else [f'w{k + 1}' for k in range(spec.dim)]


def _chunks(count, workers):
  return [
      chunk for chunk in np.array_split(np.arange(count), max(1, workers))
      if len(chunk)]


def _traces(ctx, spec, params, x, ws):
  config = ctx.config
  l0 = config.l0 or config.l0_scale * height.alpha(params, x)
  slack = height.comparability_constant(spec, params)
  jobs = ctx.parallel.map(
      lambda chunk: returns.return_traces(
          spec, params, x, config.t, l0, config.N, ws[chunk], config.seed,
          slack, offset=int(chunk[0])),
      _chunks(len(ws), config.workers))
  return [trace for job in jobs for trace in job], l0, slack


@experiment('simulate')
def simulate(ctx):
  config = ctx.config
  spec = _flow(config)
  params = _params(config, spec)
  x = homspace.LatticePoint.identity(spec.d)
  ws = _points(config, spec)
  steps = int(round(config.T / config.dt))
  cutoff = config.height_cutoff or np.inf
  below = np.zeros(len(ws))
  rows = []
  should_log = common.Every(config.log_every)

  def observe(step, bases):
    minima = homspace.minima_batch(bases)
    heights = height.alpha_from_minima(params, minima)
    below[:] += minima[:, 0] < config.radius
    if step % config.record_every == 0:
      time = step * config.dt
      for index in range(len(ws)):
        rows.append((
            index, time, minima[index, 0], heights[index],
            bool(heights[index] <= cutoff)))
    ctx.step.value = step
    if should_log(step * config.dt):
      ctx.logger.add({
          'fraction': below.mean() / (step + 1),
          'alpha_mean': heights.mean(),
          'alpha_max': heights.max(),
      }, prefix='simulate')
      ctx.logger.write()

  driver = common.Driver(homspace.Orbit(spec, x, ws, config.dt))
  driver.on_step(observe)
  driver(steps)
  ctx.manifest.write_csv(
      'trajectory.csv', rows, ['sample_id', 't', 'lambda1', 'alpha', 'inK'])
  fractions = below / steps
  oracle = homspace.short_vector_measure(spec.d, config.radius)
  summary = {
      'samples': len(ws), 'T': config.T, 'radius': config.radius,
      'fraction_mean': float(fractions.mean()),
      'fraction_std': float(fractions.std()),
      'oracle': oracle,
  }
  if oracle is not None:
    error = abs(summary['fraction_mean'] - oracle)
    summary['error'] = error
    _check(config, error <= 0.03, (
        f'Time average {summary["fraction_mean"]:.4f} misses the Haar '
        f'measure {oracle:.4f} by {error:.4f}.'))
  return summary


@experiment('height-profile')
def height_profile(ctx):
  config = ctx.config
  spec = _flow(config)
  params = _params(config, spec)
  x = homspace.LatticePoint.identity(spec.d)
  nodes, _ = homspace.box_quadrature(
      spec.dim, config.grid, config.mc_samples, config.seed)
  minima = homspace.minima_batch(
      homspace.flowed_bases(spec, x, config.t, nodes))
  heights = height.alpha_from_minima(params, minima)
  columns = (
      _w_columns(spec) + ['alpha', 'lambda1'] +
      [f'm{i}' for i in range(2, spec.d)])
  rows = [
      tuple(w) + (a,) + tuple(profile)
      for w, a, profile in zip(nodes, heights, minima)]
  ctx.manifest.write_csv('profile.csv', rows, columns)
  return {
      't': config.t, 'points': len(nodes),
      'alpha_mean': float(heights.mean()),
      'alpha_max': float(heights.max()),
      'alpha_start': height.alpha(params, x),
      'comparability': height.comparability_constant(spec, params),
      'delta_eta': list(params.delta_eta),
      'sigma': params.sigma, 'sigma1': params.sigma1,
  }


@experiment('return-times')
def return_times(ctx):
  config = ctx.config
  spec = _flow(config)
  params = _params(config, spec)
  x = homspace.LatticePoint.identity(spec.d)
  traces, l0, slack = _traces(ctx, spec, params, x, _points(config, spec))
  rows = [row for index, trace in enumerate(traces) for row in trace.rows(index)]
  ctx.manifest.write_csv('returns.csv', rows, returns.TRACE_COLUMNS)
  summary = {
      'samples': len(traces), 'l0': l0, 'slack': slack,
      'censored': int(sum(trace.censored for trace in traces)),
      'gaps': int(sum(len(trace.gaps) for trace in traces)),
      'fit': None,
  }
  try:
    table = returns.gap_statistics(traces, config.min_gaps)
    fit = returns.fit_tail(table, config.min_count)
  except ValueError as e:
    print('Tail fit unavailable:', e)
    _check(config, False, f'No gap tail to fit: {e}')
    return summary
  ctx.manifest.write_csv('tail.csv', table.values.tolist(), table.columns)
  summary['fit'] = fit._asdict()
  ctx.logger.add(summary['fit'], prefix='tail')
  ctx.logger.write()
  _check(config, fit.theta0 > 0 and fit.r2 >= 0.9, (
      f'Gap tail slope {-fit.theta0:.4f} with R2 {fit.r2:.4f} is not an '
      f'exponential decay.'))
  return summary


@experiment('occupancy')
def occupancy(ctx):
  config = ctx.config
  spec = _flow(config)
  params = _params(config, spec)
  x = homspace.LatticePoint.identity(spec.d)
  ws = _points(config, spec)
  horizons = list(config.horizons)
  steps = int(round(max(horizons) / config.dt))
  heights = np.zeros((len(ws), steps))

  def observe(step, bases):
    heights[:, step] = height.alpha_from_minima(
        params, homspace.minima_batch(bases))

  driver = common.Driver(homspace.Orbit(spec, x, ws, config.dt))
  driver.on_step(observe)
  driver(steps)
  level = config.height_cutoff or float(
      np.quantile(heights, config.height_quantile))
  inside = heights <= level
  rows = []
  for T in horizons:
    averages = inside[:, :max(1, int(round(T / config.dt)))].mean(1)
    rows.append((T, float(np.mean(averages <= 1 - config.eps_prop))))
  ctx.manifest.write_csv('occupancy.csv', rows, ['T', 'fraction_below'])
  fractions = np.array([fraction for _, fraction in rows])
  monotone = bool(np.all(np.diff(fractions) <= 0))
  try:
    fit = stats.semilog_fit(horizons, fractions)
    decaying = fit.slope < 0
  except ValueError:
    # A single positive value cannot be fitted.
    fit = None
    decaying = fractions[-1] < fractions[0]
  summary = {
      'level': level, 'eps_prop': config.eps_prop,
      'monotone': monotone, 'fit': fit and fit._asdict(), 'chain': None,
  }
  if max(horizons) >= 2 * config.t / config.eps_prop:
    chain = [
        returns.discrete_to_continuous(
            spec, params, x, config.t, level, max(horizons), w,
            config.eps_prop, config.dt)
        for w in ws[:10]]
    summary['chain'] = all(result.holds for result in chain)
  _check(config, monotone and decaying, (
      f'Occupancy tail {fractions.tolist()} is not a decaying sequence.'))
  return summary


def _gap_process(ctx):
  config = ctx.config
  if config.process == 'geometric':
    return largedev.GeometricGaps(config.theta0)
  if config.process == 'deterministic':
    return largedev.DeterministicGaps()
  if config.process == 'markov':
    return largedev.MarkovGaps(config.C0, config.theta0)
  if config.process == 'trace':
    spec = _flow(config)
    params = _params(config, spec)
    x = homspace.LatticePoint.identity(spec.d)
    traces, _, _ = _traces(ctx, spec, params, x, _points(config, spec))
    table = returns.gap_statistics(traces, config.min_gaps)
    fit = returns.fit_tail(table, config.min_count)
    print(f'Trace certificate C0 = {fit.C0:.4f}, theta0 = {fit.theta0:.4f}')
    return largedev.TraceGaps(traces, fit.C0, fit.theta0)
  raise common.UsageError(f'Unknown gap process {config.process}.')


@experiment('largedev')
def large_deviations(ctx):
  config = ctx.config
  proc = _gap_process(ctx)
  constants = largedev.derive_constants(proc.C0, proc.theta0, config.ld_eps)
  with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter('always')
    table = largedev.empirical_ld(
        proc, config.ld_eps, config.n_max, config.trials, config.seed,
        parallel=ctx.parallel)
  messages = [str(warning.message) for warning in caught]
  for message in messages:
    print('Warning:', message)
  ctx.manifest.write_csv('largedev.csv', table.values.tolist(), table.columns)
  excess = table['empirical'] - table['bound'] - 3 * table['stderr']
  violations = [int(n) for n in table['n'][excess > 0]]
  rng = common.sample_rng(config.seed, 1)
  failures = 0
  for _ in range(config.draws):
    C0 = rng.uniform(1, 10)
    theta0 = rng.uniform(0.1, 3)
    eps = rng.uniform(0.05, 0.95)
    drawn = largedev.derive_constants(C0, theta0, eps)
    base = largedev.rhs_base(C0, theta0, drawn.Q, eps)
    failures += base > math.exp(-drawn.theta) * (1 + 1e-12)
  summary = {
      'process': config.process, 'C0': proc.C0, 'theta0': proc.theta0,
      'eps': config.ld_eps, 'theta': constants.theta, 'Q': constants.Q,
      'violations': violations, 'constant_failures': int(failures),
      'warnings': messages,
  }
  _check(config, not violations and not failures, (
      f'Large deviation bound exceeded at n = {violations} '
      f'({failures} constant draws failed).'))
  return summary


def _bump(config):
  return correlation.MinimaBump(**config.bump)


@experiment('correlations')
def correlations(ctx):
  config = ctx.config
  spec = _flow(config)
  x = homspace.LatticePoint.identity(spec.d)
  psi = _bump(config)
  calibrated = correlation.calibrate(
      psi, spec.d, config.seed, pairs=config.draws)
  axis = config.axis - 1
  ls = [config.t + gap for gap in config.gaps]
  values = ctx.parallel.map(
      lambda l: correlation.correlation(
          spec, x, psi, config.shift, axis, config.t, l,
          config.points_per_scale, config.mc_samples, config.seed),
      ls)
  rows = [
      (config.t, l, gap, value)
      for l, gap, value in zip(ls, config.gaps, values)]
  ctx.manifest.write_csv('correlations.csv', rows, ['t', 'l', 'gap', 'corr'])
  fit = correlation.decay_fit(config.gaps, values)
  ws = _points(config, spec, config.birkhoff_samples, stream=1)
  averages = correlation.birkhoff_average(
      spec, x, psi, config.shift, axis, ws, config.birkhoff_horizons,
      config.dt)
  drift = np.abs(averages).mean(1)
  ctx.manifest.write_csv(
      'birkhoff.csv', list(zip(config.birkhoff_horizons, drift)),
      ['T', 'mean_abs'])
  for T, value in zip(config.birkhoff_horizons, drift):
    ctx.step.value = int(round(T / config.dt))
    ctx.logger.scalar('birkhoff_mean_abs', value)
    ctx.logger.write()
  summary = {
      'fit': fit._asdict(), 'lipschitz': psi.lipschitz,
      'lipschitz_calibrated': calibrated,
      'birkhoff_monotone': bool(np.all(np.diff(drift) <= 0)),
  }
  _check(config, fit.slope <= -0.25 and fit.r2 >= 0.8, (
      f'Correlations decay at slope {fit.slope:.4f} with R2 {fit.r2:.4f}.'))
  return summary


def _shadowing_instance(config, spec, x, index):
  rng = common.sample_rng(config.seed, index)
  n = int(rng.integers(0, config.max_level + 1))
  w = rng.uniform(-1, 1, spec.dim)
  cell = returns.box_of(spec, config.t, n, w)
  psi = correlation.MinimaBump(
      center=rng.uniform(0.6, 1.4), width=rng.uniform(0.1, 0.5),
      cutoff=config.bump.cutoff)
  lhs, rhs = returns.shadowing_check(
      spec, x, config.t, n, cell, psi, config.grid)
  return index, n, cell.volume, lhs, rhs, rhs - lhs


@experiment('shadowing')
def shadowing(ctx):
  config = ctx.config
  spec = _flow(config)
  x = homspace.LatticePoint.identity(spec.d)
  rows = ctx.parallel.map(
      lambda index: _shadowing_instance(config, spec, x, index),
      range(config.instances))
  ctx.manifest.write_csv(
      'shadowing.csv', rows,
      ['instance', 'level', 'volume', 'lhs', 'rhs', 'margin'])
  failed = [row[0] for row in rows if row[5] < -config.tolerance]
  if failed:
    raise common.FalsifiedError(
        f'Shadowing inequality fails in instances {failed}.')
  return {
      'instances': len(rows),
      'min_margin': float(min(row[5] for row in rows)),
  }


def _degree(config):
  return config.degree or 'adjoint'


@experiment('contraction')
def contraction(ctx):
  config = ctx.config
  spec = _flow(config)
  params = _params(config, spec)
  degree = _degree(config)
  times = list(config.times)
  integrals = ctx.parallel.map(
      lambda t: height.contraction_integral(
          spec, degree, t, config.theta, config.grid, config.v_samples,
          config.mc_samples, config.seed),
      times)
  diffs = np.diff(np.log(integrals))
  ctx.manifest.write_csv(
      'contraction.csv', list(zip(times, integrals)), ['t', 'integral'])
  rep = height.representation(spec, degree)
  rng = common.sample_rng(config.seed, 1)
  radii = [2.0 ** -k for k in range(1, config.radii + 1)]
  rows, slopes = [], []
  for index in range(config.v_samples):
    v = rng.normal(size=rep.dim)
    v /= np.linalg.norm(v)
    measures = [
        height.good_sublevel_measure(
            spec, degree, v, r, config.mc_samples, config.seed)
        for r in radii]
    rows += [(index, r, value) for r, value in zip(radii, measures)]
    if sum(value > 0 for value in measures) >= 2:
      slopes.append(stats.loglog_fit(radii, measures).slope)
  ctx.manifest.write_csv('sublevel.csv', rows, ['v', 'r', 'measure'])
  summary = {
      'degree': str(degree), 'theta': config.theta,
      'integrals': [float(v) for v in integrals],
      'log_diffs': diffs.tolist(),
      'sublevel_min_slope': float(min(slopes)) if slopes else None,
  }
  if degree != 'adjoint':
    moved = 0
    for _ in range(config.v_samples):
      v = tensor.MultiVector.from_vectors(rng.normal(size=(spec.d, degree)))
      start = height.phi(params, v) ** config.theta
      after = height.phi_contraction(
          spec, params, v, max(times), config.theta, config.grid,
          config.mc_samples, config.seed)
      moved += after <= start
    summary['phi_contracted'] = moved / config.v_samples
  _check(config, bool(np.all(diffs <= -0.05)), (
      f'Contraction integrals {summary["integrals"]} do not decay.'))
  return summary


@experiment('drift')
def drift(ctx):
  config = ctx.config
  spec = _flow(config)
  params = _params(config, spec)
  rng = common.sample_rng(config.seed, 0)
  pool = [
      homspace.random_lattice(spec.d, rng, config.drift_spread)
      for _ in range(config.drift_pool)]
  heights = np.array([height.alpha(params, y) for y in pool])
  chosen = np.argsort(-heights, kind='stable')[:config.drift_count]
  results = ctx.parallel.map(
      lambda index: height.drift_check(
          spec, params, pool[index], config.t, config.grid,
          config.mc_samples, config.seed),
      chosen)
  lhs = np.array([result[0] for result in results])
  alphas = np.array([result[1] for result in results])
  ctx.manifest.write_csv(
      'drift.csv', [
          (int(index), a, value, value / a)
          for index, a, value in zip(chosen, alphas, lhs)],
      ['index', 'alpha', 'lhs', 'ratio'])
  c, b, r2 = height.fit_drift(alphas, lhs)
  summary = {
      't': config.t, 'c': c, 'b': b, 'r2': r2,
      'threshold': float(alphas.min()),
  }
  _check(config, c < 1 and np.isfinite(b), (
      f'Drift coefficient c = {c:.4f} does not contract.'))
  return summary


def _system(config):
  return rootsys.build_root_system(config.family, config.rank)


def _roots(values):
  return [[_exact(x) for x in root] for root in values]


@experiment('rootsys-decompose')
def rootsys_decompose(ctx):
  config = ctx.config
  system = _system(config)
  weights = [Fraction(int(k)) for k in config.alpha]
  alpha = rootsys.dominant_from_weights(system, weights)
  decomposition = rootsys.decompose_dominated(system, alpha)
  verdict = rootsys.verify_decomposition(system, decomposition)
  payload = {
      'family': system.family, 'rank': system.rank,
      'weights': [int(k) for k in config.alpha],
      'alpha': [_exact(x) for x in alpha],
      'betas': _roots(decomposition.betas),
      'betas_simple': _roots(system.coords(b) for b in decomposition.betas),
      'coeffs': [_exact(c) for c in decomposition.coeffs],
      'route': decomposition.route,
      'verified': bool(verdict),
      'reasons': list(verdict.reasons),
  }
  ctx.manifest.write_json('decomposition.json', payload)
  return {'verified': payload['verified'], 'route': payload['route']}


def _construction_verdict(construction):
  closure = construction.algebra()
  z_op = expanding.adjoint_operators(closure, construction.z[None])[0]
  generators = expanding.adjoint_operators(closure, construction.u_basis)
  algebra = expanding.adjoint_operators(closure, closure)
  return expanding.expanding_check(z_op, generators, algebra), closure


@experiment('rootsys-expanding')
def rootsys_expanding(ctx):
  config = ctx.config
  z = [Fraction(str(v)) for v in config.z]
  construction = expanding.build_expanding(len(z), z)
  verdict, closure = _construction_verdict(construction)
  payload = {
      'z': [_exact(v) for v in z],
      'P': [i + 1 for i in construction.P],
      'pairs': [[j + 1, k + 1] for j, k in construction.pairs],
      'coeffs': [_exact(c) for c in construction.decomposition.coeffs],
      'u_basis': [
          [j + 1, k + 1] for i, (j, k) in enumerate(construction.pairs)
          if i in construction.P],
      'algebra_dim': len(closure),
      'verdict': {
          'passed': bool(verdict.passed), 'residual': verdict.residual},
  }
  ctx.manifest.write_json('expanding.json', payload)
  _check(config, verdict.passed, (
      f'Construction for z = {payload["z"]} is not expanding '
      f'(residual {verdict.residual:.3g}).'))
  return {'passed': bool(verdict.passed), 'P': payload['P']}


@experiment('rootsys-orthogonal')
def rootsys_orthogonal(ctx):
  system = _system(ctx.config)
  found = rootsys.strongly_orthogonal(system)
  pairs_ok = all(
      rootsys.strongly_orthogonal_pair(system, u, v)
      for i, u in enumerate(found) for v in found[i + 1:])
  payload = {
      'family': system.family, 'rank': system.rank,
      'roots': _roots(found),
      'roots_simple': _roots(system.coords(r) for r in found),
      'strongly_orthogonal': pairs_ok,
  }
  ctx.manifest.write_json('orthogonal.json', payload)
  _check(ctx.config, pairs_ok, f'{system} search returned dependent roots.')
  return {'size': len(found), 'strongly_orthogonal': pairs_ok}


@experiment('rootsys-cartan')
def rootsys_cartan(ctx):
  system = _system(ctx.config)
  inverse = rootsys.inverse_cartan(system)
  payload = {
      'family': system.family, 'rank': system.rank,
      'cartan': _roots(system.cartan),
      'inverse': _roots(inverse),
      'positive': all(x > 0 for row in inverse for x in row),
      'roots': len(system.roots),
      'highest_root': [_exact(x) for x in system.highest_root],
  }
  ctx.manifest.write_json('cartan.json', payload)
  return {'positive': payload['positive'], 'roots': payload['roots']}


def _sweep_systems(max_rank):
  systems = []
  for family in rootsys.FAMILIES:
    for rank in range(1, max_rank + 1):
      if rootsys.admissible(family, rank):
        systems.append((family, rank))
  return systems


def _sweep_system(config, family, rank, index):
  system = rootsys.build_root_system(family, rank)
  rng = common.sample_rng(config.seed, index)
  positive = all(
      x > 0 for row in rootsys.inverse_cartan(system) for x in row)
  passed = agreed = 0
  for trial in range(config.sweep_trials):
    weights = rootsys.random_weights(rank, rng, exact=trial % 2 == 0)
    alpha = rootsys.dominant_from_weights(system, weights)
    passed += bool(rootsys.verify_decomposition(
        system, rootsys.decompose_dominated(system, alpha)))
    if rank <= 3:
      agreed += rootsys.feasible_subsets(system, alpha) is not None
    else:
      agreed += 1
  return family, rank, config.sweep_trials, passed, agreed, positive


def _sweep_expanding(config, d, index):
  rng = common.sample_rng(config.seed, 1000 + index)
  z = rng.normal(size=d)
  z -= z.mean()
  construction = expanding.build_expanding(d, z)
  verdict, _ = _construction_verdict(construction)
  return d, index, bool(verdict.passed), verdict.residual


@experiment('rootsys-sweep')
def rootsys_sweep(ctx):
  config = ctx.config
  systems = _sweep_systems(config.max_rank)
  rows = ctx.parallel.map(
      lambda job: _sweep_system(config, *job[1], job[0]),
      list(enumerate(systems)))
  ctx.manifest.write_csv(
      'sweep.csv', rows,
      ['family', 'rank', 'trials', 'passed', 'oracle', 'cartan_positive'])
  jobs = [
      (d, index) for index in range(config.sweep_trials // 2)
      for d in range(2, 6)]
  checks = ctx.parallel.map(
      lambda job: _sweep_expanding(config, *job), jobs)
  ctx.manifest.write_csv(
      'expanding.csv', checks, ['d', 'trial', 'passed', 'residual'])
  failed = [
      f'{family}{rank}' for family, rank, trials, passed, agreed, positive
      in rows if passed < trials or agreed < trials or not positive]
  not_expanding = sum(not row[2] for row in checks)
  summary = {
      'systems': len(rows), 'failed': failed,
      'expanding_checks': len(checks), 'not_expanding': not_expanding,
  }
  _check(config, not failed and not not_expanding, (
      f'Root system sweep failed for {failed} with {not_expanding} '
      f'non-expanding constructions.'))
  return summary


def _block_case(m, n):
  d = m + n
  z = np.diag([float(n)] * m + [-float(m)] * n)
  generators = [
      expanding.elementary(d, i, m + j) for i in range(m) for j in range(n)]
  return z, generators


@experiment('rootsys-blocks')
def rootsys_blocks(ctx):
  cases = []
  for m, n in [(1, 1), (1, 2), (2, 2)]:
    z, generators = _block_case(m, n)
    cases.append((f'block-{m}x{n}', z, generators, True))
  cases.append((
      'single-E13', np.diag([1.0, 0.0, -1.0]),
      [expanding.elementary(3, 0, 2)], False))
  results = []
  for name, z, generators, expected in cases:
    basis = expanding.sl_basis(len(z))
    verdict = expanding.expanding_check(
        expanding.adjoint_operators(basis, z[None])[0],
        expanding.adjoint_operators(basis, generators),
        expanding.adjoint_operators(basis, basis))
    result = {
        'case': name, 'expected': expected,
        'passed': bool(verdict.passed), 'residual': verdict.residual,
    }
    if not verdict.passed:
      witness = np.tensordot(verdict.witness, basis, 1)
      target = np.diag([1.0, -2.0, 1.0]) / np.sqrt(6)
      if witness.shape == target.shape:
        result['witness_alignment'] = float(abs(np.sum(witness * target)))
    results.append(result)
  ctx.manifest.write_json('blocks.json', {'cases': results})
  mismatched = [r['case'] for r in results if r['passed'] != r['expected']]
  _check(ctx.config, not mismatched, f'Unexpected verdicts for {mismatched}.')
  return {'cases': len(results), 'mismatched': mismatched}
