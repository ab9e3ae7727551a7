class Driver:
  """Steps a batched dynamical state and fans observations out to callbacks.

  The stepper needs `observe()` returning the current batch observation and
  `step()` advancing it by one time step. Observations are taken before each
  step, which makes time averages left Riemann sums.
  """

  def __init__(self, stepper, **kwargs):
    self._stepper = stepper
    self._kwargs = kwargs
    self._on_steps = []
    self._on_marks = []

  def on_step(self, callback):
    self._on_steps.append(callback)

  def on_mark(self, callback):
    self._on_marks.append(callback)

  def __call__(self, steps, marks=()):
    marks = sorted(set(int(m) for m in marks))
    assert all(0 < m <= steps for m in marks), (marks, steps)
    pending = list(marks)
    for step in range(steps):
      obs = self._stepper.observe()
      [fn(step, obs, **self._kwargs) for fn in self._on_steps]
      self._stepper.step()
      while pending and pending[0] == step + 1:
        [fn(pending.pop(0), **self._kwargs) for fn in self._on_marks]
