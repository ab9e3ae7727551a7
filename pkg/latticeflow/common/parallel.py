import atexit
import sys
import traceback

import cloudpickle


class Worker:

  # Message types for communication via the pipe.
  _CALL = 2
  _RESULT = 3
  _CLOSE = 4
  _EXCEPTION = 5

  def __init__(self, strategy='thread'):
    if strategy == 'process':
      import multiprocessing as mp
      context = mp.get_context('spawn')
    elif strategy == 'thread':
      import multiprocessing.dummy as context
    else:
      raise NotImplementedError(strategy)
    self._strategy = strategy
    self._conn, conn = context.Pipe()
    self._process = context.Process(target=_serve, args=(conn,))
    atexit.register(self.close)
    self._process.start()
    self._receive()  # Ready.

  def call(self, function, *args, **kwargs):
    payload = cloudpickle.dumps((function, args, kwargs))
    self._conn.send((self._CALL, payload))
    return self._receive

  def close(self):
    try:
      self._conn.send((self._CLOSE, None))
      self._conn.close()
    except (IOError, OSError):
      pass  # The connection was already closed.
    self._process.join(5)

  def _receive(self):
    try:
      message, payload = self._conn.recv()
    except (OSError, EOFError):
      raise RuntimeError('Lost connection to worker.')
    if message == self._EXCEPTION:
      raise cloudpickle.loads(payload)
    if message == self._RESULT:
      return cloudpickle.loads(payload) if payload is not None else None
    raise KeyError(f'Received message of unexpected type {message}')


def _serve(conn):
  try:
    conn.send((Worker._RESULT, None))  # Ready.
    while True:
      try:
        # Only block for short times to have keyboard exceptions be raised.
        if not conn.poll(0.1):
          continue
        message, payload = conn.recv()
      except (EOFError, KeyboardInterrupt):
        break
      if message == Worker._CALL:
        function, args, kwargs = cloudpickle.loads(payload)
        try:
          result = function(*args, **kwargs)
        except Exception as e:
          stacktrace = ''.join(traceback.format_exception(*sys.exc_info()))
          print(f'Error in worker: {stacktrace}')
          conn.send((Worker._EXCEPTION, cloudpickle.dumps(e)))
          continue
        conn.send((Worker._RESULT, cloudpickle.dumps(result)))
        continue
      if message == Worker._CLOSE:
        break
      raise KeyError(f'Received message of unknown type {message}')
  finally:
    try:
      conn.close()
    except (IOError, OSError):
      pass  # The connection was already closed.


class Parallel:
  """Maps a function over items, preserving submission order.

  With `strategy='none'` or a single worker everything runs inline.
  """

  def __init__(self, workers=1, strategy='none'):
    assert workers >= 1, workers
    self._strategy = strategy
    if strategy == 'none' or workers == 1:
      self._workers = []
    else:
      self._workers = [Worker(strategy) for _ in range(workers)]

  def map(self, function, items):
    items = list(items)
    if not self._workers:
      return [function(item) for item in items]
    results = []
    for start in range(0, len(items), len(self._workers)):
      chunk = items[start: start + len(self._workers)]
      promises = [
          worker.call(function, item)
          for worker, item in zip(self._workers, chunk)]
      results += [promise() for promise in promises]
    return results

  def close(self):
    for worker in self._workers:
      worker.close()
    self._workers = []

  def __enter__(self):
    return self

  def __exit__(self, *args):
    self.close()
