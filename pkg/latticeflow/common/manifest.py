import hashlib
import json
import pathlib
import shutil

import pandas as pd


class Manifest:
  """Collects run artifacts in a staging directory and publishes them.

  Artifacts only reach the output directory through `commit()`; `discard()`
  removes everything written so far. The manifest lists the resolved config
  (without the output directory), the code version, the seed and a SHA-256
  per artifact, so identical configs give byte-identical directories.
  """

  FILENAME = 'manifest.json'

  def __init__(self, outdir, experiment, config, version):
    self.outdir = pathlib.Path(outdir).expanduser()
    self.staging = self.outdir.parent / f'.{self.outdir.name}.staging'
    self._experiment = experiment
    self._config = config
    self._version = version
    self._artifacts = []
    if self.staging.exists():
      shutil.rmtree(self.staging)
    self.staging.mkdir(parents=True)

  def write_csv(self, name, rows, columns):
    frame = pd.DataFrame(list(rows), columns=list(columns))
    if frame.empty:
      frame = pd.DataFrame(columns=list(columns))
    path = self.staging / name
    frame.to_csv(path, index=False, lineterminator='\n')
    self._artifacts.append(name)
    return path

  def write_json(self, name, payload):
    path = self.staging / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + '\n')
    self._artifacts.append(name)
    return path

  def track(self, name):
    assert (self.staging / name).exists(), name
    self._artifacts.append(name)

  def digests(self):
    return {
        name: hashlib.sha256((self.staging / name).read_bytes()).hexdigest()
        for name in sorted(set(self._artifacts))}

  def commit(self):
    payload = {
        'experiment': self._experiment,
        'config': self._config.without('outdir').flat,
        'version': self._version,
        'seed': self._config.seed,
        'outputs': self.digests(),
    }
    path = self.staging / self.FILENAME
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + '\n')
    self.outdir.mkdir(parents=True, exist_ok=True)
    for item in self.staging.iterdir():
      target = self.outdir / item.name
      if target.exists():
        target.unlink()
      shutil.move(str(item), str(target))
    shutil.rmtree(self.staging)
    return self.outdir / self.FILENAME

  def discard(self):
    if self.staging.exists():
      shutil.rmtree(self.staging)


def load_manifest(filename):
  return json.loads(pathlib.Path(filename).read_text())
