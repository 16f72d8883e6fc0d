"""Output stage: estimates to JSON, experiment curves and trials to CSV,
and the run manifest that inventories every emitted file."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional

from .bootstrap import FAMILIES, QuantileEstimate
from .exceptions import ConfigError
from .version import __version__

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ('t', 'family', 'true_q', 'est_mean', 'est_std', 'ext_mean', 'ext_std', 'coverage')
TRIAL_COLUMNS = ('t', 'trial', 'family', 'error', 'estimate', 'covered')


def _float(value):
    return format(float(value), '.17g')


def _write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', encoding='utf-8') as f:
        json.dump(payload, f, indent=2)
        f.write('\n')
    return path


def estimate_payload(estimate: QuantileEstimate, extrapolated=None, required_t=None):
    payload = estimate.to_dict()
    if extrapolated is not None:
        payload['extrapolated'] = [point._asdict() for point in extrapolated]
    if required_t is not None:
        payload['required_t'] = dict(required_t)
    return payload


def export_estimate(path, estimate: QuantileEstimate, extrapolated=None, required_t=None):
    return _write_json(path, estimate_payload(estimate, extrapolated, required_t))


def load_estimate(path) -> QuantileEstimate:
    try:
        with Path(path).open('r', encoding='utf-8') as f:
            payload = json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError(f'{path}: not a JSON estimate ({exc})') from exc
    return QuantileEstimate.from_dict(payload)


def export_curves(path, curves):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(CURVE_COLUMNS)
        for point in curves.points:
            writer.writerow([
                point.t,
                point.family,
                _float(point.true_q),
                _float(point.est_mean),
                _float(point.est_std),
                _float(point.ext_mean),
                _float(point.ext_std),
                _float(point.coverage),
            ])
    return path


def export_trials(path, curves):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(TRIAL_COLUMNS)
        for t in curves.t_grid:
            record = curves.trials[t]
            for family in FAMILIES:
                errors = record.errors[family]
                estimates = record.estimates[family]
                for trial, (error, estimate) in enumerate(zip(errors, estimates)):
                    writer.writerow([
                        t, trial, family, _float(error), _float(estimate),
                        int(error <= estimate),
                    ])
    return path


def file_digest(path):
    digest = hashlib.sha256()
    with Path(path).open('rb') as f:
        for chunk in iter(lambda: f.read(1 << 20), b''):
            digest.update(chunk)
    return digest.hexdigest()


def utc_now():
    return datetime.now(timezone.utc).isoformat(timespec='seconds')


@dataclass
class RunManifest:
    config: Dict
    master_seed: int
    started_at: str
    finished_at: Optional[str] = None
    version: str = __version__
    outputs: List[Dict[str, str]] = field(default_factory=list)

    def add_output(self, path):
        path = Path(path)
        self.outputs.append({'path': path.name, 'sha256': file_digest(path)})

    def to_dict(self):
        return {
            'version': self.version,
            'master_seed': self.master_seed,
            'started_at': self.started_at,
            'finished_at': self.finished_at,
            'config': self.config,
            'outputs': list(self.outputs),
        }


def export_manifest(path, manifest: RunManifest):
    if manifest.finished_at is None:
        manifest.finished_at = utc_now()
    return _write_json(path, manifest.to_dict())


def verify_manifest(path):
    """True when every listed output next to the manifest still matches its digest."""
    path = Path(path)
    with path.open('r', encoding='utf-8') as f:
        payload = json.load(f)
    for output in payload['outputs']:
        if file_digest(path.parent / output['path']) != output['sha256']:
            logger.warning('%s does not match its recorded digest', output['path'])
            return False
    return True
