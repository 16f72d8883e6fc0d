"""Two-step sketch sizing: bootstrap a small sketch, forecast the sketch
size that meets an error tolerance, then sketch again at that size."""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import Optional

from .. import rng
from ..bootstrap import BootstrapConfig, QuantileEstimate, bootstrap_errors, required_sketch_size
from ..exceptions import ConfigError
from ..sketchers import Sketch, SketchSpec
from ..solve import SketchedSvd, solve_with_sketch
from ..streams import as_row_stream

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class AdaptiveResult:
    tolerance: float
    family: str
    initial: QuantileEstimate
    t1: int
    sketch: Sketch
    sketched: SketchedSvd
    final: Optional[QuantileEstimate]
    passes: int

    @property
    def t0(self):
        return self.initial.t0

    @property
    def resketched(self):
        return self.final is not None

    @property
    def achieved(self):
        """Whether the last bootstrap estimate is within the tolerance."""
        estimate = self.final if self.final is not None else self.initial
        return estimate.quantile(self.family) <= self.tolerance

    def to_dict(self):
        return {
            'tolerance': self.tolerance,
            'family': self.family,
            't0': self.t0,
            't1': self.t1,
            'achieved': self.achieved,
            'passes': self.passes,
            'singular_values': [float(s) for s in self.sketched.singular_values],
            'initial': self.initial.to_dict(),
            'final': self.final.to_dict() if self.final is not None else None,
        }


def run_adaptive_workflow(source, spec: SketchSpec, k, tolerance, *, family='u',
                          config: BootstrapConfig = None, max_t=None,
                          n_jobs=None) -> AdaptiveResult:
    """Sketch at ``spec.t``, forecast t1 from the extrapolation rule and, if
    t1 is larger, sketch again at t1 and bootstrap the new sketch."""
    config = config or BootstrapConfig()
    if tolerance <= 0:
        raise ConfigError(f'tolerance must be positive, got {tolerance}')
    stream = as_row_stream(source)

    sketch, sketched = solve_with_sketch(stream, spec, k, n_jobs=n_jobs)
    initial = bootstrap_errors(sketch, sketched, config, n_jobs=n_jobs)
    t1 = required_sketch_size(initial, tolerance, family)
    logger.info('adaptive: q_%s(%d)=%g, forecast t1=%d', family, spec.t,
                initial.quantile(family), t1)

    if max_t is not None and t1 > max_t:
        logger.warning('adaptive: forecast t1=%d capped at %d', t1, max_t)
        t1 = max(spec.t, int(max_t))

    final = None
    if t1 > spec.t:
        # fresh, independent streams for the second sketch and its bootstrap
        spec = spec.with_t(t1, seed=rng.derive_seed(spec.seed, rng.ADAPTIVE, t1))
        sketch, sketched = solve_with_sketch(stream, spec, k, n_jobs=n_jobs)
        config = dataclasses.replace(config, seed=rng.derive_seed(config.seed, rng.ADAPTIVE, t1))
        final = bootstrap_errors(sketch, sketched, config, n_jobs=n_jobs)

    return AdaptiveResult(
        tolerance=float(tolerance),
        family=family,
        initial=initial,
        t1=t1,
        sketch=sketch,
        sketched=sketched,
        final=final,
        passes=stream.passes,
    )
