"""Out-of-distribution sample generators.

Three strategies share one geometric core (see geometry.gho_offset):

* gho_generate places samples on a noisy hypersphere around the mean of
  the in-distribution set: cheap, but blind to the set's shape.
* sbo_generate walks individual in-distribution points outward with
  Brownian-style unit offsets until the minimum distance to the set
  reaches a target d_minus, optionally stopping early at random so the
  achieved distances soften around the target.
* hbo_generate is sbo_generate with softness pinned to zero, which turns
  d_minus into a guaranteed hard lower bound on the achieved distance.

Each output sample is produced from its own substream of the caller's
RandomStream, so sample i depends only on (seed, i) and results are
bitwise identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import GenerationError, ValidationError
from .geometry import RandomStream, gho_offset
from .neighbors import NeighborIndex, build_index
from .points import as_point_set

RHO_FORMS = ("as_printed", "text_consistent")


@dataclass(frozen=True)
class GhoConfig:
    """Parameters of the hyperspheric sampler."""

    mu: float  # most likely distance from the set mean
    sigma: float  # isotropic spread around that shell

    def __post_init__(self):
        if not np.isfinite(self.mu) or self.mu < 0:
            raise ValidationError(f"mu must be finite and >= 0, got {self.mu}")
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise ValidationError(f"sigma must be finite and >= 0, got {self.sigma}")


@dataclass(frozen=True)
class SboConfig:
    """Parameters of the Brownian offset walk."""

    d_minus: float  # target minimum distance to the in-distribution set
    d_plus: float  # magnitude of each walk step
    softness: float  # boundary softness in [0, 1]; 0 disables early stops
    kappa: float = 7.0  # sharpness of the early-stop likelihood
    rho_form: str = "as_printed"  # which circulating form of that likelihood to use
    max_steps: int = 10_000  # walk steps allowed per sample before giving up

    def __post_init__(self):
        if not np.isfinite(self.d_minus) or self.d_minus <= 0:
            raise ValidationError(f"d_minus must be finite and > 0, got {self.d_minus}")
        if not np.isfinite(self.d_plus) or self.d_plus <= 0:
            raise ValidationError(f"d_plus must be finite and > 0, got {self.d_plus}")
        if not np.isfinite(self.softness) or not 0.0 <= self.softness <= 1.0:
            raise ValidationError(f"softness must be in [0, 1], got {self.softness}")
        if not np.isfinite(self.kappa) or self.kappa <= 0:
            raise ValidationError(f"kappa must be finite and > 0, got {self.kappa}")
        if self.rho_form not in RHO_FORMS:
            raise ValidationError(
                f"rho_form must be one of {RHO_FORMS}, got {self.rho_form!r}"
            )
        if self.max_steps < 1:
            raise ValidationError(f"max_steps must be >= 1, got {self.max_steps}")


def _logistic_of_negative(exponent: float) -> float:
    # 1 / (1 + exp(exponent)) without overflow for large |exponent|.
    if exponent >= 0:
        t = math.exp(-exponent)
        return t / (1.0 + t)
    return 1.0 / (1.0 + math.exp(exponent))


def rho(d_star: float, config: SboConfig) -> float:
    """Early-stop likelihood for the current minimum distance d_star.

    Two incompatible forms of this sigmoid are in circulation, so both
    are implemented and the choice is explicit:

    * "as_printed": 1 / (1 + exp((d_star + d_minus) / (softness * d_minus
      * kappa))). Nearly flat in d_star and consistent with the hard
      variant in the softness -> 0 limit (the stop probability vanishes).
    * "text_consistent": 1 / (1 + exp(kappa * (d_star - d_minus) /
      (softness * d_minus))). Satisfies the stated boundary behavior
      rho(0) ~ 1, so walks still inside the set almost always stop.

    Undefined at softness 0; callers must skip the early stop instead.
    """
    if config.softness <= 0.0:
        raise ValidationError("rho is undefined for softness 0; skip the early stop instead")
    if not np.isfinite(d_star) or d_star < 0:
        raise ValidationError(f"d_star must be finite and >= 0, got {d_star}")
    if config.rho_form == "as_printed":
        exponent = (d_star + config.d_minus) / (config.softness * config.d_minus * config.kappa)
    else:
        exponent = config.kappa * (d_star - config.d_minus) / (config.softness * config.d_minus)
    return _logistic_of_negative(exponent)


def _walk_one(index: NeighborIndex, config: SboConfig, stream: RandomStream, sample_index: int) -> np.ndarray:
    gen = stream.generator()
    points = index.points
    dim = index.dim
    y = points[int(gen.integers(len(points)))].copy()
    for _ in range(config.max_steps):
        y = y + config.d_plus * gho_offset(1.0, 1.0, dim, gen)
        d_star = index.min_distance(y)
        if d_star >= config.d_minus:
            return y
        # With softness 0 no uniform variate is drawn, so the stream
        # layout of the hard variant matches softness -> 0 exactly.
        if config.softness > 0.0 and gen.uniform() < rho(d_star, config):
            return y
    raise GenerationError(
        f"sample {sample_index}: no point reached d_minus={config.d_minus} "
        f"within {config.max_steps} steps",
        sample_index=sample_index,
    )


def _run_chunked(fill, count: int, workers: int) -> None:
    # fill(lo, hi) computes rows [lo, hi); rows never overlap, so the
    # threaded path is race-free and, because every row uses its own
    # substream, bitwise identical to the serial path.
    if workers <= 1:
        fill(0, count)
        return
    bounds = np.linspace(0, count, workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(fill, int(lo), int(hi))
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for future in futures:
            future.result()


def sbo_generate(id_set, config: SboConfig, count: int, rng: RandomStream, workers: int = 1) -> np.ndarray:
    """Generate `count` soft Brownian offset samples around `id_set`.

    Each sample starts at a uniformly chosen in-distribution point and
    walks in steps of d_plus * gho_offset(1, 1) until its minimum
    distance to the set reaches d_minus, or an early stop with
    likelihood rho(d_star) fires (softness > 0 only). Raises
    GenerationError naming the sample index if a walk exceeds max_steps.
    """
    points = as_point_set(id_set, name="id_set")
    if not isinstance(config, SboConfig):
        raise ValidationError(f"config must be an SboConfig, got {type(config).__name__}")
    if not isinstance(rng, RandomStream):
        raise ValidationError(f"rng must be a RandomStream, got {type(rng).__name__}")
    if count < 1:
        raise ValidationError(f"count must be >= 1, got {count}")
    index = build_index(points)
    out = np.empty((count, points.shape[1]))

    def fill(lo, hi):
        for i in range(lo, hi):
            out[i] = _walk_one(index, config, rng.substream(i), i)

    _run_chunked(fill, count, workers)
    return out


def hbo_generate(id_set, d_minus: float, d_plus: float, count: int, rng: RandomStream,
                 max_steps: int = 10_000, workers: int = 1) -> np.ndarray:
    """Hard Brownian offset: the softness-0 walk.

    Identical to sbo_generate with softness 0 under the same stream, and
    every output satisfies min-distance(y, id_set) >= d_minus exactly.
    """
    config = SboConfig(d_minus=d_minus, d_plus=d_plus, softness=0.0, max_steps=max_steps)
    return sbo_generate(id_set, config, count, rng, workers=workers)


def gho_generate(id_set, config: GhoConfig, count: int, rng: RandomStream, workers: int = 1) -> np.ndarray:
    """Generate `count` hyperspheric samples around the mean of `id_set`."""
    points = as_point_set(id_set, name="id_set")
    if not isinstance(config, GhoConfig):
        raise ValidationError(f"config must be a GhoConfig, got {type(config).__name__}")
    if not isinstance(rng, RandomStream):
        raise ValidationError(f"rng must be a RandomStream, got {type(rng).__name__}")
    if count < 1:
        raise ValidationError(f"count must be >= 1, got {count}")
    center = points.mean(axis=0)
    dim = points.shape[1]
    out = np.empty((count, dim))

    def fill(lo, hi):
        for i in range(lo, hi):
            out[i] = center + gho_offset(config.mu, config.sigma, dim, rng.substream(i))

    _run_chunked(fill, count, workers)
    return out
