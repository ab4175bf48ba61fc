"""Synthetic data sets: reference geometry and sine time series.

gen_gaussian and gen_moons produce low-dimensional point sets used to
exercise and picture the samplers. gen_sine_id and gen_sine_o3d build
the time-series benchmark: in-distribution sine waves whose frequency
follows a centered normal law, and an out-of-distribution-by-design
variant whose frequencies are rejection-sampled from the tails of that
same law. The O3D set plays the role of "real" anomalies a detector
trained on generated samples is later judged against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .geometry import as_generator
from .points import as_labels, as_point_set

PARAM_CONVENTIONS = ("variance", "stddev")


@dataclass(frozen=True)
class SineConfig:
    """Shared configuration of the sine-series generators.

    The frequency law is Normal(0, f_param) and the per-step noise law is
    Normal(0, noise_param), where param_convention says whether the second
    parameter is read as a variance or as a standard deviation. The
    variance reading is the default, under which the frequency spread is
    sqrt(35) ~ 5.92 cycles per window.
    """

    n: int  # number of series
    t_len: int = 126  # samples per series, on t = k/(t_len-1) for k = 0..t_len-1
    f_param: float = 35.0  # second parameter of the frequency law
    noise_param: float = 0.1  # second parameter of the noise law
    param_convention: str = "variance"
    tail_k: float = 2.0  # tail threshold in frequency stddevs (O3D only)

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"n must be >= 1, got {self.n}")
        if self.t_len < 2:
            raise ValidationError(f"t_len must be >= 2, got {self.t_len}")
        if not np.isfinite(self.f_param) or self.f_param <= 0:
            raise ValidationError(f"f_param must be finite and > 0, got {self.f_param}")
        if not np.isfinite(self.noise_param) or self.noise_param < 0:
            raise ValidationError(f"noise_param must be finite and >= 0, got {self.noise_param}")
        if self.param_convention not in PARAM_CONVENTIONS:
            raise ValidationError(
                f"param_convention must be one of {PARAM_CONVENTIONS}, got {self.param_convention!r}"
            )
        if not np.isfinite(self.tail_k) or self.tail_k <= 0:
            raise ValidationError(f"tail_k must be finite and > 0, got {self.tail_k}")

    @property
    def freq_scale(self) -> float:
        """Standard deviation of the frequency law."""
        if self.param_convention == "variance":
            return math.sqrt(self.f_param)
        return self.f_param

    @property
    def noise_scale(self) -> float:
        """Standard deviation of the per-step noise law."""
        if self.param_convention == "variance":
            return math.sqrt(self.noise_param)
        return self.noise_param


@dataclass
class TimeSeriesSet:
    """A set of equal-length series with their frequencies and labels."""

    series: np.ndarray  # (count, length) float
    frequencies: np.ndarray  # (count,) frequency drawn for each series
    labels: np.ndarray = field(default=None)  # (count,) int, 0 = ID, 1 = OOD

    def __post_init__(self):
        self.series = as_point_set(self.series, name="series")
        count = self.series.shape[0]
        freqs = np.asarray(self.frequencies, dtype=float)
        if freqs.shape != (count,):
            raise ValidationError(
                f"frequencies must have shape ({count},), got {freqs.shape}"
            )
        self.frequencies = freqs
        if self.labels is None:
            self.labels = np.zeros(count, dtype=int)
        else:
            self.labels = as_labels(self.labels, count=count)

    def __len__(self) -> int:
        return self.series.shape[0]


def time_axis(t_len: int) -> np.ndarray:
    """The unit-interval sampling grid t_k = k / (t_len - 1)."""
    if t_len < 2:
        raise ValidationError(f"t_len must be >= 2, got {t_len}")
    return np.arange(t_len, dtype=float) / (t_len - 1)


def gen_gaussian(n: int, dim: int, rng) -> np.ndarray:
    """n standard-normal points in R^dim."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if dim < 1:
        raise ValidationError(f"dim must be >= 1, got {dim}")
    return as_generator(rng).standard_normal((n, dim))


def gen_moons(n: int, noise: float, rng=None) -> np.ndarray:
    """The interleaved two-moons point set in the plane.

    The first ceil(n/2) points trace the upper arc (cos t, sin t) and the
    rest the lower arc (1 - cos t, 1/2 - sin t), t evenly spaced over
    [0, pi]. Gaussian jitter of scale `noise` is added when noise > 0;
    noise 0 consumes no random draws and needs no rng.
    """
    if n < 2:
        raise ValidationError(f"n must be >= 2, got {n}")
    if not np.isfinite(noise) or noise < 0:
        raise ValidationError(f"noise must be finite and >= 0, got {noise}")
    n_upper = (n + 1) // 2
    n_lower = n - n_upper
    t_upper = np.linspace(0.0, np.pi, n_upper)
    t_lower = np.linspace(0.0, np.pi, n_lower)
    points = np.vstack([
        np.column_stack([np.cos(t_upper), np.sin(t_upper)]),
        np.column_stack([1.0 - np.cos(t_lower), 0.5 - np.sin(t_lower)]),
    ])
    if noise > 0.0:
        if rng is None:
            raise ValidationError("noise > 0 requires an rng")
        points = points + as_generator(rng).normal(0.0, noise, points.shape)
    return points


def _sine_rows(config: SineConfig, gen: np.random.Generator, draw_frequency):
    # One frequency draw, then (optionally) t_len noise draws, per series,
    # strictly in series order: series i is a fixed function of the first
    # draws of the stream regardless of what comes after it.
    t = time_axis(config.t_len)
    series = np.empty((config.n, config.t_len))
    freqs = np.empty(config.n)
    noise_scale = config.noise_scale
    for i in range(config.n):
        f = draw_frequency(gen)
        row = np.sin(2.0 * np.pi * f * t)
        if noise_scale > 0.0:
            row = row + gen.normal(0.0, noise_scale, config.t_len)
        series[i] = row
        freqs[i] = f
    return series, freqs


def gen_sine_id(config: SineConfig, rng) -> TimeSeriesSet:
    """In-distribution sine series sin(2 pi f t) + noise, labels all 0."""
    gen = as_generator(rng)
    scale = config.freq_scale

    def draw(g):
        return g.normal(0.0, scale)

    series, freqs = _sine_rows(config, gen, draw)
    return TimeSeriesSet(series, freqs, np.zeros(config.n, dtype=int))


def gen_sine_o3d(config: SineConfig, rng) -> TimeSeriesSet:
    """Out-of-distribution-by-design sine series, labels all 1.

    Frequencies are drawn from the same law as gen_sine_id but rejected
    until |f| > tail_k * stddev(f), so every series oscillates strictly
    faster than the tail threshold.
    """
    gen = as_generator(rng)
    scale = config.freq_scale
    threshold = config.tail_k * scale

    def draw(g):
        f = g.normal(0.0, scale)
        while abs(f) <= threshold:
            f = g.normal(0.0, scale)
        return f

    series, freqs = _sine_rows(config, gen, draw)
    return TimeSeriesSet(series, freqs, np.ones(config.n, dtype=int))
