"""Random-vector primitives shared by every sampler in the package.

All randomness flows through explicit RandomStream values so that any
draw sequence can be regenerated in isolation. A (seed, stream_id) pair
addresses one fixed sequence of a counter-based generator; samplers hand
each output sample its own substream, which makes results independent of
how the work is split across workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

_U64 = 2**64

# A raw normal draw below this norm is treated as degenerate and redrawn
# (the unit-sphere projection divides by the norm).
_MIN_NORM = 1e-30


@dataclass(frozen=True)
class RandomStream:
    """A deterministic random source addressed by (seed, stream_id).

    Identical pairs always yield identical draw sequences; distinct
    stream_ids under one seed are statistically independent. Backed by
    the Philox counter-based bit generator, keyed with the two ids, so a
    stream can be opened without generating its predecessors.
    """

    seed: int  # run-level seed, 64-bit unsigned
    stream_id: int = 0  # work-item id under that seed, 64-bit unsigned

    def __post_init__(self):
        for field in ("seed", "stream_id"):
            value = getattr(self, field)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise ValidationError(f"{field} must be an integer, got {value!r}")
            if not 0 <= value < _U64:
                raise ValidationError(f"{field} must be in [0, 2**64), got {value}")

    def substream(self, offset: int) -> "RandomStream":
        """The stream for work item `offset` relative to this one."""
        return RandomStream(self.seed, self.stream_id + int(offset))

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        key = (int(self.seed) << 64) + int(self.stream_id)
        return np.random.Generator(np.random.Philox(key=key))


def as_generator(rng) -> np.random.Generator:
    """Accept a RandomStream or an already-open numpy Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RandomStream):
        return rng.generator()
    raise ValidationError(f"expected RandomStream or numpy Generator, got {type(rng).__name__}")


def sample_unit_sphere(dim: int, rng) -> np.ndarray:
    """Draw a vector uniformly from the surface of the unit sphere in R^dim.

    A standard-normal vector divided by its Euclidean norm is uniform on
    the sphere; draws with numerically zero norm are rejected.
    """
    if not isinstance(dim, (int, np.integer)) or dim < 1:
        raise ValidationError(f"dim must be a positive integer, got {dim}")
    gen = as_generator(rng)
    while True:
        raw = gen.standard_normal(dim)
        norm = float(np.linalg.norm(raw))
        if norm >= _MIN_NORM:
            return raw / norm


def gho_offset(mu: float, sigma: float, dim: int, rng) -> np.ndarray:
    """Gaussian hyperspheric offset: mu * u + sigma * n.

    u is uniform on the unit sphere and n is an independent standard
    normal vector, so the result concentrates around distance mu with
    isotropic spread sigma. Both draws are taken even when a coefficient
    is zero, keeping the stream layout independent of the parameters.
    """
    if not np.isfinite(mu) or mu < 0:
        raise ValidationError(f"mu must be finite and >= 0, got {mu}")
    if not np.isfinite(sigma) or sigma < 0:
        raise ValidationError(f"sigma must be finite and >= 0, got {sigma}")
    gen = as_generator(rng)
    sphere = sample_unit_sphere(dim, gen)
    noise = gen.standard_normal(dim)
    return mu * sphere + sigma * noise
