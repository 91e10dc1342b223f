"""
Reference distributions and reproducible random streams.

Every sampler draws by inverse CDF from exactly one uniform per value, so a
stream's position is a pure function of how many values were drawn. Streams
come from numpy's counter-based Philox generator keyed by a SeedSequence whose
spawn key is the stream path; identical (master_seed, path) pairs give
identical draws on every platform and under any thread schedule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special

from .errors import InvalidInputError

Family = Literal["uniform01", "normal", "exponential"]
FloatArray = NDArray[np.float64]

SEED_BITS = 63
_TINY = np.nextafter(0.0, 1.0)


@dataclass(frozen=True)
class ContinuousDist:
    """A fully specified continuous distribution F_0."""

    family: Family = "normal"
    mu: float = 0.0
    sigma: float = 1.0
    rate: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in ("uniform01", "normal", "exponential"):
            raise InvalidInputError(f"unknown distribution family {self.family!r}")
        if self.family == "normal":
            if not math.isfinite(self.mu):
                raise InvalidInputError(f"normal mu must be finite, got {self.mu!r}")
            if not (self.sigma > 0 and math.isfinite(self.sigma)):
                raise InvalidInputError(f"normal sigma must be > 0, got {self.sigma!r}")
        if self.family == "exponential" and not (self.rate > 0 and math.isfinite(self.rate)):
            raise InvalidInputError(f"exponential rate must be > 0, got {self.rate!r}")

    @classmethod
    def uniform01(cls) -> "ContinuousDist":
        return cls(family="uniform01")

    @classmethod
    def normal(cls, mu: float = 0.0, sigma: float = 1.0) -> "ContinuousDist":
        return cls(family="normal", mu=float(mu), sigma=float(sigma))

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "ContinuousDist":
        return cls(family="exponential", rate=float(rate))

    def shifted(self, delta: float) -> "ContinuousDist":
        """Mean-shift alternative N(mu + delta, sigma)."""
        if self.family != "normal":
            raise InvalidInputError(f"mean shift is only defined for normal, not {self.family}")
        return ContinuousDist.normal(self.mu + delta, self.sigma)

    def rate_scaled(self, multiplier: float) -> "ContinuousDist":
        """Rate-scaled alternative Exp(rate * multiplier)."""
        if self.family != "exponential":
            raise InvalidInputError(f"rate scaling is only defined for exponential, not {self.family}")
        return ContinuousDist.exponential(self.rate * multiplier)

    def cdf(self, x: ArrayLike) -> FloatArray:
        """Vectorized F_0; callers validate finiteness."""
        xs = np.asarray(x, dtype=np.float64)
        if self.family == "uniform01":
            return np.clip(xs, 0.0, 1.0)
        if self.family == "normal":
            return special.ndtr((xs - self.mu) / self.sigma)
        return np.where(xs >= 0.0, -np.expm1(-self.rate * np.maximum(xs, 0.0)), 0.0)

    def ppf(self, u: ArrayLike) -> FloatArray:
        us = np.asarray(u, dtype=np.float64)
        if self.family == "uniform01":
            return us.copy()
        if self.family == "normal":
            return self.mu + self.sigma * special.ndtri(us)
        return -np.log1p(-us) / self.rate

    def describe(self) -> str:
        if self.family == "uniform01":
            return "uniform01"
        if self.family == "normal":
            return f"normal(mu={self.mu:g}, sigma={self.sigma:g})"
        return f"exponential(rate={self.rate:g})"


UNIFORM01 = ContinuousDist.uniform01()
STANDARD_NORMAL = ContinuousDist.normal(0.0, 1.0)


def parse_dist(text: str) -> ContinuousDist:
    """Parse ``uniform``, ``normal[:mu,sigma]`` or ``exponential[:rate]``."""
    name, _, params = text.strip().partition(":")
    name = name.strip().lower()
    try:
        args = [float(p) for p in params.split(",")] if params.strip() else []
    except ValueError as exc:
        raise InvalidInputError(f"bad distribution parameters in {text!r}") from exc
    if name in ("uniform", "uniform01") and not args:
        return UNIFORM01
    if name == "normal" and len(args) in (0, 2):
        return ContinuousDist.normal(*args) if args else STANDARD_NORMAL
    if name in ("exponential", "exp") and len(args) in (0, 1):
        return ContinuousDist.exponential(*args) if args else ContinuousDist.exponential()
    raise InvalidInputError(
        f"cannot parse distribution {text!r}; expected uniform, normal[:mu,sigma] or exponential[:rate]"
    )


@dataclass(frozen=True)
class SeededRng:
    """Address of one reproducible random stream: a master seed plus a stream path."""

    master_seed: int
    stream_index: int = 0
    parent_path: Tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.master_seed < 0 or self.master_seed >= 2**64:
            raise InvalidInputError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed!r}")
        if self.stream_index < 0:
            raise InvalidInputError(f"stream_index must be >= 0, got {self.stream_index!r}")

    @property
    def path(self) -> Tuple[int, ...]:
        return self.parent_path + (self.stream_index,)

    def child(self, index: int) -> "SeededRng":
        return SeededRng(self.master_seed, int(index), self.path)

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=self.master_seed, spawn_key=self.path)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(self.seed_sequence()))

    def uniforms(self, count: int) -> FloatArray:
        return self.generator().random(count)


def derive_seed(master_seed: int, *keys: int) -> int:
    """A 63-bit integer seed for the stream at path ``keys``."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(int(k) for k in keys))
    return int(seq.generate_state(1, dtype=np.uint64)[0] >> np.uint64(64 - SEED_BITS))


def fresh_seed() -> int:
    return int(np.random.SeedSequence().entropy) & ((1 << SEED_BITS) - 1)


def dist_cdf(d: ContinuousDist, x: float) -> float:
    value = float(x)
    if not math.isfinite(value):
        raise InvalidInputError(f"x must be finite, got {x!r}")
    return float(d.cdf(value))


def dist_ppf(d: ContinuousDist, u: ArrayLike) -> FloatArray:
    us = np.asarray(u, dtype=np.float64)
    if np.any((us < 0.0) | (us > 1.0)) or np.any(np.isnan(us)):
        raise InvalidInputError("quantile arguments must lie in [0, 1]")
    return d.ppf(us)


def dist_sample(d: ContinuousDist, count: int, rng: Union[SeededRng, np.random.Generator]) -> FloatArray:
    """i.i.d. draws by inverse CDF, one uniform per value."""
    if int(count) != count or count < 1:
        raise InvalidInputError(f"count must be an integer >= 1, got {count!r}")
    gen = rng.generator() if isinstance(rng, SeededRng) else rng
    u = gen.random(int(count))
    if d.family == "normal":
        # random() is on [0, 1); keep ndtri finite at the closed end
        u = np.maximum(u, _TINY)
    return d.ppf(u)


__all__ = [
    "ContinuousDist",
    "STANDARD_NORMAL",
    "SeededRng",
    "UNIFORM01",
    "derive_seed",
    "dist_cdf",
    "dist_ppf",
    "dist_sample",
    "fresh_seed",
    "parse_dist",
]
