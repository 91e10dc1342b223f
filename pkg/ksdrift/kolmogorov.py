"""
Asymptotic Kolmogorov distribution.

Under the null hypothesis the scaled statistic sqrt(n) * D_n converges to the
Kolmogorov distribution

    K(t) = 1 - 2 * sum_{j>=1} (-1)^(j-1) * exp(-2 j^2 t^2),   t > 0

and K(t) = 0 for t <= 0. This module evaluates K, its complement (used for
p-values) and its quantiles (critical values k_{1-alpha}).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import InvalidInputError

# Below this point K(t) < 1e-12, and the alternating series needs many terms
# while its leading terms nearly cancel.
SMALL_T_CUTOFF = 0.2

QUANTILE_BRACKET = (1e-6, 10.0)
QUANTILE_WIDTH = 1e-10


def _check_t(t: float) -> float:
    try:
        value = float(t)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"t must be a real number, got {t!r}") from exc
    if not math.isfinite(value):
        raise InvalidInputError(f"t must be finite, got {t!r}")
    return value


@dataclass(frozen=True)
class KolmogorovDist:
    """Kolmogorov limiting distribution with configurable series truncation."""

    tolerance: float = 1e-12
    max_terms: int = 100

    def __post_init__(self) -> None:
        if not (self.tolerance > 0 and math.isfinite(self.tolerance)):
            raise InvalidInputError(f"tolerance must be > 0, got {self.tolerance!r}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise InvalidInputError(f"max_terms must be an integer >= 1, got {self.max_terms!r}")

    def _tail_series(self, t: float) -> float:
        """2 * sum (-1)^(j-1) exp(-2 j^2 t^2), truncated."""
        total = 0.0
        sign = 1.0
        two_t2 = 2.0 * t * t
        for j in range(1, self.max_terms + 1):
            term = math.exp(-two_t2 * j * j)
            total += sign * term
            if term < self.tolerance:
                break
            sign = -sign
        return 2.0 * total

    def cdf(self, t: float) -> float:
        t = _check_t(t)
        if t < SMALL_T_CUTOFF:
            return 0.0
        return min(1.0, max(0.0, 1.0 - self._tail_series(t)))

    def sf(self, t: float) -> float:
        t = _check_t(t)
        if t < SMALL_T_CUTOFF:
            return 1.0
        return min(1.0, max(0.0, self._tail_series(t)))

    def quantile(self, p: float) -> float:
        """Bisection for K(t) = p on a fixed bracket; deterministic and monotone in p."""
        try:
            p = float(p)
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"p must be a probability, got {p!r}") from exc
        if not (0.0 < p < 1.0):
            raise InvalidInputError(f"p must lie in the open interval (0, 1), got {p!r}")
        return _bisect_quantile(self, p)

    def critical_value(self, alpha: float) -> float:
        """k_{1-alpha}: reject when the scaled statistic exceeds this value."""
        return self.quantile(1.0 - alpha)


@lru_cache(maxsize=1024)
def _bisect_quantile(dist: KolmogorovDist, p: float) -> float:
    lo, hi = QUANTILE_BRACKET
    while hi - lo > QUANTILE_WIDTH:
        mid = 0.5 * (lo + hi)
        if dist.cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


DEFAULT = KolmogorovDist()


def kolmogorov_cdf(t: float) -> float:
    return DEFAULT.cdf(t)


def kolmogorov_sf(t: float) -> float:
    return DEFAULT.sf(t)


def kolmogorov_quantile(p: float) -> float:
    return DEFAULT.quantile(p)


__all__ = [
    "DEFAULT",
    "KolmogorovDist",
    "kolmogorov_cdf",
    "kolmogorov_quantile",
    "kolmogorov_sf",
]
