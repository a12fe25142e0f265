"""Geometry, deployment sampling, the power law and timer arithmetic.

Everything here is a pure function of its arguments except
:func:`sample_deployment`, which owns a seeded generator for the duration of
one call.

Random numbers come from numpy's ``PCG64`` bit generator (see
:data:`RNG_ALGORITHM`). Only ``Generator.random`` is used, whose stream for a
given seed is fixed by the bit generator, so deployments do not depend on
numpy's higher-level sampling routines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

RNG_ALGORITHM = "numpy.random.PCG64 (Generator.random, float64 in [0, 1))"

# Draws closer to the sink than MIN_SINK_DISTANCE * R are redrawn.
MIN_SINK_DISTANCE = 1e-6

_MASK64 = (1 << 64) - 1


class ConfigError(ValueError):
    """Raised for an invalid world configuration."""


@dataclass(frozen=True)
class WorldConfig:
    R: float = 1.0
    B0: float = 1.0
    v: float = 1.0
    n: int = 2000
    n_star: int = 1
    f: float = 0.1
    n_r: float = 13.0
    seed: int = 0
    finite_speed: bool = False

    def __post_init__(self):
        if not self.R > 0:
            raise ConfigError(f"R must be positive, got {self.R}")
        if not self.B0 > 0:
            raise ConfigError(f"B0 must be positive, got {self.B0}")
        if not self.v > 0:
            raise ConfigError(f"v must be positive, got {self.v}")
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if not 1 <= self.n_star <= self.n:
            raise ConfigError(f"n_star must lie in [1, n={self.n}], got {self.n_star}")
        if not 0.0 <= self.f <= 1.0:
            raise ConfigError(f"f must lie in [0, 1], got {self.f}")
        if not 0.0 < self.n_r <= self.n:
            raise ConfigError(f"n_r must lie in (0, n={self.n}], got {self.n_r}")
        if not 0 <= self.seed <= _MASK64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    @property
    def r(self) -> float:
        return broadcast_radius(self.n_r, self.n, self.R)


@dataclass(frozen=True)
class SensorSite:
    id: int
    x: float
    y: float
    R_i: float
    P_i: float
    is_source: bool

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Deployment:
    config: WorldConfig
    sites: tuple[SensorSite, ...]
    r: float
    _xy: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self._xy is None:
            xy = np.array([(s.x, s.y) for s in self.sites], dtype=float).reshape(-1, 2)
            object.__setattr__(self, "_xy", xy)

    @property
    def n(self) -> int:
        return len(self.sites)

    @property
    def xy(self) -> np.ndarray:
        """(n, 2) array of positions, row ``k`` belonging to ``sites[k]``."""
        return self._xy

    @property
    def sources(self) -> list[int]:
        return [s.id for s in self.sites if s.is_source]


def broadcast_radius(n_r: float, n: int, R: float) -> float:
    """Radius of the disc expected to hold ``n_r`` of ``n`` uniform sensors."""
    if n < 1 or not n_r > 0 or not R > 0:
        raise ValueError(f"broadcast_radius needs n >= 1, n_r > 0, R > 0 (got {n_r}, {n}, {R})")
    return math.sqrt(n_r / n) * R


def perceived_power(B0: float, d: float) -> float:
    if not d > 0:
        raise ValueError(f"distance must be positive, got {d}")
    return B0 / (d * d)


def distance_from_power(B0: float, P: float) -> float:
    if not P > 0:
        raise ValueError(f"power must be positive, got {P}")
    return math.sqrt(B0 / P)


def timer_duration(R: float, R_i: float, v: float) -> float:
    """Twice the propagation time from distance ``R_i`` out to the rim."""
    if not v > 0:
        raise ValueError(f"v must be positive, got {v}")
    if R_i > R:
        raise ValueError(f"R_i={R_i} exceeds R={R}")
    if R_i < 0:
        raise ValueError(f"R_i must be nonnegative, got {R_i}")
    return 2.0 * (R - R_i) / v


def sink_deadline(R: float, v: float) -> float:
    return timer_duration(R, 0.0, v)


def n_star_from_ratio(ratio: float, n: int) -> int:
    """Source count for a source ratio: ``round(ratio * n)`` clamped to [1, n]."""
    if not ratio > 0:
        raise ConfigError(f"source ratio must be positive, got {ratio}")
    return min(n, max(1, round(ratio * n)))


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix_seed(base_seed: int, *keys: int) -> int:
    """Fold integer ``keys`` into ``base_seed`` with chained SplitMix64.

    ``h = splitmix64(base_seed)``, then ``h = splitmix64(h ^ k)`` for every
    key in order. Keys are reduced modulo 2**64.
    """
    h = splitmix64(base_seed & _MASK64)
    for k in keys:
        h = splitmix64(h ^ (k & _MASK64))
    return h


def float_key(x: float) -> int:
    """IEEE-754 bit pattern of ``x`` as an unsigned integer, for seed mixing."""
    return int(np.float64(x).view(np.uint64))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def sample_deployment(config: WorldConfig) -> Deployment:
    """Place ``n`` sensors uniformly on the disc and pick ``n_star`` sources.

    Draw order, all from ``Generator.random``: ``n`` radial variates, ``n``
    angular variates, one (radial, angular) pair per rejected site in index
    order (repeated until accepted), then ``n`` source keys. The sources are
    the ``n_star`` sites with the smallest keys.
    """
    if config.n_star > config.n:
        raise ConfigError(f"n_star={config.n_star} exceeds n={config.n}")
    R, n = config.R, config.n
    rng = make_rng(config.seed)
    u = rng.random(n)
    w = rng.random(n)
    radius = R * np.sqrt(u)
    angle = 2.0 * np.pi * w
    floor = MIN_SINK_DISTANCE * R
    for k in np.flatnonzero(radius < floor):
        while radius[k] < floor:
            radius[k] = R * math.sqrt(rng.random())
            angle[k] = 2.0 * math.pi * rng.random()
    keys = rng.random(n)
    chosen = np.zeros(n, dtype=bool)
    chosen[np.argsort(keys, kind="stable")[: config.n_star]] = True

    x = radius * np.cos(angle)
    y = radius * np.sin(angle)
    return build_deployment(config, x, y, chosen)


def build_deployment(config: WorldConfig, x, y, is_source) -> Deployment:
    """Assemble a Deployment from explicit coordinates (hand-built scenarios, rescaling)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    is_source = np.asarray(is_source, dtype=bool)
    if not (len(x) == len(y) == len(is_source) == config.n):
        raise ConfigError("coordinate arrays must all have length n")
    if int(is_source.sum()) != config.n_star:
        raise ConfigError(f"expected {config.n_star} sources, got {int(is_source.sum())}")
    sites = []
    for k in range(config.n):
        xk, yk = float(x[k]), float(y[k])
        d = math.sqrt(xk * xk + yk * yk)
        if not 0 < d <= config.R:
            raise ConfigError(f"site {k} at distance {d} is outside (0, R={config.R}]")
        sites.append(SensorSite(k, xk, yk, d, perceived_power(config.B0, d), bool(is_source[k])))
    return Deployment(config, tuple(sites), config.r, np.column_stack([x, y]))
