"""Stochastic time expressions and counter-indexed sampling.

Every random draw is a pure function of ``(seed, index)``: the index is
the run's sample counter, and each draw consumes exactly one index.
Methods that need several uniforms (polar normal, gamma rejection) read
them from sub-streams of that single index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

_MASK = (1 << 64) - 1


def monus(a: Fraction, b: Fraction) -> Fraction:
    """Saturating subtraction ``max(a - b, 0)``."""
    return a - b if a > b else Fraction(0)


def to_time(x: Union[int, float, str, Fraction]) -> Fraction:
    """Exact conversion to a nonnegative time value."""
    t = Fraction(x)
    if t < 0:
        raise ValueError(f"negative time {x!r}")
    return t


# --------------------------------------------------------------------------
# counter-based uniform generator (SplitMix64 finalizer over the key)

def _mix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def uniform01(seed: int, index: int, sub: int = 0) -> float:
    """Uniform on the open interval (0, 1), keyed by (seed, index, sub)."""
    k = _mix64(_mix64(_mix64(seed & _MASK) ^ (index & _MASK)) ^ (sub & _MASK))
    return ((k >> 11) + 0.5) * (1.0 / (1 << 53))


def _std_normal(seed: int, index: int, base: int = 0) -> float:
    # Marsaglia polar method on sub-streams base, base+1, ...
    j = base
    while True:
        u = 2.0 * uniform01(seed, index, j) - 1.0
        v = 2.0 * uniform01(seed, index, j + 1) - 1.0
        j += 2
        s = u * u + v * v
        if 0.0 < s < 1.0:
            return u * math.sqrt(-2.0 * math.log(s) / s)


_GAMMA_BUDGET = 256


def _std_gamma(shape: float, seed: int, index: int) -> float:
    # Marsaglia-Tsang; shape < 1 boosted via U**(1/shape)
    boost = 1.0
    if shape < 1.0:
        boost = uniform01(seed, index, 1 << 40) ** (1.0 / shape)
        shape += 1.0
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    for attempt in range(_GAMMA_BUDGET):
        base = (attempt + 1) << 20
        x = _std_normal(seed, index, base)
        v = (1.0 + c * x) ** 3
        if v <= 0.0:
            continue
        u = uniform01(seed, index, base - 1)
        if math.log(u) < 0.5 * x * x + d - d * v + d * math.log(v):
            return d * v * boost
    # budget exhausted (probability < 1e-300): Wilson-Hilferty approximation
    z = _std_normal(seed, index, 7)
    return max(shape * (1.0 - 1.0 / (9.0 * shape) + z / math.sqrt(9.0 * shape)) ** 3, 0.0) * boost


# --------------------------------------------------------------------------
# expressions

class StochasticExpression:
    __slots__ = ()

    def draw(self, seed: int, index: int) -> float:
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError


def _positive(**params):
    for name, value in params.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class Constant(StochasticExpression):
    t: Fraction

    def __post_init__(self):
        object.__setattr__(self, "t", to_time(self.t))

    def mean(self):
        return float(self.t)


@dataclass(frozen=True)
class Norm(StochasticExpression):
    mean_: float = 0.0
    stdev: float = 1.0

    def __post_init__(self):
        _positive(stdev=self.stdev)

    def draw(self, seed, index):
        return self.mean_ + self.stdev * _std_normal(seed, index)

    def mean(self):
        return self.mean_


@dataclass(frozen=True)
class Exp(StochasticExpression):
    rate: float

    def __post_init__(self):
        _positive(rate=self.rate)

    def draw(self, seed, index):
        return -math.log(uniform01(seed, index)) / self.rate

    def mean(self):
        return 1.0 / self.rate


@dataclass(frozen=True)
class Unif(StochasticExpression):
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"Unif needs lo < hi, got ({self.lo}, {self.hi})")

    def draw(self, seed, index):
        return self.lo + (self.hi - self.lo) * uniform01(seed, index)

    def mean(self):
        return 0.5 * (self.lo + self.hi)


@dataclass(frozen=True)
class Gam(StochasticExpression):
    shape: float
    scale: float

    def __post_init__(self):
        _positive(shape=self.shape, scale=self.scale)

    def draw(self, seed, index):
        return self.scale * _std_gamma(self.shape, seed, index)

    def mean(self):
        return self.shape * self.scale


@dataclass(frozen=True)
class Weib(StochasticExpression):
    scale: float
    shape: float

    def __post_init__(self):
        _positive(scale=self.scale, shape=self.shape)

    def draw(self, seed, index):
        return self.scale * (-math.log(uniform01(seed, index))) ** (1.0 / self.shape)

    def mean(self):
        return self.scale * math.gamma(1.0 + 1.0 / self.shape)


@dataclass(frozen=True)
class Chi(StochasticExpression):
    df: float

    def __post_init__(self):
        _positive(df=self.df)

    def draw(self, seed, index):
        return 2.0 * _std_gamma(self.df / 2.0, seed, index)

    def mean(self):
        return self.df


@dataclass(frozen=True)
class Log(StochasticExpression):
    """Log-normal: ``exp`` of a normal with the given mean and stdev."""
    mean_: float
    stdev: float

    def __post_init__(self):
        _positive(stdev=self.stdev)

    def draw(self, seed, index):
        return math.exp(self.mean_ + self.stdev * _std_normal(seed, index))

    def mean(self):
        return math.exp(self.mean_ + 0.5 * self.stdev ** 2)


DEFAULT_TIME = Norm(1.0, 0.2)


# --------------------------------------------------------------------------
# counters

@dataclass(frozen=True)
class SampleCounter:
    seed: int
    counter: int = 0

    def advance(self, n: int = 1) -> "SampleCounter":
        return SampleCounter(self.seed, self.counter + n)


def sample_time(e: StochasticExpression, c: SampleCounter) -> tuple[Fraction, SampleCounter]:
    """Draw a duration; constants leave the counter alone, negatives clamp to 0."""
    if isinstance(e, Constant):
        return e.t, c
    x = e.draw(c.seed, c.counter)
    t = Fraction(x) if x > 0.0 else Fraction(0)
    return t, c.advance()


def sample_prob(c: SampleCounter) -> tuple[float, SampleCounter]:
    return uniform01(c.seed, c.counter), c.advance()


def render(e: StochasticExpression) -> str:
    if isinstance(e, Constant):
        return f"Const({e.t})"
    if isinstance(e, (Norm, Log)):
        args = (e.mean_, e.stdev)
    elif isinstance(e, Exp):
        args = (e.rate,)
    elif isinstance(e, Unif):
        args = (e.lo, e.hi)
    elif isinstance(e, Gam):
        args = (e.shape, e.scale)
    elif isinstance(e, Weib):
        args = (e.scale, e.shape)
    elif isinstance(e, Chi):
        args = (e.df,)
    else:
        raise TypeError(f"cannot render {e!r}")
    return f"{type(e).__name__}({', '.join(repr(float(a)) for a in args)})"
