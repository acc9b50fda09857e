"""Uniform-grid function container and quadrature helpers."""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

MIN_INTERVALS = 16


@dataclass
class GridFunction:
    """Real samples of a function on the uniform partition of [0, 1].

    values has length m + 1 where m is the number of grid intervals.
    """

    values: np.ndarray = field()

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or len(self.values) < MIN_INTERVALS + 1:
            raise InvalidInputError(
                f"grid function needs at least {MIN_INTERVALS + 1} samples, got shape {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise InvalidInputError("grid function contains non-finite values")

    @property
    def m(self):
        return len(self.values) - 1

    @property
    def h(self):
        return 1.0 / self.m

    @property
    def x(self):
        return np.linspace(0.0, 1.0, self.m + 1)

    def mean(self):
        return float(np.trapezoid(self.values, dx=self.h))

    @classmethod
    def zero(cls, m=256):
        return cls(np.zeros(m + 1))

    @classmethod
    def constant(cls, c, m=256):
        return cls(np.full(m + 1, float(c)))

    @classmethod
    def from_callable(cls, fn, m=256):
        return cls(np.asarray(fn(np.linspace(0.0, 1.0, m + 1)), dtype=float))


def trapezoid_weights(n, h):
    """Composite trapezoid weights for n nodes spaced h apart."""
    w = np.full(n, h)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def cumulative_trapezoid(values, h):
    """Running trapezoid integral, starting at zero."""
    values = np.asarray(values)
    out = np.empty(len(values))
    out[0] = 0.0
    np.cumsum(0.5 * (values[1:] + values[:-1]) * h, out=out[1:])
    return out
