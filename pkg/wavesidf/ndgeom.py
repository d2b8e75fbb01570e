# Copyright 2016 Canonical Limited.  All rights reserved.

"""Unit-ball volumes, unit-sphere areas and the kernel constants a_n.

The gamma function is only ever needed at half-integers, so it is
computed by the recurrence Gamma(z+1) = z*Gamma(z) from the anchors
Gamma(1/2) = sqrt(pi) and Gamma(1) = 1.
"""

import math
import numbers

from . import MAX_DIMENSION
from .errors import ConfigError, DomainError


SQRT_PI = math.sqrt(math.pi)


class Dimension(int):
    """A spatial dimension n, with 1 <= n <= MAX_DIMENSION."""

    def __new__(cls, n):
        if isinstance(n, bool) or not isinstance(n, numbers.Integral):
            raise DomainError("dimension", n, "expected an integer")
        if n < 1:
            raise DomainError("dimension", n, "must be at least 1")
        if n > MAX_DIMENSION:
            raise ConfigError(
                "dimension", "{} exceeds the maximum of {}".format(
                    n, MAX_DIMENSION))
        return super(Dimension, cls).__new__(cls, n)


def gamma_half_integer(two_k):
    """Return Gamma(two_k / 2).

    @param two_k: A positive integer, twice the gamma argument.
    """
    if isinstance(two_k, bool) or not isinstance(two_k, numbers.Integral):
        raise DomainError("two_k", two_k, "expected an integer")
    if two_k < 1:
        raise DomainError("two_k", two_k, "gamma has a pole at 0")
    if two_k % 2:
        value, z = SQRT_PI, 0.5
    else:
        value, z = 1.0, 1.0
    while 2 * z < two_k:
        value *= z
        z += 1.0
    return value


def unit_ball_volume(n):
    """Return V_n(1) = pi^(n/2) / Gamma(n/2 + 1)."""
    n = Dimension(n)
    return math.pi ** (n / 2.0) / gamma_half_integer(n + 2)


def unit_sphere_area(n):
    """Return S_n(1), taking S_1(1) = 2 (the two boundary points)."""
    n = Dimension(n)
    if n == 1:
        return 2.0
    return 2.0 * math.pi ** (n / 2.0) / gamma_half_integer(n)


def kernel_constant(n):
    """Return a_n, the normalization constant of the harmonic kernel."""
    n = Dimension(n)
    if n == 1:
        return -0.5
    if n == 2:
        return 1.0 / (2.0 * math.pi)
    return 1.0 / ((n - 2) * unit_sphere_area(n))


def ball_volume(n, r):
    """Return V_n(r) = V_n(1) r^n."""
    return unit_ball_volume(n) * r ** n


def sphere_area(n, r):
    """Return S_n(r) = S_n(1) r^(n-1)."""
    return unit_sphere_area(n) * r ** (n - 1)


def log_moment(r1, r2, power):
    """Return the integral of r^power ln(r) dr from r1 to r2.

    Only power 0 and 1 are supported.  r1 may be 0, in which case the
    lower limit is taken as r -> 0 (r^m ln r -> 0).
    """
    if power not in (0, 1):
        raise DomainError("power", power, "only 0 and 1 are supported")
    if r1 < 0 or r2 <= 0 or r1 > r2:
        raise DomainError("limits", (r1, r2))

    def antiderivative(r):
        if r == 0:
            return 0.0
        if power == 1:
            return 0.5 * r * r * (math.log(r) - 0.5)
        return r * (math.log(r) - 1.0)

    return antiderivative(r2) - antiderivative(r1)


def geometry_table(n):
    """Return the V/S/a values for the dimension as a dict."""
    n = Dimension(n)
    return {
        "n": int(n),
        "V": unit_ball_volume(n),
        "S": unit_sphere_area(n),
        "a": kernel_constant(n),
        }
