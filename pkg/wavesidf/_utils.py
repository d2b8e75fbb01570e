# Copyright 2016 Canonical Limited.  All rights reserved.

import math

import numpy

from .errors import DomainError, WorkBudgetError


def as_vector(value, n=None, name="x"):
    """Return the value as a 1-d float array, checking its length.

    @param value: A number (for n=1) or a sequence of numbers.
    @param n: The required length, if any.
    @param name: The argument name to use in error messages.
    """
    vector = numpy.atleast_1d(numpy.asarray(value, dtype=float))
    if vector.ndim != 1:
        raise DomainError(name, value, "expected a vector")
    if n is not None and len(vector) != n:
        raise DomainError(
            name, value, "expected {} coordinates".format(n))
    return vector


def as_points(points, n):
    """Return the points as an (m, n) float array."""
    points = numpy.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, n) if n > 1 else points[:, None]
    if points.ndim != 2 or points.shape[1] != n:
        raise DomainError("points", points.shape,
                          "expected shape (m, {})".format(n))
    return points


def as_tuple(vector):
    """Return a hashable, JSON-friendly copy of the vector."""
    return tuple(float(v) for v in numpy.atleast_1d(vector))


def fsum(values):
    """Return the compensated sum of the values.

    The summation order is the order of the values, so identical inputs
    always give bit-identical totals.
    """
    if isinstance(values, numpy.ndarray):
        values = values.ravel().tolist()
    return math.fsum(values)


# 5-point central stencils: (offsets, weights) for f' and f''.
FIRST_DERIVATIVE_STENCIL = ((-2, -1, 1, 2), (1.0, -8.0, 8.0, -1.0), 12.0)
SECOND_DERIVATIVE_STENCIL = (
    (-2, -1, 0, 1, 2), (-1.0, 16.0, -30.0, 16.0, -1.0), 12.0)


def stencil_derivative(values, h, stencil):
    """Combine the samples taken at the stencil offsets.

    @param values: A mapping of offset -> sampled value.
    @param h: The stencil step.
    @param stencil: FIRST_DERIVATIVE_STENCIL or SECOND_DERIVATIVE_STENCIL.
    """
    offsets, weights, scale = stencil
    order = 1 if stencil is FIRST_DERIVATIVE_STENCIL else 2
    total = fsum([w * values[k] for k, w in zip(offsets, weights)])
    return total / (scale * h ** order)


def check_work(projected, budget):
    """Fail if the projected number of integrand evaluations is too big."""
    if budget is not None and projected > budget:
        raise WorkBudgetError(int(projected), int(budget))
    return projected
