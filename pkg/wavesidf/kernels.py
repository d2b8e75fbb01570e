# Copyright 2016 Canonical Limited.  All rights reserved.

"""The harmonic kernel eta, the auxiliary kernel zeta and their checks.

    eta(r)  = a_n r^(2-n)          n != 2
            = -a_2 ln r            n == 2
    zeta(r) = a_n r^(1-n)          n != 2
            = -a_2 (ln r + 2) / r  n == 2

The sign convention is Laplacian(eta) = -delta, so the outward flux of
grad(eta) through any sphere around the pole is -1.
"""

import numpy

from . import _utils, quadrature
from .errors import DomainError, SingularityError
from .ndgeom import Dimension, kernel_constant, unit_sphere_area


def _radius(r, what, allow_zero=False):
    radius = numpy.asarray(r, dtype=float)
    if numpy.any(radius < 0):
        raise DomainError("r", r, "distances are non-negative")
    if not allow_zero and numpy.any(radius == 0):
        raise SingularityError(what, 0.0)
    return radius


def _result(value):
    if numpy.ndim(value) == 0:
        return float(value)
    return value


def eta(n, r):
    """Return eta^(n)(r); r may be a number or an array of numbers."""
    n = Dimension(n)
    r = _radius(r, "eta")
    a = kernel_constant(n)
    if n == 2:
        return _result(-a * numpy.log(r))
    return _result(a * r ** (2 - n))


def eta_prime(n, r):
    """Return d eta^(n) / dr.

    For every n this equals -1 / (S_n(1) r^(n-1)).
    """
    n = Dimension(n)
    r = _radius(r, "eta'")
    a = kernel_constant(n)
    if n == 2:
        return _result(-a / r)
    return _result(a * (2 - n) * r ** (1 - n))


def zeta(n, r):
    """Return zeta^(n)(r); for n=1 this is the constant a_1."""
    n = Dimension(n)
    r = _radius(r, "zeta", allow_zero=(n == 1))
    a = kernel_constant(n)
    if n == 1:
        return _result(a + 0.0 * r)
    if n == 2:
        return _result(-a * (numpy.log(r) + 2.0) / r)
    return _result(a * r ** (1 - n))


def eta_gradient(n, x_rel):
    """Return grad eta^(n) at the relative position x_rel = x - x*.

    x_rel may be a single vector or an (m, n) array of them.
    """
    n = Dimension(n)
    x_rel = numpy.asarray(x_rel, dtype=float)
    single = x_rel.ndim <= 1
    points = _utils.as_points(x_rel, n)
    r = numpy.sqrt(numpy.sum(points * points, axis=1))
    if numpy.any(r == 0):
        raise SingularityError("grad eta", _utils.as_tuple(x_rel))
    gradient = (eta_prime(n, r) / r)[:, None] * points
    return gradient[0] if single else gradient


def flux_normalization(n, r, spec=None):
    """Return the outward flux of grad eta through the sphere of radius r.

    For n <= 3 the flux is integrated numerically over the sphere (for
    n=1 it is the two-point difference across [-r, r]); above that the
    analytic value eta'(r) S_n(r) is returned.  Either way the result
    should be -1.
    """
    n = Dimension(n)
    if r <= 0:
        raise DomainError("r", r, "the sphere radius must be positive")
    if n > 3:
        return eta_prime(n, r) * unit_sphere_area(n) * r ** (n - 1)

    if spec is None:
        spec = quadrature.QuadratureSpec()
    center = numpy.zeros(n)

    def normal_flux(points):
        normals = points / r
        return numpy.sum(eta_gradient(n, points) * normals, axis=1)

    return quadrature.integrate_sphere_surface(
        n, normal_flux, r, center, spec)


def fd_laplacian(f, x, h):
    """Return the second-order central-difference Laplacian of f at x.

    @param f: A side-effect free function of an n-vector.
    @param x: The evaluation point.
    @param h: The (positive) step.
    """
    if h <= 0:
        raise DomainError("h", h, "the step must be positive")
    x = _utils.as_vector(x)
    center = f(x)
    terms = []
    for i in range(len(x)):
        step = numpy.zeros(len(x))
        step[i] = h
        terms.append((f(x + step) - 2.0 * center + f(x - step)) / (h * h))
    return _utils.fsum(terms)


def radial_power_laplacian(n, p, r):
    """Return the Laplacian of r^p in n dimensions: p(p+n-2) r^(p-2)."""
    n = Dimension(n)
    return p * (p + n - 2) * r ** (p - 2)


def kernel_step(r):
    """Return the default finite-difference step for kernel checks."""
    return 1e-4 * max(1.0, r)
