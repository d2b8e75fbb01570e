# Copyright 2016 Canonical Limited.  All rights reserved.

"""Manufactured smooth fields, biased evaluation and the wave source.

Every field evaluates vectorized: t is an (m,) array of times and x an
(m, n) array of positions.  The biased form of a field samples it at
the shifted time t0 + bias * |x - x*|, taking the partial first and
substituting the time afterwards.
"""

from collections import namedtuple
import math

import numpy

from . import ADVANCED, RETARDED, UNBIASED, _utils
from .errors import DomainError, PreconditionError


class Bias(int):
    """The bias lambda: -1 (retarded), 0 (unbiased) or +1 (advanced)."""

    NAMES = {
        "retarded": RETARDED,
        "unbiased": UNBIASED,
        "advanced": ADVANCED,
        }

    @classmethod
    def from_name(cls, name):
        """Return the bias for "retarded", "unbiased" or "advanced"."""
        try:
            return cls(cls.NAMES[name])
        except KeyError:
            raise DomainError("bias", name)

    def __new__(cls, value):
        if value not in (RETARDED, UNBIASED, ADVANCED):
            raise DomainError("bias", value, "must be -1, 0 or +1")
        return super(Bias, cls).__new__(cls, int(value))

    @property
    def name(self):
        for name, value in self.NAMES.items():
            if value == self:
                return name


class SpaceTimePoint(namedtuple("SpaceTimePoint", "t x")):
    """An event: the time coordinate plus n spatial coordinates."""

    def __new__(cls, t, x):
        return super(SpaceTimePoint, cls).__new__(
            cls, float(t), _utils.as_tuple(x))

    @property
    def dimension(self):
        return len(self.x)


class DerivativeSelector(namedtuple("DerivativeSelector", "tag index")):
    """Which closed-form partial to evaluate.

    d_i and d_ii take a spatial index i with 1 <= i <= n; the other tags
    take no index.
    """

    TAGS = ("value", "d_t", "d_tt", "d_i", "d_ii",
            "laplacian", "dalembertian")

    def __new__(cls, tag, index=None):
        return super(DerivativeSelector, cls).__new__(cls, tag, index)

    def __init__(self, *args, **kwargs):
        if self.tag not in self.TAGS:
            raise DomainError("selector", self.tag)
        indexed = self.tag in ("d_i", "d_ii")
        if indexed and self.index is None:
            raise DomainError("selector", self.tag, "missing index")
        if not indexed and self.index is not None:
            raise DomainError("selector", self.tag, "takes no index")

    def check(self, n):
        """Fail if the selector's index is out of range for dimension n."""
        if self.index is not None and not 1 <= self.index <= n:
            raise DomainError(
                "selector index", self.index, "expected 1..{}".format(n))


VALUE = DerivativeSelector("value")
D_T = DerivativeSelector("d_t")
D_TT = DerivativeSelector("d_tt")
LAPLACIAN = DerivativeSelector("laplacian")
DALEMBERTIAN = DerivativeSelector("dalembertian")


def d_i(i):
    return DerivativeSelector("d_i", i)


def d_ii(i):
    return DerivativeSelector("d_ii", i)


class ScalarField(object):
    """The interface of a smooth field psi(t, x) with closed-form partials.

    Subclasses provide value, d_t, d_tt, d_x and d_xx (the last two
    returning (m, n) arrays of first and pure second spatial partials)
    and the dimension attribute.
    """

    __slots__ = ()

    def laplacian(self, t, x):
        return numpy.sum(self.d_xx(t, x), axis=-1)

    def dalembertian(self, t, x):
        return self.laplacian(t, x) - self.d_tt(t, x)

    def source(self, t, x):
        """Return f = -(laplacian - d_tt) psi."""
        return -self.dalembertian(t, x)

    def evaluate_many(self, sel, t, x):
        """Evaluate the selected partial at each (t[k], x[k])."""
        sel.check(self.dimension)
        if sel.tag == "d_i":
            return self.d_x(t, x)[:, sel.index - 1]
        if sel.tag == "d_ii":
            return self.d_xx(t, x)[:, sel.index - 1]
        return getattr(self, sel.tag)(t, x)

    def envelope_radius(self, center, tail_cutoff):
        """Return a radius about center beyond which the field is negligible.

        None means the field has no decaying envelope.
        """
        return None

    def time_window(self, tail_cutoff):
        """Return (t_lo, t_hi) outside which the source is negligible."""
        return None


class GaussianField(
        namedtuple("GaussianField",
                   "amplitude alpha beta t_center x_center"),
        ScalarField):
    """psi(t, x) = A exp(-alpha (t - t_c)^2) exp(-beta |x - c|^2).

    Gaussian decay dominates every power of r, so the field and all of
    its partials satisfy any algebraic decay bound at spatial infinity.
    """

    DEFAULT_OFFSET = 0.3

    @classmethod
    def default(cls, t0, x_star):
        """Return the default field for the observation event (t0, x*).

        The peak sits at t0, offset by 0.3 in every coordinate from x*.
        """
        center = _utils.as_vector(x_star) + cls.DEFAULT_OFFSET
        return cls(1.0, 1.0, 1.0, t0, center)

    def __new__(cls, amplitude, alpha, beta, t_center, x_center):
        return super(GaussianField, cls).__new__(
            cls, float(amplitude), float(alpha), float(beta),
            float(t_center), _utils.as_tuple(x_center))

    def __init__(self, *args, **kwargs):
        if not self.alpha > 0:
            raise DomainError("alpha", self.alpha, "must be positive")
        if not self.beta > 0:
            raise DomainError("beta", self.beta, "must be positive")
        if not self.x_center:
            raise DomainError("x_center", self.x_center, "missing")

    @property
    def dimension(self):
        return len(self.x_center)

    def _parts(self, t, x):
        t = numpy.asarray(t, dtype=float)
        dx = numpy.asarray(x, dtype=float) - numpy.asarray(self.x_center)
        dt = t - self.t_center
        envelope = self.amplitude * numpy.exp(
            -self.alpha * dt * dt - self.beta * numpy.sum(dx * dx, axis=-1))
        return dt, dx, envelope

    def value(self, t, x):
        return self._parts(t, x)[2]

    def d_t(self, t, x):
        dt, _, envelope = self._parts(t, x)
        return -2.0 * self.alpha * dt * envelope

    def d_tt(self, t, x):
        dt, _, envelope = self._parts(t, x)
        a = self.alpha
        return (4.0 * a * a * dt * dt - 2.0 * a) * envelope

    def d_x(self, t, x):
        _, dx, envelope = self._parts(t, x)
        return -2.0 * self.beta * dx * envelope[..., None]

    def d_xx(self, t, x):
        _, dx, envelope = self._parts(t, x)
        b = self.beta
        return (4.0 * b * b * dx * dx - 2.0 * b) * envelope[..., None]

    def envelope_radius(self, center, tail_cutoff):
        offset = numpy.linalg.norm(
            numpy.asarray(self.x_center) - _utils.as_vector(center))
        return float(offset) + math.sqrt(
            math.log(1.0 / tail_cutoff) / self.beta) + 2.0

    def time_window(self, tail_cutoff):
        half = math.sqrt(math.log(1.0 / tail_cutoff) / self.alpha) + 2.0
        return self.t_center - half, self.t_center + half


class ConstantField(namedtuple("ConstantField", "constant dimension"),
                    ScalarField):
    """psi = constant everywhere; every partial vanishes."""

    def value(self, t, x):
        return numpy.full(numpy.shape(t), float(self.constant))

    def d_t(self, t, x):
        return numpy.zeros(numpy.shape(t))

    d_tt = d_t

    def d_x(self, t, x):
        return numpy.zeros(numpy.shape(x))

    d_xx = d_x


class ZeroField(ConstantField):
    """psi = 0, whose source also vanishes."""

    def __new__(cls, dimension):
        return super(ZeroField, cls).__new__(cls, 0.0, dimension)

    def envelope_radius(self, center, tail_cutoff):
        return 1.0

    def time_window(self, tail_cutoff):
        return 0.0, 0.0


def _single(p, n=None):
    p = p if isinstance(p, SpaceTimePoint) else SpaceTimePoint(*p)
    if n is not None and p.dimension != n:
        raise DomainError("point", p, "expected {} coordinates".format(n))
    return numpy.array([p.t]), numpy.array([p.x])


def evaluate(field, sel, p):
    """Return the selected closed-form partial of the field at p."""
    t, x = _single(p, field.dimension)
    return float(field.evaluate_many(sel, t, x)[0])


def source(field, p):
    """Return the wave source f = -(laplacian - d_tt) psi at p."""
    t, x = _single(p, field.dimension)
    return float(field.source(t, x)[0])


def biased_time(t0, bias, x, x_star):
    """Return t0 + bias * |x - x*| for each row of x."""
    x = numpy.asarray(x, dtype=float)
    r = numpy.linalg.norm(x - numpy.asarray(x_star, dtype=float), axis=-1)
    return t0 + int(bias) * r


def biased_evaluate(field, sel, t0, bias, x, x_star):
    """Return the selected partial at the biased time t0 + bias |x - x*|."""
    n = field.dimension
    bias = Bias(bias)
    x = _utils.as_vector(x, n, "x")
    x_star = _utils.as_vector(x_star, n, "x_star")
    t = biased_time(t0, bias, x[None, :], x_star)
    return float(field.evaluate_many(sel, t, x[None, :])[0])


def composite_flux(field, t0, bias, x, x_star):
    """Return P_i = psi_{x_i} - bias (x'_i / r) psi_t at the biased time.

    x is an (m, n) array; the result is (m, n).  The biased d'Alembertian
    equals div P + bias (n - 1) / r psi_t.
    """
    x = numpy.asarray(x, dtype=float)
    rel = x - numpy.asarray(x_star, dtype=float)
    r = numpy.linalg.norm(rel, axis=-1)
    t = t0 + int(bias) * r
    unit = rel / r[:, None]
    return field.d_x(t, x) - int(bias) * unit * field.d_t(t, x)[:, None]


def biased_box_identity_residual(field, n, bias, t0, x_star, x, h):
    """Return |box psi (biased) - div P - bias (n-1)/r psi_t (biased)|.

    div P is taken by central differences in x with step h; the point
    must stand off x* by at least 10 h.
    """
    bias = Bias(bias)
    if bias == UNBIASED:
        raise PreconditionError("the identity needs a nonzero bias")
    if h <= 0:
        raise DomainError("h", h, "the step must be positive")
    x = _utils.as_vector(x, n, "x")
    x_star = _utils.as_vector(x_star, n, "x_star")
    r = float(numpy.linalg.norm(x - x_star))
    if r < 10 * h:
        raise PreconditionError(
            "point {} is within 10h of x* (h={})".format(tuple(x), h))

    stencil = []
    for i in range(n):
        step = numpy.zeros(n)
        step[i] = h
        stencil.extend([x + step, x - step])
    fluxes = composite_flux(field, t0, bias, numpy.array(stencil), x_star)
    divergence = _utils.fsum(
        [(fluxes[2 * i, i] - fluxes[2 * i + 1, i]) / (2.0 * h)
         for i in range(n)])

    t = numpy.array([t0 + bias * r])
    lhs = float(field.dalembertian(t, x[None, :])[0])
    rhs = divergence + bias * (n - 1) / r * float(field.d_t(t, x[None, :])[0])
    return abs(lhs - rhs)


def decay_witness(field, t0, bias, x_star, radii=(5.0, 10.0, 20.0)):
    """Sample |d^m psi / d x_i^m| at the biased time at growing radii.

    The samples are taken along the direction -(1, ..., 1)/sqrt(n),
    away from the default field's peak.  Index i=0 is the time axis.
    Returns a list of (m, i, r, value) tuples.
    """
    n = field.dimension
    x_star = _utils.as_vector(x_star, n, "x_star")
    direction = -numpy.ones(n) / math.sqrt(n)
    samples = []
    for r in radii:
        x = (x_star + r * direction)[None, :]
        t = numpy.array([t0 + int(bias) * r])
        derivatives = {
            (0, 0): field.value(t, x)[0],
            (1, 0): field.d_t(t, x)[0],
            (2, 0): field.d_tt(t, x)[0],
            }
        first, second = field.d_x(t, x)[0], field.d_xx(t, x)[0]
        for i in range(1, n + 1):
            derivatives[(0, i)] = derivatives[(0, 0)]
            derivatives[(1, i)] = first[i - 1]
            derivatives[(2, i)] = second[i - 1]
        for (m, i), value in sorted(derivatives.items()):
            samples.append((m, i, r, abs(float(value))))
    return samples
