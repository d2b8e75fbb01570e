# Copyright 2016 Canonical Limited.  All rights reserved.

"""Deterministic quadrature over spherical shells, balls, spheres and space.

Volume integrals are computed in product form,

    sum_k w_k r_k^(n-1) sum_j w_j g(c + r_k u_j),

with composite Gauss-Legendre panels in r and a fixed rule on the unit
sphere.  Below split_radius the radial panels are graded geometrically
toward the inner radius (edges split_radius * 2^-k), which resolves the
r^(2-n), r^(1-n), ln r and (ln r)/r kernel singularities at the centre.
Above it the panels are uniform.  Each panel is reduced with math.fsum
and the panels are then summed the same way in a fixed order, so the
same spec and inputs always give bit-identical results.

Integrands are vectorized: g takes an (m, n) array of points and returns
m values.
"""

from collections import namedtuple
import logging
import math

import numpy
from numpy.polynomial.legendre import leggauss

from . import _utils
from .errors import ConfigError, DomainError, IntegrationError
from .ndgeom import Dimension, unit_sphere_area


DEFAULT_ANGULAR_ORDER = {1: 2, 2: 64, 3: 24}
MIN_ANGULAR_ORDER = {2: 16, 3: 8}


class QuadratureSpec(
        namedtuple("QuadratureSpec",
                   "radial_panels radial_order angular_order split_radius "
                   "tail_cutoff rel_tol improper_rel_tol graded_levels "
                   "work_budget")):
    """The orders, splits and tolerances of the quadrature rules.

    angular_order is the number of phi nodes for n=2 and the number of
    cos(theta) nodes for n=3 (which get twice as many phi nodes); None
    selects the default of 64 and 24 respectively.  rel_tol applies to
    proper integrals and improper_rel_tol to balls and all of space.
    work_budget caps the number of integrand evaluations a single
    verification may plan (None means unlimited).
    """

    def __new__(cls, radial_panels=24, radial_order=16, angular_order=None,
                split_radius=1.0, tail_cutoff=1e-16, rel_tol=1e-8,
                improper_rel_tol=1e-6, graded_levels=30, work_budget=5e8):
        if angular_order is not None:
            angular_order = int(angular_order)
        if work_budget is not None:
            work_budget = float(work_budget)
        return super(QuadratureSpec, cls).__new__(
            cls, int(radial_panels), int(radial_order), angular_order,
            float(split_radius), float(tail_cutoff), float(rel_tol),
            float(improper_rel_tol), int(graded_levels), work_budget)

    def __init__(self, *args, **kwargs):
        for name in ("radial_panels", "radial_order", "graded_levels"):
            if getattr(self, name) < 1:
                raise ConfigError(name, "must be a positive integer")
        for name in ("split_radius", "rel_tol", "improper_rel_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(name, "must be positive")
        if not 0 < self.tail_cutoff < 1:
            raise ConfigError("tail_cutoff", "must lie in (0, 1)")
        if self.angular_order is not None and self.angular_order < 1:
            raise ConfigError("angular_order", "must be a positive integer")

    @classmethod
    def from_dict(cls, data, source="quadrature"):
        """Return a spec built from a mapping, rejecting unknown keys."""
        if data is None:
            data = {}
        if not hasattr(data, "items"):
            raise ConfigError(source, "expected a mapping")
        unknown = sorted(set(data) - set(cls._fields))
        if unknown:
            raise ConfigError(
                source, "unknown keys {}".format(", ".join(unknown)))
        try:
            return cls(**data)
        except (TypeError, ValueError) as error:
            raise ConfigError(source, str(error))

    def to_dict(self):
        return dict(self._asdict())

    def replace(self, **overrides):
        """Return a validated copy with the given fields replaced."""
        values = self.to_dict()
        values.update(overrides)
        return type(self)(**values)

    def angular_count(self, n):
        """Return the angular order for dimension n, checking its minimum."""
        n = Dimension(n)
        if n > 3:
            raise DomainError(
                "dimension", n, "volume quadrature supports n <= 3")
        if n == 1:
            return 2
        order = self.angular_order
        if order is None:
            order = DEFAULT_ANGULAR_ORDER[n]
        if order < MIN_ANGULAR_ORDER[n]:
            raise ConfigError(
                "angular_order", "{} is below the minimum {} for n={}".format(
                    order, MIN_ANGULAR_ORDER[n], n))
        return order

    def refined(self, n):
        """Return the spec with radial and angular orders doubled."""
        angular = None if n == 1 else 2 * self.angular_count(n)
        return self.replace(
            radial_order=2 * self.radial_order, angular_order=angular)


class ShellDomain(namedtuple("ShellDomain", "r1 r2 center")):
    """The closed layer r1 <= |x - center| <= r2.

    r1 = 0 is a ball and r2 = inf reaches to spatial infinity.
    """

    @classmethod
    def ball(cls, r2, center):
        return cls(0.0, r2, center)

    @classmethod
    def space(cls, center):
        return cls(0.0, math.inf, center)

    def __new__(cls, r1, r2, center):
        return super(ShellDomain, cls).__new__(
            cls, float(r1), float(r2), _utils.as_tuple(center))

    def __init__(self, *args, **kwargs):
        if not 0 <= self.r1 < self.r2:
            raise DomainError(
                "shell", (self.r1, self.r2), "expected 0 <= r1 < r2")
        if not self.center:
            raise DomainError("center", self.center, "missing")

    @property
    def is_ball(self):
        return self.r1 == 0 and math.isfinite(self.r2)

    @property
    def is_space(self):
        return self.r1 == 0 and not math.isfinite(self.r2)

    @property
    def is_layer(self):
        return self.r1 > 0 and math.isfinite(self.r2)


_LEGENDRE = {}


def gauss_legendre(order):
    """Return the Gauss-Legendre nodes and weights on [-1, 1]."""
    if order not in _LEGENDRE:
        _LEGENDRE[order] = leggauss(order)
    return _LEGENDRE[order]


def panel_edges(r1, r2, spec):
    """Return the radial panel edges from r1 out to r2.

    Edges below the split radius are split_radius * 2^-k, k up to
    graded_levels, so panels shrink geometrically toward r1; r1 itself
    (possibly 0) closes the innermost panel.
    """
    split = min(spec.split_radius, r2)
    edges = []
    if r1 < split:
        graded = [split * 2.0 ** -k for k in range(spec.graded_levels + 1)]
        edges = [r1] + sorted(e for e in graded if e > r1)
        if r1 > 0 and edges[1] < 1.5 * r1 and len(edges) > 2:
            # Don't leave a sliver panel next to the inner radius.
            del edges[1]
    else:
        split = r1
        edges = [r1]
    if r2 > split:
        width = (r2 - split) / spec.radial_panels
        edges.extend(split + width * k
                     for k in range(1, spec.radial_panels + 1))
        edges[-1] = r2
    return edges


def radial_panels(r1, r2, spec):
    """Return the (nodes, weights) arrays of each radial panel, inner first."""
    x, w = gauss_legendre(spec.radial_order)
    edges = panel_edges(r1, r2, spec)
    panels = []
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        panels.append((a + half * (x + 1.0), half * w))
    return panels


def radial_rule(r1, r2, spec):
    """Return all radial nodes and weights on [r1, r2] as two arrays."""
    panels = radial_panels(r1, r2, spec)
    return (numpy.concatenate([nodes for nodes, _ in panels]),
            numpy.concatenate([weights for _, weights in panels]))


def sphere_rule(n, spec):
    """Return unit directions (J, n) and weights (J,) on the unit sphere.

    The weights sum to S_n(1).  n=1 uses the two directions +1 and -1,
    n=2 the periodic trapezoid in phi and n=3 Gauss-Legendre in
    cos(theta) times the trapezoid in phi.
    """
    order = spec.angular_count(n)
    if n == 1:
        return numpy.array([[1.0], [-1.0]]), numpy.array([1.0, 1.0])
    if n == 2:
        phi = 2.0 * math.pi * numpy.arange(order) / order
        directions = numpy.column_stack([numpy.cos(phi), numpy.sin(phi)])
        return directions, numpy.full(order, 2.0 * math.pi / order)
    mu, w_mu = gauss_legendre(order)
    n_phi = 2 * order
    phi = 2.0 * math.pi * numpy.arange(n_phi) / n_phi
    sin_theta = numpy.sqrt(1.0 - mu * mu)
    directions = numpy.stack([
        numpy.outer(sin_theta, numpy.cos(phi)),
        numpy.outer(sin_theta, numpy.sin(phi)),
        numpy.outer(mu, numpy.ones(n_phi)),
        ], axis=-1).reshape(-1, 3)
    weights = numpy.outer(w_mu, numpy.full(n_phi, 2.0 * math.pi / n_phi))
    return directions, weights.ravel()


def count_nodes(n, r1, r2, spec):
    """Return the number of integrand evaluations a volume rule needs."""
    edges = panel_edges(r1, r2, spec)
    return ((len(edges) - 1) * spec.radial_order *
            len(sphere_rule(n, spec)[1]))


def _evaluate(g, points):
    values = numpy.asarray(g(points), dtype=float)
    values = numpy.broadcast_to(values, (len(points),))
    bad = ~numpy.isfinite(values)
    if bad.any():
        point = _utils.as_tuple(points[numpy.argmax(bad)])
        raise IntegrationError("non-finite integrand value", point)
    return values


def _panel_sums(n, g, center, panels, spec):
    """Return the (signed, absolute) contribution of every radial panel."""
    directions, angular = sphere_rule(n, spec)
    center = numpy.asarray(center, dtype=float)
    signed, absolute = [], []
    for nodes, weights in panels:
        points = (center[None, None, :] +
                  nodes[:, None, None] * directions[None, :, :])
        values = _evaluate(g, points.reshape(-1, n))
        radial = weights * nodes ** (n - 1)
        products = (radial[:, None] * angular[None, :]).ravel() * values
        signed.append(_utils.fsum(products))
        absolute.append(_utils.fsum(numpy.abs(products)))
    return signed, absolute


def _center(n, center):
    return _utils.as_vector(center, n, "center")


def integrate_shell(n, g, dom, spec, envelope_radius=None):
    """Return the integral of g over the layer r1 <= |x - c| <= r2.

    r1 must be positive; see integrate_ball for r1 = 0.  If r2 is
    infinite, envelope_radius gives the radius beyond which g is
    negligible.
    """
    n = Dimension(n)
    if not dom.r1 > 0:
        raise DomainError("r1", dom.r1, "use integrate_ball for r1 = 0")
    r2 = dom.r2
    if not math.isfinite(r2):
        if envelope_radius is None:
            raise IntegrationError(
                "an exterior integral needs an envelope radius")
        r2 = max(envelope_radius, 2.0 * dom.r1)
    center = _center(n, dom.center)
    _utils.check_work(count_nodes(n, dom.r1, r2, spec), spec.work_budget)
    signed, _ = _panel_sums(
        n, g, center, radial_panels(dom.r1, r2, spec), spec)
    return _utils.fsum(signed)


def integrate_sphere_surface(n, g, r, center, spec):
    """Return the integral of g over the sphere |x - center| = r.

    For n=1 the "sphere" is the two points center - r and center + r,
    so the result is g(center + r) + g(center - r).
    """
    n = Dimension(n)
    if not r > 0:
        raise DomainError("r", r, "the sphere radius must be positive")
    center = _center(n, center)
    directions, weights = sphere_rule(n, spec)
    values = _evaluate(g, center[None, :] + r * directions)
    return _utils.fsum(weights * values) * r ** (n - 1)


def sphere_mean(n, g, r, center, spec):
    """Return the mean of g over the sphere |x - center| = r."""
    n = Dimension(n)
    if not r > 0:
        raise DomainError("r", r, "the sphere radius must be positive")
    center = _center(n, center)
    directions, weights = sphere_rule(n, spec)
    values = _evaluate(g, center[None, :] + r * directions)
    return _utils.fsum(weights * values) / _utils.fsum(weights)


def _check_inner_convergence(absolute, tolerance, dyadic, inner=6):
    """Fail if the innermost panels' mass is not shrinking toward r = 0.

    Only the dyadic panels 1..dyadic are compared; the panel touching
    r = 0 has a different shape and the uniform panels outside the split
    radius may shrink outward.  A convergent integrand halves (or better)
    from one dyadic panel to the next, so anything above 0.95 is a
    divergence.
    """
    total = _utils.fsum(absolute)
    tail = absolute[1:min(inner, dyadic) + 1]
    for closer, farther in zip(tail[:-1], tail[1:]):
        if closer <= tolerance * total:
            continue
        if closer > 0.95 * farther:
            raise IntegrationError(
                "inner panel contributions are not decreasing "
                "({!r} > {!r})".format(closer, farther))


def integrate_ball(n, g, r2, center, spec):
    """Return the (first kind improper) integral of g over |x - c| <= r2.

    The r1 -> 0 limit is realized by the graded radial mesh; if the
    mass of the innermost panels does not decrease toward the centre
    the integral is reported as not converging.
    """
    n = Dimension(n)
    if not r2 > 0 or not math.isfinite(r2):
        raise DomainError("r2", r2, "the ball radius must be finite")
    center = _center(n, center)
    nodes = _utils.check_work(count_nodes(n, 0.0, r2, spec), spec.work_budget)
    logging.debug("ball quadrature: n={} r2={} nodes={}".format(n, r2, nodes))
    signed, absolute = _panel_sums(
        n, g, center, radial_panels(0.0, r2, spec), spec)
    _check_inner_convergence(absolute, spec.improper_rel_tol,
                             spec.graded_levels)
    return _utils.fsum(signed)


def integrate_space(n, g, center, spec, envelope_radius=None):
    """Return the (third kind improper) integral of g over all of space.

    With an envelope radius R the integral is the ball integral up to
    R.  Without one, R is doubled from 8 * split_radius until the shell
    beyond R holds less than improper_rel_tol of the total mass; a shell
    mass that stops decreasing is reported as not converging.
    """
    n = Dimension(n)
    center = _center(n, center)
    if envelope_radius is not None:
        logging.info("space quadrature: n={} R_max={:.6g}".format(
            n, envelope_radius))
        return integrate_ball(n, g, envelope_radius, center, spec)

    radius = 8.0 * spec.split_radius
    total = integrate_ball(n, g, radius, center, spec)
    previous = None
    for _ in range(12):
        dom = ShellDomain(radius, 2.0 * radius, center)
        signed, absolute = _panel_sums(
            n, g, center, radial_panels(dom.r1, dom.r2, spec), spec)
        mass = _utils.fsum(absolute)
        total = _utils.fsum([total, _utils.fsum(signed)])
        if mass <= spec.improper_rel_tol * abs(total):
            return total
        if previous is not None and mass >= previous:
            raise IntegrationError(
                "tail estimate is not decreasing beyond r={}".format(radius))
        previous = mass
        radius *= 2.0
    raise IntegrationError(
        "tail estimate did not settle by r={}".format(radius))


def tail_bound(n, coefficient, power, r_star):
    """Return K S_n(1) / ((q - n) r*^(q - n)), the bound on the tail
    beyond r* of an integrand bounded by K / r^q."""
    n = Dimension(n)
    if not power > n:
        raise DomainError("power", power, "the decay must beat r^-n")
    if not r_star > 0:
        raise DomainError("r_star", r_star)
    return (coefficient * unit_sphere_area(n) /
            ((power - n) * r_star ** (power - n)))
