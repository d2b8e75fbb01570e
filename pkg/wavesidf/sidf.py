# Copyright 2016 Canonical Limited.  All rights reserved.

"""The integro-differential formula, its tautologies and its checks.

With psi~(x) = psi(t0 + lam r, x), r = |x - x*| and P_i = psi_{x_i} -
lam (x'_i / r) psi_t (both at the biased time) the volume integrands are

    K0 = -eta f
    K1 = lam (n - 3) zeta psi_t
    K2 = sum_i eta_{x_i} d(psi~)/dx_i
    K3 = -sum_i d(eta P_i)/dx_i

and K0 + K1 + K2 + K3 = 0 pointwise.  Omega^(alpha) is the integral of
K_alpha; Omega^(3) is evaluated through the surface terms
eta(r) * integral of Lambda over the r-sphere, Lambda = P . x'/r.
"""

from collections import namedtuple
import logging
import math

import numpy

from . import UNBIASED, _utils, quadrature
from .errors import DomainError, PreconditionError, SingularityError
from .fields import Bias
from .kernels import eta, eta_prime, zeta
from .ndgeom import Dimension


THEOREMS = ("layer", "symmetric", "ball", "boundary_free")
APOSTERIORI_KINDS = ("recover_f_3d", "omega1_box_1d", "omega0_box_1d")
DEFAULT_STEPS = {
    "recover_f_3d": 1e-2,
    "omega1_box_1d": 1e-3,
    "omega0_box_1d": 1e-3,
    }


class SidfContext(namedtuple("SidfContext", "t0 bias x_star")):
    """The observation event (t0, x*) and the (nonzero) bias."""

    def __new__(cls, t0, bias, x_star):
        return super(SidfContext, cls).__new__(
            cls, float(t0), Bias(bias), _utils.as_tuple(x_star))

    def __init__(self, *args, **kwargs):
        if self.bias == UNBIASED:
            raise PreconditionError(
                "the integro-differential forms need a nonzero bias")
        if not self.x_star:
            raise DomainError("x_star", self.x_star, "missing")

    @property
    def dimension(self):
        return len(self.x_star)

    def shifted(self, axis, amount):
        """Return the context with t0 (axis 0) or x*_axis moved."""
        if axis == 0:
            return self._replace(t0=self.t0 + amount)
        x_star = list(self.x_star)
        x_star[axis - 1] += amount
        return self._replace(x_star=tuple(x_star))

    def layer(self, r1, r2):
        return quadrature.ShellDomain(r1, r2, self.x_star)

    def ball(self, r2):
        return quadrature.ShellDomain.ball(r2, self.x_star)

    def space(self):
        return quadrature.ShellDomain.space(self.x_star)


class SidfReport(
        namedtuple("SidfReport",
                   "theorem dimension bias t0 x_star lhs_value omega "
                   "surface_terms residual refinement_delta raw_value")):
    """The term-by-term decomposition of one check.

    omega maps alpha to Omega^(alpha) for the terms that were computed.
    The residual is always the recombination of the stored terms.
    """

    def __new__(cls, theorem, ctx, lhs_value, omega, surface_terms,
                refinement_delta=None, raw_value=None):
        omega = {int(alpha): float(v) for alpha, v in omega.items()}
        surface_terms = {k: float(v) for k, v in surface_terms.items()}
        residual = _recombine(theorem, lhs_value, omega, surface_terms,
                              raw_value)
        return super(SidfReport, cls).__new__(
            cls, theorem, ctx.dimension, int(ctx.bias), ctx.t0, ctx.x_star,
            float(lhs_value), omega, surface_terms, residual,
            refinement_delta, raw_value)

    def recombined_residual(self):
        """Return the residual recomputed from the stored terms."""
        return _recombine(self.theorem, self.lhs_value, self.omega,
                          self.surface_terms, self.raw_value)

    def to_dict(self, wall_time=None):
        """Return the report as a JSON-friendly dict."""
        data = {
            "theorem": self.theorem,
            "dimension": self.dimension,
            "lambda": self.bias,
            "t0": self.t0,
            "x_star": list(self.x_star),
            "lhs_value": self.lhs_value,
            "surface_terms": dict(self.surface_terms),
            "residual": self.residual,
            "refinement_delta": self.refinement_delta,
            }
        for alpha, value in sorted(self.omega.items()):
            data["omega_{}".format(alpha)] = value
        if self.raw_value is not None:
            data["raw_value"] = self.raw_value
        if wall_time is not None:
            data["wall_time_seconds"] = wall_time
        return data


def _recombine(theorem, lhs_value, omega, surface_terms, raw_value):
    if theorem == "layer":
        return abs(_utils.fsum([omega[0], omega[1], omega[2], omega[3]]))
    if theorem == "symmetric":
        return abs(surface_terms["omega3_psi_eta"] -
                   _utils.fsum([omega[0], omega[1], omega[3]]))
    if theorem == "ball":
        return _utils.fsum([lhs_value, -surface_terms["psi_eta_r2"],
                            omega[0], omega[1], omega[3]])
    if theorem == "boundary_free":
        return _utils.fsum([lhs_value, omega[0], omega[1]])
    if theorem in APOSTERIORI_KINDS:
        return abs(raw_value - surface_terms["reference"])
    raise DomainError("theorem", theorem)


def _check_dimension(field, ctx, n):
    n = Dimension(n)
    if field.dimension != n or ctx.dimension != n:
        raise DomainError(
            "dimension", n, "the field has {} and x* has {}".format(
                field.dimension, ctx.dimension))
    return n


def _geometry(ctx, points):
    rel = points - numpy.asarray(ctx.x_star)
    r = numpy.sqrt(numpy.sum(rel * rel, axis=1))
    if numpy.any(r == 0):
        raise SingularityError("the kernel", ctx.x_star)
    unit = rel / r[:, None]
    t = ctx.t0 + int(ctx.bias) * r
    return r, unit, t


def _k0(field, ctx, n, points):
    r, _, t = _geometry(ctx, points)
    return -eta(n, r) * field.source(t, points)


def _k1(field, ctx, n, points):
    r, _, t = _geometry(ctx, points)
    if n == 3:
        return numpy.zeros(len(points))
    return int(ctx.bias) * (n - 3) * zeta(n, r) * field.d_t(t, points)


def _k2(field, ctx, n, points):
    r, unit, t = _geometry(ctx, points)
    gradient = eta_prime(n, r)[:, None] * unit
    composite = (field.d_x(t, points) +
                 int(ctx.bias) * unit * field.d_t(t, points)[:, None])
    return numpy.sum(gradient * composite, axis=1)


def _k3(field, ctx, n, points):
    r, unit, t = _geometry(ctx, points)
    lam = int(ctx.bias)
    psi_t = field.d_t(t, points)
    flux = field.d_x(t, points) - lam * unit * psi_t[:, None]
    divergence = -field.source(t, points) - lam * (n - 1) / r * psi_t
    gradient = eta_prime(n, r)[:, None] * unit
    return -(numpy.sum(gradient * flux, axis=1) + eta(n, r) * divergence)


_INTEGRANDS = {0: _k0, 1: _k1, 2: _k2, 3: _k3}


def integrand(alpha, field, ctx, n):
    """Return the vectorized K_alpha as a function of an (m, n) array."""
    if alpha not in _INTEGRANDS:
        raise DomainError("alpha", alpha)
    n = _check_dimension(field, ctx, n)
    k = _INTEGRANDS[alpha]
    return lambda points: k(field, ctx, n, points)


def _point(x, n):
    return _utils.as_vector(x, n, "x")[None, :]


def k_integrand(alpha, field, ctx, n, x):
    """Return K_alpha (alpha in 0, 1, 2) at the point x != x*."""
    if alpha not in (0, 1, 2):
        raise DomainError("alpha", alpha, "expected 0, 1 or 2")
    return float(integrand(alpha, field, ctx, n)(_point(x, n))[0])


def k3_integrand(field, ctx, n, x):
    """Return the divergence integrand K3 at the point x != x*."""
    return float(integrand(3, field, ctx, n)(_point(x, n))[0])


def surface_term_psi_eta(field, ctx, n, r, spec):
    """Return the mean of psi(t0 + lam r, x) over the r-sphere about x*.

    For n=1 this is the two-point mean at x* - r and x* + r.
    """
    n = _check_dimension(field, ctx, n)
    t = ctx.t0 + int(ctx.bias) * r

    def psi(points):
        return field.value(numpy.full(len(points), t), points)

    return quadrature.sphere_mean(n, psi, r, ctx.x_star, spec)


def surface_term_eta_psi(field, ctx, n, r, spec):
    """Return eta(r) times the integral of Lambda over the r-sphere.

    Lambda = sum_i (x'_i / r) psi_{x_i} - lam psi_t at the biased time;
    for n=1 the sphere is the two points x* -/+ r with normals -/+1.
    """
    n = _check_dimension(field, ctx, n)
    t = ctx.t0 + int(ctx.bias) * r
    x_star = numpy.asarray(ctx.x_star)

    def flux(points):
        times = numpy.full(len(points), t)
        unit = (points - x_star) / r
        return (numpy.sum(unit * field.d_x(times, points), axis=1) -
                int(ctx.bias) * field.d_t(times, points))

    return eta(n, r) * quadrature.integrate_sphere_surface(
        n, flux, r, ctx.x_star, spec)


def _envelope(field, ctx, spec):
    radius = field.envelope_radius(ctx.x_star, spec.tail_cutoff)
    if radius is None:
        raise PreconditionError(
            "{} has no decaying envelope".format(type(field).__name__))
    return radius


def omega(alpha, field, ctx, n, dom, spec):
    """Return Omega^(alpha)(eta, psi) over the domain centred on x*.

    alpha 0..2 are volume integrals of K_alpha; alpha 3 is built from the
    surface terms, positive on the inner sphere and negative on the outer
    one (only the outer one for a ball).
    """
    n = _check_dimension(field, ctx, n)
    if alpha not in _INTEGRANDS:
        raise DomainError("alpha", alpha)
    if tuple(dom.center) != tuple(ctx.x_star):
        raise DomainError("domain", dom, "must be centred on x*")
    if alpha == 1 and n == 3:
        return 0.0

    r2 = dom.r2
    radius = None
    if not math.isfinite(r2):
        radius = _envelope(field, ctx, spec)
        r2 = max(radius, 2.0 * dom.r1)

    if alpha == 3:
        inner = 0.0
        if dom.r1 > 0:
            inner = surface_term_eta_psi(field, ctx, n, dom.r1, spec)
        value = inner - surface_term_eta_psi(field, ctx, n, r2, spec)
    else:
        g = integrand(alpha, field, ctx, n)
        if dom.r1 > 0:
            value = quadrature.integrate_shell(
                n, g, dom, spec, envelope_radius=radius)
        elif dom.is_space:
            value = quadrature.integrate_space(
                n, g, ctx.x_star, spec, envelope_radius=radius)
        else:
            value = quadrature.integrate_ball(n, g, r2, ctx.x_star, spec)
    logging.info("Omega^({}) n={} lambda={} over {}: {!r}".format(
        alpha, n, int(ctx.bias), dom, value))
    return value


def omega_psi_eta(field, ctx, n, dom, spec):
    """Return Omega^(3)(psi, eta): the difference of spherical means.

    On a layer this is M(r2) - M(r1); on a ball M(r2) - psi(t0, x*).
    """
    n = _check_dimension(field, ctx, n)
    if not math.isfinite(dom.r2):
        raise DomainError("domain", dom, "needs a finite outer radius")
    outer = surface_term_psi_eta(field, ctx, n, dom.r2, spec)
    if dom.r1 > 0:
        inner = surface_term_psi_eta(field, ctx, n, dom.r1, spec)
    else:
        inner = _observed_value(field, ctx)
    return outer - inner


def _observed_value(field, ctx):
    return float(field.value(numpy.array([ctx.t0]),
                             numpy.array([ctx.x_star]))[0])


def _check_layer(r1, r2):
    if not 0 < r1 < r2:
        raise DomainError("layer", (r1, r2), "expected 0 < r1 < r2")


def layer_tautology_report(field, ctx, n, r1, r2, spec):
    """Return the report for sum_{alpha=0..3} Omega^(alpha) = 0."""
    _check_layer(r1, r2)
    dom = ctx.layer(r1, r2)
    terms = {alpha: omega(alpha, field, ctx, n, dom, spec)
             for alpha in (0, 1, 2, 3)}
    return SidfReport("layer", ctx, _observed_value(field, ctx), terms, {})


def layer_tautology_residual(field, ctx, n, r1, r2, spec):
    """Return |sum_{alpha=0..3} Omega^(alpha)(eta, psi, layer)|."""
    return layer_tautology_report(field, ctx, n, r1, r2, spec).residual


def symmetric_tautology_report(field, ctx, n, r1, r2, spec):
    """Return the report for Omega^(3)(psi, eta) = Omega^(0,1,3)(eta, psi)."""
    _check_layer(r1, r2)
    dom = ctx.layer(r1, r2)
    terms = {alpha: omega(alpha, field, ctx, n, dom, spec)
             for alpha in (0, 1, 3)}
    inner = surface_term_psi_eta(field, ctx, n, r1, spec)
    outer = surface_term_psi_eta(field, ctx, n, r2, spec)
    surface_terms = {
        "psi_eta_r1": inner,
        "psi_eta_r2": outer,
        "omega3_psi_eta": outer - inner,
        }
    return SidfReport("symmetric", ctx, _observed_value(field, ctx), terms,
                      surface_terms)


def symmetric_tautology_residual(field, ctx, n, r1, r2, spec):
    """Return |Omega^(3)(psi, eta) - sum_{alpha=0,1,3} Omega^(alpha)|."""
    return symmetric_tautology_report(field, ctx, n, r1, r2, spec).residual


def _ball_terms(field, ctx, n, r2, spec):
    dom = ctx.ball(r2)
    terms = {alpha: omega(alpha, field, ctx, n, dom, spec)
             for alpha in (0, 1, 3)}
    surface_terms = {
        "psi_eta_r2": surface_term_psi_eta(field, ctx, n, r2, spec),
        "eta_psi_r2": surface_term_eta_psi(field, ctx, n, r2, spec),
        }
    return terms, surface_terms


def ball_sidf_report(field, ctx, n, r2, spec, refine=True):
    """Return the report for the formula on the ball of radius r2.

    residual = psi(t0, x*) - M(r2) + Omega^(0) + Omega^(1) + Omega^(3),
    which vanishes for every r2.  With refine the residual is recomputed
    with doubled orders and the change is stored as refinement_delta.
    """
    n = _check_dimension(field, ctx, n)
    if not r2 > 0:
        raise DomainError("r2", r2, "the ball radius must be positive")
    lhs = _observed_value(field, ctx)
    terms, surface_terms = _ball_terms(field, ctx, n, r2, spec)
    report = SidfReport("ball", ctx, lhs, terms, surface_terms)
    if refine:
        refined = SidfReport(
            "ball", ctx, lhs, *_ball_terms(field, ctx, n, r2,
                                           spec.refined(n)))
        report = report._replace(
            refinement_delta=abs(refined.residual - report.residual))
    return report


def _space_terms(field, ctx, n, spec):
    dom = ctx.space()
    return {alpha: omega(alpha, field, ctx, n, dom, spec)
            for alpha in (0, 1)}


def boundary_free_sidf(field, ctx, n, spec, refine=True):
    """Return the report for psi(t0, x*) + Omega^(0) + Omega^(1) = 0.

    Both Omega terms run over all of space.  The surface terms at the
    truncation radius are reported too, as a witness that the boundary
    contributions have vanished.
    """
    n = _check_dimension(field, ctx, n)
    radius = _envelope(field, ctx, spec)
    lhs = _observed_value(field, ctx)
    terms = _space_terms(field, ctx, n, spec)
    surface_terms = {
        "psi_eta_rmax": surface_term_psi_eta(field, ctx, n, radius, spec),
        "eta_psi_rmax": surface_term_eta_psi(field, ctx, n, radius, spec),
        }
    report = SidfReport("boundary_free", ctx, lhs, terms, surface_terms)
    if refine:
        refined = SidfReport("boundary_free", ctx, lhs,
                             _space_terms(field, ctx, n, spec.refined(n)),
                             surface_terms)
        report = report._replace(
            refinement_delta=abs(refined.residual - report.residual))
    return report


def _box_star(func, ctx, n, h):
    """Return (sum_i d^2/dx*_i^2 - d^2/dt0^2) func at ctx by 5-point
    central differences, with the field held fixed."""
    center = func(ctx)

    def second(axis):
        samples = {0: center}
        for k in (-2, -1, 1, 2):
            samples[k] = func(ctx.shifted(axis, k * h))
        return _utils.stencil_derivative(
            samples, h, _utils.SECOND_DERIVATIVE_STENCIL)

    spatial = _utils.fsum([second(axis) for axis in range(1, n + 1)])
    return spatial - second(0), center


def _time_derivative(func, ctx, h):
    samples = {k: func(ctx.shifted(0, k * h)) for k in (-2, -1, 1, 2)}
    return _utils.stencil_derivative(
        samples, h, _utils.FIRST_DERIVATIVE_STENCIL)


def aposteriori_report(kind, field, ctx, h, spec):
    """Return the report of a differential check of the volume terms.

    recover_f_3d:  |box*(-Omega^(0)) + f(t0, x*)|, n=3.
    omega1_box_1d: |box* Omega^(1) - 2 psi_tt(t0, x*)|, n=1; the kink of
                   |x - x*| makes box* Omega^(1) pick up 2 psi_tt.
    omega0_box_1d: |box* Omega^(0) - f(t0, x*) - d/dt0 of the integral
                   of lam (n-3) zeta f(biased)|, n=1.

    box* differentiates with respect to the observation event (t0, x*);
    the raw box* value is kept in the report.
    """
    if kind not in APOSTERIORI_KINDS:
        raise DomainError("kind", kind)
    if h is None:
        h = DEFAULT_STEPS[kind]
    if not h > 0:
        raise DomainError("h", h, "the step must be positive")
    n = 3 if kind == "recover_f_3d" else 1
    n = _check_dimension(field, ctx, n)

    # Hold the truncation radius fixed while x* moves.
    radius = _envelope(field, ctx, spec) + 4.0 * h
    evaluations = 1 + 4 * (n + 1)
    if kind == "omega0_box_1d":
        evaluations += 4
    _utils.check_work(
        evaluations * quadrature.count_nodes(n, 0.0, radius, spec),
        spec.work_budget)

    def volume(alpha, sign=1.0):
        def func(shifted):
            g = integrand(alpha, field, shifted, n)
            return sign * quadrature.integrate_ball(
                n, g, radius, shifted.x_star, spec)
        return func

    t = numpy.array([ctx.t0])
    x = numpy.array([ctx.x_star])
    f = float(field.source(t, x)[0])
    if kind == "recover_f_3d":
        raw, center = _box_star(volume(0, -1.0), ctx, n, h)
        terms = {0: -center}
        reference = -f
    elif kind == "omega1_box_1d":
        raw, center = _box_star(volume(1), ctx, n, h)
        terms = {1: center}
        reference = 2.0 * float(field.d_tt(t, x)[0])
    else:
        raw, center = _box_star(volume(0), ctx, n, h)
        terms = {0: center}

        def dispersive(shifted):
            lam = int(shifted.bias)

            def g(points):
                r, _, times = _geometry(shifted, points)
                return lam * (n - 3) * zeta(n, r) * field.source(
                    times, points)

            return quadrature.integrate_ball(
                n, g, radius, shifted.x_star, spec)

        reference = _utils.fsum([f, _time_derivative(dispersive, ctx, h)])
    logging.info("{}: box* = {!r}, reference = {!r}".format(
        kind, raw, reference))
    return SidfReport(kind, ctx, f, terms, {"reference": reference},
                      raw_value=raw)


def aposteriori_residual(kind, field, ctx, h, spec):
    """Return the residual of the named differential check."""
    return aposteriori_report(kind, field, ctx, h, spec).residual
