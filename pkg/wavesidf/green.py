# Copyright 2016 Canonical Limited.  All rights reserved.

"""Green functions of the wave equation and the retarded potentials.

All quantities are dimensionless with wave speed 1.  tau is the
observation time minus the source time and d the distance between the
observation and source points.  Sources are objects with a vectorized
source(t, x), an envelope_radius(center, tail_cutoff) and a
time_window(tail_cutoff); fields and pulses both qualify.
"""

from collections import namedtuple
import cmath
import csv
import logging
import math

import numpy

from . import RETARDED, UNBIASED, _utils, quadrature
from .errors import DomainError, PreconditionError, SingularityError
from .fields import Bias
from .ndgeom import Dimension


class GreenSample(namedtuple("GreenSample", "tau d value")):
    """One pointwise value of a Green function."""

    def __new__(cls, tau, d, value):
        return super(GreenSample, cls).__new__(
            cls, float(tau), float(d), float(value))

    def __init__(self, *args, **kwargs):
        if self.d < 0:
            raise DomainError("d", self.d, "distances are non-negative")


class PulseSource(
        namedtuple("PulseSource",
                   "amplitude sigma_t sigma_x emit_time emit_center")):
    """A separable Gaussian pulse, concentrated in space and time.

    f(t, x) = A exp(-(t - t_e)^2 / 2 sigma_t^2)
                exp(-|x - x_e|^2 / 2 sigma_x^2)
    """

    DEFAULT_DISTANCE = 5.0

    @classmethod
    def default(cls, n):
        return cls(1.0, 1.0, 0.25, 0.0, numpy.zeros(n))

    @classmethod
    def default_observer(cls, n):
        """Return the observation point DEFAULT_DISTANCE from the pulse."""
        x_star = numpy.zeros(n)
        x_star[0] = cls.DEFAULT_DISTANCE
        return x_star

    def __new__(cls, amplitude, sigma_t, sigma_x, emit_time, emit_center):
        return super(PulseSource, cls).__new__(
            cls, float(amplitude), float(sigma_t), float(sigma_x),
            float(emit_time), _utils.as_tuple(emit_center))

    def __init__(self, *args, **kwargs):
        if not self.sigma_t > 0:
            raise DomainError("sigma_t", self.sigma_t, "must be positive")
        if not self.sigma_x > 0:
            raise DomainError("sigma_x", self.sigma_x, "must be positive")

    @property
    def dimension(self):
        return len(self.emit_center)

    def source(self, t, x):
        dt = numpy.asarray(t, dtype=float) - self.emit_time
        dx = numpy.asarray(x, dtype=float) - numpy.asarray(self.emit_center)
        return self.amplitude * numpy.exp(
            -dt * dt / (2.0 * self.sigma_t ** 2) -
            numpy.sum(dx * dx, axis=-1) / (2.0 * self.sigma_x ** 2))

    def envelope_radius(self, center, tail_cutoff):
        offset = numpy.linalg.norm(
            numpy.asarray(self.emit_center) - _utils.as_vector(center))
        return float(offset) + self.sigma_x * math.sqrt(
            2.0 * math.log(1.0 / tail_cutoff)) + 2.0

    def time_window(self, tail_cutoff):
        half = self.sigma_t * math.sqrt(2.0 * math.log(1.0 / tail_cutoff))
        return self.emit_time - half, self.emit_time + half

    def integral(self):
        """Return the integral of f over all of space-time."""
        n = self.dimension
        return (self.amplitude * math.sqrt(2.0 * math.pi) * self.sigma_t *
                (math.sqrt(2.0 * math.pi) * self.sigma_x) ** n)

    def arrival_time(self, x_star):
        """Return the time the pulse peak reaches x* at wave speed 1."""
        return self.emit_time + float(numpy.linalg.norm(
            _utils.as_vector(x_star) - numpy.asarray(self.emit_center)))

    def fwhm(self):
        """Return the full width at half maximum of the emitted pulse."""
        return 2.0 * math.sqrt(2.0 * math.log(2.0)) * self.sigma_t


def _check_bias(bias):
    bias = Bias(bias)
    if bias == UNBIASED:
        raise PreconditionError("Green functions need a nonzero bias")
    return bias


def green_closed_form(n, bias, tau, d):
    """Return G(tau, d) for n=1 or n=2.

    n=1: 1/2 H(-lam tau - d)
    n=2: H(-lam tau - d) / (2 pi sqrt(tau^2 - d^2))

    H(s) is 1 for s > 0 and 0 otherwise.
    """
    n = Dimension(n)
    if n not in (1, 2):
        raise DomainError("dimension", n, "closed forms exist for n=1, 2")
    bias = _check_bias(bias)
    if d < 0:
        raise DomainError("d", d, "distances are non-negative")
    inside = -bias * tau - d > 0
    if n == 1:
        return 0.5 if inside else 0.0
    if abs(tau) == d:
        raise SingularityError("the 2-d Green function", (tau, d))
    if not inside:
        return 0.0
    return 1.0 / (2.0 * math.pi * math.sqrt(tau * tau - d * d))


def green_samples(n, bias, taus, d):
    """Return a GreenSample for each tau at the distance d."""
    return [GreenSample(tau, d, green_closed_form(n, bias, tau, d))
            for tau in taus]


def _unit_rule(spec, graded):
    """Return nodes/weights on [0, 1], graded toward 0 if asked."""
    if graded:
        inner = spec.replace(split_radius=1.0 / 8.0)
        return quadrature.radial_rule(0.0, 1.0, inner)
    x, w = quadrature.gauss_legendre(spec.radial_order)
    edges = numpy.linspace(0.0, 1.0, spec.radial_panels + 1)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        nodes.append(a + 0.5 * (b - a) * (x + 1.0))
        weights.append(0.5 * (b - a) * w)
    return numpy.concatenate(nodes), numpy.concatenate(weights)


def _delay_range(bias, t0, window):
    """Return the range of delays rho >= 0 for which t0 + lam rho lies
    within the source's time window."""
    lo, hi = window
    if bias == RETARDED:
        return t0 - hi, t0 - lo
    return lo - t0, hi - t0


def _dalembert_integrand(bias, f, t0, x_star, spec):
    """Return x -> 1/2 integral over s >= 0 of f(t0 + lam(d + s), x)."""
    nodes, weights = _unit_rule(spec, graded=False)
    rho_lo, rho_hi = _delay_range(bias, t0, f.time_window(spec.tail_cutoff))
    x_star = numpy.asarray(x_star)

    def g(points):
        d = numpy.abs(points[:, 0] - x_star[0])
        s_lo = numpy.maximum(rho_lo - d, 0.0)
        s_hi = numpy.maximum(rho_hi - d, s_lo)
        width = s_hi - s_lo
        s = s_lo[:, None] + width[:, None] * nodes[None, :]
        times = t0 + int(bias) * (d[:, None] + s)
        values = f.source(times.ravel(), numpy.repeat(points, len(nodes), 0))
        values = values.reshape(len(points), len(nodes))
        return 0.5 * width * numpy.dot(values, weights)

    return g


def _cone_integrand(bias, f, t0, x_star, spec):
    """Return x -> integral over rho >= d of f(t0 + lam rho, x) /
    (2 pi sqrt(rho^2 - d^2)), with rho = sqrt(u^2 + d^2) so that the
    square-root singularity at the cone edge becomes the smooth
    1 / sqrt(u^2 + d^2)."""
    nodes, weights = _unit_rule(spec, graded=True)
    rho_lo, rho_hi = _delay_range(bias, t0, f.time_window(spec.tail_cutoff))
    x_star = numpy.asarray(x_star)

    def g(points):
        rel = points - x_star
        d = numpy.sqrt(numpy.sum(rel * rel, axis=1))
        lo = numpy.maximum(rho_lo, d)
        hi = numpy.maximum(rho_hi, lo)
        u_lo = numpy.sqrt(lo * lo - d * d)
        u_hi = numpy.sqrt(hi * hi - d * d)
        width = u_hi - u_lo
        u = u_lo[:, None] + width[:, None] * nodes[None, :]
        rho = numpy.sqrt(u * u + (d * d)[:, None])
        times = t0 + int(bias) * rho
        values = f.source(times.ravel(), numpy.repeat(points, len(nodes), 0))
        values = values.reshape(len(points), len(nodes)) / rho
        return width * numpy.dot(values, weights) / (2.0 * math.pi)

    return g


def retarded_potential(n, bias, f, t0, x_star, spec, center=None):
    """Return the forced solution psi(t0, x*) = integral of G f.

    n=3: 1/(4 pi) integral of f(t0 + lam |x'|, x) / |x'| dv (the delta of
         the Green function collapses the time integral).
    n=2: integral over the inside of the light cone of G f.
    n=1: 1/2 the integral of f over the light cone.

    The spatial quadrature is centred on center (x* by default) and
    truncated at the source's envelope radius about it.
    """
    n = Dimension(n)
    if n > 3:
        raise DomainError("dimension", n, "expected n <= 3")
    bias = _check_bias(bias)
    x_star = _utils.as_vector(x_star, n, "x_star")
    if f.dimension != n:
        raise DomainError("dimension", n, "the source has {}".format(
            f.dimension))
    if center is None:
        center = x_star
    center = _utils.as_vector(center, n, "center")
    radius = f.envelope_radius(center, spec.tail_cutoff)
    if radius is None:
        raise PreconditionError("the source has no decaying envelope")

    if n == 3:
        def g(points):
            rel = points - x_star
            r = numpy.sqrt(numpy.sum(rel * rel, axis=1))
            return f.source(t0 + int(bias) * r, points) / (4.0 * math.pi * r)
    elif n == 2:
        g = _cone_integrand(bias, f, t0, x_star, spec)
    else:
        g = _dalembert_integrand(bias, f, t0, x_star, spec)
    value = quadrature.integrate_ball(n, g, radius, center, spec)
    logging.debug("retarded potential n={} t0={}: {!r}".format(n, t0, value))
    return value


def freq_green(n, bias, omega, d, gamma=None):
    """Return the frequency-domain Green function.

    n=3: exp(i lam omega d) / (4 pi d), of modulus 1/(4 pi d) for every
         omega, so the transfer is dispersionless.
    n=1: (i lam / 2) exp(i lam omega d) / (omega + i lam gamma), the
         transform of the Green function regularized with exp(-gamma s).
    """
    n = Dimension(n)
    bias = _check_bias(bias)
    if n == 3:
        if not d > 0:
            raise SingularityError("the 3-d frequency kernel", d)
        return cmath.exp(1j * bias * omega * d) / (4.0 * math.pi * d)
    if n == 1:
        if gamma is None or not gamma > 0:
            raise PreconditionError(
                "the 1-d frequency kernel needs gamma > 0")
        return (0.5j * bias * cmath.exp(1j * bias * omega * d) /
                (omega + 1j * bias * gamma))
    raise DomainError("dimension", n, "expected n=1 or n=3")


def freq_green_numeric(bias, omega, d, gamma, spec):
    """Return the 1-d kernel by direct Fourier integration.

    The integral of 1/2 exp(-gamma s) H(s) exp(-i omega tau) over tau,
    with s = -lam tau - d, truncated where exp(-gamma s) < tail_cutoff.
    """
    bias = _check_bias(bias)
    if not gamma > 0:
        raise PreconditionError("the 1-d frequency kernel needs gamma > 0")
    length = math.log(1.0 / spec.tail_cutoff) / gamma
    panels = max(spec.radial_panels,
                 int(math.ceil(length * max(1.0, abs(omega)) / 2.0)))
    x, w = quadrature.gauss_legendre(spec.radial_order)
    width = length / panels
    s = (numpy.arange(panels)[:, None] + 0.5 * (x[None, :] + 1.0)) * width
    weights = numpy.broadcast_to(0.5 * width * w, s.shape)
    tau = -bias * (s + d)
    phase = -omega * tau
    amplitude = 0.5 * numpy.exp(-gamma * s) * weights
    real = _utils.fsum(amplitude * numpy.cos(phase))
    imag = _utils.fsum(amplitude * numpy.sin(phase))
    return complex(real, imag)


class DispersionProfile(
        namedtuple("DispersionProfile",
                   "dimension samples references reference_plateau")):
    """The retarded response at x* sampled at a list of times.

    samples is a list of (t, value) pairs.  references holds the
    comparison curve: the delayed, attenuated pulse for n=3, the
    plateau 1/2 of the integral of f for n=1, and None for n=2.
    """

    def peak(self):
        return max(value for _, value in self.samples)

    def value_at(self, t):
        for sample_t, value in self.samples:
            if sample_t == t:
                return value
        raise DomainError("t", t, "not sampled")

    def fwhm(self):
        """Return the full width at half maximum of the sampled profile."""
        return full_width_half_maximum(self.samples)

    def write_csv(self, stream):
        """Write the profile as CSV with a t,value,reference header."""
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["t", "value", "reference"])
        for (t, value), reference in zip(self.samples, self.references):
            writer.writerow([repr(t), repr(value),
                             "" if reference is None else repr(reference)])


def full_width_half_maximum(samples):
    """Return the FWHM of a single-peaked list of (t, value) samples,
    interpolating linearly between the samples."""
    times = numpy.array([t for t, _ in samples])
    values = numpy.array([v for _, v in samples])
    top = int(numpy.argmax(values))
    half = 0.5 * values[top]

    def crossing(indices):
        previous = top
        for k in indices:
            if values[k] < half:
                t0, t1 = times[k], times[previous]
                v0, v1 = values[k], values[previous]
                return t0 + (half - v0) * (t1 - t0) / (v1 - v0)
            previous = k
        raise DomainError("samples", len(samples),
                          "the profile never drops to half its peak")

    left = crossing(range(top - 1, -1, -1))
    right = crossing(range(top + 1, len(values)))
    return right - left


def pulse_plateau(pulse):
    """Return 1/2 the space-time integral of the pulse, the late-time
    value of the 1-d response."""
    return 0.5 * pulse.integral()


def delayed_pulse(pulse, x_star, t):
    """Return the n=3 comparison: the pulse's spatial mass times its
    time profile delayed by d, attenuated by 1/(4 pi d)."""
    d = pulse.arrival_time(x_star) - pulse.emit_time
    mass = pulse.amplitude * (math.sqrt(2.0 * math.pi) * pulse.sigma_x) ** 3
    dt = t - pulse.emit_time - d
    return (mass / (4.0 * math.pi * d) *
            math.exp(-dt * dt / (2.0 * pulse.sigma_t ** 2)))


def dispersion_profile(n, pulse, x_star, times, spec):
    """Return the retarded response of the pulse at x* for each time.

    Only the retarded response is profiled; advanced potentials stay
    available through retarded_potential.
    """
    n = Dimension(n)
    plateau = pulse_plateau(pulse) if n == 1 else None
    samples, references = [], []
    for t in times:
        value = retarded_potential(
            n, RETARDED, pulse, t, x_star, spec, center=pulse.emit_center)
        samples.append((float(t), value))
        if n == 3:
            references.append(delayed_pulse(pulse, x_star, t))
        else:
            references.append(plateau)
    return DispersionProfile(int(n), samples, references, plateau)
