# Copyright 2016 Canonical Limited.  All rights reserved.

import json
import os.path

import numpy
from fixtures import Fixture
from twisted.python import log

from wavesidf import RETARDED
from wavesidf.fields import GaussianField
from wavesidf.quadrature import QuadratureSpec
from wavesidf.sidf import SidfContext


# Fast enough for unit tests, accurate to about 1e-7 on the default field.
COARSE_SPEC = QuadratureSpec(
    radial_panels=12, radial_order=12, angular_order=None, graded_levels=24)


def default_context(n, bias=RETARDED, t0=0.0):
    """Return the observation event at the origin."""
    return SidfContext(t0, bias, numpy.zeros(n))


def default_field(ctx):
    """Return the default Gaussian field for the context."""
    return GaussianField.default(ctx.t0, ctx.x_star)


def random_points(rng, n, count, rmin, rmax, center=None):
    """Return count points with rmin <= |x - center| <= rmax.

    @param rng: A numpy RandomState.
    """
    if center is None:
        center = numpy.zeros(n)
    directions = rng.normal(size=(count, n))
    directions /= numpy.linalg.norm(directions, axis=1)[:, None]
    radii = rng.uniform(rmin, rmax, size=count)
    return numpy.asarray(center) + radii[:, None] * directions


def write_document(dirname, data, filename="doc.json"):
    """Write a JSON document to disk and return its path."""
    filename = os.path.join(dirname, filename)
    with open(filename, "w") as fd:
        json.dump(data, fd)
    return filename


class CountingField(object):
    """Wrap a field, recording every vectorized call made to it."""

    METHODS = ("value", "d_t", "d_tt", "d_x", "d_xx", "source")

    def __init__(self, field, calls=None):
        if calls is None:
            calls = []
        self.calls = calls
        self.field = field

    @property
    def dimension(self):
        return self.field.dimension

    @property
    def evaluations(self):
        """Return the total number of points evaluated."""
        return sum(count for _, count in self.calls)

    def envelope_radius(self, center, tail_cutoff):
        return self.field.envelope_radius(center, tail_cutoff)

    def time_window(self, tail_cutoff):
        return self.field.time_window(tail_cutoff)

    def __getattr__(self, name):
        if name not in self.METHODS:
            raise AttributeError(name)
        method = getattr(self.field, name)

        def counted(t, x):
            self.calls.append((name, len(numpy.atleast_1d(t))))
            return method(t, x)

        return counted


class TwistedLogFixture(Fixture):
    """Silence twisted's default error observer and collect error events."""

    def _setUp(self):
        self.errors = []
        default = getattr(log, "defaultObserver", None)
        if default is not None:
            try:
                default.stop()
            except ValueError:
                pass
            else:
                self.addCleanup(default.start)
        log.addObserver(self._observe)
        self.addCleanup(log.removeObserver, self._observe)

    def _observe(self, event):
        if event.get("isError"):
            self.errors.append(event)
