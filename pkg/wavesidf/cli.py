# Copyright 2016 Canonical Limited.  All rights reserved.

"""The wavesidf command line.

    wavesidf geom --dim 3
    wavesidf verify sidf --dim 3 --bias retarded --tol 1e-4
    wavesidf verify flux --dim 2 --r 0.5
    wavesidf green eval --dim 2 --tau 3,4,5 --d 2
    wavesidf dispersion --dim 3 --out profile.csv
    wavesidf sidf --dim 2 --bias advanced --r2 3

Exit codes: 0 every residual within tolerance, 1 some residual above
it, 2 invalid configuration, 3 numerical failure.  For nonzero codes a
JSON diagnostic is written to stderr.
"""

from collections import namedtuple
import io
import json
import logging
import math
import sys
import time

import numpy
from twisted.python import log, usage

from . import (
    __version__, _utils, config, green, kernels, ndgeom, quadrature, sidf)
from .errors import (
    ConfigError, DomainError, IntegrationError, PreconditionError,
    SingularityError)


EXIT_OK = 0
EXIT_RESIDUAL = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

CONFIG_ERRORS = (ConfigError, DomainError, PreconditionError)
NUMERICAL_ERRORS = (IntegrationError, SingularityError)

DEFAULT_TOLERANCES = {
    "harmonicity": 1e-4,
    "flux": 1e-8,
    "layer": 1e-6,
    "symmetric": 1e-6,
    "ball": 1e-5,
    "sidf": 1e-3,
    "recover_f_3d": 5e-2,
    "omega1_box_1d": 1e-3,
    "omega0_box_1d": 1e-3,
    }

# Relative residuals are scaled by max(|psi(t0, x*)|, SCALE_FLOOR).
SCALE_FLOOR = 1e-3
HARMONICITY_POINTS = 100
HARMONICITY_SEED = 0
FLUX_RADII = (0.25, 1.0, 4.0)
LAYER_RADII = (0.5, 2.5)
BALL_RADII = (2.0, 3.0, 4.0)
DISPERSION_TIMES = (-3.0, 20.0, 0.5)

# The 2-d profile integrates a light-cone kernel at every sample.
DISPERSION_SPECS = {
    2: quadrature.QuadratureSpec(
        radial_panels=12, radial_order=12, graded_levels=24),
    }


def _floats(value):
    """Parse a comma-separated list of numbers."""
    try:
        return [float(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise usage.UsageError("expected numbers, got {!r}".format(value))


class _CommandOptions(usage.Options):

    optFlags = [
        ["clobber", None, "Overwrite an existing --out file."],
        ]
    optParameters = [
        ["dim", "n", 3, "The spatial dimension.", int],
        ["bias", None, "retarded", "retarded, advanced or unbiased."],
        ["tol", None, None, "The residual tolerance.", float],
        ["field", None, config.DEFAULT_FIELD, "A field document."],
        ["quad", None, None, "A quadrature document."],
        ["out", "o", None, "Write the report here instead of stdout."],
        ["format", None, None, "json or csv."],
        ["t0", None, 0.0, "The observation time.", float],
        ["x-star", None, None, "The observation point, e.g. 0,0,0.",
         _floats],
        ]

    def run_config(self, command, target=None):
        """Return the RunConfig for these options."""
        return config.RunConfig(
            command, target=target, dimension=self["dim"],
            bias=self["bias"], field_path=self["field"],
            quad_path=self["quad"], tolerance=self["tol"],
            output_path=self["out"], output_format=self["format"],
            t0=self["t0"], x_star=self["x-star"], clobber=self["clobber"],
            **self.extra())

    def extra(self):
        return {}


class _TargetedOptions(usage.Options):
    """A command whose first argument names what to run, e.g. verify flux.

    The target's own options follow it on the command line.
    """

    def postOptions(self):
        if self.subCommand is None:
            raise usage.UsageError("{} needs one of: {}".format(
                self.command, ", ".join(cmd for cmd, _, _, _ in
                                        self.subCommands)))

    def run_config(self, command):
        return self.subOptions.run_config(command, target=self.subCommand)


class GeomOptions(_CommandOptions):
    synopsis = "geom --dim N"


class VerifyTargetOptions(_CommandOptions):

    optFlags = [
        ["refine", None, "Also report the change under doubled orders."],
        ]
    optParameters = [
        ["r", None, None, "A sphere radius.", float],
        ["r1", None, None, "The inner layer radius.", float],
        ["r2", None, None, "The outer layer or ball radius.", float],
        ["h", None, None, "The finite-difference step.", float],
        ["kind", None, None, "The a-posteriori check: {}.".format(
            ", ".join(sidf.APOSTERIORI_KINDS))],
        ]

    def extra(self):
        return dict(r=self["r"], r1=self["r1"], r2=self["r2"], h=self["h"],
                    kind=self["kind"], refine=self["refine"])


class VerifyOptions(_TargetedOptions):
    synopsis = "verify {} [options]".format("|".join(config.VERIFY_TARGETS))

    command = "verify"
    subCommands = [
        ["harmonicity", None, VerifyTargetOptions,
         "The FD Laplacian of eta at random points."],
        ["flux", None, VerifyTargetOptions,
         "The surface flux of grad eta."],
        ["layer", None, VerifyTargetOptions,
         "The four Omega terms on a layer."],
        ["symmetric", None, VerifyTargetOptions,
         "Omega^(3)(psi, eta) against the (eta, psi) terms."],
        ["ball", None, VerifyTargetOptions, "The formula on balls."],
        ["sidf", None, VerifyTargetOptions,
         "The formula over all of space."],
        ["aposteriori", None, VerifyTargetOptions,
         "A differential check, chosen with --kind."],
        ]


class GreenEvalOptions(_CommandOptions):

    optParameters = [
        ["tau", None, None, "Observation minus source times.", _floats],
        ["d", None, None, "The source distance.", float],
        ]

    def extra(self):
        return dict(taus=self["tau"], d=self["d"])


class GreenOptions(_TargetedOptions):
    synopsis = "green eval --dim 1|2 --tau T1,T2,... --d D"

    command = "green"
    subCommands = [
        ["eval", None, GreenEvalOptions,
         "Sample the closed-form Green function."],
        ]


class DispersionOptions(_CommandOptions):
    synopsis = "dispersion --dim N [--times START,STOP,STEP]"

    optParameters = [
        ["times", None, None, "START,STOP,STEP of the sampled times.",
         _floats],
        ]

    def postOptions(self):
        times = self["times"] or DISPERSION_TIMES
        if len(times) != 3 or not times[2] > 0 or times[1] < times[0]:
            raise usage.UsageError("--times needs START,STOP,STEP")
        self["times"] = times


class SidfOptions(_CommandOptions):
    synopsis = "sidf --dim N [--r2 R]"

    optParameters = [
        ["r2", None, None, "Use the ball of this radius.", float],
        ]

    def extra(self):
        return dict(r2=self["r2"], refine=True)


class Options(usage.Options):
    synopsis = "wavesidf COMMAND [options]"

    optFlags = [
        ["verbose", "v", "Log the quadrature plans and terms."],
        ]
    subCommands = [
        ["geom", None, GeomOptions, "Print the geometry constants."],
        ["verify", None, VerifyOptions, "Run a residual suite."],
        ["green", None, GreenOptions, "Evaluate a Green function."],
        ["dispersion", None, DispersionOptions,
         "Sample the response to a pulse."],
        ["sidf", None, SidfOptions, "Print one full decomposition."],
        ]

    def opt_version(self):
        print(__version__)
        sys.exit(0)

    def postOptions(self):
        if self.subCommand is None:
            raise usage.UsageError("a command is required")


class Outcome(namedtuple("Outcome", "report passed first_failure csv")):
    """What a command produced: the report dict, whether every case
    passed, the first failing case and (for CSV output) the CSV text."""

    def __new__(cls, report, passed=True, first_failure=None, csv=None):
        return super(Outcome, cls).__new__(
            cls, report, passed, first_failure, csv)


def _case(label, residual, scale, tolerance, **details):
    case = {
        "case": label,
        "residual": residual,
        "scale": scale,
        "passed": abs(residual) <= tolerance * scale,
        }
    case.update(details)
    return case


def _relative_scale(value):
    return max(abs(value), SCALE_FLOOR)


def _abs_sum(values):
    return _utils.fsum([abs(v) for v in values])


def _suite(report, cases):
    failures = [case for case in cases if not case["passed"]]
    report["cases"] = cases
    report["passed"] = not failures
    report["first_failure"] = failures[0] if failures else None
    return Outcome(report, not failures, report["first_failure"])


def _context(run_config):
    return sidf.SidfContext(
        run_config.t0, run_config.bias, run_config.observer)


def _base_report(run_config, tolerance=None, spec=None):
    report = {
        "command": run_config.command,
        "target": run_config.target,
        "dimension": run_config.dimension,
        "lambda": int(run_config.bias),
        }
    if tolerance is not None:
        report["tolerance"] = tolerance
    if spec is not None:
        report["quadrature"] = spec.to_dict()
    return report


def _tolerance(run_config, key):
    if run_config.tolerance is not None:
        return run_config.tolerance
    return DEFAULT_TOLERANCES[key]


def run_geom(run_config):
    return Outcome(ndgeom.geometry_table(run_config.dimension))


def _verify_harmonicity(run_config, spec, tolerance):
    n = run_config.dimension
    rng = numpy.random.RandomState(HARMONICITY_SEED)
    cases = []
    for k in range(HARMONICITY_POINTS):
        direction = rng.normal(size=n)
        direction /= numpy.linalg.norm(direction)
        r = rng.uniform(0.5, 3.0)
        x = r * direction
        h = run_config.h or kernels.kernel_step(r)
        value = kernels.fd_laplacian(
            lambda y: kernels.eta(n, numpy.linalg.norm(y)), x, h)
        cases.append(_case("x{}".format(k), value, 1.0, tolerance,
                           x=[float(c) for c in x]))
    return cases


def _verify_flux(run_config, spec, tolerance):
    radii = [run_config.r] if run_config.r else FLUX_RADII
    cases = []
    for r in radii:
        value = kernels.flux_normalization(run_config.dimension, r, spec)
        cases.append(_case("r={}".format(r), value + 1.0, 1.0, tolerance,
                           r=r, value=value))
    return cases


def _layer_radii(run_config):
    r1 = run_config.r1 or LAYER_RADII[0]
    r2 = run_config.r2 or LAYER_RADII[1]
    if not r1 < r2:
        raise ConfigError("verify " + run_config.target, "expected r1 < r2")
    return r1, r2


def _verify_layer(run_config, spec, tolerance):
    field, ctx = _field_and_context(run_config)
    r1, r2 = _layer_radii(run_config)
    report = sidf.layer_tautology_report(
        field, ctx, run_config.dimension, r1, r2, spec)
    scale = _abs_sum(report.omega.values())
    return [_case("r1={} r2={}".format(r1, r2), report.residual, scale,
                  tolerance, report=report.to_dict())]


def _verify_symmetric(run_config, spec, tolerance):
    field, ctx = _field_and_context(run_config)
    r1, r2 = _layer_radii(run_config)
    report = sidf.symmetric_tautology_report(
        field, ctx, run_config.dimension, r1, r2, spec)
    scale = _abs_sum(list(report.omega.values()) +
                     [report.surface_terms["omega3_psi_eta"]])
    return [_case("r1={} r2={}".format(r1, r2), report.residual, scale,
                  tolerance, report=report.to_dict())]


def _verify_ball(run_config, spec, tolerance):
    field, ctx = _field_and_context(run_config)
    radii = [run_config.r2] if run_config.r2 else BALL_RADII
    cases = []
    for r2 in radii:
        report = sidf.ball_sidf_report(
            field, ctx, run_config.dimension, r2, spec,
            refine=run_config.refine)
        cases.append(_case("r2={}".format(r2), report.residual,
                           _relative_scale(report.lhs_value), tolerance,
                           report=report.to_dict()))
    return cases


def _verify_sidf(run_config, spec, tolerance):
    field, ctx = _field_and_context(run_config)
    report = sidf.boundary_free_sidf(
        field, ctx, run_config.dimension, spec, refine=run_config.refine)
    return [_case("space", report.residual,
                  _relative_scale(report.lhs_value), tolerance,
                  report=report.to_dict())]


def _verify_aposteriori(run_config, spec, tolerance):
    field, ctx = _field_and_context(run_config)
    report = sidf.aposteriori_report(
        run_config.kind, field, ctx, run_config.h, spec)
    scale = 1.0
    if run_config.kind == "recover_f_3d":
        scale = _relative_scale(report.surface_terms["reference"])
    return [_case(run_config.kind, report.residual, scale, tolerance,
                  report=report.to_dict())]


def _field_and_context(run_config):
    ctx = _context(run_config)
    field = config.load_field(
        run_config.field_path, run_config.t0, run_config.observer)
    if isinstance(field, green.PulseSource):
        raise ConfigError(run_config.field_path,
                          "a pulse has no closed-form partials")
    return field, ctx


_VERIFIERS = {
    "harmonicity": _verify_harmonicity,
    "flux": _verify_flux,
    "layer": _verify_layer,
    "symmetric": _verify_symmetric,
    "ball": _verify_ball,
    "sidf": _verify_sidf,
    "aposteriori": _verify_aposteriori,
    }


def run_verify(run_config):
    spec = config.load_quadrature(run_config.quad_path)
    key = run_config.target
    if key == "aposteriori":
        key = run_config.kind
    tolerance = _tolerance(run_config, key)
    cases = _VERIFIERS[run_config.target](run_config, spec, tolerance)
    report = _base_report(run_config, tolerance, spec)
    if run_config.target == "aposteriori":
        report["kind"] = run_config.kind
    return _suite(report, cases)


def run_green(run_config):
    samples = green.green_samples(
        run_config.dimension, run_config.bias, run_config.taus, run_config.d)
    report = _base_report(run_config)
    report["samples"] = [sample._asdict() for sample in samples]
    text = None
    if run_config.output_format == "csv":
        stream = io.StringIO()
        stream.write("tau,d,value\n")
        for sample in samples:
            stream.write("{!r},{!r},{!r}\n".format(*sample))
        text = stream.getvalue()
    return Outcome(report, csv=text)


def _pulse(run_config):
    n = run_config.dimension
    if run_config.field_path in (None, config.DEFAULT_FIELD):
        return green.PulseSource.default(n)
    pulse = config.field_from_dict(
        config.load_document(run_config.field_path), run_config.t0,
        (0.0,) * n, source=run_config.field_path)
    if not isinstance(pulse, green.PulseSource):
        raise ConfigError(run_config.field_path, "expected a pulse")
    return pulse


def _dispersion_spec(run_config):
    """Return the quadrature for a dispersion profile.

    Without --quad, dimensions listed in DISPERSION_SPECS use the coarser
    rule there.
    """
    if run_config.quad_path is None:
        spec = DISPERSION_SPECS.get(run_config.dimension)
        if spec is not None:
            return spec
    return config.load_quadrature(run_config.quad_path)


def run_dispersion(run_config, times=DISPERSION_TIMES):
    spec = _dispersion_spec(run_config)
    pulse = _pulse(run_config)
    x_star = run_config.x_star
    if x_star is None:
        x_star = green.PulseSource.default_observer(run_config.dimension)
    start, stop, step = times
    count = int(math.floor((stop - start) / step + 0.5)) + 1
    samples = [start + k * step for k in range(count)]
    profile = green.dispersion_profile(
        run_config.dimension, pulse, x_star, samples, spec)
    report = _base_report(run_config, spec=spec)
    report.update({
        "x_star": [float(c) for c in x_star],
        "samples": [list(sample) for sample in profile.samples],
        "references": profile.references,
        "reference_plateau": profile.reference_plateau,
        "peak": profile.peak(),
        })
    text = None
    if run_config.output_format == "csv":
        stream = io.StringIO()
        profile.write_csv(stream)
        text = stream.getvalue()
    return Outcome(report, csv=text)


def run_sidf(run_config):
    spec = config.load_quadrature(run_config.quad_path)
    field, ctx = _field_and_context(run_config)
    n = run_config.dimension
    if run_config.r2:
        report = sidf.ball_sidf_report(field, ctx, n, run_config.r2, spec)
        tolerance = _tolerance(run_config, "ball")
    else:
        report = sidf.boundary_free_sidf(field, ctx, n, spec)
        tolerance = _tolerance(run_config, "sidf")
    case = _case(report.theorem, report.residual,
                 _relative_scale(report.lhs_value), tolerance)
    data = report.to_dict()
    data.update(_base_report(run_config, tolerance, spec))
    data["passed"] = case["passed"]
    return Outcome(data, case["passed"], None if case["passed"] else case)


COMMANDS = {
    "geom": run_geom,
    "verify": run_verify,
    "green": run_green,
    "dispersion": run_dispersion,
    "sidf": run_sidf,
    }


def _diagnose(stderr, status, **details):
    details["status"] = status
    stderr.write(json.dumps(details, sort_keys=True) + "\n")
    return status


def _emit(outcome, run_config, stdout):
    if outcome.csv is not None:
        text = outcome.csv
    else:
        text = config.dump_report(outcome.report)
    if run_config.output_path is None:
        stdout.write(text)
        return
    config.write_text(text, run_config.output_path, run_config.clobber)


def run(run_config, stdout=None, stderr=None, **kwargs):
    """Execute the configured command and return its exit code.

    @param run_config: A validated RunConfig.
    @param stdout: Where the report goes when there is no output path.
    @param stderr: Where the diagnostic goes for nonzero exit codes.
    @param kwargs: Extra arguments for the command (the dispersion
        times).
    """
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    started = time.time()
    try:
        outcome = COMMANDS[run_config.command](run_config, **kwargs)
        if outcome.csv is None:
            outcome.report["wall_time_seconds"] = time.time() - started
        _emit(outcome, run_config, stdout)
    except CONFIG_ERRORS as error:
        log.err(error, "invalid configuration")
        return _diagnose(stderr, EXIT_CONFIG, error=type(error).__name__,
                         message=str(error))
    except NUMERICAL_ERRORS as error:
        log.err(error, "numerical failure")
        return _diagnose(stderr, EXIT_NUMERICAL, error=type(error).__name__,
                         message=str(error))
    if not outcome.passed:
        return _diagnose(stderr, EXIT_RESIDUAL,
                         error="ResidualAboveTolerance",
                         first_failure=outcome.first_failure)
    return EXIT_OK


def main(argv=None, stdout=None, stderr=None):
    """Parse the command line, run the command and return the exit code."""
    stderr = sys.stderr if stderr is None else stderr
    options = Options()
    try:
        options.parseOptions(sys.argv[1:] if argv is None else argv)
        run_config = options.subOptions.run_config(options.subCommand)
    except usage.UsageError as error:
        return _diagnose(stderr, EXIT_CONFIG, error="UsageError",
                         message=str(error))
    except ConfigError as error:
        return _diagnose(stderr, EXIT_CONFIG, error="ConfigError",
                         message=str(error))
    logging.basicConfig(
        level=logging.INFO if options["verbose"] else logging.WARNING,
        stream=stderr, format="%(levelname)s %(message)s")
    kwargs = {}
    if options.subCommand == "dispersion":
        kwargs["times"] = tuple(options.subOptions["times"])
    return run(run_config, stdout=stdout, stderr=stderr, **kwargs)


def console():
    sys.exit(main())
