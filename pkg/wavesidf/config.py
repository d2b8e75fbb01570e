# Copyright 2016 Canonical Limited.  All rights reserved.

from collections import namedtuple
import io
import json
import os
import os.path

import yaml

from . import RETARDED, _utils
from .errors import ConfigError, WaveSidfError
from .fields import Bias, ConstantField, GaussianField, ZeroField
from .green import PulseSource
from .ndgeom import Dimension
from .quadrature import QuadratureSpec
from .sidf import APOSTERIORI_KINDS


COMMANDS = ("geom", "verify", "green", "dispersion", "sidf")
VERIFY_TARGETS = ("harmonicity", "flux", "layer", "symmetric", "ball",
                  "sidf", "aposteriori")
FORMATS = ("json", "csv")
DEFAULT_FIELD = "default"

FIELD_KEYS = {
    "gaussian": ("amplitude", "alpha", "beta", "t_center", "x_center"),
    "pulse": ("amplitude", "sigma_t", "sigma_x", "emit_time", "emit_center"),
    "constant": ("value",),
    "zero": (),
    }


def load_document(path):
    """Return the parsed contents of a JSON or YAML document.

    @param path: The filename of the document.
    """
    try:
        with open(path) as fd:
            return yaml.safe_load(fd)
    except (IOError, OSError) as error:
        raise ConfigError(path, "could not be read ({})".format(
            error.strerror or error))
    except yaml.YAMLError as error:
        raise ConfigError(path, "could not be parsed ({})".format(error))


def field_from_dict(data, t0, x_star, source="field"):
    """Return the field described by a field document.

    Missing gaussian keys fall back to the default field for the
    observation event (t0, x*); missing pulse keys fall back to the
    default pulse.

    @param data: The parsed document, a mapping with a "type" key.
    @param t0: The observation time.
    @param x_star: The observation point.
    @param source: Where the document came from, for error messages.
    """
    if not hasattr(data, "items"):
        raise ConfigError(source, "expected a mapping")
    data = dict(data)
    kind = data.pop("type", "gaussian")
    if kind not in FIELD_KEYS:
        raise ConfigError(source, "unknown field type {!r}".format(kind))
    unknown = sorted(set(data) - set(FIELD_KEYS[kind]))
    if unknown:
        raise ConfigError(
            source, "unknown keys {}".format(", ".join(unknown)))

    n = len(x_star)
    try:
        if kind == "zero":
            return ZeroField(n)
        if kind == "constant":
            return ConstantField(float(data.get("value", 0.0)), n)
        if kind == "pulse":
            values = PulseSource.default(n)._asdict()
        else:
            values = GaussianField.default(t0, x_star)._asdict()
        values.update(data)
        if kind == "pulse":
            field = PulseSource(**values)
            center = field.emit_center
        else:
            field = GaussianField(**values)
            center = field.x_center
    except (TypeError, ValueError, WaveSidfError) as error:
        raise ConfigError(source, str(error))
    if len(center) != n:
        raise ConfigError(
            source, "the field has {} coordinates, expected {}".format(
                len(center), n))
    return field


def load_field(path, t0, x_star):
    """Return the field in the named document ("default" for the default)."""
    if path is None or path == DEFAULT_FIELD:
        return GaussianField.default(t0, x_star)
    return field_from_dict(load_document(path), t0, x_star, source=path)


def load_quadrature(path):
    """Return the QuadratureSpec overrides in the named document."""
    if path is None:
        return QuadratureSpec()
    return QuadratureSpec.from_dict(load_document(path), source=path)


class RunConfig(
        namedtuple("RunConfig",
                   "command target dimension bias field_path quad_path "
                   "tolerance output_path output_format t0 x_star "
                   "r r1 r2 h kind taus d refine clobber")):
    """Everything a single invocation needs, validated up front.

    tolerance, x_star and output_format may be left as None; the
    command then supplies its own default (the per-check tolerance, the
    origin or the default observer, JSON or for dispersion CSV).
    """

    def __new__(cls, command, target=None, dimension=3, bias="retarded",
                field_path=None, quad_path=None, tolerance=None,
                output_path=None, output_format=None, t0=0.0,
                x_star=None, r=None, r1=None, r2=None, h=None, kind=None,
                taus=None, d=None, refine=False, clobber=False):
        """
        @param command: One of COMMANDS.
        @param target: The verify target (one of VERIFY_TARGETS), or
            "eval" for the green command.
        @param bias: A bias name or -1/0/+1.
        @param x_star: The observation point, if not the default one.
        @param taus: The time lags at which to evaluate a Green function.
        """
        try:
            dimension = Dimension(int(dimension))
            if isinstance(bias, str):
                bias = Bias.from_name(bias)
            else:
                bias = Bias(bias)
            if x_star is not None:
                x_star = _utils.as_tuple(x_star)
            if tolerance is not None:
                tolerance = float(tolerance)
            if taus is not None:
                taus = tuple(float(tau) for tau in taus)
        except (TypeError, ValueError) as error:
            raise ConfigError("options", str(error))
        except WaveSidfError as error:
            if isinstance(error, ConfigError):
                raise
            raise ConfigError("options", str(error))
        if output_format is None:
            output_format = "csv" if command == "dispersion" else "json"
        return super(RunConfig, cls).__new__(
            cls, command, target, dimension, bias, field_path, quad_path,
            tolerance, output_path, output_format, float(t0), x_star,
            r, r1, r2, h, kind, taus, d, bool(refine), bool(clobber))

    def __init__(self, *args, **kwargs):
        if self.command not in COMMANDS:
            raise ConfigError("command", "unknown command {!r}".format(
                self.command))
        if self.output_format not in FORMATS:
            raise ConfigError("--format", "expected json or csv")
        if (self.output_format == "csv" and
                self.command not in ("dispersion", "green")):
            raise ConfigError(
                "--format", "csv is only available for dispersion and green")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ConfigError("--tol", "must be positive")
        if self.x_star is not None and len(self.x_star) != self.dimension:
            raise ConfigError(
                "--x-star", "expected {} coordinates".format(self.dimension))
        for name in ("r", "r1", "r2", "h"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ConfigError("--" + name, "must be positive")
        if self.d is not None and not self.d >= 0:
            raise ConfigError("--d", "must not be negative")
        getattr(self, "_check_" + self.command)()

    @property
    def observer(self):
        """Return x*, the origin unless given."""
        if self.x_star is None:
            return (0.0,) * self.dimension
        return self.x_star

    def _needs_bias(self):
        if self.bias == 0:
            raise ConfigError(
                "--bias", "unbiased is not allowed for this command")

    def _needs_low_dimension(self):
        if self.dimension > 3:
            raise ConfigError(
                "--dim", "volume quadrature supports n <= 3")

    def _check_geom(self):
        pass

    def _check_verify(self):
        if self.target not in VERIFY_TARGETS:
            raise ConfigError(
                "verify", "unknown target {!r}".format(self.target))
        if self.target in ("harmonicity", "flux"):
            return
        self._needs_bias()
        self._needs_low_dimension()
        if self.target in ("layer", "symmetric"):
            r1 = 0.0 if self.r1 is None else self.r1
            if self.r2 is not None and not r1 < self.r2:
                raise ConfigError(
                    "verify " + self.target, "expected r1 < r2")
        elif self.target == "aposteriori":
            if self.kind not in APOSTERIORI_KINDS:
                raise ConfigError("--kind", "expected one of {}".format(
                    ", ".join(APOSTERIORI_KINDS)))

    def _check_green(self):
        if self.target != "eval":
            raise ConfigError("green", "unknown target {!r}".format(
                self.target))
        self._needs_bias()
        if self.dimension not in (1, 2):
            raise ConfigError("--dim", "Green functions need n=1 or n=2")
        if not self.taus:
            raise ConfigError("green eval", "--tau is required")
        if self.d is None:
            raise ConfigError("green eval", "--d is required")

    def _check_dispersion(self):
        if self.bias != RETARDED:
            raise ConfigError(
                "--bias", "dispersion profiles are retarded only")
        self._needs_low_dimension()

    def _check_sidf(self):
        self._needs_bias()
        self._needs_low_dimension()


def _prepare_outdir(filename, clobber):
    """Create the output file's directory, if necessary.

    @param filename: The report's filename.
    @param clobber: Allow the file to already exist.
    """
    dirname = os.path.dirname(filename)
    if dirname and not os.path.exists(dirname):
        os.makedirs(dirname)
        return
    if not clobber and os.path.exists(filename):
        raise ConfigError(
            filename, "report file already exists (use --clobber)")


def dump_report(data):
    """Return the JSON text of a report; keys are sorted so that the same
    inputs always give the same bytes."""
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def write_text(text, filename, clobber=False):
    """Write report text to disk.

    @param text: The rendered report.
    @param filename: The file to write.
    @param clobber: Allow the file to already exist.
    """
    try:
        _prepare_outdir(filename, clobber)
        with open(filename, "w", newline="") as fd:
            fd.write(text)
    except (IOError, OSError) as error:
        raise ConfigError(filename, "could not be written ({})".format(
            error.strerror or error))
    return filename


def write_report(data, filename, clobber=False):
    """Write a JSON report to disk.

    @param data: A JSON-serializable dict.
    @param filename: The file to write.
    @param clobber: Allow the file to already exist.
    """
    return write_text(dump_report(data), filename, clobber)


def write_csv(profile, filename, clobber=False):
    """Write a DispersionProfile as CSV."""
    stream = io.StringIO()
    profile.write_csv(stream)
    return write_text(stream.getvalue(), filename, clobber)
