# Copyright 2016 Canonical Limited.  All rights reserved.


class WaveSidfError(Exception):
    """The base class for all errors raised by wavesidf."""


class DomainError(WaveSidfError):
    """An argument lies outside the domain of the operation."""

    def __init__(self, name, value, reason=None):
        """
        @param name: The name of the offending argument.
        @param value: The rejected value.
        @param reason: An optional explanation.
        """
        msg = "invalid {} {!r}".format(name, value)
        if reason:
            msg = "{} ({})".format(msg, reason)
        super(DomainError, self).__init__(msg)
        self.name = name
        self.value = value
        self.reason = reason


class SingularityError(WaveSidfError):
    """Evaluation was requested on a pole, log divergence or light cone."""

    def __init__(self, what, where):
        msg = "{} is singular at {!r}".format(what, where)
        super(SingularityError, self).__init__(msg)
        self.what = what
        self.where = where


class PreconditionError(WaveSidfError):
    """The inputs are valid individually but the operation can't apply."""

    def __init__(self, reason):
        super(PreconditionError, self).__init__(reason)
        self.reason = reason


class IntegrationError(WaveSidfError):
    """A quadrature failed.

    Either the integrand produced a non-finite value (point is set)
    or the improper integral did not appear to converge.
    """

    def __init__(self, reason, point=None):
        msg = reason
        if point is not None:
            msg = "{} at {!r}".format(reason, point)
        super(IntegrationError, self).__init__(msg)
        self.reason = reason
        self.point = point


class WorkBudgetError(IntegrationError):
    """The projected number of integrand evaluations is too large."""

    def __init__(self, projected, budget):
        reason = ("projected {} integrand evaluations exceeds "
                  "the budget of {}").format(projected, budget)
        super(WorkBudgetError, self).__init__(reason)
        self.projected = projected
        self.budget = budget


class ConfigError(WaveSidfError):
    """A run configuration or a field/quadrature document is invalid."""

    def __init__(self, source, reason):
        """
        @param source: Where the bad configuration came from (a filename,
            an option name or a document key).
        @param reason: What is wrong with it.
        """
        msg = "bad configuration in {}: {}".format(source, reason)
        super(ConfigError, self).__init__(msg)
        self.source = source
        self.reason = reason
