# Copyright 2016 Canonical Limited.  All rights reserved.

from .errors import (
    WaveSidfError, DomainError, SingularityError, PreconditionError,
    IntegrationError, WorkBudgetError, ConfigError)


__all__ = [
    "__version__", "MAX_DIMENSION", "RETARDED", "UNBIASED", "ADVANCED",
    # errors
    "WaveSidfError", "DomainError", "SingularityError", "PreconditionError",
    "IntegrationError", "WorkBudgetError", "ConfigError",
    ]


__version__ = "0.1.0"


# Gamma recurrences and unit-sphere constants are only computed up to here.
MAX_DIMENSION = 32

RETARDED = -1
UNBIASED = 0
ADVANCED = 1
