# Copyright 2016 Canonical Limited.  All rights reserved.
"""Unit tests, one module per wavesidf module.  Quadrature-backed tests
use wavesidf.testing.COARSE_SPEC to stay fast."""
