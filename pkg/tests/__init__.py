# Copyright 2016 Canonical Limited.  All rights reserved.
"""End-to-end checks of the wavesidf command line and its numerics.

These run at the default quadrature orders and take minutes; the unit
tests under wavesidf/tests stay fast.
"""

import os

from testresources import OptimisingTestSuite


def load_tests(loader, standard_tests, pattern):
    this_dir = os.path.dirname(__file__)
    acceptance_tests = loader.discover(
        start_dir=this_dir, pattern=pattern or "test_*.py",
        top_level_dir=os.path.dirname(this_dir))
    standard_tests.addTests(acceptance_tests)
    # Share the logger and workdir resources across test cases.
    return OptimisingTestSuite(standard_tests)
