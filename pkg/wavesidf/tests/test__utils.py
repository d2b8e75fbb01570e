# Copyright 2016 Canonical Limited.  All rights reserved.

import math
import unittest

import numpy

from wavesidf._utils import (
    FIRST_DERIVATIVE_STENCIL, SECOND_DERIVATIVE_STENCIL, as_points,
    as_tuple, as_vector, check_work, fsum, stencil_derivative)
from wavesidf.errors import DomainError, WorkBudgetError


class AsVectorTest(unittest.TestCase):

    def test_scalar(self):
        """A number is a vector of length 1."""
        self.assertEqual(as_vector(2).tolist(), [2.0])

    def test_length(self):
        """as_vector() checks the length if asked."""
        with self.assertRaises(DomainError) as cm:
            as_vector([1.0, 2.0], 3, "x_star")
        self.assertEqual(cm.exception.name, "x_star")

    def test_matrix(self):
        """A matrix is not a vector."""
        with self.assertRaises(DomainError):
            as_vector([[1.0], [2.0]])


class AsPointsTest(unittest.TestCase):

    def test_flat(self):
        """A flat array is reshaped into rows of n coordinates."""
        self.assertEqual(as_points([1, 2, 3, 4], 2).shape, (2, 2))
        self.assertEqual(as_points([1, 2, 3], 1).shape, (3, 1))

    def test_wrong_width(self):
        """Rows of the wrong width are refused."""
        with self.assertRaises(DomainError):
            as_points([[1.0, 2.0, 3.0]], 2)


class MiscTest(unittest.TestCase):

    def test_as_tuple(self):
        """as_tuple() returns plain floats."""
        value = as_tuple(numpy.array([1, 2]))
        self.assertEqual(value, (1.0, 2.0))
        self.assertIs(type(value[0]), float)

    def test_fsum(self):
        """fsum() is compensated, for lists and arrays alike."""
        values = [1e16, 1.0, -1e16]
        self.assertEqual(fsum(values), 1.0)
        self.assertEqual(fsum(numpy.array([values, values])), 2.0)

    def test_check_work(self):
        """check_work() passes the projection through or refuses it."""
        self.assertEqual(check_work(10, None), 10)
        self.assertEqual(check_work(10, 10), 10)
        with self.assertRaises(WorkBudgetError) as cm:
            check_work(11, 10)
        self.assertEqual((cm.exception.projected, cm.exception.budget),
                         (11, 10))


class StencilTest(unittest.TestCase):

    def samples(self, func, x, h, offsets):
        return {k: func(x + k * h) for k in offsets}

    def test_first(self):
        """The 5-point stencil differentiates quartics exactly."""
        func = lambda x: x ** 4 - 2 * x
        values = self.samples(func, 1.0, 0.5, (-2, -1, 1, 2))
        self.assertAlmostEqual(
            stencil_derivative(values, 0.5, FIRST_DERIVATIVE_STENCIL),
            2.0, places=12)

    def test_second(self):
        """The second-derivative stencil has fourth-order accuracy."""
        values = self.samples(math.sin, 0.7, 1e-2, (-2, -1, 0, 1, 2))
        self.assertAlmostEqual(
            stencil_derivative(values, 1e-2, SECOND_DERIVATIVE_STENCIL),
            -math.sin(0.7), places=8)
