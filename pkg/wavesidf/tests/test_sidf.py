# Copyright 2016 Canonical Limited.  All rights reserved.

import unittest

import numpy
from hypothesis import given, settings, strategies

from wavesidf import ADVANCED, RETARDED, UNBIASED
from wavesidf.errors import (
    DomainError, PreconditionError, SingularityError, WorkBudgetError)
from wavesidf.fields import ConstantField, ZeroField, evaluate, VALUE
from wavesidf.quadrature import ShellDomain, count_nodes
from wavesidf.sidf import (
    SidfContext, SidfReport, aposteriori_report, aposteriori_residual,
    ball_sidf_report, boundary_free_sidf, integrand, k3_integrand,
    k_integrand, layer_tautology_report, layer_tautology_residual, omega,
    omega_psi_eta, surface_term_eta_psi, surface_term_psi_eta,
    symmetric_tautology_report, symmetric_tautology_residual)
from wavesidf.testing import (
    COARSE_SPEC, CountingField, default_context, default_field,
    random_points)


def term_scale(report):
    return sum(abs(v) for v in report.omega.values())


class SidfContextTest(unittest.TestCase):

    def test_unbiased(self):
        """The forms need a nonzero bias."""
        with self.assertRaises(PreconditionError):
            SidfContext(0.0, UNBIASED, [0.0])

    def test_shifted(self):
        """shifted() moves t0 for axis 0 and x*_i otherwise."""
        ctx = SidfContext(1.0, RETARDED, [0.0, 0.0])
        self.assertEqual(ctx.shifted(0, 0.5).t0, 1.5)
        self.assertEqual(ctx.shifted(2, 0.5).x_star, (0.0, 0.5))
        self.assertEqual(ctx.dimension, 2)

    def test_domains(self):
        """The context's domains are centred on x*."""
        ctx = SidfContext(0.0, ADVANCED, [1.0, 2.0])
        self.assertEqual(ctx.layer(1.0, 2.0).center, (1.0, 2.0))
        self.assertTrue(ctx.ball(3.0).is_ball)
        self.assertTrue(ctx.space().is_space)


class IntegrandTest(unittest.TestCase):

    @settings(max_examples=30, deadline=None)
    @given(strategies.integers(1, 4), strategies.sampled_from([-1, 1]),
           strategies.integers(0, 2 ** 31 - 1))
    def test_pointwise_sum(self, n, bias, seed):
        """K0 + K1 + K2 + K3 vanishes at every point off x*."""
        rng = numpy.random.RandomState(seed)
        ctx = default_context(n, bias)
        field = default_field(ctx)
        x = random_points(rng, n, 1, 0.1, 3.0)[0]
        terms = [k_integrand(alpha, field, ctx, n, x) for alpha in (0, 1, 2)]
        terms.append(k3_integrand(field, ctx, n, x))
        scale = max(sum(abs(t) for t in terms), 1e-300)
        self.assertLessEqual(abs(sum(terms)), 1e-12 * scale)

    def test_alpha_one_vanishes_in_three_dimensions(self):
        """K1 is exactly zero at n=3."""
        ctx = default_context(3)
        field = default_field(ctx)
        for x in random_points(numpy.random.RandomState(1), 3, 10, 0.1, 3.0):
            self.assertEqual(k_integrand(1, field, ctx, 3, x), 0.0)

    def test_pole(self):
        """Every integrand is singular at x*, K1 at n=3 included."""
        for n in (1, 2, 3):
            ctx = default_context(n)
            for alpha in (0, 1, 2):
                with self.assertRaises(SingularityError):
                    k_integrand(alpha, default_field(ctx), ctx, n, [0.0] * n)

    def test_bad_alpha(self):
        """k_integrand() takes alpha 0, 1 or 2."""
        ctx = default_context(2)
        with self.assertRaises(DomainError):
            k_integrand(3, default_field(ctx), ctx, 2, [1.0, 0.0])
        with self.assertRaises(DomainError):
            integrand(4, default_field(ctx), ctx, 2)

    def test_dimension_mismatch(self):
        """The field, x* and n must agree."""
        ctx = default_context(2)
        with self.assertRaises(DomainError):
            k_integrand(0, default_field(default_context(3)), ctx, 2,
                        [1.0, 0.0])


class SurfaceTermTest(unittest.TestCase):

    def test_psi_eta_one_dimension(self):
        """In 1-d the spherical mean is the two-point mean."""
        ctx = default_context(1, ADVANCED)
        field = default_field(ctx)
        value = surface_term_psi_eta(field, ctx, 1, 0.7, COARSE_SPEC)
        expected = 0.5 * (evaluate(field, VALUE, (0.7, [0.7])) +
                          evaluate(field, VALUE, (0.7, [-0.7])))
        self.assertAlmostEqual(value, expected, places=15)

    def test_constant(self):
        """A constant field has no flux and its own mean."""
        ctx = default_context(2)
        field = ConstantField(2.0, 2)
        self.assertEqual(
            surface_term_eta_psi(field, ctx, 2, 1.5, COARSE_SPEC), 0.0)
        self.assertAlmostEqual(
            surface_term_psi_eta(field, ctx, 2, 1.5, COARSE_SPEC), 2.0,
            places=14)

    def test_far_sphere(self):
        """Far from the peak the flux term vanishes."""
        ctx = default_context(3)
        value = surface_term_eta_psi(
            default_field(ctx), ctx, 3, 20.0, COARSE_SPEC)
        self.assertLess(abs(value), 1e-18)


class OmegaTest(unittest.TestCase):

    def test_alpha_one_three_dimensions(self):
        """Omega^(1) is exactly zero at n=3."""
        ctx = default_context(3)
        value = omega(1, default_field(ctx), ctx, 3, ctx.layer(0.5, 2.0),
                      COARSE_SPEC)
        self.assertEqual(value, 0.0)

    def test_sourceless(self):
        """Omega^(0) of a field with no source is zero."""
        ctx = default_context(2)
        value = omega(0, ZeroField(2), ctx, 2, ctx.ball(2.0), COARSE_SPEC)
        self.assertEqual(value, 0.0)

    def test_ball_surface(self):
        """On a ball Omega^(3) is minus the outer surface term."""
        ctx = default_context(2)
        field = default_field(ctx)
        value = omega(3, field, ctx, 2, ctx.ball(2.0), COARSE_SPEC)
        self.assertEqual(
            value, -surface_term_eta_psi(field, ctx, 2, 2.0, COARSE_SPEC))

    def test_off_centre(self):
        """The domain must be centred on x*."""
        ctx = default_context(2)
        with self.assertRaises(DomainError):
            omega(0, default_field(ctx), ctx, 2,
                  ShellDomain.ball(1.0, [1.0, 0.0]), COARSE_SPEC)

    def test_space_needs_envelope(self):
        """Integrating over all of space needs a decaying field."""
        ctx = default_context(2)
        with self.assertRaises(PreconditionError):
            omega(0, ConstantField(1.0, 2), ctx, 2, ctx.space(),
                  COARSE_SPEC)

    def test_bias_symmetry(self):
        """With t_c = t0 Omega^(0) is the same for either bias."""
        retarded = default_context(2, RETARDED)
        advanced = default_context(2, ADVANCED)
        field = default_field(retarded)
        self.assertAlmostEqual(
            omega(0, field, retarded, 2, retarded.space(), COARSE_SPEC),
            omega(0, field, advanced, 2, advanced.space(), COARSE_SPEC),
            places=12)

    def test_evaluations(self):
        """A layer integral evaluates the source once per rule node."""
        ctx = default_context(2)
        field = CountingField(default_field(ctx))
        omega(0, field, ctx, 2, ctx.layer(0.5, 2.5), COARSE_SPEC)
        self.assertEqual(set(name for name, _ in field.calls), {"source"})
        self.assertEqual(field.evaluations,
                         count_nodes(2, 0.5, 2.5, COARSE_SPEC))

    def test_psi_eta_ball(self):
        """On a ball Omega^(3)(psi, eta) is M(r2) - psi(t0, x*)."""
        ctx = default_context(2)
        field = default_field(ctx)
        value = omega_psi_eta(field, ctx, 2, ctx.ball(2.0), COARSE_SPEC)
        expected = (surface_term_psi_eta(field, ctx, 2, 2.0, COARSE_SPEC) -
                    evaluate(field, VALUE, (0.0, [0.0, 0.0])))
        self.assertEqual(value, expected)


class TautologyTest(unittest.TestCase):

    def test_layer(self):
        """The four Omega terms cancel on a layer."""
        for n in (1, 2, 3):
            for bias in (RETARDED, ADVANCED):
                ctx = default_context(n, bias)
                report = layer_tautology_report(
                    default_field(ctx), ctx, n, 0.5, 2.5, COARSE_SPEC)
                self.assertEqual(sorted(report.omega), [0, 1, 2, 3])
                self.assertLessEqual(report.residual,
                                     1e-6 * term_scale(report))

    def test_layer_one_dimension(self):
        """In 1-d the layer sum vanishes to 1e-8 absolute."""
        ctx = default_context(1, ADVANCED)
        residual = layer_tautology_residual(
            default_field(ctx), ctx, 1, 0.25, 4.0, COARSE_SPEC)
        self.assertLessEqual(residual, 1e-8)

    def test_symmetric(self):
        """Omega^(3)(psi, eta) equals Omega^(0) + Omega^(1) + Omega^(3)."""
        for n in (1, 2, 3):
            for bias in (RETARDED, ADVANCED):
                ctx = default_context(n, bias)
                report = symmetric_tautology_report(
                    default_field(ctx), ctx, n, 0.5, 2.5, COARSE_SPEC)
                scale = (term_scale(report) +
                         abs(report.surface_terms["omega3_psi_eta"]))
                self.assertLessEqual(report.residual, 1e-6 * scale)

    def test_constant(self):
        """Both tautologies hold exactly for a constant field."""
        ctx = default_context(2)
        field = ConstantField(3.0, 2)
        self.assertEqual(layer_tautology_residual(
            field, ctx, 2, 0.5, 2.5, COARSE_SPEC), 0.0)
        self.assertLess(symmetric_tautology_residual(
            field, ctx, 2, 0.5, 2.5, COARSE_SPEC), 1e-14)

    def test_bad_layer(self):
        """The tautologies need 0 < r1 < r2."""
        ctx = default_context(2)
        with self.assertRaises(DomainError):
            layer_tautology_residual(
                default_field(ctx), ctx, 2, 2.0, 1.0, COARSE_SPEC)
        with self.assertRaises(DomainError):
            symmetric_tautology_residual(
                default_field(ctx), ctx, 2, 0.0, 1.0, COARSE_SPEC)


class BallSidfTest(unittest.TestCase):

    def test_gaussian(self):
        """The ball formula holds for every radius."""
        for n in (1, 2, 3):
            ctx = default_context(n)
            field = default_field(ctx)
            psi = evaluate(field, VALUE, (0.0, numpy.zeros(n)))
            for r2 in (2.0, 3.0, 4.0):
                report = ball_sidf_report(
                    field, ctx, n, r2, COARSE_SPEC, refine=False)
                self.assertEqual(sorted(report.omega), [0, 1, 3])
                self.assertLessEqual(abs(report.residual),
                                     1e-5 * abs(psi) + 1e-8)
                self.assertIsNone(report.refinement_delta)

    def test_one_dimension(self):
        """In 1-d the ball formula holds to 1e-8 at r2 = 6."""
        ctx = default_context(1)
        report = ball_sidf_report(
            default_field(ctx), ctx, 1, 6.0, COARSE_SPEC, refine=False)
        self.assertLessEqual(abs(report.residual), 1e-8)

    def test_refine(self):
        """With refine the change under doubled orders is reported."""
        ctx = default_context(2, ADVANCED)
        report = ball_sidf_report(
            default_field(ctx), ctx, 2, 3.0, COARSE_SPEC)
        self.assertIsNotNone(report.refinement_delta)
        self.assertLessEqual(report.refinement_delta, 1e-5)

    def test_constant(self):
        """For a constant field psi(t0, x*) and M(r2) cancel."""
        ctx = default_context(3)
        report = ball_sidf_report(
            ConstantField(2.0, 3), ctx, 3, 2.0, COARSE_SPEC, refine=False)
        self.assertAlmostEqual(report.residual, 0.0, places=14)
        self.assertEqual(report.lhs_value, 2.0)

    def test_bad_radius(self):
        """The ball needs a positive radius."""
        ctx = default_context(2)
        with self.assertRaises(DomainError):
            ball_sidf_report(default_field(ctx), ctx, 2, 0.0, COARSE_SPEC)


class BoundaryFreeSidfTest(unittest.TestCase):

    def test_gaussian(self):
        """psi(t0, x*) + Omega^(0) + Omega^(1) vanishes over all of space."""
        for n in (1, 2, 3):
            for bias in (RETARDED, ADVANCED):
                ctx = default_context(n, bias)
                report = boundary_free_sidf(
                    default_field(ctx), ctx, n, COARSE_SPEC, refine=False)
                self.assertLessEqual(
                    abs(report.residual),
                    1e-3 * max(abs(report.lhs_value), 0.01))

    def test_three_dimensions(self):
        """At n=3 psi(t0, x*) is minus Omega^(0) and Omega^(1) is zero."""
        ctx = default_context(3)
        report = boundary_free_sidf(
            default_field(ctx), ctx, 3, COARSE_SPEC, refine=False)
        self.assertEqual(report.omega[1], 0.0)
        self.assertAlmostEqual(
            report.lhs_value / -report.omega[0], 1.0, delta=1e-4)

    def test_boundary_witness(self):
        """The surface terms at the truncation radius are negligible."""
        ctx = default_context(2)
        report = boundary_free_sidf(
            default_field(ctx), ctx, 2, COARSE_SPEC, refine=False)
        self.assertLess(abs(report.surface_terms["eta_psi_rmax"]), 1e-12)
        self.assertLess(abs(report.surface_terms["psi_eta_rmax"]), 1e-12)

    def test_zero(self):
        """The zero field gives a zero residual."""
        ctx = default_context(2)
        report = boundary_free_sidf(ZeroField(2), ctx, 2, COARSE_SPEC)
        self.assertEqual(report.residual, 0.0)
        self.assertEqual(report.refinement_delta, 0.0)

    def test_no_envelope(self):
        """A field without a decaying envelope is refused."""
        ctx = default_context(2)
        with self.assertRaises(PreconditionError):
            boundary_free_sidf(ConstantField(1.0, 2), ctx, 2, COARSE_SPEC)


class SidfReportTest(unittest.TestCase):

    def setUp(self):
        super(SidfReportTest, self).setUp()
        ctx = default_context(2)
        self.report = ball_sidf_report(
            default_field(ctx), ctx, 2, 2.0, COARSE_SPEC, refine=False)

    def test_recombined(self):
        """The stored residual is the recombination of the stored terms."""
        self.assertEqual(self.report.recombined_residual(),
                         self.report.residual)

    def test_to_dict(self):
        """to_dict() flattens the Omega terms and adds the wall time."""
        data = self.report.to_dict(wall_time=1.5)
        self.assertEqual(data["theorem"], "ball")
        self.assertEqual(data["lambda"], -1)
        self.assertEqual(data["x_star"], [0.0, 0.0])
        self.assertEqual(data["omega_0"], self.report.omega[0])
        self.assertNotIn("omega_2", data)
        self.assertNotIn("raw_value", data)
        self.assertEqual(data["wall_time_seconds"], 1.5)

    def test_unknown_theorem(self):
        """SidfReport() rejects unknown theorem names."""
        with self.assertRaises(DomainError):
            SidfReport("lemma", default_context(1), 0.0, {}, {})


class APosterioriTest(unittest.TestCase):

    def test_recover_source(self):
        """box* of the reconstructed psi returns -f at n=3."""
        ctx = default_context(3)
        field = default_field(ctx)
        report = aposteriori_report(
            "recover_f_3d", field, ctx, None, COARSE_SPEC)
        f = report.lhs_value
        self.assertLessEqual(report.residual, 0.05 * abs(f))
        self.assertEqual(report.surface_terms["reference"], -f)

    def test_omega1_box(self):
        """box* Omega^(1) is 2 psi_tt(t0, x*) at n=1."""
        ctx = default_context(1)
        residual = aposteriori_residual(
            "omega1_box_1d", default_field(ctx), ctx, 1e-3, COARSE_SPEC)
        self.assertLessEqual(residual, 1e-3)

    def test_omega0_box(self):
        """box* Omega^(0) is f plus the dispersive time derivative at n=1."""
        for bias in (RETARDED, ADVANCED):
            ctx = default_context(1, bias)
            residual = aposteriori_residual(
                "omega0_box_1d", default_field(ctx), ctx, 1e-3, COARSE_SPEC)
            self.assertLessEqual(residual, 1e-3)

    def test_zero_field(self):
        """Every kind gives zero for the zero field."""
        for kind, n in (("recover_f_3d", 3), ("omega1_box_1d", 1),
                        ("omega0_box_1d", 1)):
            ctx = default_context(n)
            self.assertEqual(
                aposteriori_residual(kind, ZeroField(n), ctx, None,
                                     COARSE_SPEC), 0.0)

    def test_raw_value(self):
        """The report keeps the raw box* value."""
        ctx = default_context(1)
        report = aposteriori_report(
            "omega1_box_1d", default_field(ctx), ctx, None, COARSE_SPEC)
        self.assertEqual(report.to_dict()["raw_value"], report.raw_value)
        self.assertEqual(report.residual, report.recombined_residual())

    def test_bad_kind(self):
        """Unknown kinds, wrong dimensions and bad steps are refused."""
        ctx = default_context(2)
        field = default_field(ctx)
        with self.assertRaises(DomainError):
            aposteriori_residual("full", field, ctx, None, COARSE_SPEC)
        with self.assertRaises(DomainError):
            aposteriori_residual("omega1_box_1d", field, ctx, None,
                                 COARSE_SPEC)
        with self.assertRaises(DomainError):
            aposteriori_residual("recover_f_3d", field, ctx, 0.0,
                                 COARSE_SPEC)

    def test_work_budget(self):
        """The stencil's projected work is checked up front."""
        ctx = default_context(3)
        field = CountingField(default_field(ctx))
        with self.assertRaises(WorkBudgetError):
            aposteriori_residual("recover_f_3d", field, ctx, None,
                                 COARSE_SPEC.replace(work_budget=1e6))
        self.assertEqual(field.calls, [])
