"""
Tests for resource constraints.
"""
import ddt
import numpy as np
import pytest
from django.test import SimpleTestCase
from scipy import integrate

from category_geometry.apps.allocate.constraints import (
    Entropic,
    GeneralConstraint,
    PowerLaw,
    Tabulated,
    constraint_from_dict,
)
from category_geometry.apps.allocate.exceptions import InvalidConstraint, NoRoot
from category_geometry.apps.allocate.tests.factories import TWO_BRANCH_G, TWO_BRANCH_U, two_branch_constraint


@ddt.ddt
class ConstraintTests(SimpleTestCase):

    @ddt.data(0.5, 1.0, 3.0)
    def test_power_law_solve_inverts_the_curve(self, alpha):
        constraint = PowerLaw(alpha)
        targets = np.array([0.01, 0.7, 12.0])
        np.testing.assert_allclose(constraint.curve(constraint.solve(targets)), targets, rtol=1e-12)

    def test_entropic_from_noise(self):
        assert Entropic.from_noise(2.0, 0.5).beta == pytest.approx(8.0)
        assert Entropic(4.0).multiplier == pytest.approx(0.125)

    @ddt.data(PowerLaw, Entropic)
    def test_nonpositive_parameters(self, kind):
        with self.assertRaises(InvalidConstraint):
            kind(0.0)

    def test_response_curve_matches_its_knots(self):
        constraint = two_branch_constraint()
        np.testing.assert_allclose(constraint.curve(np.array(TWO_BRANCH_U)), TWO_BRANCH_G, rtol=1e-12)

    def test_response_curve_psi_integrates_the_derivative(self):
        constraint = two_branch_constraint()
        for u in (0.5, 1.7, 2.4, 8.0):
            breaks = [knot for knot in TWO_BRANCH_U[1:] if knot < u] or None
            expected, _ = integrate.quad(lambda s: float(constraint.dpsi(s)), 0.1, u, points=breaks,
                                         epsabs=1e-13, epsrel=1e-12)
            assert float(constraint.psi(u)) == pytest.approx(expected, rel=1e-9)

    def test_stable_roots_of_the_two_branch_curve(self):
        constraint = two_branch_constraint()
        assert [branch for _, branch in constraint.stable_roots(0.3)] == [0]
        roots = constraint.stable_roots(0.75)
        assert [branch for _, branch in roots] == [0, 1]
        assert roots[0][0] < 1.0 < 2.0 < roots[1][0] < 3.0
        assert [branch for _, branch in constraint.stable_roots(1.2)] == [1]

    def test_no_root_above_the_curve(self):
        with self.assertRaises(NoRoot):
            two_branch_constraint().stable_roots(25.0)

    def test_tabulated_log_is_exact(self):
        knots = np.geomspace(1e-3, 1e3, 61)
        constraint = Tabulated(knots, np.log(knots))
        u = np.array([2e-3, 0.37, 5.0, 640.0])
        np.testing.assert_allclose(constraint.psi(u), np.log(u), atol=1e-12)
        np.testing.assert_allclose(constraint.curve(u), u, rtol=1e-10)

    def test_tabulated_must_be_monotone(self):
        with self.assertRaises(InvalidConstraint):
            Tabulated([1.0, 2.0, 3.0], [0.0, 1.0, 0.5])
        with self.assertRaises(InvalidConstraint):
            Tabulated([0.0, 2.0], [0.0, 1.0])

    def test_general_domain(self):
        with self.assertRaises(InvalidConstraint):
            GeneralConstraint(np.log, np.reciprocal, (0.0, 1.0))

    @ddt.data(
        {'type': 'power_law', 'alpha': 2},
        {'type': 'entropic', 'beta': 3.0},
        {'type': 'tabulated', 'u': [1.0, 2.0], 'psi': [0.0, 1.0]},
        {'type': 'response_curve', 'u': list(TWO_BRANCH_U), 'g': list(TWO_BRANCH_G)},
    )
    def test_from_dict(self, data):
        assert constraint_from_dict(data).to_dict()['type'] == data['type']

    @ddt.data({'type': 'exponential'}, {'type': 'power_law'})
    def test_invalid_dicts(self, data):
        with self.assertRaises(InvalidConstraint):
            constraint_from_dict(data)
